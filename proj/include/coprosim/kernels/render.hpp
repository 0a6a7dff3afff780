#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "coprosim/errors.hpp"
#include "coprosim/frame.hpp"
#include "coprosim/kernels/partition.hpp"

namespace coprosim {

// Depth rendering by rasterization: a triangle mesh posed by a 6D vector is
// projected through a pinhole camera; each covered pixel receives the
// Euclidean distance from the camera to the nearest surface point along its
// ray, Z-buffered per pixel and quantized linearly over [near, far] into 16
// bits. Pixels hitting nothing read 65535.

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};  // row-major

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[i * 3 + j] = m[i * 3] * o.m[j] + m[i * 3 + 1] * o.m[3 + j] +
                                 m[i * 3 + 2] * o.m[6 + j];
        return r;
    }
};

/// Model-to-camera transform as translation + Euler angles in radians,
/// intrinsic X-Y-Z order: p_cam = Rx(rx)·Ry(ry)·Rz(rz)·p_model + t.
struct Pose6D {
    Vec3 translation;
    Vec3 rotation_xyz;

    Mat3 rotation() const {
        const double cx = std::cos(rotation_xyz.x), sx = std::sin(rotation_xyz.x);
        const double cy = std::cos(rotation_xyz.y), sy = std::sin(rotation_xyz.y);
        const double cz = std::cos(rotation_xyz.z), sz = std::sin(rotation_xyz.z);
        Mat3 rx{{1, 0, 0, 0, cx, -sx, 0, sx, cx}};
        Mat3 ry{{cy, 0, sy, 0, 1, 0, -sy, 0, cy}};
        Mat3 rz{{cz, -sz, 0, sz, cz, 0, 0, 0, 1}};
        return rx * ry * rz;
    }

    Vec3 apply(const Vec3& p) const { return rotation() * p + translation; }
};

/// Pinhole camera: pixel (u, v) sees camera-space direction
/// ((u - cx)/fx, (v - cy)/fy, 1).
struct CameraIntrinsics {
    double fx = 0, fy = 0, cx = 0, cy = 0;
};

struct Triangle {
    std::array<std::uint32_t, 3> v{0, 0, 0};
};

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;

    void validate() const {
        for (const Triangle& t : triangles)
            for (std::uint32_t i : t.v)
                if (i >= vertices.size()) throw GeometryError("triangle index out of range");
    }

    /// Drops zero-area triangles; returns how many were removed.
    std::size_t remove_degenerate() {
        validate();
        const std::size_t before = triangles.size();
        std::erase_if(triangles, [&](const Triangle& t) {
            const Vec3 n = cross(vertices[t.v[1]] - vertices[t.v[0]],
                                 vertices[t.v[2]] - vertices[t.v[0]]);
            return dot(n, n) == 0.0;
        });
        return before - triangles.size();
    }
};

/// Linear 16-bit depth quantization over [near, far]; 65535 is reserved for
/// "no surface hit", so in-range distances map to 0..65534.
struct DepthRange {
    double near = 0.1;
    double far = 100.0;
};

inline constexpr std::uint16_t kDepthNoHit = 65535;

inline std::uint16_t quantize_depth(double distance, const DepthRange& range) {
    const double t = (distance - range.near) / (range.far - range.near);
    const long q = std::lround(t * 65534.0);
    return static_cast<std::uint16_t>(std::clamp(q, 0l, 65534l));
}

namespace detail {

inline double edge2d(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

}  // namespace detail

/// Rasterizes the mesh into a 16 bpp depth frame: triangle projection,
/// bounding-box traversal of each band's rows, plane-intersection distance,
/// minimum-distance Z-buffer. Triangles with any vertex at or behind the
/// camera plane are skipped (no clipping; pose the mesh in front of the
/// camera). An empty mesh renders all-65535.
inline Frame render_depth(const TriangleMesh& mesh, const Pose6D& pose,
                          const CameraIntrinsics& camera, std::uint32_t width,
                          std::uint32_t height, const DepthRange& range,
                          const BandPartition& bands) {
    mesh.validate();
    if (width == 0 || height == 0) throw GeometryError("render target must be at least 1x1");
    if (bands.image_height != height)
        throw ConfigError("band partition does not cover the render height");

    // Transform and project once.
    struct ProjectedTriangle {
        Vec3 p0, p1, p2;       // camera space
        double u0, v0, u1, v1, u2, v2;  // screen space
        Vec3 n;                // plane normal
        double n_dot_p0;
        double area;           // signed screen area
    };
    std::vector<ProjectedTriangle> tris;
    tris.reserve(mesh.triangles.size());
    const Mat3 rot = pose.rotation();
    for (const Triangle& t : mesh.triangles) {
        ProjectedTriangle pt;
        pt.p0 = rot * mesh.vertices[t.v[0]] + pose.translation;
        pt.p1 = rot * mesh.vertices[t.v[1]] + pose.translation;
        pt.p2 = rot * mesh.vertices[t.v[2]] + pose.translation;
        if (pt.p0.z <= 0 || pt.p1.z <= 0 || pt.p2.z <= 0) continue;
        pt.u0 = camera.fx * pt.p0.x / pt.p0.z + camera.cx;
        pt.v0 = camera.fy * pt.p0.y / pt.p0.z + camera.cy;
        pt.u1 = camera.fx * pt.p1.x / pt.p1.z + camera.cx;
        pt.v1 = camera.fy * pt.p1.y / pt.p1.z + camera.cy;
        pt.u2 = camera.fx * pt.p2.x / pt.p2.z + camera.cx;
        pt.v2 = camera.fy * pt.p2.y / pt.p2.z + camera.cy;
        pt.n = cross(pt.p1 - pt.p0, pt.p2 - pt.p0);
        pt.n_dot_p0 = dot(pt.n, pt.p0);
        pt.area = detail::edge2d(pt.u0, pt.v0, pt.u1, pt.v1, pt.u2, pt.v2);
        if (pt.area == 0) continue;  // edge-on
        tris.push_back(pt);
    }

    std::vector<double> zbuffer(static_cast<std::size_t>(width) * height,
                                std::numeric_limits<double>::infinity());
    for (std::uint32_t band : band_execution_order(bands)) {
        const std::uint32_t band_y0 = bands.band_begin[band];
        const std::uint32_t band_y1 = band_y0 + bands.band_height[band];
        for (const ProjectedTriangle& t : tris) {
            const double min_u = std::min({t.u0, t.u1, t.u2});
            const double max_u = std::max({t.u0, t.u1, t.u2});
            const double min_v = std::min({t.v0, t.v1, t.v2});
            const double max_v = std::max({t.v0, t.v1, t.v2});
            // Pixel centers sit at integer + 0.5.
            const std::int64_t x0 = std::max<std::int64_t>(0, std::llround(std::ceil(min_u - 0.5)));
            const std::int64_t x1 =
                std::min<std::int64_t>(width - 1, std::llround(std::floor(max_u - 0.5)));
            const std::int64_t y0 =
                std::max<std::int64_t>(band_y0, std::llround(std::ceil(min_v - 0.5)));
            const std::int64_t y1 =
                std::min<std::int64_t>(band_y1 - 1, std::llround(std::floor(max_v - 0.5)));
            for (std::int64_t py = y0; py <= y1; ++py) {
                for (std::int64_t px = x0; px <= x1; ++px) {
                    const double u = static_cast<double>(px) + 0.5;
                    const double v = static_cast<double>(py) + 0.5;
                    const double e0 = detail::edge2d(t.u0, t.v0, t.u1, t.v1, u, v);
                    const double e1 = detail::edge2d(t.u1, t.v1, t.u2, t.v2, u, v);
                    const double e2 = detail::edge2d(t.u2, t.v2, t.u0, t.v0, u, v);
                    const bool inside = t.area > 0 ? (e0 >= 0 && e1 >= 0 && e2 >= 0)
                                                   : (e0 <= 0 && e1 <= 0 && e2 <= 0);
                    if (!inside) continue;
                    const Vec3 dir{(u - camera.cx) / camera.fx, (v - camera.cy) / camera.fy, 1.0};
                    const double denom = dot(t.n, dir);
                    if (denom == 0) continue;
                    const double s = t.n_dot_p0 / denom;
                    if (s <= 0) continue;
                    const double distance = s * norm(dir);
                    double& cell = zbuffer[static_cast<std::size_t>(py) * width + px];
                    cell = std::min(cell, distance);
                }
            }
        }
    }

    Frame out(width, height, PixelDepth::Bpp16);
    for (std::size_t i = 0; i < zbuffer.size(); ++i)
        out.pixels[i] = std::isinf(zbuffer[i]) ? kDepthNoHit : quantize_depth(zbuffer[i], range);
    return out;
}

/// Default dynamic band assignment, as the rendering benchmark schedules it.
inline Frame render_depth(const TriangleMesh& mesh, const Pose6D& pose,
                          const CameraIntrinsics& camera, std::uint32_t width,
                          std::uint32_t height, const DepthRange& range = {}) {
    const std::uint32_t n_bands = std::min<std::uint32_t>(36, height);
    return render_depth(mesh, pose, camera, width, height, range,
                        partition_bands(height, n_bands, kDefaultWorkerCount,
                                        PartitionMode::Dynamic));
}

}  // namespace coprosim
