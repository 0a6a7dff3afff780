#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "coprosim/errors.hpp"
#include "coprosim/kernels/render.hpp"

namespace coprosim {

// ASCII OFF mesh reader/writer. Faces with more than three vertices are
// fan-triangulated.

inline TriangleMesh read_off(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());

    auto next_token = [&in, &path]() {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw IoError("truncated OFF file: " + path.string());
    };

    if (next_token() != "OFF") throw IoError("missing OFF header: " + path.string());
    std::size_t n_vertices = 0, n_faces = 0, n_edges = 0;
    try {
        n_vertices = std::stoul(next_token());
        n_faces = std::stoul(next_token());
        n_edges = std::stoul(next_token());
        (void)n_edges;
    } catch (const std::exception&) {
        throw IoError("malformed OFF counts: " + path.string());
    }

    TriangleMesh mesh;
    mesh.vertices.reserve(n_vertices);
    for (std::size_t i = 0; i < n_vertices; ++i) {
        Vec3 v;
        try {
            v.x = std::stod(next_token());
            v.y = std::stod(next_token());
            v.z = std::stod(next_token());
        } catch (const std::exception&) {
            throw IoError("malformed OFF vertex: " + path.string());
        }
        mesh.vertices.push_back(v);
    }
    for (std::size_t i = 0; i < n_faces; ++i) {
        std::size_t n = 0;
        try {
            n = std::stoul(next_token());
        } catch (const std::exception&) {
            throw IoError("malformed OFF face: " + path.string());
        }
        if (n < 3) throw IoError("OFF face with fewer than 3 vertices: " + path.string());
        std::vector<std::uint32_t> idx(n);
        for (auto& ix : idx) {
            try {
                ix = static_cast<std::uint32_t>(std::stoul(next_token()));
            } catch (const std::exception&) {
                throw IoError("malformed OFF face index: " + path.string());
            }
        }
        for (std::size_t k = 2; k < n; ++k)
            mesh.triangles.push_back(Triangle{{idx[0], idx[k - 1], idx[k]}});
    }
    mesh.validate();
    return mesh;
}

inline void write_off(const std::filesystem::path& path, const TriangleMesh& mesh) {
    mesh.validate();
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
    std::ostringstream body;
    body.precision(17);
    for (const Vec3& v : mesh.vertices) body << v.x << ' ' << v.y << ' ' << v.z << '\n';
    for (const Triangle& t : mesh.triangles)
        body << "3 " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
    out << body.str();
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace coprosim
