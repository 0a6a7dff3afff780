// Regenerates the bundled CI fixtures under data/fixtures: deterministic
// small inputs, seeded CNN weights, and golden outputs produced by the
// library itself. Run from the repository root:
//
//   build/tools/gen_fixtures data/fixtures

#include <filesystem>
#include <iostream>
#include <random>

#include "coprosim/io/off.hpp"
#include "coprosim/io/pnm.hpp"
#include "coprosim/io/weights.hpp"
#include "coprosim/kernels/binning.hpp"
#include "coprosim/kernels/cnn.hpp"
#include "coprosim/kernels/convolution.hpp"
#include "coprosim/kernels/render.hpp"
#include "coprosim/scenario.hpp"

using namespace coprosim;

namespace {

Frame gradient_frame(std::uint32_t w, std::uint32_t h, std::uint64_t seed) {
    Frame f(w, h, PixelDepth::Bpp8);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> noise(0, 31);
    for (std::uint32_t y = 0; y < h; ++y)
        for (std::uint32_t x = 0; x < w; ++x)
            f.at(x, y) = ((x * 3 + y * 2) + noise(rng)) & 0xFF;
    return f;
}

RgbImage synthetic_rgb(std::uint32_t w, std::uint32_t h, std::uint64_t seed) {
    RgbImage img(w, h);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, 65535);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        img.r[i] = static_cast<std::uint16_t>(dist(rng));
        img.g[i] = static_cast<std::uint16_t>(dist(rng));
        img.b[i] = static_cast<std::uint16_t>(dist(rng));
    }
    return img;
}

// Octahedron: 6 vertices, 8 triangles, all faces visible from any side.
TriangleMesh octahedron(double radius) {
    TriangleMesh m;
    m.vertices = {{radius, 0, 0}, {-radius, 0, 0}, {0, radius, 0},
                  {0, -radius, 0}, {0, 0, radius}, {0, 0, -radius}};
    m.triangles = {{{0, 2, 4}}, {{2, 1, 4}}, {{1, 3, 4}}, {{3, 0, 4}},
                   {{2, 0, 5}}, {{1, 2, 5}}, {{3, 1, 5}}, {{0, 3, 5}}};
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path root = argc > 1 ? argv[1] : "data/fixtures";
    std::filesystem::create_directories(root);

    // binning / convolution input
    const Frame gradient = gradient_frame(64, 64, 7);
    write_pgm(root / "gradient_64.pgm", gradient);
    write_pgm(root / "golden_binning_64.pgm", average_binning(gradient));
    write_pgm(root / "golden_conv3_64.pgm", fp_convolution(gradient, ConvKernel::box(3)));

    // render input: octahedron posed 4 units down the optical axis. The
    // golden is rendered from the pose after its wire round trip, exactly
    // as run_scenario consumes it.
    write_off(root / "octahedron.off", octahedron(1.0));
    Pose6D pose;
    pose.translation = {0, 0, 4};
    pose.rotation_xyz = {0.3, 0.4, 0.1};
    const Pose6D wire_pose = frame_to_pose(pose_to_frame(pose));
    const CameraIntrinsics cam{64, 64, 32, 32};
    write_pgm(root / "golden_render_64.pgm",
              render_depth(octahedron(1.0), wire_pose, cam, 64, 64, DepthRange{0.1, 100.0}));

    // cnn input: 256x256 (a 2x2 patch grid) plus seeded weights
    const RgbImage rgb = synthetic_rgb(256, 256, 11);
    write_ppm16(root / "rgb_256.ppm", rgb);
    const CnnModel model = CnnModel::seeded(7);
    write_cnn_weights(root / "weights_seed7.f16", model);
    write_pgm(root / "golden_cnn_scores_256.pgm",
              scores_to_frame(cnn_ship_detect(rgb, model)));

    std::cout << "fixtures written to " << root.string() << "\n";
    return 0;
}
