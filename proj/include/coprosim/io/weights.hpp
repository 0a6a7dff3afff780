#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "coprosim/errors.hpp"
#include "coprosim/half.hpp"
#include "coprosim/kernels/cnn.hpp"

namespace coprosim {

// CNN weight storage: a flat little-endian 16-bit float file plus a JSON
// shape manifest. Tensors are concatenated in network order.

namespace detail {

struct TensorRef {
    const char* name;
    std::vector<Half> CnnModel::* member;
    std::vector<int> shape;
};

inline const std::vector<TensorRef>& cnn_tensor_layout() {
    static const std::vector<TensorRef> layout = {
        {"conv1_w", &CnnModel::conv1_w, {8, 3, 3, 3}},
        {"conv1_b", &CnnModel::conv1_b, {8}},
        {"conv2_w", &CnnModel::conv2_w, {8, 8, 3, 3}},
        {"conv2_b", &CnnModel::conv2_b, {8}},
        {"fc1_w", &CnnModel::fc1_w, {64, 2048}},
        {"fc1_b", &CnnModel::fc1_b, {64}},
        {"fc2_w", &CnnModel::fc2_w, {1, 64}},
        {"fc2_b", &CnnModel::fc2_b, {1}},
    };
    return layout;
}

}  // namespace detail

/// Writes `<path>` (flat fp16, little-endian) and `<path>.json` (manifest).
inline void write_cnn_weights(const std::filesystem::path& path, const CnnModel& model) {
    model.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    nlohmann::json manifest;
    manifest["format"] = "f16-le";
    manifest["tensors"] = nlohmann::json::array();
    std::size_t offset = 0;
    for (const auto& t : detail::cnn_tensor_layout()) {
        const auto& values = model.*(t.member);
        for (Half h : values) {
            const std::uint16_t bits = h.bits();
            out.put(static_cast<char>(bits & 0xFF));
            out.put(static_cast<char>((bits >> 8) & 0xFF));
        }
        manifest["tensors"].push_back(
            {{"name", t.name}, {"shape", t.shape}, {"offset", offset}, {"count", values.size()}});
        offset += values.size();
    }
    manifest["total_params"] = offset;
    if (!out) throw IoError("write failed: " + path.string());
    std::ofstream mout(path.string() + ".json");
    if (!mout) throw IoError("cannot open for writing: " + path.string() + ".json");
    mout << manifest.dump(2) << '\n';
}

inline CnnModel read_cnn_weights(const std::filesystem::path& path) {
    std::ifstream min(path.string() + ".json");
    if (!min) throw IoError("cannot open manifest: " + path.string() + ".json");
    nlohmann::json manifest;
    try {
        min >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed manifest: " + std::string(e.what()));
    }
    if (manifest.value("format", "") != "f16-le")
        throw IoError("unsupported weight format in manifest: " + path.string());

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    CnnModel model;
    for (const auto& t : detail::cnn_tensor_layout()) {
        // find the manifest entry and sanity-check the tensor count
        std::size_t count = 0;
        bool found = false;
        for (const auto& entry : manifest["tensors"]) {
            if (entry.value("name", "") == t.name) {
                count = entry.value("count", std::size_t{0});
                found = true;
                break;
            }
        }
        if (!found) throw IoError("manifest missing tensor " + std::string(t.name));
        auto& values = model.*(t.member);
        values.resize(count);
        for (auto& h : values) {
            const int b0 = in.get();
            const int b1 = in.get();
            if (b0 == EOF || b1 == EOF) throw IoError("truncated weight file: " + path.string());
            h = Half::from_bits(static_cast<std::uint16_t>(b0 | (b1 << 8)));
        }
    }
    model.validate();
    return model;
}

}  // namespace coprosim
