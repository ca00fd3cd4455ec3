#pragma once

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydronet/nn_graph.hpp"

namespace hydronet {

static_assert(std::endian::native == std::endian::little,
              "weight files are little-endian; big-endian hosts are unsupported");

inline constexpr char kWeightMagic[8] = {'N', 'N', 'W', '1', 0, 0, 0, 0};

namespace detail {

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace detail

// Weight file: 8-byte magic "NNW1\0\0\0\0", 4-byte little-endian manifest
// length, UTF-8 JSON manifest (tensor name/shape/dtype/byte offset plus the
// graph fingerprint), then the raw little-endian float32 blob.
inline void save_weights(const Network& model, const std::string& path) {
    nlohmann::json tensors = nlohmann::json::array();
    std::vector<float> blob;
    for (const auto& [name, w] : model.weights()) {
        tensors.push_back({{"name", name},
                           {"shape", w.shape},
                           {"dtype", "f32"},
                           {"offset", blob.size() * sizeof(float)}});
        for (const double v : w.data) blob.push_back(static_cast<float>(v));
    }
    const nlohmann::json manifest = {{"version", 1},
                                     {"fingerprint", detail::hex64(model.fingerprint())},
                                     {"tensors", std::move(tensors)}};
    const std::string mstr = manifest.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_weights: cannot write " + path);
    out.write(kWeightMagic, sizeof(kWeightMagic));
    const std::uint32_t mlen = static_cast<std::uint32_t>(mstr.size());
    char lenbuf[4] = {static_cast<char>(mlen & 0xff), static_cast<char>((mlen >> 8) & 0xff),
                      static_cast<char>((mlen >> 16) & 0xff), static_cast<char>((mlen >> 24) & 0xff)};
    out.write(lenbuf, 4);
    out.write(mstr.data(), static_cast<std::streamsize>(mstr.size()));
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size() * sizeof(float)));
    if (!out) throw Error("save_weights: write failed for " + path);
}

inline void load_weights(Network& model, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_weights: cannot read " + path);
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kWeightMagic, 8) != 0)
        throw Error("load_weights: bad magic in " + path);
    char lenbuf[4];
    if (!in.read(lenbuf, 4)) throw Error("load_weights: truncated header in " + path);
    const std::uint32_t mlen = static_cast<std::uint8_t>(lenbuf[0]) |
                               (static_cast<std::uint32_t>(static_cast<std::uint8_t>(lenbuf[1])) << 8) |
                               (static_cast<std::uint32_t>(static_cast<std::uint8_t>(lenbuf[2])) << 16) |
                               (static_cast<std::uint32_t>(static_cast<std::uint8_t>(lenbuf[3])) << 24);
    std::string mstr(mlen, '\0');
    if (!in.read(mstr.data(), mlen)) throw Error("load_weights: truncated manifest in " + path);
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(mstr);
    } catch (const nlohmann::json::exception& e) {
        throw Error("load_weights: malformed manifest in " + path + ": " + e.what());
    }
    if (manifest.value("version", -1) != 1)
        throw Error("load_weights: unknown manifest version in " + path);
    if (manifest.at("fingerprint").get<std::string>() != detail::hex64(model.fingerprint()))
        throw Error("load_weights: graph fingerprint mismatch in " + path);

    std::vector<char> blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (const auto& entry : manifest.at("tensors")) {
        const std::string name = entry.at("name").get<std::string>();
        auto it = model.weights().find(name);
        if (it == model.weights().end())
            throw Error("load_weights: unknown tensor '" + name + "' in " + path);
        Tensor& w = it->second;
        if (entry.at("shape").get<std::vector<std::size_t>>() != w.shape)
            throw Error("load_weights: shape mismatch for '" + name + "' in " + path);
        if (entry.at("dtype").get<std::string>() != "f32")
            throw Error("load_weights: unsupported dtype for '" + name + "' in " + path);
        const std::size_t offset = entry.at("offset").get<std::size_t>();
        if (offset + w.numel() * sizeof(float) > blob.size())
            throw Error("load_weights: truncated blob in " + path);
        const float* src = reinterpret_cast<const float*>(blob.data() + offset);
        for (std::size_t i = 0; i < w.numel(); ++i) w.data[i] = static_cast<double>(src[i]);
    }
}

}  // namespace hydronet
