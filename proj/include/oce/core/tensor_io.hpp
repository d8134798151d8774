#pragma once

// Tensor container format:
//   bytes 0..7   magic "OCETNSR1"
//   bytes 8..15  little-endian u64 length N of the JSON header
//   N bytes      UTF-8 JSON {"dtype":"f32","shape":[...],"axes":[...],"meta":{...}}
//   payload      product(shape) little-endian IEEE-754 binary32 values

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "oce/core/error.hpp"
#include "oce/core/tensor.hpp"

namespace oce {

inline constexpr std::array<char, 8> kTensorMagic = {'O', 'C', 'E', 'T', 'N', 'S', 'R', '1'};

struct TensorFile {
    Tensor tensor;
    nlohmann::json meta = nlohmann::json::object();
};

namespace detail {

inline void put_u64_le(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline std::uint64_t get_u64_le(const unsigned char* p)
{
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | p[i];
    return v;
}

inline std::uint32_t to_le(std::uint32_t v)
{
    if constexpr (std::endian::native == std::endian::big)
        return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
    return v;
}

inline std::string encode_tensor(std::span<const std::size_t> shape, const std::string& axes,
                                 std::span<const float> data, const nlohmann::json& meta)
{
    if (shape.empty())
        throw Error(Errc::ShapeMismatch, "tensor must have at least one axis");
    std::size_t count = 1;
    for (auto e : shape) {
        if (e == 0)
            throw Error(Errc::ShapeMismatch, "zero extent in shape");
        count *= e;
    }
    if (axes.size() != shape.size())
        throw Error(Errc::ShapeMismatch, "axis label count differs from rank");
    if (count != data.size())
        throw Error(Errc::ShapeMismatch, "payload length does not match shape product");

    nlohmann::json header;
    header["dtype"] = "f32";
    header["shape"] = std::vector<std::size_t>(shape.begin(), shape.end());
    std::vector<std::string> labels;
    for (char a : axes)
        labels.emplace_back(1, a);
    header["axes"] = labels;
    header["meta"] = meta.is_null() ? nlohmann::json::object() : meta;
    const std::string text = header.dump();

    std::string out(kTensorMagic.begin(), kTensorMagic.end());
    put_u64_le(out, text.size());
    out += text;
    const std::size_t payload_at = out.size();
    out.resize(payload_at + 4 * data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::uint32_t bits = to_le(std::bit_cast<std::uint32_t>(data[i]));
        std::memcpy(out.data() + payload_at + 4 * i, &bits, 4);
    }
    return out;
}

} // namespace detail

/// Decodes a container held in memory.
inline TensorFile decode_tensor(std::span<const unsigned char> bytes)
{
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kTensorMagic.data(), 8) != 0)
        throw Error(Errc::BadMagic, "missing OCETNSR1 magic");
    if (bytes.size() < 16)
        throw Error(Errc::TruncatedFile, "header length field truncated");
    const std::uint64_t header_len = detail::get_u64_le(bytes.data() + 8);
    if (bytes.size() - 16 < header_len)
        throw Error(Errc::TruncatedFile, "JSON header truncated");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(header_len));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::TruncatedFile, std::string("unparseable header: ") + e.what());
    }
    if (header.value("dtype", std::string{}) != "f32")
        throw Error(Errc::ShapeMismatch, "unsupported dtype");
    const auto shape = header.at("shape").get<std::vector<std::size_t>>();
    std::string axes;
    for (const auto& a : header.at("axes"))
        axes += a.get<std::string>();

    std::size_t count = 1;
    for (auto e : shape) {
        if (e == 0)
            throw Error(Errc::ShapeMismatch, "zero extent in stored shape");
        count *= e;
    }
    const std::size_t payload = bytes.size() - 16 - header_len;
    if (payload < 4 * count)
        throw Error(Errc::TruncatedFile, "payload has " + std::to_string(payload) + " bytes, expected " +
                                             std::to_string(4 * count));
    if (payload != 4 * count)
        throw Error(Errc::ShapeMismatch, "payload length differs from shape product x 4");

    std::vector<float> data(count);
    const unsigned char* p = bytes.data() + 16 + header_len;
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t bits;
        std::memcpy(&bits, p + 4 * i, 4);
        data[i] = std::bit_cast<float>(detail::to_le(bits));
    }
    TensorFile out{Tensor(shape, axes, std::move(data)), header.value("meta", nlohmann::json::object())};
    return out;
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os)
        throw Error(Errc::IoError, "write failed for " + path.string());
}

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(Errc::IoError, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline void write_tensor(const std::filesystem::path& path, std::span<const std::size_t> shape,
                         const std::string& axes, std::span<const float> data,
                         const nlohmann::json& meta = nlohmann::json::object())
{
    write_bytes(path, detail::encode_tensor(shape, axes, data, meta));
}

inline void write_tensor(const std::filesystem::path& path, const Tensor& t,
                         const nlohmann::json& meta = nlohmann::json::object())
{
    write_tensor(path, t.shape(), t.axes(), t.values(), meta);
}

inline TensorFile read_tensor_file(const std::filesystem::path& path)
{
    const auto bytes = read_bytes(path);
    return decode_tensor(bytes);
}

inline Tensor read_tensor(const std::filesystem::path& path) { return read_tensor_file(path).tensor; }

} // namespace oce
