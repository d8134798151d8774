#pragma once

#include <cstdint>
#include <string_view>

namespace oce {

/// 64-bit FNV-1a over the eight little-endian bytes of `master_seed`
/// followed by the bytes of `sample_id`.
constexpr std::uint64_t derive_sample_seed(std::uint64_t master_seed, std::string_view sample_id) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    constexpr std::uint64_t prime = 0x100000001b3ull;
    for (int i = 0; i < 8; ++i) {
        h ^= (master_seed >> (8 * i)) & 0xFFu;
        h *= prime;
    }
    for (char c : sample_id) {
        h ^= static_cast<unsigned char>(c);
        h *= prime;
    }
    return h;
}

} // namespace oce
