#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "fermigns/field.hpp"

namespace fermigns {

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t value);
/// Hash of the sample bytes of a field, as 16 hex digits.
std::string content_hash(const Field& f);

/// Binary layout: 64-byte header (magic "FGNSFLD1", u32 version, u32 tag,
/// u64 n, f64 L, f64 center[3], u64 reserved) then n^3 complex doubles,
/// little-endian, flat index (ix * n + iy) * n + iz. A sidecar
/// `<path>.json` records grid, units, tag, provenance and the content hash.
void write_field(const std::filesystem::path& path, const Field& f,
                 const std::string& provenance = "", const std::string& units = "");

/// Reads a field written by write_field; the sidecar is optional.
Field read_field(const std::filesystem::path& path);

}  // namespace fermigns
