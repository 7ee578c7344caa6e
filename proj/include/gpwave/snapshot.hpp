#pragma once

// Binary field snapshots.
//
// Layout (all multi-byte values little-endian):
//   offset  size  content
//   0       8     magic "GPWFIELD"
//   8       1     format version (1)
//   9       8     L    (IEEE-754 binary64)
//   17      8     nx   (uint64)
//   25      8     ell  (binary64)
//   33      8     ny   (uint64)
//   41      16*nx*ny  samples as (re, im) binary64 pairs, sample (i, j) at
//                     index i * ny + j (x-major, y fastest)

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gpwave/field.hpp"

namespace gpwave::snapshot {

inline constexpr char kMagic[8] = {'G', 'P', 'W', 'F', 'I', 'E', 'L', 'D'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 41;

std::vector<std::uint8_t> encode(const Field2D& f);
/// Throws std::runtime_error on a malformed buffer.
Field2D decode(const std::vector<std::uint8_t>& bytes);

/// Throws std::runtime_error on I/O failure.
void write(const std::filesystem::path& path, const Field2D& f);
Field2D read(const std::filesystem::path& path);

}  // namespace gpwave::snapshot
