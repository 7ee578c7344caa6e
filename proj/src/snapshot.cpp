#include "gpwave/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace gpwave::snapshot {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot encoding assumes a little-endian host");

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get(const std::vector<std::uint8_t>& in, std::size_t offset) {
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode(const Field2D& f) {
  const Grid& g = f.grid();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + 16 * g.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kVersion);
  put<double>(out, g.L);
  put<std::uint64_t>(out, g.nx);
  put<double>(out, g.ell);
  put<std::uint64_t>(out, g.ny);
  for (const Complex& v : f.values()) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  return out;
}

Field2D decode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderSize || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw std::runtime_error("snapshot: bad magic");
  }
  if (bytes[8] != kVersion) throw std::runtime_error("snapshot: unsupported version");
  const double L = get<double>(bytes, 9);
  const auto nx = get<std::uint64_t>(bytes, 17);
  const double ell = get<double>(bytes, 25);
  const auto ny = get<std::uint64_t>(bytes, 33);
  if (nx < 2 || ny < 1 || bytes.size() != kHeaderSize + 16 * nx * ny) {
    throw std::runtime_error("snapshot: truncated or inconsistent payload");
  }
  Grid grid{L, static_cast<std::size_t>(nx), ell, static_cast<std::size_t>(ny)};
  std::vector<Complex> values(grid.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t at = kHeaderSize + 16 * k;
    values[k] = Complex(get<double>(bytes, at), get<double>(bytes, at + 8));
  }
  return Field2D(grid, std::move(values));
}

void write(const std::filesystem::path& path, const Field2D& f) {
  const auto bytes = encode(f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("snapshot: cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("snapshot: write failed for " + path.string());
}

Field2D read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("snapshot: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode(bytes);
}

}  // namespace gpwave::snapshot
