#include "phi4/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace phi4 {

static_assert(std::endian::native == std::endian::little,
              "snapshot IO assumes a little-endian host");

namespace {
constexpr char kMagic[4] = {'P', 'H', 'I', '4'};
constexpr std::uint16_t kVersion = 1;
}  // namespace

void write_snapshot(const std::string& path, const SpectralField& field, int grid_size) {
  GridField g = to_grid(field, grid_size);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
  out.write(kMagic, 4);
  std::uint16_t version = kVersion;
  std::uint32_t n = static_cast<std::uint32_t>(field.cutoff());
  std::uint32_t m = static_cast<std::uint32_t>(grid_size);
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  out.write(reinterpret_cast<const char*>(g.values().data()),
            static_cast<std::streamsize>(g.values().size() * sizeof(double)));
  if (!out) throw std::runtime_error("write_snapshot: short write to " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_snapshot: bad magic in " + path);
  std::uint16_t version = 0;
  std::uint32_t n = 0, m = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  if (!in || version != kVersion)
    throw std::runtime_error("read_snapshot: unsupported version in " + path);
  Snapshot snap;
  snap.cutoff = static_cast<int>(n);
  snap.grid = GridField(static_cast<int>(m));
  in.read(reinterpret_cast<char*>(snap.grid.values().data()),
          static_cast<std::streamsize>(snap.grid.values().size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_snapshot: truncated file " + path);
  return snap;
}

}  // namespace phi4
