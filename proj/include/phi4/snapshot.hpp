#pragma once

#include <string>

#include "phi4/spectral_field.hpp"

namespace phi4 {

/// Binary field snapshot:
///   magic "PHI4", version u16, N u32, M u32, then M*M little-endian
///   float64 grid values, row-major.
struct Snapshot {
  int cutoff = 0;
  GridField grid;
};

void write_snapshot(const std::string& path, const SpectralField& field, int grid_size);
Snapshot read_snapshot(const std::string& path);

}  // namespace phi4
