#pragma once

#include <filesystem>
#include <utility>

#include "wmhd/solver.hpp"

namespace wmhd {

// Field snapshot file: one text header line
//   WMHD1 <N> <c> <t>\n
// followed by the raw coefficient array as little-endian complex<double>
// (real, imag) pairs in storage order (n1 slowest, n3 fastest, component
// innermost). Assumes a little-endian host.
void write_field_snapshot(const std::filesystem::path& path, const SpectralField& u, double t);
std::pair<SpectralField, double> read_field_snapshot(const std::filesystem::path& path);

// StateVector as four snapshot files <stem>.{v,b,etil,ebar}.wmhd.
void write_state_snapshot(const std::filesystem::path& stem, const StateVector& s);
StateVector read_state_snapshot(const std::filesystem::path& stem);

}  // namespace wmhd
