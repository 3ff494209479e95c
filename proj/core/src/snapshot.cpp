#include "wmhd/snapshot.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

namespace wmhd {

void write_field_snapshot(const std::filesystem::path& path, const SpectralField& u, double t) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path.string());
  char head[96];
  const int len = std::snprintf(head, sizeof head, "WMHD1 %d %d %.17g\n", u.lattice.cutoff,
                                u.components, t);
  os.write(head, len);
  os.write(reinterpret_cast<const char*>(u.coeff.data()),
           static_cast<std::streamsize>(u.coeff.size() * sizeof(cplx)));
  if (!os) throw std::runtime_error("snapshot: write failed on " + path.string());
}

std::pair<SpectralField, double> read_field_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path.string());
  std::string head;
  if (!std::getline(is, head)) throw std::runtime_error("snapshot: missing header in " + path.string());
  int cutoff = 0, components = 0;
  double t = 0.0;
  if (std::sscanf(head.c_str(), "WMHD1 %d %d %lg", &cutoff, &components, &t) != 3 ||
      head.rfind("WMHD1 ", 0) != 0)
    throw std::runtime_error("snapshot: bad header in " + path.string());
  SpectralField u(LatticeSpec(cutoff), components);
  const std::streamsize bytes = static_cast<std::streamsize>(u.coeff.size() * sizeof(cplx));
  is.read(reinterpret_cast<char*>(u.coeff.data()), bytes);
  if (is.gcount() != bytes)
    throw std::runtime_error("snapshot: truncated payload in " + path.string());
  return {std::move(u), t};
}

namespace {
std::filesystem::path with_tag(const std::filesystem::path& stem, const char* tag) {
  std::filesystem::path p = stem;
  p += tag;
  return p;
}
}  // namespace

void write_state_snapshot(const std::filesystem::path& stem, const StateVector& s) {
  write_field_snapshot(with_tag(stem, ".v.wmhd"), s.v, s.t);
  write_field_snapshot(with_tag(stem, ".b.wmhd"), s.B, s.t);
  write_field_snapshot(with_tag(stem, ".etil.wmhd"), s.Etil, s.t);
  write_field_snapshot(with_tag(stem, ".ebar.wmhd"), s.Ebar, s.t);
}

StateVector read_state_snapshot(const std::filesystem::path& stem) {
  auto [v, tv] = read_field_snapshot(with_tag(stem, ".v.wmhd"));
  auto [B, tb] = read_field_snapshot(with_tag(stem, ".b.wmhd"));
  auto [Etil, te] = read_field_snapshot(with_tag(stem, ".etil.wmhd"));
  auto [Ebar, tq] = read_field_snapshot(with_tag(stem, ".ebar.wmhd"));
  if (!(v.lattice == B.lattice) || !(v.lattice == Etil.lattice) || !(v.lattice == Ebar.lattice))
    throw std::runtime_error("snapshot: state parts disagree on the lattice");
  if (tv != tb || tv != te || tv != tq)
    throw std::runtime_error("snapshot: state parts disagree on the time stamp");
  StateVector s(v.lattice);
  s.t = tv;
  s.v = std::move(v);
  s.B = std::move(B);
  s.Etil = std::move(Etil);
  s.Ebar = std::move(Ebar);
  return s;
}

}  // namespace wmhd
