#include "wmhd/calculus.hpp"

namespace wmhd {

namespace {
constexpr cplx I{0.0, 1.0};
}

SpectralField divergence(const SpectralField& u) {
  require_components(u, 3, "divergence");
  SpectralField out(u.lattice, 1);
  const int N = u.lattice.cutoff;
  std::size_t idx = 0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3, ++idx) {
        const cplx* a = &u.coeff[idx * 3];
        out.coeff[idx] = I * (double(n1) * a[0] + double(n2) * a[1] + double(n3) * a[2]);
      }
  return out;
}

SpectralField gradient(const SpectralField& p) {
  require_components(p, 1, "gradient");
  SpectralField out(p.lattice, 3);
  const int N = p.lattice.cutoff;
  std::size_t idx = 0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3, ++idx) {
        const cplx ip = I * p.coeff[idx];
        cplx* o = &out.coeff[idx * 3];
        o[0] = double(n1) * ip;
        o[1] = double(n2) * ip;
        o[2] = double(n3) * ip;
      }
  return out;
}

SpectralField curl(const SpectralField& u) {
  require_components(u, 3, "curl");
  SpectralField out(u.lattice, 3);
  const int N = u.lattice.cutoff;
  std::size_t idx = 0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3, ++idx) {
        const cplx* a = &u.coeff[idx * 3];
        cplx* o = &out.coeff[idx * 3];
        o[0] = I * (double(n2) * a[2] - double(n3) * a[1]);
        o[1] = I * (double(n3) * a[0] - double(n1) * a[2]);
        o[2] = I * (double(n1) * a[1] - double(n2) * a[0]);
      }
  return out;
}

SpectralField laplacian(const SpectralField& u) {
  SpectralField out(u.lattice, u.components);
  const int N = u.lattice.cutoff;
  const int c = u.components;
  std::size_t idx = 0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3, ++idx) {
        const double m = -double(LatticeSpec::norm2(n1, n2, n3));
        for (int k = 0; k < c; ++k) out.coeff[idx * c + k] = m * u.coeff[idx * c + k];
      }
  return out;
}

SpectralField leray_project(const SpectralField& u) {
  require_components(u, 3, "leray_project");
  SpectralField out = u;  // n=0 passes through
  const int N = u.lattice.cutoff;
  std::size_t idx = 0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3, ++idx) {
        const int m = LatticeSpec::norm2(n1, n2, n3);
        if (m == 0) continue;
        cplx* o = &out.coeff[idx * 3];
        const cplx dot = double(n1) * o[0] + double(n2) * o[1] + double(n3) * o[2];
        const cplx f = dot / double(m);
        o[0] -= double(n1) * f;
        o[1] -= double(n2) * f;
        o[2] -= double(n3) * f;
      }
  return out;
}

SpectralField gradient_part(const SpectralField& u) {
  require_components(u, 3, "gradient_part");
  SpectralField out(u.lattice, 3);
  const int N = u.lattice.cutoff;
  std::size_t idx = 0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3, ++idx) {
        const int m = LatticeSpec::norm2(n1, n2, n3);
        if (m == 0) continue;  // n=0 dropped
        const cplx* a = &u.coeff[idx * 3];
        const cplx dot = double(n1) * a[0] + double(n2) * a[1] + double(n3) * a[2];
        const cplx f = dot / double(m);
        cplx* o = &out.coeff[idx * 3];
        o[0] = double(n1) * f;
        o[1] = double(n2) * f;
        o[2] = double(n3) * f;
      }
  return out;
}

std::pair<SpectralField, SpectralField> helmholtz_split(const SpectralField& E) {
  SpectralField bar = gradient_part(E);
  SpectralField til = E;
  til -= bar;  // exact complement, including the n=0 mode
  return {std::move(til), std::move(bar)};
}

}  // namespace wmhd
