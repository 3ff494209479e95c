#include "wmhd/decay.hpp"

#include <cmath>
#include <random>

namespace wmhd {

double rho_eval(const DecayProfile& p, int n1, int n2, int n3) {
  const double m = static_cast<double>(LatticeSpec::norm2(n1, n2, n3));
  return p.c1 / (p.c2 + std::pow(m, 0.5 * (3.0 + p.s)));
}

double rho_eval(const DecayProfile& p, const std::array<int, 3>& n) {
  return rho_eval(p, n[0], n[1], n[2]);
}

SpectralField seed_field_from_profile(const LatticeSpec& lat, const DecayProfile& p,
                                      int components, int component, SignPattern pattern) {
  SpectralField u(lat, components);
  const int N = lat.cutoff;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3) {
        double sign = 1.0;
        if (pattern == SignPattern::alternating && ((n1 + n2 + n3) & 1)) sign = -1.0;
        u.at(n1, n2, n3, component) = sign * rho_eval(p, n1, n2, n3);
      }
  return u;
}

namespace {
// mt19937_64 output is standard-defined; only the raw stream is used, so the
// values are the same on every platform.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline bool canonical_mode(int n1, int n2, int n3) {
  if (n1 != 0) return n1 > 0;
  if (n2 != 0) return n2 > 0;
  return n3 >= 0;  // includes the origin
}
}  // namespace

SpectralField random_hermitian_field(const LatticeSpec& lat, int components,
                                     std::uint64_t seed, double decay_s) {
  SpectralField u(lat, components);
  const DecayProfile prof{decay_s, 1.0, 1.0};
  std::mt19937_64 rng(seed);
  const int N = lat.cutoff;
  // Draws run in storage order over canonical representatives only, so the
  // stream layout does not depend on how the mirror modes are reached.
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3) {
        if (!canonical_mode(n1, n2, n3)) continue;
        const double r = rho_eval(prof, n1, n2, n3);
        for (int c = 0; c < components; ++c) {
          const double a = 2.0 * unit_uniform(rng) - 1.0;
          const double b = 2.0 * unit_uniform(rng) - 1.0;
          if (n1 == 0 && n2 == 0 && n3 == 0) {
            u.at(0, 0, 0, c) = cplx(r * a, 0.0);
          } else {
            const cplx z(r * a, r * b);
            u.at(n1, n2, n3, c) = z;
            u.at(-n1, -n2, -n3, c) = std::conj(z);
          }
        }
      }
  return u;
}

double xnorm_ball(const SpectralField& u, double s, double radius) {
  const int N = u.lattice.cutoff;
  const double r2 = radius * radius;
  double sum = 0.0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3) {
        if (LatticeSpec::norm2(n1, n2, n3) > r2) continue;
        double mag2 = 0.0;
        const std::size_t idx = u.lattice.index(n1, n2, n3);
        for (int c = 0; c < u.components; ++c) mag2 += std::norm(u.at(idx, c));
        if (mag2 > 0.0) sum += weight(n1, n2, n3, s) * std::sqrt(mag2);
      }
  return sum;
}

}  // namespace wmhd
