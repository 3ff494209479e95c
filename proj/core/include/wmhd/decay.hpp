#pragma once

#include <cstdint>

#include "wmhd/field.hpp"

namespace wmhd {

// Power-law coefficient profile rho_s(n) = C1/(C2 + |n|^{3+s}).
// s is the regularity index: a field with |u(n)| = rho_s(n) sits in X^{s'}
// for s' < s and (in the untruncated limit) not in X^{s''} for s'' > s.
struct DecayProfile {
  double s = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
};

double rho_eval(const DecayProfile& p, int n1, int n2, int n3);
double rho_eval(const DecayProfile& p, const std::array<int, 3>& n);

enum class SignPattern {
  alternating,  // (-1)^{n1+n2+n3}, the reproducible rough seeding
  positive,     // all +1
};

// Real field whose chosen component has coefficients sign * rho(n) at every
// lattice mode (real and even in n, hence Hermitian). Other components zero.
SpectralField seed_field_from_profile(const LatticeSpec& lat, const DecayProfile& p,
                                      int components, int component,
                                      SignPattern pattern = SignPattern::alternating);

// Deterministic Hermitian random field: |coefficients| ~ rho_{decay_s},
// uniform random amplitudes and signs from a hand-rolled mt19937_64 stream
// (no libc distribution involved, so values are platform-independent).
SpectralField random_hermitian_field(const LatticeSpec& lat, int components,
                                     std::uint64_t seed, double decay_s = 1.0);

// Partial X^s sum over |n| <= radius; the growth rate in radius separates
// profiles above and below the norm index (finite iff s_norm < s_profile).
double xnorm_ball(const SpectralField& u, double s, double radius);

}  // namespace wmhd
