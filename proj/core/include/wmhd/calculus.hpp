#pragma once

#include <utility>

#include "wmhd/field.hpp"

namespace wmhd {

// Exact mode-wise differential operators on the truncated lattice.
// All of them preserve Hermitian symmetry.

SpectralField divergence(const SpectralField& u);     // c=3 -> c=1, i n . u(n)
SpectralField gradient(const SpectralField& p);       // c=1 -> c=3, i n p(n)
SpectralField curl(const SpectralField& u);           // c=3 -> c=3, i n x u(n)
SpectralField laplacian(const SpectralField& u);      // any c, -|n|^2 u(n)

// Mode-wise projection onto divergence-free fields: u(n) -> (I - nn^T/|n|^2) u(n).
// The n=0 mode passes through unchanged (constants are divergence-free).
SpectralField leray_project(const SpectralField& u);

// Gradient-potential part: u(n) -> (nn^T/|n|^2) u(n), n=0 mode dropped.
SpectralField gradient_part(const SpectralField& u);

// (leray_project(E), gradient_part(E)): divergence-free + curl-free split.
// E is reconstructed on all n != 0 modes; the n=0 mode of E sits in the first part.
std::pair<SpectralField, SpectralField> helmholtz_split(const SpectralField& E);

}  // namespace wmhd
