#pragma once

#include <complex>
#include <vector>

#include "wmhd/lattice.hpp"

namespace wmhd {

using cplx = std::complex<double>;

// Truncated Fourier coefficients of a real field on the 3-torus.
// components is 1 (scalars such as pressure, divergence) or 3 (vector fields).
// Layout: coeff[mode * components + c], modes in LatticeSpec storage order.
// Real fields carry the Hermitian constraint u(-n) = conj(u(n)); operations
// that preserve it say so, nothing re-symmetrizes silently.
struct SpectralField {
  LatticeSpec lattice;
  int components = 0;
  std::vector<cplx> coeff;

  SpectralField() = default;
  SpectralField(LatticeSpec lat, int c)
      : lattice(lat), components(c), coeff(lat.size() * static_cast<std::size_t>(c)) {
    if (c != 1 && c != 3) throw std::invalid_argument("SpectralField: components must be 1 or 3");
  }

  cplx& at(std::size_t mode, int c) { return coeff[mode * components + c]; }
  const cplx& at(std::size_t mode, int c) const { return coeff[mode * components + c]; }

  cplx& at(int n1, int n2, int n3, int c) { return at(lattice.index(n1, n2, n3), c); }
  const cplx& at(int n1, int n2, int n3, int c) const { return at(lattice.index(n1, n2, n3), c); }

  void set_zero() { std::fill(coeff.begin(), coeff.end(), cplx(0.0)); }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a);
  SpectralField& operator*=(cplx a);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double a, SpectralField f);

// y += a*x with matching shapes.
void axpy(double a, const SpectralField& x, SpectralField& y);

// (1+|n|^2)^{s/2}, the X^s weight.
double weight(int n1, int n2, int n3, double s);
double weight(const std::array<int, 3>& n, double s);

// X^s norm: sum over modes of weight(n,s) * |u(n)|, with |u(n)| the Euclidean
// magnitude of the per-mode coefficient vector. Deterministic traversal order.
double xnorm(const SpectralField& u, double s);

// Largest per-entry violation of u(-n) = conj(u(n)); 0 for real fields.
double hermitian_defect(const SpectralField& u);

// Average u(n) with conj(u(-n)); projects onto the real (Hermitian) subspace.
void symmetrize_hermitian(SpectralField& u);

// Shape guards shared by the mode-wise operations.
void require_same_lattice(const SpectralField& a, const SpectralField& b);
void require_components(const SpectralField& a, int c, const char* who);

}  // namespace wmhd
