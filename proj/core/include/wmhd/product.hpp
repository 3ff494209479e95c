#pragma once

#include <memory>

#include "wmhd/field.hpp"

namespace wmhd {

// Mode-space products. All products are exact truncated convolutions:
// (f g)^(n) = sum_k f(k) g(n-k) over pairs on the lattice, output truncated
// back to the lattice. Component semantics:
//   c=1 * c=1 -> c=1
//   c=1 * c=3 (either order) -> c=3, scalar broadcast
//   c=3 * c=3 -> c=3, component-wise product
// Trilinear expressions are two successive products, each truncated; that
// truncation-in-between is the defined semantics here, and the FFT path
// reproduces it exactly because every quadratic product is alias-free.

// Brute-force double loop over mode pairs; the oracle for convolve_fft.
SpectralField convolve_direct(const SpectralField& f, const SpectralField& g);

// Smallest padded transform edge with prime factors in {2,3,5,7} that is
// >= edge_min. Product transforms use padded_edge(2*(2N+1)) per axis, which
// keeps every quadratic product alias-free.
int padded_edge(int edge_min);

// FFTW-backed padded product workspace for one lattice. Owns plans and scratch
// buffers; transforms always run on the owned buffers, so results do not depend
// on caller alignment. Construction plans with FFTW_ESTIMATE: deterministic
// plan choice, bit-identical reruns. Not copyable; create once and reuse.
// Plan creation is serialized internally (FFTW planning is not thread-safe);
// a constructed engine must be used by one thread at a time.
class SpectralProducts {
 public:
  explicit SpectralProducts(LatticeSpec lat);
  ~SpectralProducts();
  SpectralProducts(const SpectralProducts&) = delete;
  SpectralProducts& operator=(const SpectralProducts&) = delete;

  const LatticeSpec& lattice() const { return lat_; }
  int grid_edge() const { return big_; }

  // Same contract as convolve_direct.
  SpectralField convolve(const SpectralField& f, const SpectralField& g);

  // Mode-space convolution of the physical cross product f x g; both c=3.
  SpectralField cross(const SpectralField& f, const SpectralField& g);

  // div(v w^T): out_i(n) = sum_l i n_l conv(v_i, w_l)(n); both c=3.
  // Equals (w . grad) v in mode space when div w = 0.
  SpectralField tensor_divergence(const SpectralField& v, const SpectralField& w);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  LatticeSpec lat_;
  int big_ = 0;
};

// Convenience wrappers over a process-wide engine cache keyed by cutoff.
SpectralField convolve_fft(const SpectralField& f, const SpectralField& g);
SpectralField cross(const SpectralField& f, const SpectralField& g);

}  // namespace wmhd
