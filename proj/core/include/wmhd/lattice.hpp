#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <stdexcept>

namespace wmhd {

// Truncated Fourier lattice: modes n in Z^3 with max_i |n_i| <= cutoff.
// Storage order is dense and fixed: n1 slowest, n3 fastest, offset by +cutoff
// per axis. Every reduction in the library walks this order, so repeated runs
// sum in the same sequence.
struct LatticeSpec {
  int cutoff = 0;

  LatticeSpec() = default;
  explicit LatticeSpec(int n) : cutoff(n) {
    if (n <= 0) throw std::invalid_argument("LatticeSpec: cutoff must be positive");
  }

  int edge() const { return 2 * cutoff + 1; }

  std::size_t size() const {
    const std::size_t e = static_cast<std::size_t>(edge());
    return e * e * e;
  }

  bool contains(int n1, int n2, int n3) const {
    const int N = cutoff;
    return n1 >= -N && n1 <= N && n2 >= -N && n2 <= N && n3 >= -N && n3 <= N;
  }

  std::size_t index(int n1, int n2, int n3) const {
    assert(contains(n1, n2, n3));
    const std::size_t e = static_cast<std::size_t>(edge());
    return (static_cast<std::size_t>(n1 + cutoff) * e +
            static_cast<std::size_t>(n2 + cutoff)) * e +
           static_cast<std::size_t>(n3 + cutoff);
  }

  std::array<int, 3> mode(std::size_t idx) const {
    const std::size_t e = static_cast<std::size_t>(edge());
    const int n3 = static_cast<int>(idx % e) - cutoff;
    const int n2 = static_cast<int>((idx / e) % e) - cutoff;
    const int n1 = static_cast<int>(idx / (e * e)) - cutoff;
    return {n1, n2, n3};
  }

  // Squared Euclidean wavenumber |n|^2; the key for all propagator tables.
  static int norm2(int n1, int n2, int n3) { return n1 * n1 + n2 * n2 + n3 * n3; }
  static int norm2(const std::array<int, 3>& n) { return norm2(n[0], n[1], n[2]); }

  int max_norm2() const { return 3 * cutoff * cutoff; }

  bool operator==(const LatticeSpec&) const = default;
};

}  // namespace wmhd
