// Lattice, field, calculus, product and decay-profile layers against hand
// values and the direct convolution oracle.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "wmhd/calculus.hpp"
#include "wmhd/decay.hpp"
#include "wmhd/product.hpp"

using namespace wmhd;

namespace {

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  REQUIRE(a.coeff.size() == b.coeff.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.coeff.size(); ++i)
    worst = std::max(worst, std::abs(a.coeff[i] - b.coeff[i]));
  return worst;
}

double max_abs(const SpectralField& a) {
  double worst = 0.0;
  for (const cplx& z : a.coeff) worst = std::max(worst, std::abs(z));
  return worst;
}

// Scalar component extraction, for building cross/tensor oracles out of
// convolve_direct.
SpectralField component(const SpectralField& f, int c) {
  SpectralField out(f.lattice, 1);
  for (std::size_t m = 0; m < f.lattice.size(); ++m) out.coeff[m] = f.at(m, c);
  return out;
}

}  // namespace

TEST_CASE("lattice indexing round-trips and is n1-major") {
  const LatticeSpec lat(3);
  CHECK(lat.edge() == 7);
  CHECK(lat.size() == 343);
  CHECK(lat.max_norm2() == 27);
  CHECK(lat.index(-3, -3, -3) == 0);
  CHECK(lat.index(-3, -3, -2) == 1);  // n3 fastest
  CHECK(lat.index(3, 3, 3) == 342);
  for (std::size_t idx : {std::size_t(0), std::size_t(100), std::size_t(342)}) {
    const auto n = lat.mode(idx);
    CHECK(lat.index(n[0], n[1], n[2]) == idx);
  }
  CHECK(LatticeSpec::norm2(1, -2, 2) == 9);
  CHECK(!lat.contains(4, 0, 0));
  CHECK_THROWS_AS(LatticeSpec(0), std::invalid_argument);
}

TEST_CASE("field arithmetic and axpy") {
  const LatticeSpec lat(1);
  SpectralField a(lat, 3), b(lat, 3);
  a.at(1, 0, 0, 1) = cplx(2.0, 1.0);
  b.at(1, 0, 0, 1) = cplx(0.5, 0.0);
  SpectralField c = a + b;
  CHECK(c.at(1, 0, 0, 1) == cplx(2.5, 1.0));
  c -= a;
  CHECK(c.at(1, 0, 0, 1) == cplx(0.5, 0.0));
  c *= 4.0;
  CHECK(c.at(1, 0, 0, 1) == cplx(2.0, 0.0));
  axpy(-4.0, b, c);
  CHECK(max_abs(c) == 0.0);
  SpectralField wrong(LatticeSpec(2), 3);
  CHECK_THROWS_AS(a += wrong, std::invalid_argument);
}

TEST_CASE("X^s weight and norm on a single conjugate mode pair") {
  CHECK(weight(1, 2, 2, 2.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(weight(1, 2, 2, 1.0) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));
  CHECK(weight(0, 0, 0, 7.0) == 1.0);

  const LatticeSpec lat(3);
  SpectralField u(lat, 3);
  u.at(1, 2, 2, 0) = cplx(0.0, 3.0);
  u.at(-1, -2, -2, 0) = cplx(0.0, -3.0);
  CHECK(xnorm(u, 0.0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(xnorm(u, 2.0) == doctest::Approx(60.0).epsilon(1e-15));
  // Euclidean per-mode magnitude, not per-component sums
  u.at(1, 2, 2, 1) = cplx(4.0, 0.0);
  u.at(-1, -2, -2, 1) = cplx(4.0, 0.0);
  CHECK(xnorm(u, 0.0) == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("hermitian defect and symmetrization") {
  const LatticeSpec lat(2);
  SpectralField u = random_hermitian_field(lat, 3, 11);
  CHECK(hermitian_defect(u) == 0.0);
  u.at(1, 0, 0, 0) += cplx(0.0, 1e-3);
  CHECK(hermitian_defect(u) == doctest::Approx(1e-3).epsilon(1e-12));
  symmetrize_hermitian(u);
  CHECK(hermitian_defect(u) == 0.0);
}

TEST_CASE("calculus identities on random fields") {
  const LatticeSpec lat(4);
  const SpectralField u = random_hermitian_field(lat, 3, 5);
  const double scale = xnorm(u, 1.0);

  SUBCASE("div curl = 0") { CHECK(xnorm(divergence(curl(u)), 0.0) <= 1e-13 * scale); }
  SUBCASE("leray is a projector") {
    const SpectralField p = leray_project(u);
    CHECK(max_abs_diff(leray_project(p), p) <= 1e-15);
    CHECK(xnorm(divergence(p), 0.0) <= 1e-13 * scale);
  }
  SUBCASE("leray annihilates gradients, gradient_part keeps them") {
    SpectralField p(lat, 1);
    for (std::size_t m = 0; m < lat.size(); ++m) p.coeff[m] = u.coeff[3 * m];
    p.at(0, 0, 0, 0) = cplx(0.0);
    const SpectralField g = gradient(p);
    CHECK(xnorm(leray_project(g), 0.0) <= 1e-13 * xnorm(g, 0.0));
    CHECK(max_abs_diff(gradient_part(g), g) <= 1e-14 * max_abs(g));
  }
  SUBCASE("helmholtz split reassembles and separates") {
    const auto [til, bar] = helmholtz_split(u);
    CHECK(max_abs_diff(til + bar, u) <= 1e-14 * max_abs(u));
    CHECK(xnorm(divergence(til), 0.0) <= 1e-13 * scale);
    CHECK(xnorm(curl(bar), 0.0) <= 1e-13 * scale);
    // zero mode rides with the divergence-free part
    SpectralField c = u;
    c.at(0, 0, 0, 0) = cplx(0.7, 0.0);
    const auto [til2, bar2] = helmholtz_split(c);
    CHECK(til2.at(0, 0, 0, 0) == cplx(0.7, 0.0));
    CHECK(bar2.at(0, 0, 0, 0) == cplx(0.0));
  }
  SUBCASE("div grad equals laplacian on scalars") {
    SpectralField p(lat, 1);
    for (std::size_t m = 0; m < lat.size(); ++m) p.coeff[m] = u.coeff[3 * m + 2];
    CHECK(max_abs_diff(divergence(gradient(p)), laplacian(p)) <= 1e-13 * max_abs(p));
  }
  SUBCASE("mean mode passes through leray untouched") {
    SpectralField c = u;
    c.at(0, 0, 0, 1) = cplx(0.3, 0.0);
    CHECK(leray_project(c).at(0, 0, 0, 1) == cplx(0.3, 0.0));
  }
}

TEST_CASE("padded transform edges are 7-smooth and alias-free") {
  CHECK(padded_edge(10) == 10);
  CHECK(padded_edge(18) == 18);
  CHECK(padded_edge(34) == 35);
  CHECK(padded_edge(66) == 70);
  CHECK(padded_edge(11) == 12);
}

TEST_CASE("direct convolution on two single-mode scalars") {
  const LatticeSpec lat(1);
  SpectralField f(lat, 1), g(lat, 1);
  const cplx a(0.3, 0.4), b(-0.2, 0.1);
  f.at(1, 0, 0, 0) = a;
  f.at(-1, 0, 0, 0) = std::conj(a);
  g.at(0, 1, 0, 0) = b;
  g.at(0, -1, 0, 0) = std::conj(b);
  const SpectralField h = convolve_direct(f, g);
  CHECK(std::abs(h.at(1, 1, 0, 0) - a * b) <= 1e-16);
  CHECK(std::abs(h.at(1, -1, 0, 0) - a * std::conj(b)) <= 1e-16);
  CHECK(std::abs(h.at(0, 0, 0, 0)) == 0.0);  // supports do not meet at zero
  CHECK(hermitian_defect(h) == 0.0);
}

TEST_CASE("fft convolution matches the direct sum") {
  for (int N : {2, 3}) {
    const LatticeSpec lat(N);
    SpectralProducts engine(lat);
    for (int rep = 0; rep < 4; ++rep) {
      const SpectralField f = random_hermitian_field(lat, 3, 100 + 10 * rep);
      const SpectralField g = random_hermitian_field(lat, 3, 101 + 10 * rep);
      CHECK(max_abs_diff(engine.convolve(f, g), convolve_direct(f, g)) <= 1e-12);
    }
  }
}

TEST_CASE("scalar and broadcast convolution paths agree with the oracle") {
  const LatticeSpec lat(2);
  SpectralProducts engine(lat);
  const SpectralField fs = random_hermitian_field(lat, 1, 7);
  const SpectralField gs = random_hermitian_field(lat, 1, 8);
  const SpectralField gv = random_hermitian_field(lat, 3, 9);
  CHECK(max_abs_diff(engine.convolve(fs, gs), convolve_direct(fs, gs)) <= 1e-12);
  CHECK(max_abs_diff(engine.convolve(fs, gv), convolve_direct(fs, gv)) <= 1e-12);
  const SpectralField h = convolve_direct(fs, gv);
  CHECK(h.components == 3);
}

TEST_CASE("cross product against component-wise direct convolutions") {
  const LatticeSpec lat(2);
  SpectralProducts engine(lat);
  const SpectralField f = random_hermitian_field(lat, 3, 21);
  const SpectralField g = random_hermitian_field(lat, 3, 22);
  const SpectralField got = engine.cross(f, g);
  SpectralField want(lat, 3);
  for (int c = 0; c < 3; ++c) {
    const int c1 = (c + 1) % 3, c2 = (c + 2) % 3;
    const SpectralField p = convolve_direct(component(f, c1), component(g, c2));
    const SpectralField q = convolve_direct(component(f, c2), component(g, c1));
    for (std::size_t m = 0; m < lat.size(); ++m) want.at(m, c) = p.coeff[m] - q.coeff[m];
  }
  CHECK(max_abs_diff(got, want) <= 1e-12);
  CHECK(hermitian_defect(got) <= 1e-14);
}

TEST_CASE("tensor divergence against the assembled oracle") {
  const LatticeSpec lat(2);
  SpectralProducts engine(lat);
  const SpectralField f = random_hermitian_field(lat, 3, 31);
  const SpectralField g = random_hermitian_field(lat, 3, 32);
  const SpectralField got = engine.tensor_divergence(f, g);
  // (div(f (x) g))_i(n) = sum_l i n_l (f_i * g_l)(n): divergence contracts
  // the second tensor slot
  SpectralField want(lat, 3);
  const cplx I{0.0, 1.0};
  for (int l = 0; l < 3; ++l) {
    for (int i = 0; i < 3; ++i) {
      const SpectralField p = convolve_direct(component(f, i), component(g, l));
      for (std::size_t m = 0; m < lat.size(); ++m) {
        const auto n = lat.mode(m);
        want.at(m, i) += I * double(n[l]) * p.coeff[m];
      }
    }
  }
  CHECK(max_abs_diff(got, want) <= 1e-12);
}

TEST_CASE("component mismatch is rejected") {
  const LatticeSpec lat(1);
  SpectralProducts engine(lat);
  const SpectralField v = random_hermitian_field(lat, 3, 1);
  const SpectralField s = random_hermitian_field(lat, 1, 2);
  CHECK_THROWS_AS(engine.cross(v, s), std::invalid_argument);
  CHECK_THROWS_AS(engine.tensor_divergence(s, s), std::invalid_argument);
}

TEST_CASE("decay profile values and profile-seeded fields") {
  const DecayProfile p{1.0, 1.0, 1.0};
  CHECK(rho_eval(p, 1, 2, 2) == doctest::Approx(1.0 / 82.0).epsilon(1e-15));
  CHECK(rho_eval(p, 0, 0, 0) == 1.0);

  const LatticeSpec lat(3);
  const SpectralField u = seed_field_from_profile(lat, p, 3, 1, SignPattern::alternating);
  CHECK(u.at(1, 2, 2, 1).real() == doctest::Approx(-1.0 / 82.0).epsilon(1e-15));  // (-1)^5
  CHECK(u.at(1, 2, 2, 1).imag() == 0.0);
  CHECK(std::abs(u.at(1, 2, 2, 0)) == 0.0);
  CHECK(std::abs(u.at(1, 2, 2, 2)) == 0.0);
  CHECK(hermitian_defect(u) == 0.0);
  const SpectralField up = seed_field_from_profile(lat, p, 3, 1, SignPattern::positive);
  CHECK(up.at(1, 2, 2, 1).real() == doctest::Approx(1.0 / 82.0).epsilon(1e-15));
}

TEST_CASE("random hermitian fields are reproducible and profile-bounded") {
  const LatticeSpec lat(3);
  const SpectralField a = random_hermitian_field(lat, 3, 42);
  const SpectralField b = random_hermitian_field(lat, 3, 42);
  CHECK(max_abs_diff(a, b) == 0.0);
  const SpectralField c = random_hermitian_field(lat, 3, 43);
  CHECK(max_abs_diff(a, c) > 0.0);
  CHECK(hermitian_defect(a) == 0.0);
  const DecayProfile p{1.0, 1.0, 1.0};
  double worst = 0.0;
  for (std::size_t m = 0; m < lat.size(); ++m) {
    const auto n = lat.mode(m);
    double mag = 0.0;
    for (int k = 0; k < 3; ++k) mag += std::norm(a.at(m, k));
    worst = std::max(worst, std::sqrt(mag) / (std::sqrt(6.0) * rho_eval(p, n)));
  }
  CHECK(worst <= 1.0);  // |coeff| <= sqrt(2) rho per component
}

TEST_CASE("partial norms grow to the full norm") {
  const LatticeSpec lat(4);
  const SpectralField u = random_hermitian_field(lat, 3, 3);
  const double full = xnorm(u, 1.0);
  double prev = 0.0;
  for (double r : {1.0, 2.0, 4.0}) {
    const double part = xnorm_ball(u, 1.0, r);
    CHECK(part >= prev);
    CHECK(part <= full + 1e-12);
    prev = part;
  }
  CHECK(xnorm_ball(u, 1.0, 7.0) == doctest::Approx(full).epsilon(1e-15));
}
