// Ohm's law, the Duhamel M-operators, the mild stepper's exactness and
// conservation properties, and the Picard machinery.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "wmhd/calculus.hpp"
#include "wmhd/decay.hpp"
#include "wmhd/diagnostics.hpp"
#include "wmhd/solver.hpp"

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

// Solenoidal/irrotational random state with the B mean cleared; matches what
// valid run data looks like so re-projections inside the stepper are no-ops.
StateVector random_state(const LatticeSpec& lat, std::uint64_t seed) {
  StateVector s(lat);
  s.v = leray_project(random_hermitian_field(lat, 3, seed));
  s.B = leray_project(random_hermitian_field(lat, 3, seed + 1));
  for (int c = 0; c < 3; ++c) s.B.at(0, 0, 0, c) = cplx(0.0);
  auto [til, bar] = helmholtz_split(random_hermitian_field(lat, 3, seed + 2));
  s.Etil = std::move(til);
  s.Ebar = std::move(bar);
  return s;
}

SpectralField multiplied(const SpectralField& u, const std::vector<double>& table) {
  SpectralField out = u;
  for (std::size_t idx = 0; idx < u.lattice.size(); ++idx) {
    const double f = table[LatticeSpec::norm2(u.lattice.mode(idx))];
    for (int c = 0; c < u.components; ++c) out.at(idx, c) *= f;
  }
  return out;
}

}  // namespace

TEST_CASE("ohm's law reduces to sigma E when v x B vanishes") {
  const LatticeSpec lat(2);
  SpectralProducts products(lat);
  StateVector s = random_state(lat, 5);
  SpectralField zero(lat, 3);
  const SpectralField j = compute_j(zero, s.B, s.Etil, s.Ebar, 1.7, products);
  SpectralField want = s.Etil + s.Ebar;
  want *= 1.7;
  CHECK(max_abs_diff(j, want) <= 1e-15);
  // and the full law is sigma (E + v x B)
  const SpectralField j2 = compute_j(s.v, s.B, s.Etil, s.Ebar, 2.0, products);
  SpectralField want2 = s.Etil + s.Ebar + products.cross(s.v, s.B);
  want2 *= 2.0;
  CHECK(max_abs_diff(j2, want2) <= 1e-15);
}

TEST_CASE("constant-sample spans match the single-field overloads") {
  const LatticeSpec lat(2);
  SpectralProducts products(lat);
  const StepContext ctx{products, 0.9, 1.4};
  const SpectralField a = leray_project(random_hermitian_field(lat, 3, 31));
  const SpectralField b = leray_project(random_hermitian_field(lat, 3, 32));
  const SpectralField c = leray_project(random_hermitian_field(lat, 3, 33));
  const double t = 0.3;
  const std::vector<SpectralField> as(4, a), bs(4, b), cs(4, c);
  CHECK(max_abs_diff(M1(as, bs, t, ctx), M1(a, b, t, ctx)) <= 1e-14);
  CHECK(max_abs_diff(M2(as, bs, t, ctx), M2(a, b, t, ctx)) <= 1e-14);
  CHECK(max_abs_diff(M3(as, bs, cs, t, ctx), M3(a, b, c, t, ctx)) <= 1e-14);
  CHECK(max_abs_diff(M4(as, bs, t, ctx), M4(a, b, t, ctx)) <= 1e-14);
  CHECK(max_abs_diff(M5(as, bs, t, ctx), M5(a, b, t, ctx)) <= 1e-14);
  CHECK(max_abs_diff(M6(as, bs, t, ctx), M6(a, b, t, ctx)) <= 1e-14);
}

TEST_CASE("M-operator ranges land in the right subspaces") {
  const LatticeSpec lat(2);
  SpectralProducts products(lat);
  const StepContext ctx{products, 1.0, 1.0};
  const SpectralField a = leray_project(random_hermitian_field(lat, 3, 41));
  const SpectralField b = leray_project(random_hermitian_field(lat, 3, 42));
  const double t = 0.4;
  const double scale = std::max(xnorm(a, 1.0), xnorm(b, 1.0));
  // Leray-projected integrands stay divergence-free; M4 is a curl, M6 a gradient part
  CHECK(xnorm(divergence(M1(a, b, t, ctx)), 0.0) <= 1e-12 * scale);
  CHECK(xnorm(divergence(M2(a, b, t, ctx)), 0.0) <= 1e-12 * scale);
  CHECK(xnorm(divergence(M3(a, b, b, t, ctx)), 0.0) <= 1e-12 * scale);
  CHECK(xnorm(divergence(M4(a, b, t, ctx)), 0.0) <= 1e-12 * scale);
  CHECK(xnorm(divergence(M5(a, b, t, ctx)), 0.0) <= 1e-12 * scale);
  CHECK(xnorm(curl(M6(a, b, t, ctx)), 0.0) <= 1e-12 * scale);
  // every operator vanishes at t = 0 and with zero arguments
  SpectralField zero(lat, 3);
  CHECK(max_abs(M4(a, b, 0.0, ctx)) == 0.0);
  CHECK(max_abs(M1(zero, zero, t, ctx)) == 0.0);
}

TEST_CASE("disabled nonlinearity reproduces the closed-form linear flow") {
  const LatticeSpec lat(2);
  SolverConfig cfg;
  cfg.nu = 0.8;
  cfg.sigma = 1.3;  // non-unit damping exercises the general wave family
  cfg.dt = 0.05;
  cfg.nonlinear = false;
  MildStepper stepper(lat, cfg);

  StateVector s = random_state(lat, 7);
  StateVector one = stepper.step(s);
  CHECK(one.t == doctest::Approx(0.05).epsilon(1e-15));
  StateVector five = s;
  for (int i = 0; i < 5; ++i) five = stepper.step(five);

  // One-jump closed form: heat for v, damped-wave rows for B/Etil with slopes
  // from Faraday/Ampere at t = 0, exponential decay for Ebar.
  auto closed = [&](double t) {
    PropagatorTable tab(lat, t, cfg.nu, cfg.sigma);
    SpectralField Bslope = curl(s.Etil + s.Ebar);
    Bslope *= -1.0;
    axpy(0.5 * cfg.sigma, s.B, Bslope);
    SpectralField Eslope = curl(s.B);
    axpy(-cfg.sigma, s.Etil, Eslope);
    axpy(0.5 * cfg.sigma, s.Etil, Eslope);
    StateVector w(lat);
    w.v = multiplied(s.v, tab.heat);
    w.B = multiplied(s.B, tab.phi1) + multiplied(Bslope, tab.phi2);
    w.Etil = multiplied(s.Etil, tab.phi1) + multiplied(Eslope, tab.phi2);
    w.Ebar = s.Ebar;
    w.Ebar *= tab.relax;
    return w;
  };

  const StateVector want1 = closed(0.05);
  CHECK(max_abs_diff(one.v, want1.v) <= 1e-14);
  CHECK(max_abs_diff(one.B, want1.B) <= 1e-14);
  CHECK(max_abs_diff(one.Etil, want1.Etil) <= 1e-14);
  CHECK(max_abs_diff(one.Ebar, want1.Ebar) <= 1e-14);

  const StateVector want5 = closed(0.25);
  CHECK(max_abs_diff(five.B, want5.B) <= 1e-12);
  CHECK(max_abs_diff(five.Etil, want5.Etil) <= 1e-12);
  CHECK(max_abs_diff(five.v, want5.v) <= 1e-12);
  CHECK(max_abs_diff(five.Ebar, want5.Ebar) <= 1e-12);
}

TEST_CASE("nonlinear stepping conserves the magnetic mean exactly") {
  const LatticeSpec lat(3);
  SolverConfig cfg;
  cfg.dt = 0.01;
  MildStepper stepper(lat, cfg);
  StateVector s = random_state(lat, 9);
  const cplx mean[3] = {cplx(0.3, 0.0), cplx(-0.2, 0.0), cplx(0.1, 0.0)};
  for (int c = 0; c < 3; ++c) s.B.at(0, 0, 0, c) = mean[c];
  for (int i = 0; i < 20; ++i) s = stepper.step(s);
  for (int c = 0; c < 3; ++c)
    CHECK(std::abs(s.B.at(0, 0, 0, c) - mean[c]) <= 1e-13);
  // zero mean stays exactly zero
  StateVector z = random_state(lat, 10);
  for (int i = 0; i < 5; ++i) z = stepper.step(z);
  for (int c = 0; c < 3; ++c) CHECK(std::abs(z.B.at(0, 0, 0, c)) == 0.0);
}

TEST_CASE("stepping preserves the constraint subspaces") {
  const LatticeSpec lat(3);
  SolverConfig cfg;
  cfg.dt = 0.02;
  MildStepper stepper(lat, cfg);
  StateVector s = random_state(lat, 11);
  for (int i = 0; i < 10; ++i) s = stepper.step(s);
  const StateDefects d = state_defects(s);
  CHECK(d.div_v <= 1e-12);
  CHECK(d.div_B <= 1e-12);
  CHECK(d.etil_div <= 1e-12);
  CHECK(d.ebar_curl <= 1e-12);
  CHECK(hermitian_defect(s.v) <= 1e-14);
  CHECK(hermitian_defect(s.B) <= 1e-14);
}

TEST_CASE("the growth guard rejects exploding states") {
  const LatticeSpec lat(4);
  SolverConfig cfg;
  cfg.dt = 0.5;
  MildStepper stepper(lat, cfg);
  StateVector s = random_state(lat, 13);
  const double boost = 2e3 / xnorm(s.v, 0.0);
  s.v *= boost;
  s.B *= boost;
  s.Etil *= boost;
  s.Ebar *= boost;
  CHECK_THROWS_AS(stepper.step(s), BlowupError);
  try {
    stepper.step(s);
  } catch (const BlowupError& e) {
    CHECK(e.t == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("picard on zero data is the zero fixed point") {
  const LatticeSpec lat(2);
  SpectralProducts products(lat);
  SolverConfig cfg;
  StateVector zero(lat);
  const PicardResult res = picard_run(zero, 0.4, 6, cfg, products);
  CHECK(res.diag.contracted);
  CHECK(!res.diag.non_contraction);
  CHECK(res.diag.fixed_point_move == 0.0);
  CHECK(res.trajectory.size() == std::size_t(cfg.picard_grid + 1));
  for (const StateVector& u : res.trajectory) {
    CHECK(max_abs(u.v) == 0.0);
    CHECK(max_abs(u.B) == 0.0);
  }
  CHECK(res.diag.K.front() == 0.0);
}

TEST_CASE("picard contracts on small data and lands on a fixed point") {
  const LatticeSpec lat(3);
  SpectralProducts products(lat);
  SolverConfig cfg;
  StateVector s = random_state(lat, 17);
  // scale every field to X^0 norm 0.5
  for (SpectralField* f : {&s.v, &s.B, &s.Etil, &s.Ebar}) {
    const double n0 = xnorm(*f, 0.0);
    if (n0 > 0.0) *f *= 0.5 / n0;
  }
  const PicardResult res = picard_run(s, 0.3, 12, cfg, products);
  CHECK(!res.diag.non_contraction);
  REQUIRE(!res.diag.L.empty());
  for (double r : res.diag.ratio) CHECK(r < 1.0);
  CHECK((res.diag.contracted || res.diag.L.back() < 1e-8));
  CHECK(res.diag.fixed_point_move <= 10.0 * cfg.tol);
  // grid nodes carry the right times
  CHECK(res.trajectory.front().t == 0.0);
  CHECK(res.trajectory.back().t == doctest::Approx(0.3).epsilon(1e-15));
  // iterate 1 equals the data at t = 0
  CHECK(max_abs_diff(res.trajectory.front().v, s.v) <= 1e-15);
}

TEST_CASE("one-iteration probe reports the linear sup norm") {
  const LatticeSpec lat(2);
  SpectralProducts products(lat);
  SolverConfig cfg;
  StateVector s = random_state(lat, 19);
  const PicardResult res = picard_run(s, 0.2, 1, cfg, products);
  CHECK(res.diag.K.size() == 2);
  CHECK(res.diag.L.size() == 1);
  CHECK(res.diag.ratio.empty());
  CHECK(res.diag.K[0] > 0.0);
  CHECK(std::isfinite(res.diag.K[0]));
}

TEST_CASE("admissible horizon: binding bound and cap") {
  SolverConfig cfg;  // ct1 = 0.014, ct2 = 0.15, ct3 = 0.011, T = 0.5
  // K1 = 2: the ct2 bound 1/(12 ct2 K1) = 1/3.6 is the minimum
  CHECK(admissible_T(2.0, cfg) == doctest::Approx(1.0 / 3.6).epsilon(1e-15));
  // tiny K1: every bound exceeds the configured horizon
  CHECK(admissible_T(1e-8, cfg) == cfg.T);
  CHECK(admissible_T(0.0, cfg) == cfg.T);
  // huge K1: the quadratic ct3 bound takes over and shrinks like 1/K1^2
  const double big = admissible_T(1e4, cfg);
  CHECK(big == doctest::Approx(1.0 / (12.0 * cfg.ct3 * 1e8)).epsilon(1e-12));
  // monotone nonincreasing in K1
  double prev = cfg.T;
  for (double k = 0.5; k <= 64.0; k *= 2.0) {
    const double t = admissible_T(k, cfg);
    CHECK(t <= prev + 1e-15);
    prev = t;
  }
}

TEST_CASE("calibration produces finite positive constants near the pinned defaults") {
  const LatticeSpec lat(4);
  SpectralProducts products(lat);
  const StepContext ctx{products, 1.0, 1.0};
  const Calibration cal = calibrate(lat, 1, ctx);
  for (double m : {cal.m1, cal.m2, cal.m3, cal.m4, cal.m5, cal.m6}) {
    CHECK(std::isfinite(m));
    CHECK(m > 0.0);
    CHECK(m < 100.0);
  }
  const SolverConfig def;
  CHECK(cal.c1 > 0.3 * def.c1);
  CHECK(cal.c1 < 1.5 * def.c1);
  CHECK(cal.c2 > 0.3 * def.c2);
  CHECK(cal.c2 < 1.5 * def.c2);
  CHECK(cal.c3 > 0.3 * def.c3);
  CHECK(cal.c3 < 1.5 * def.c3);
  CHECK(cal.ct1 > 0.3 * def.ct1);
  CHECK(cal.ct1 < 1.5 * def.ct1);
  CHECK(cal.ct2 > 0.3 * def.ct2);
  CHECK(cal.ct2 < 1.5 * def.ct2);
  CHECK(cal.ct3 > 0.3 * def.ct3);
  CHECK(cal.ct3 < 1.5 * def.ct3);
}

TEST_CASE("recovered pressure closes the momentum gradient budget") {
  const LatticeSpec lat(3);
  SpectralProducts products(lat);
  StateVector s = random_state(lat, 23);
  const SpectralField j = compute_j(s.v, s.B, s.Etil, s.Ebar, 1.0, products);
  const SpectralField p = recover_pressure(s.v, j, s.B, products);
  CHECK(p.components == 1);
  CHECK(std::abs(p.at(0, 0, 0, 0)) == 0.0);
  SpectralField F = products.tensor_divergence(s.v, s.v);
  F -= products.cross(j, s.B);
  const SpectralField residual = gradient(p) + gradient_part(F);
  CHECK(max_abs(residual) <= 1e-12 * std::max(1.0, max_abs(F)));
}
