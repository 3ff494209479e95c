#include "wmhd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wmhd/calculus.hpp"
#include "wmhd/decay.hpp"

namespace wmhd {

namespace {

// out(n) = tab[|n|^2] * u(n), optionally accumulating with a scalar factor.
void add_multiplied(SpectralField& out, const SpectralField& u, const std::vector<double>& tab,
                    double scale) {
  const int N = u.lattice.cutoff;
  const int c = u.components;
  std::size_t idx = 0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3, ++idx) {
        const double f = scale * tab[LatticeSpec::norm2(n1, n2, n3)];
        for (int k = 0; k < c; ++k)
          out.coeff[idx * c + k] += f * u.coeff[idx * c + k];
      }
}

SpectralField multiplied(const SpectralField& u, const std::vector<double>& tab) {
  SpectralField out(u.lattice, u.components);
  add_multiplied(out, u, tab, 1.0);
  return out;
}

std::span<const SpectralField> one(const SpectralField& f) { return {&f, 1}; }

}  // namespace

SpectralField compute_j(const SpectralField& v, const SpectralField& B,
                        const SpectralField& Etil, const SpectralField& Ebar,
                        double sigma, SpectralProducts& products) {
  SpectralField j = Etil + Ebar;
  j += products.cross(v, B);
  j *= sigma;
  return j;
}

SpectralField M1(std::span<const SpectralField> v, std::span<const SpectralField> v2,
                 double t, const StepContext& ctx) {
  if (v.size() != v2.size()) throw std::invalid_argument("M1: sample count mismatch");
  std::vector<SpectralField> forcing;
  forcing.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    forcing.push_back(leray_project(ctx.products.tensor_divergence(v[i], v2[i])));
  SpectralField r = duhamel(Kernel::heat, forcing, 0.0, t, ctx.nu, ctx.sigma);
  r *= -1.0;
  return r;
}

SpectralField M2(std::span<const SpectralField> E, std::span<const SpectralField> B,
                 double t, const StepContext& ctx) {
  if (E.size() != B.size()) throw std::invalid_argument("M2: sample count mismatch");
  std::vector<SpectralField> forcing;
  forcing.reserve(E.size());
  for (std::size_t i = 0; i < E.size(); ++i)
    forcing.push_back(leray_project(ctx.products.cross(E[i], B[i])));
  return duhamel(Kernel::heat, forcing, 0.0, t, ctx.nu, ctx.sigma);
}

SpectralField M3(std::span<const SpectralField> v, std::span<const SpectralField> B,
                 std::span<const SpectralField> B2, double t, const StepContext& ctx) {
  if (v.size() != B.size() || v.size() != B2.size())
    throw std::invalid_argument("M3: sample count mismatch");
  std::vector<SpectralField> forcing;
  forcing.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    SpectralField w = ctx.products.cross(v[i], B[i]);  // truncated before the next product
    forcing.push_back(leray_project(ctx.products.cross(w, B2[i])));
  }
  return duhamel(Kernel::heat, forcing, 0.0, t, ctx.nu, ctx.sigma);
}

SpectralField M4(std::span<const SpectralField> v, std::span<const SpectralField> B,
                 double t, const StepContext& ctx) {
  if (v.size() != B.size()) throw std::invalid_argument("M4: sample count mismatch");
  std::vector<SpectralField> forcing;
  forcing.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    forcing.push_back(curl(ctx.products.cross(v[i], B[i])));
  return duhamel(Kernel::phi2, forcing, 0.0, t, ctx.nu, ctx.sigma);
}

SpectralField M5(std::span<const SpectralField> v, std::span<const SpectralField> B,
                 double t, const StepContext& ctx) {
  if (v.size() != B.size()) throw std::invalid_argument("M5: sample count mismatch");
  std::vector<SpectralField> forcing;
  forcing.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    forcing.push_back(leray_project(ctx.products.cross(v[i], B[i])));
  return duhamel(Kernel::dphi2, forcing, 0.0, t, ctx.nu, ctx.sigma);
}

SpectralField M6(std::span<const SpectralField> v, std::span<const SpectralField> B,
                 double t, const StepContext& ctx) {
  if (v.size() != B.size()) throw std::invalid_argument("M6: sample count mismatch");
  std::vector<SpectralField> forcing;
  forcing.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    forcing.push_back(gradient_part(ctx.products.cross(v[i], B[i])));
  return duhamel(Kernel::relax, forcing, 0.0, t, ctx.nu, ctx.sigma);
}

SpectralField M1(const SpectralField& v, const SpectralField& v2, double t, const StepContext& ctx) {
  return M1(one(v), one(v2), t, ctx);
}
SpectralField M2(const SpectralField& E, const SpectralField& B, double t, const StepContext& ctx) {
  return M2(one(E), one(B), t, ctx);
}
SpectralField M3(const SpectralField& v, const SpectralField& B, const SpectralField& B2,
                 double t, const StepContext& ctx) {
  return M3(one(v), one(B), one(B2), t, ctx);
}
SpectralField M4(const SpectralField& v, const SpectralField& B, double t, const StepContext& ctx) {
  return M4(one(v), one(B), t, ctx);
}
SpectralField M5(const SpectralField& v, const SpectralField& B, double t, const StepContext& ctx) {
  return M5(one(v), one(B), t, ctx);
}
SpectralField M6(const SpectralField& v, const SpectralField& B, double t, const StepContext& ctx) {
  return M6(one(v), one(B), t, ctx);
}

// Forcing terms with the conductivity folded in:
//   Gv = leray(-div(v (x) v) + sigma E x B + sigma (v x B) x B)
//   Gb = sigma curl(v x B)
//   Ge = sigma leray(v x B)     (also the Etil boundary term)
//   Gq = sigma grad-part(v x B)
struct MildStepper::Forcing {
  SpectralField Gv, Gb, Ge, Gq;
};

MildStepper::MildStepper(LatticeSpec lat, SolverConfig cfg)
    : lat_(lat),
      cfg_(cfg),
      products_(lat),
      full_(lat, cfg.dt, cfg.nu, cfg.sigma),
      half_(lat, 0.5 * cfg.dt, cfg.nu, cfg.sigma) {
  const int top = lat.max_norm2();
  j0_heat_full_.resize(top + 1);
  j0_heat_half_.resize(top + 1);
  j0_phi2_full_.resize(top + 1);
  j0_phi2_half_.resize(top + 1);
  j0_dphi2_full_.resize(top + 1);
  j0_dphi2_half_.resize(top + 1);
  double j1;
  for (int m = 0; m <= top; ++m) {
    kernel_moments(Kernel::heat, m, cfg.nu, cfg.sigma, cfg.dt, j0_heat_full_[m], j1);
    kernel_moments(Kernel::heat, m, cfg.nu, cfg.sigma, 0.5 * cfg.dt, j0_heat_half_[m], j1);
    kernel_moments(Kernel::phi2, m, cfg.nu, cfg.sigma, cfg.dt, j0_phi2_full_[m], j1);
    kernel_moments(Kernel::phi2, m, cfg.nu, cfg.sigma, 0.5 * cfg.dt, j0_phi2_half_[m], j1);
    kernel_moments(Kernel::dphi2, m, cfg.nu, cfg.sigma, cfg.dt, j0_dphi2_full_[m], j1);
    kernel_moments(Kernel::dphi2, m, cfg.nu, cfg.sigma, 0.5 * cfg.dt, j0_dphi2_half_[m], j1);
  }
  kernel_moments(Kernel::relax, 0, cfg.nu, cfg.sigma, cfg.dt, j0_relax_full_, j1);
  kernel_moments(Kernel::relax, 0, cfg.nu, cfg.sigma, 0.5 * cfg.dt, j0_relax_half_, j1);
}

MildStepper::Forcing MildStepper::eval_forcing(const StateVector& s) {
  const double sg = cfg_.sigma;
  SpectralField w = products_.cross(s.v, s.B);
  SpectralField E = s.Etil + s.Ebar;

  SpectralField gv = products_.tensor_divergence(s.v, s.v);
  gv *= -1.0;
  axpy(sg, products_.cross(E, s.B), gv);
  axpy(sg, products_.cross(w, s.B), gv);

  Forcing f{leray_project(gv), curl(w), leray_project(w), gradient_part(w)};
  f.Gb *= sg;
  f.Ge *= sg;
  f.Gq *= sg;
  return f;
}

StateVector MildStepper::step(const StateVector& s) {
  const double h = cfg_.dt;
  const double sg = cfg_.sigma;
  const bool nl = cfg_.nonlinear;

  const double norm_before = xnorm(s.v, 0) + xnorm(s.B, 0) + xnorm(s.Etil, 0) + xnorm(s.Ebar, 0);

  // Slopes at step start close the wave rows: d_t B = -curl Etil,
  // d_t Etil = curl B - sigma Etil - sigma leray(v x B).
  SpectralField B1 = curl(s.Etil);
  B1 *= -1.0;
  SpectralField E1 = curl(s.B);
  axpy(-sg, s.Etil, E1);

  Forcing fn{SpectralField(lat_, 3), SpectralField(lat_, 3), SpectralField(lat_, 3),
             SpectralField(lat_, 3)};
  if (nl) {
    fn = eval_forcing(s);
    E1 -= fn.Ge;
  }

  SpectralField Bslope = B1;
  axpy(0.5 * sg, s.B, Bslope);
  SpectralField Eslope = E1;
  axpy(0.5 * sg, s.Etil, Eslope);

  // Half step, forcing frozen at t_n. The Etil forcing cancels exactly against
  // its boundary term here (J0 of dphi2 is phi2 itself), so only linear rows.
  StateVector mid(lat_);
  mid.t = s.t + 0.5 * h;
  mid.v = multiplied(s.v, half_.heat);
  if (nl) add_multiplied(mid.v, fn.Gv, j0_heat_half_, 1.0);
  mid.B = multiplied(s.B, half_.phi1);
  add_multiplied(mid.B, Bslope, half_.phi2, 1.0);
  if (nl) add_multiplied(mid.B, fn.Gb, j0_phi2_half_, 1.0);
  mid.Etil = multiplied(s.Etil, half_.phi1);
  add_multiplied(mid.Etil, Eslope, half_.phi2, 1.0);
  mid.Ebar = s.Ebar;
  mid.Ebar *= half_.relax;
  if (nl) axpy(-j0_relax_half_, fn.Gq, mid.Ebar);

  // Full step, forcing at the midpoint; Etil keeps the boundary term at t_n
  // minus the dphi2-weighted midpoint forcing.
  StateVector nxt(lat_);
  nxt.t = s.t + h;
  nxt.v = multiplied(s.v, full_.heat);
  nxt.B = multiplied(s.B, full_.phi1);
  add_multiplied(nxt.B, Bslope, full_.phi2, 1.0);
  nxt.Etil = multiplied(s.Etil, full_.phi1);
  add_multiplied(nxt.Etil, Eslope, full_.phi2, 1.0);
  nxt.Ebar = s.Ebar;
  nxt.Ebar *= full_.relax;
  if (nl) {
    Forcing fm = eval_forcing(mid);
    add_multiplied(nxt.v, fm.Gv, j0_heat_full_, 1.0);
    add_multiplied(nxt.B, fm.Gb, j0_phi2_full_, 1.0);
    add_multiplied(nxt.Etil, fn.Ge, full_.phi2, 1.0);
    add_multiplied(nxt.Etil, fm.Ge, j0_dphi2_full_, -1.0);
    axpy(-j0_relax_full_, fm.Gq, nxt.Ebar);
  }

  // The analytic rows preserve these subspaces; projection only strips roundoff.
  nxt.v = leray_project(nxt.v);
  nxt.B = leray_project(nxt.B);
  nxt.Etil = leray_project(nxt.Etil);
  nxt.Ebar = gradient_part(nxt.Ebar);

  const double norm_after =
      xnorm(nxt.v, 0) + xnorm(nxt.B, 0) + xnorm(nxt.Etil, 0) + xnorm(nxt.Ebar, 0);
  if (!std::isfinite(norm_after) ||
      norm_after > cfg_.blowup_factor * std::max(norm_before, 1e-12))
    throw BlowupError(nxt.t);
  return nxt;
}

namespace {

double trajectory_sup_norm(const std::vector<StateVector>& tr) {
  double K = 0.0;
  for (const auto& s : tr) {
    K = std::max(K, xnorm(s.v, 0));
    K = std::max(K, xnorm(s.B, 0));
    K = std::max(K, xnorm(s.Etil, 0));
    K = std::max(K, xnorm(s.Ebar, 0));
  }
  return K;
}

double trajectory_distance(const std::vector<StateVector>& a, const std::vector<StateVector>& b) {
  double L = 0.0;
  for (std::size_t g = 0; g < a.size(); ++g) {
    const double d = xnorm(a[g].v - b[g].v, 0) + xnorm(a[g].B - b[g].B, 0) +
                     xnorm(a[g].Etil - b[g].Etil, 0) + xnorm(a[g].Ebar - b[g].Ebar, 0);
    L = std::max(L, d);
  }
  return L;
}

}  // namespace

PicardResult picard_run(const StateVector& state0, double T, int iters,
                        const SolverConfig& cfg, SpectralProducts& products) {
  const LatticeSpec lat = state0.v.lattice;
  const int G = std::max(1, cfg.picard_grid);
  const double sg = cfg.sigma;

  SpectralField Pw0 = leray_project(products.cross(state0.v, state0.B));
  SpectralField B1 = curl(state0.Etil);
  B1 *= -1.0;
  SpectralField E1 = curl(state0.B);
  axpy(-sg, state0.Etil, E1);
  axpy(-sg, Pw0, E1);

  SpectralField Bslope = B1;
  axpy(0.5 * sg, state0.B, Bslope);
  SpectralField Eslope = E1;
  axpy(0.5 * sg, state0.Etil, Eslope);

  std::vector<double> times(G + 1);
  for (int g = 0; g <= G; ++g) times[g] = T * static_cast<double>(g) / G;

  // Iterate 1: exact propagation of the data under the linear system, plus the
  // Etil boundary term sigma phi2(t) leray(v0 x B0).
  std::vector<StateVector> lin;
  lin.reserve(G + 1);
  for (int g = 0; g <= G; ++g) {
    PropagatorTable tab(lat, times[g], cfg.nu, sg);
    StateVector u(lat);
    u.t = times[g];
    u.v = multiplied(state0.v, tab.heat);
    u.B = multiplied(state0.B, tab.phi1);
    add_multiplied(u.B, Bslope, tab.phi2, 1.0);
    u.Etil = multiplied(state0.Etil, tab.phi1);
    add_multiplied(u.Etil, Eslope, tab.phi2, 1.0);
    add_multiplied(u.Etil, Pw0, tab.phi2, sg);
    u.Ebar = state0.Ebar;
    u.Ebar *= tab.relax;
    lin.push_back(std::move(u));
  }

  auto apply_map = [&](const std::vector<StateVector>& u) {
    std::vector<SpectralField> Fv, Fb, Fe, Fq;
    Fv.reserve(G + 1);
    Fb.reserve(G + 1);
    Fe.reserve(G + 1);
    Fq.reserve(G + 1);
    for (int g = 0; g <= G; ++g) {
      SpectralField w = products.cross(u[g].v, u[g].B);
      SpectralField E = u[g].Etil + u[g].Ebar;
      SpectralField gv = products.tensor_divergence(u[g].v, u[g].v);
      gv *= -1.0;
      axpy(sg, products.cross(E, u[g].B), gv);
      axpy(sg, products.cross(w, u[g].B), gv);
      Fv.push_back(leray_project(gv));
      SpectralField fb = curl(w);
      fb *= sg;
      Fb.push_back(std::move(fb));
      SpectralField fe = leray_project(w);
      fe *= sg;
      Fe.push_back(std::move(fe));
      SpectralField fq = gradient_part(w);
      fq *= sg;
      Fq.push_back(std::move(fq));
    }
    std::vector<StateVector> nxt = lin;
    for (int g = 1; g <= G; ++g) {
      const double t = times[g];
      nxt[g].v += duhamel(Kernel::heat, {Fv.data(), std::size_t(g) + 1}, 0.0, t, cfg.nu, sg);
      nxt[g].B += duhamel(Kernel::phi2, {Fb.data(), std::size_t(g) + 1}, 0.0, t, cfg.nu, sg);
      nxt[g].Etil -= duhamel(Kernel::dphi2, {Fe.data(), std::size_t(g) + 1}, 0.0, t, cfg.nu, sg);
      nxt[g].Ebar -= duhamel(Kernel::relax, {Fq.data(), std::size_t(g) + 1}, 0.0, t, cfg.nu, sg);
    }
    return nxt;
  };

  PicardResult res;
  res.diag.T = T;
  std::vector<StateVector> cur = lin;
  res.diag.K.push_back(trajectory_sup_norm(cur));

  int grew = 0;
  double prevL = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= iters; ++j) {
    std::vector<StateVector> nxt = apply_map(cur);
    const double L = trajectory_distance(nxt, cur);
    res.diag.L.push_back(L);
    res.diag.K.push_back(trajectory_sup_norm(nxt));
    if (res.diag.L.size() >= 2)
      res.diag.ratio.push_back(L / res.diag.L[res.diag.L.size() - 2]);
    cur = std::move(nxt);
    if (!std::isfinite(L)) {
      res.diag.non_contraction = true;
      res.diag.message = "iterate diverged";
      break;
    }
    if (L < cfg.tol) {
      res.diag.contracted = true;
      break;
    }
    if (L > prevL) {
      if (++grew >= 3) {
        res.diag.non_contraction = true;
        res.diag.message = "distance grew three times in a row";
        break;
      }
    } else {
      grew = 0;
    }
    prevL = L;
  }
  res.diag.fixed_point_move = trajectory_distance(apply_map(cur), cur);
  res.trajectory = std::move(cur);
  return res;
}

SpectralField recover_pressure(const SpectralField& v, const SpectralField& j,
                               const SpectralField& B, SpectralProducts& products) {
  SpectralField F = products.tensor_divergence(v, v);
  F -= products.cross(j, B);
  SpectralField p(v.lattice, 1);
  const int N = v.lattice.cutoff;
  const cplx I{0.0, 1.0};
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3) {
        const int m = LatticeSpec::norm2(n1, n2, n3);
        if (m == 0) continue;
        const std::size_t idx = v.lattice.index(n1, n2, n3);
        const cplx ndotF = double(n1) * F.coeff[idx * 3] + double(n2) * F.coeff[idx * 3 + 1] +
                           double(n3) * F.coeff[idx * 3 + 2];
        p.coeff[idx] = I * ndotF / double(m);
      }
  return p;
}

double admissible_T(double K1, const SolverConfig& cfg) {
  if (!(K1 > 0.0)) return cfg.T;
  double t1 = 1.0 / (12.0 * cfg.ct1 * K1);
  t1 *= t1;
  const double t2 = 1.0 / (12.0 * cfg.ct2 * K1);
  const double t3 = 1.0 / (12.0 * cfg.ct3 * K1 * K1);
  return std::min(std::min(t1, t2), std::min(t3, cfg.T));
}

// Reference run (seed 1, nu = sigma = 1), the source of the SolverConfig
// defaults:
//   N=4   c1 0.0279  c2 0.296  c3 0.0219   ct1 0.0151  ct2 0.156  ct3 0.0113
//   N=8   c1 0.0307  c2 0.315  c3 0.0214   ct1 0.0137  ct2 0.143  ct3 0.0107
//   N=16  c1 0.0230  c2 0.227  c3 0.0119   ct1 0.0121  ct2 0.121  ct3 0.0087
Calibration calibrate(const LatticeSpec& lat, std::uint64_t seed, const StepContext& ctx) {
  Calibration cal{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  const double times[] = {0.05, 0.1, 0.2, 0.4};
  for (int rep = 0; rep < 3; ++rep) {
    const std::uint64_t s = seed + 100 * static_cast<std::uint64_t>(rep);
    SpectralField v = leray_project(random_hermitian_field(lat, 3, s + 1));
    SpectralField B = leray_project(random_hermitian_field(lat, 3, s + 2));
    SpectralField E = random_hermitian_field(lat, 3, s + 3);
    SpectralField v2 = v, B2 = B, E2 = E;
    axpy(0.25, leray_project(random_hermitian_field(lat, 3, s + 4)), v2);
    axpy(0.25, leray_project(random_hermitian_field(lat, 3, s + 5)), B2);
    axpy(0.25, random_hermitian_field(lat, 3, s + 6), E2);

    double K = 0.0;
    for (const SpectralField* f : {&v, &B, &E, &v2, &B2, &E2}) K = std::max(K, xnorm(*f, 0));
    const double L = xnorm(v - v2, 0) + xnorm(B - B2, 0) + xnorm(E - E2, 0);

    for (const double t : times) {
      const double rt = std::sqrt(t);
      const double a1 = xnorm(M1(v, v, t, ctx), 0);
      const double a2 = xnorm(M2(E, B, t, ctx), 0);
      const double a3 = xnorm(M3(v, B, B, t, ctx), 0);
      const double a4 = xnorm(M4(v, B, t, ctx), 0);
      const double a5 = xnorm(M5(v, B, t, ctx), 0);
      const double a6 = xnorm(M6(v, B, t, ctx), 0);
      cal.m1 = std::max(cal.m1, a1 / (rt * K * K));
      cal.m2 = std::max(cal.m2, a2 / (t * K * K));
      cal.m3 = std::max(cal.m3, a3 / (t * K * K * K));
      cal.m4 = std::max(cal.m4, a4 / (t * K * K));
      cal.m5 = std::max(cal.m5, a5 / (t * K * K));
      cal.m6 = std::max(cal.m6, a6 / (t * K * K));
      cal.c1 = std::max(cal.c1, a1 / (rt * K * K));
      cal.c2 = std::max(cal.c2, (a2 + a4 + a5 + a6) / (t * K * K));
      cal.c3 = std::max(cal.c3, a3 / (t * K * K * K));

      const double d1 = xnorm(M1(v, v, t, ctx) - M1(v2, v2, t, ctx), 0);
      const double d2 = xnorm(M2(E, B, t, ctx) - M2(E2, B2, t, ctx), 0) +
                        xnorm(M4(v, B, t, ctx) - M4(v2, B2, t, ctx), 0) +
                        xnorm(M5(v, B, t, ctx) - M5(v2, B2, t, ctx), 0) +
                        xnorm(M6(v, B, t, ctx) - M6(v2, B2, t, ctx), 0);
      const double d3 = xnorm(M3(v, B, B, t, ctx) - M3(v2, B2, B2, t, ctx), 0);
      cal.ct1 = std::max(cal.ct1, d1 / (rt * K * L));
      cal.ct2 = std::max(cal.ct2, d2 / (t * K * L));
      cal.ct3 = std::max(cal.ct3, d3 / (t * K * K * L));
    }
  }
  return cal;
}

}  // namespace wmhd
