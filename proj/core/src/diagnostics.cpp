#include "wmhd/diagnostics.hpp"

#include <cmath>
#include <numbers>

#include "wmhd/calculus.hpp"
#include "wmhd/decay.hpp"

namespace wmhd {

namespace {

double sum_sq(const SpectralField& u) {
  double s = 0.0;
  for (const cplx& z : u.coeff) s += std::norm(z);
  return s;
}

// sum over modes of |n|^2 |u(n)|^2.
double sum_sq_grad(const SpectralField& u) {
  const int N = u.lattice.cutoff;
  const int c = u.components;
  double s = 0.0;
  std::size_t idx = 0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3, ++idx) {
        const double m = LatticeSpec::norm2(n1, n2, n3);
        for (int k = 0; k < c; ++k) s += m * std::norm(u.coeff[idx * c + k]);
      }
  return s;
}

}  // namespace

double total_energy(const StateVector& s) {
  const SpectralField E = s.Etil + s.Ebar;
  return 0.5 * (sum_sq(s.v) + sum_sq(s.B) + sum_sq(E));
}

double total_dissipation(const StateVector& s, const StepContext& ctx) {
  const SpectralField j = compute_j(s.v, s.B, s.Etil, s.Ebar, ctx.sigma, ctx.products);
  return sum_sq(j) / ctx.sigma + ctx.nu * sum_sq_grad(s.v);
}

double energy_budget(const StateVector& s0, const StateVector& s1, double dt,
                     const StepContext& ctx) {
  const double de = (total_energy(s1) - total_energy(s0)) / dt;
  const double dmid = 0.5 * (total_dissipation(s0, ctx) + total_dissipation(s1, ctx));
  return std::abs(de + dmid);
}

SystemResiduals system_residuals(const StateVector& prev, const StateVector& mid,
                                 const StateVector& next, const StepContext& ctx) {
  const double window = next.t - prev.t;
  const double inv = 1.0 / window;

  SpectralField E_mid = mid.Etil + mid.Ebar;
  SpectralField j_mid = compute_j(mid.v, mid.B, mid.Etil, mid.Ebar, ctx.sigma, ctx.products);

  SystemResiduals r;

  {
    SpectralField res = next.B - prev.B;
    res *= inv;
    res += curl(E_mid);
    r.faraday = xnorm(res, 0);
  }
  {
    SpectralField res = (next.Etil + next.Ebar) - (prev.Etil + prev.Ebar);
    res *= inv;
    res -= curl(mid.B);
    res += j_mid;
    r.ampere = xnorm(res, 0);
  }
  {
    SpectralField res = next.v - prev.v;
    res *= inv;
    res += ctx.products.tensor_divergence(mid.v, mid.v);
    axpy(-ctx.nu, laplacian(mid.v), res);
    res += gradient(recover_pressure(mid.v, j_mid, mid.B, ctx.products));
    res -= ctx.products.cross(j_mid, mid.B);
    r.momentum = xnorm(res, 0);
  }
  return r;
}

SystemResiduals system_residuals(std::span<const StateVector> window, const StepContext& ctx) {
  if (window.size() < 3) throw std::invalid_argument("system_residuals: need at least 3 states");
  return system_residuals(window.front(), window[window.size() / 2], window.back(), ctx);
}

double mean_mode_B(const StateVector& s) {
  double m2 = 0.0;
  for (int c = 0; c < 3; ++c) m2 += std::norm(s.B.at(0, 0, 0, c));
  return std::sqrt(m2);
}

StateDefects state_defects(const StateVector& s) {
  StateDefects d;
  d.div_v = xnorm(divergence(s.v), 0);
  d.div_B = xnorm(divergence(s.B), 0);
  d.etil_div = xnorm(divergence(s.Etil), 0);
  d.ebar_curl = xnorm(curl(s.Ebar), 0);
  d.mean_B = mean_mode_B(s);
  return d;
}

SlopeFit slope_fit_values(std::span<const double> abscissa, std::span<const double> magnitude) {
  if (abscissa.size() != magnitude.size())
    throw std::invalid_argument("slope_fit_values: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    if (abscissa[i] > 0.0 && magnitude[i] > 0.0 && std::isfinite(magnitude[i])) {
      xs.push_back(std::log(abscissa[i]));
      ys.push_back(std::log(magnitude[i]));
    }
  }
  SlopeFit fit;
  const std::size_t n = xs.size();
  if (n < 2) {
    fit.exponent = std::nan("");
    fit.intercept = std::nan("");
    return fit;
  }
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ssres = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    ssres += e * e;
  }
  fit.r2 = (syy > 0) ? 1.0 - ssres / syy : 1.0;
  return fit;
}

SlopeFit slope_fit(const SpectralField& u, const std::array<int, 3>& axis, int m_lo, int m_hi,
                   int component) {
  std::vector<double> xs, ys;
  for (int m = m_lo; m <= m_hi; ++m) {
    const int n1 = m * axis[0], n2 = m * axis[1], n3 = m * axis[2];
    if (!u.lattice.contains(n1, n2, n3)) break;
    double mag;
    if (component >= 0) {
      mag = std::abs(u.at(n1, n2, n3, component));
    } else {
      double m2 = 0.0;
      for (int c = 0; c < u.components; ++c) m2 += std::norm(u.at(n1, n2, n3, c));
      mag = std::sqrt(m2);
    }
    xs.push_back(m);
    ys.push_back(mag);
  }
  return slope_fit_values(xs, ys);
}

std::vector<double> gradient_norm_series(std::span<const StateVector> trajectory, int k) {
  std::vector<double> out;
  out.reserve(trajectory.size());
  for (const StateVector& s : trajectory)
    out.push_back(xnorm(s.v, k) + xnorm(s.B, k) + xnorm(s.Etil, k) + xnorm(s.Ebar, k));
  return out;
}

double wave_period(double m, double damping) {
  const double disc = m - 0.25 * damping * damping;
  if (disc <= 0.0) throw std::invalid_argument("wave_period: mode is not oscillatory");
  return 2.0 * std::numbers::pi / std::sqrt(disc);
}

LemmaCheck lemma_check(double s, double s2, double c1, double c2, int n_max) {
  if (n_max < 1) throw std::invalid_argument("lemma_check: n_max must be >= 1");
  const DecayProfile ps{s, c1, c2};
  const DecayProfile ps2{s2, c1, c2};
  const DecayProfile pmin{std::min(s, s2), c1, c2};

  // rho depends on |k|^2 only; LUTs over the two squared-norm ranges involved.
  const int inner = 2 * n_max;                  // |k|_inf bound
  const int lhs_top = 3 * inner * inner;        // max |k|^2
  const int rhs_top = 3 * (3 * n_max) * (3 * n_max);  // max |n - k|^2
  std::vector<double> lut_s(lhs_top + 1), lut_s2(rhs_top + 1);
  for (int m = 0; m <= lhs_top; ++m)
    lut_s[m] = ps.c1 / (ps.c2 + std::pow(double(m), 0.5 * (3.0 + ps.s)));
  for (int m = 0; m <= rhs_top; ++m)
    lut_s2[m] = ps2.c1 / (ps2.c2 + std::pow(double(m), 0.5 * (3.0 + ps2.s)));

  LemmaCheck best;
  // The ratio is invariant under coordinate permutations and sign flips of n
  // (the k-sum runs over a symmetric box), so n1 >= n2 >= n3 >= 0 covers all.
  for (int n1 = 0; n1 <= n_max; ++n1)
    for (int n2 = 0; n2 <= n1; ++n2)
      for (int n3 = 0; n3 <= n2; ++n3) {
        double acc = 0.0;
        for (int k1 = -inner; k1 <= inner; ++k1) {
          const int d1 = n1 - k1;
          for (int k2 = -inner; k2 <= inner; ++k2) {
            const int d2 = n2 - k2;
            const int part = k1 * k1 + k2 * k2;
            const int dpart = d1 * d1 + d2 * d2;
            for (int k3 = -inner; k3 <= inner; ++k3) {
              const int d3 = n3 - k3;
              acc += lut_s[part + k3 * k3] * lut_s2[dpart + d3 * d3];
            }
          }
        }
        const double ratio = acc / rho_eval(pmin, n1, n2, n3);
        if (ratio > best.max_ratio) {
          best.max_ratio = ratio;
          best.argmax = {n1, n2, n3};
        }
      }
  return best;
}

}  // namespace wmhd
