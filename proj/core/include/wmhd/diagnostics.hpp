#pragma once

#include <span>

#include "wmhd/solver.hpp"

namespace wmhd {

// One CSV row of measurements along a run. Residual entries that need a
// centered time window are NaN on the first and last rows.
struct DiagnosticsRecord {
  double t = 0.0;
  double energy = 0.0;           // (1/2)(|v|^2 + |B|^2 + |E|^2), discrete L^2 via Parseval
  double dissipation = 0.0;      // |j|^2/sigma + nu |grad v|^2
  double energy_residual = 0.0;  // |dE/dt + dissipation| trapezoid residual
  double div_v = 0.0, div_B = 0.0;  // X^0 norms of the divergences
  double mean_B = 0.0;              // |B(0)|
  double faraday = 0.0, ampere = 0.0, momentum = 0.0;
  std::vector<double> xnorms;  // one entry per configured s
};

// (1/2) sum of squared coefficient magnitudes over v, B, Etil+Ebar.
double total_energy(const StateVector& s);

// |j|^2/sigma + nu |grad v|^2, both in the discrete L^2 (coefficient) sense.
double total_dissipation(const StateVector& s, const StepContext& ctx);

// |(E1 - E0)/dt + (D0 + D1)/2|: the discrete energy-identity residual.
double energy_budget(const StateVector& s0, const StateVector& s1, double dt,
                     const StepContext& ctx);

// X^0 norms of the original-system residuals at the middle state, time
// derivatives by centered differences. The arbiter for every sign convention
// in the solver.
struct SystemResiduals {
  double faraday = 0.0;   // d_t B + curl E
  double ampere = 0.0;    // d_t E - curl B + j
  double momentum = 0.0;  // d_t v + div(v tensor v) - nu lap v + grad p - j x B
};
SystemResiduals system_residuals(const StateVector& prev, const StateVector& mid,
                                 const StateVector& next, const StepContext& ctx);
SystemResiduals system_residuals(std::span<const StateVector> window, const StepContext& ctx);

// |B(0)|, conserved exactly by the magnetic update.
double mean_mode_B(const StateVector& s);

// Euclidean magnitudes of the state-invariant defects.
struct StateDefects {
  double div_v = 0.0, div_B = 0.0;
  double etil_div = 0.0;   // X^0 norm of div Etil
  double ebar_curl = 0.0;  // X^0 norm of curl Ebar
  double mean_B = 0.0;
};
StateDefects state_defects(const StateVector& s);

// Least-squares fit of log(magnitude) against log(abscissa).
struct SlopeFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
SlopeFit slope_fit_values(std::span<const double> abscissa, std::span<const double> magnitude);

// Fit of log|u(m*axis)| vs log m for m in [m_lo, m_hi]; component picks one
// coefficient entry (-1: Euclidean magnitude over components). For envelope
// fits, extract per-mode window suprema first and use slope_fit_values.
SlopeFit slope_fit(const SpectralField& u, const std::array<int, 3>& axis,
                   int m_lo, int m_hi, int component = -1);

// Sum over the four fields of xnorm(field, k) per state: a |grad^k| series
// (the weight (1+|n|^2)^{k/2} dominates |n|^k).
std::vector<double> gradient_norm_series(std::span<const StateVector> trajectory, int k);

// One full oscillation period 2 pi / sqrt(m - damping^2/4) of the damped-wave
// multiplier at squared wavenumber m; the envelope window width.
double wave_period(double m, double damping = 1.0);

// Brute-force check of the profile convolution inequality: evaluates
//   ratio(n) = sum_{|k|_inf <= 2 n_max} rho_s(k) rho_s2(n-k) / rho_min(s,s2)(n)
// over |n|_inf <= n_max and returns the maximum and where it occurs.
// The inequality's implicit constant is measured, not assumed <= 1.
struct LemmaCheck {
  double max_ratio = 0.0;
  std::array<int, 3> argmax{0, 0, 0};
};
LemmaCheck lemma_check(double s, double s2, double c1, double c2, int n_max);

}  // namespace wmhd
