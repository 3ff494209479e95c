#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "wmhd/field.hpp"

namespace wmhd {

// Fundamental multipliers of the damped wave operator d_tt + d_t - Lap per
// squared wavenumber m = |n|^2: the solution with data (y(0), y'(0)) = (a, b)
// is y(t) = phi1(t,m) a + phi2(t,m) (a/2 + b).
//
// m >= 1 is the oscillatory branch with omega = sqrt(m - 1/4); m = 0 is the
// hyperbolic branch (the only lattice value below the critical damping 1/4),
// where the same analytic formulas continue to cosh/sinh form.
double phi1(double t, double m);   // e^{-t/2} cos(omega t);        m=0: (1+e^{-t})/2
double phi2(double t, double m);   // e^{-t/2} sin(omega t)/omega;  m=0: 1-e^{-t}
double dphi2(double t, double m);  // analytic d/dt phi2;           m=0: e^{-t}

// Same family for damping d (operator d_tt + d d_t - Lap); damping 1 recovers
// phi1/phi2/dphi2. Used to keep the conductivity a config knob.
double wave_phi1(double t, double m, double damping);
double wave_phi2(double t, double m, double damping);
double wave_dphi2(double t, double m, double damping);

// Precomputed multipliers for one time increment, keyed by m = |n|^2
// (at most 3N^2+1 distinct values on the lattice; arrays run over all of them).
struct PropagatorTable {
  LatticeSpec lattice;
  double dt = 0.0;
  double nu = 1.0;
  double damping = 1.0;
  double relax = 1.0;  // e^{-damping*dt}
  std::vector<double> heat;    // e^{-nu m dt}
  std::vector<double> phi1;    // wave_phi1(dt, m, damping)
  std::vector<double> phi2;
  std::vector<double> dphi2;

  PropagatorTable(LatticeSpec lat, double dt, double nu, double damping = 1.0);

  // Debug dump, columns: m, heat, phi1, phi2, dphi2.
  void write_csv(std::ostream& os) const;
};

// Mode-wise multiplier application.
SpectralField apply_heat(const SpectralField& u, double t, double nu);
SpectralField apply_L1(const SpectralField& u, double t);  // phi1(t,|n|^2)
SpectralField apply_L2(const SpectralField& u, double t);  // phi2(t,|n|^2)

// The four Duhamel kernels of the mild formulation.
enum class Kernel { heat, phi2, dphi2, relax };

// Cumulative kernel moments over [0, x] for squared wavenumber m:
//   j0 = int_0^x K(tau) dtau,   j1 = int_0^x tau K(tau) dtau.
// Closed forms for every kernel; series fallbacks keep small-argument cases
// accurate. These moments make the Duhamel rule below exact for forcings that
// are constant or linear in time.
void kernel_moments(Kernel k, double m, double nu, double damping, double x,
                    double& j0, double& j1);

// int_{t_low}^{t_high} K(t_high - s) F(s) ds, forcing sampled uniformly on
// [t_low, t_high] (samples.front() at t_low, samples.back() at t_high).
// One sample means forcing constant in time (then the result is exact for
// every kernel); k+1 samples use the piecewise-linear-in-s rule with exact
// kernel moments per substep (second order in the substep width).
SpectralField duhamel(Kernel kernel, std::span<const SpectralField> samples,
                      double t_low, double t_high, double nu = 1.0, double damping = 1.0);

}  // namespace wmhd
