#include "wmhd/propagator.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>

namespace wmhd {

namespace {

// Discriminants within this margin of zero take the critical-damping branch.
// The closed forms on either side agree with it to ~sqrt(margin) * t^2, far
// below every tolerance in use; the margin only exists to dodge 0/0.
constexpr double kCriticalTol = 1e-8;

// int_0^x e^{r tau} dtau.
double g_int(double r, double x) { return r == 0.0 ? x : std::expm1(r * x) / r; }

// int_0^x tau e^{r tau} dtau; series below |rx| = 1e-3 where the closed form
// cancels.
double h_int(double r, double x) {
  const double w = r * x;
  if (std::abs(w) < 1e-3)
    return x * x * (0.5 + w * (1.0 / 3 + w * (1.0 / 8 + w * (1.0 / 30 + w / 144))));
  return x * std::exp(w) / r - std::expm1(w) / (r * r);
}

// int_0^x tau^2 e^{r tau} dtau.
double q_int(double r, double x) {
  const double w = r * x;
  if (std::abs(w) < 1e-3)
    return x * x * x * (1.0 / 3 + w * (0.25 + w * (0.1 + w * (1.0 / 36 + w / 168))));
  return x * x * std::exp(w) / r - 2.0 * h_int(r, x) / r;
}

std::complex<double> g_int_c(std::complex<double> z, double x) {
  const std::complex<double> w = z * x;
  if (std::abs(w) < 1e-3)
    return x * (1.0 + w * (0.5 + w * (1.0 / 6 + w * (1.0 / 24 + w / 120.0))));
  return (std::exp(w) - 1.0) / z;
}

std::complex<double> h_int_c(std::complex<double> z, double x) {
  const std::complex<double> w = z * x;
  if (std::abs(w) < 1e-3)
    return x * x * (0.5 + w * (1.0 / 3 + w * (1.0 / 8 + w * (1.0 / 30 + w / 144.0))));
  return x * std::exp(w) / z - (std::exp(w) - 1.0) / (z * z);
}

}  // namespace

double wave_phi1(double t, double m, double damping) {
  const double disc = m - 0.25 * damping * damping;
  if (std::abs(disc) <= kCriticalTol) return std::exp(-0.5 * damping * t);
  if (disc > 0.0) {
    const double om = std::sqrt(disc);
    return std::exp(-0.5 * damping * t) * std::cos(om * t);
  }
  const double ka = std::sqrt(-disc);
  return 0.5 * (std::exp((-0.5 * damping + ka) * t) + std::exp((-0.5 * damping - ka) * t));
}

double wave_phi2(double t, double m, double damping) {
  const double disc = m - 0.25 * damping * damping;
  if (std::abs(disc) <= kCriticalTol) return t * std::exp(-0.5 * damping * t);
  if (disc > 0.0) {
    const double om = std::sqrt(disc);
    return std::exp(-0.5 * damping * t) * std::sin(om * t) / om;
  }
  const double ka = std::sqrt(-disc);
  return (std::exp((-0.5 * damping + ka) * t) - std::exp((-0.5 * damping - ka) * t)) / (2.0 * ka);
}

double wave_dphi2(double t, double m, double damping) {
  const double disc = m - 0.25 * damping * damping;
  if (std::abs(disc) <= kCriticalTol)
    return std::exp(-0.5 * damping * t) * (1.0 - 0.5 * damping * t);
  if (disc > 0.0) {
    const double om = std::sqrt(disc);
    return std::exp(-0.5 * damping * t) *
           (std::cos(om * t) - 0.5 * damping * std::sin(om * t) / om);
  }
  const double ka = std::sqrt(-disc);
  const double rp = -0.5 * damping + ka, rm = -0.5 * damping - ka;
  return (rp * std::exp(rp * t) - rm * std::exp(rm * t)) / (2.0 * ka);
}

double phi1(double t, double m) { return wave_phi1(t, m, 1.0); }
double phi2(double t, double m) { return wave_phi2(t, m, 1.0); }
double dphi2(double t, double m) { return wave_dphi2(t, m, 1.0); }

PropagatorTable::PropagatorTable(LatticeSpec lat, double dt_, double nu_, double damping_)
    : lattice(lat), dt(dt_), nu(nu_), damping(damping_) {
  relax = std::exp(-damping * dt);
  const int top = lat.max_norm2();
  heat.resize(top + 1);
  phi1.resize(top + 1);
  phi2.resize(top + 1);
  dphi2.resize(top + 1);
  for (int m = 0; m <= top; ++m) {
    heat[m] = std::exp(-nu * m * dt);
    phi1[m] = wave_phi1(dt, m, damping);
    phi2[m] = wave_phi2(dt, m, damping);
    dphi2[m] = wave_dphi2(dt, m, damping);
  }
}

void PropagatorTable::write_csv(std::ostream& os) const {
  os << "m,heat,phi1,phi2,dphi2\n";
  char line[160];
  for (std::size_t m = 0; m < heat.size(); ++m) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g\n", m, heat[m], phi1[m],
                  phi2[m], dphi2[m]);
    os << line;
  }
}

namespace {
template <class Mul>
SpectralField apply_multiplier(const SpectralField& u, Mul&& mul) {
  SpectralField out(u.lattice, u.components);
  const int N = u.lattice.cutoff;
  std::size_t idx = 0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3, ++idx) {
        const double f = mul(LatticeSpec::norm2(n1, n2, n3));
        for (int c = 0; c < u.components; ++c)
          out.coeff[idx * u.components + c] = f * u.coeff[idx * u.components + c];
      }
  return out;
}
}  // namespace

SpectralField apply_heat(const SpectralField& u, double t, double nu) {
  return apply_multiplier(u, [&](int m) { return std::exp(-nu * m * t); });
}

SpectralField apply_L1(const SpectralField& u, double t) {
  return apply_multiplier(u, [&](int m) { return wave_phi1(t, m, 1.0); });
}

SpectralField apply_L2(const SpectralField& u, double t) {
  return apply_multiplier(u, [&](int m) { return wave_phi2(t, m, 1.0); });
}

void kernel_moments(Kernel k, double m, double nu, double damping, double x,
                    double& j0, double& j1) {
  switch (k) {
    case Kernel::heat: {
      const double r = -nu * m;
      j0 = g_int(r, x);
      j1 = h_int(r, x);
      return;
    }
    case Kernel::relax: {
      const double r = -damping;
      j0 = g_int(r, x);
      j1 = h_int(r, x);
      return;
    }
    case Kernel::phi2: {
      const double disc = m - 0.25 * damping * damping;
      if (std::abs(disc) <= kCriticalTol) {
        const double r = -0.5 * damping;
        j0 = h_int(r, x);
        j1 = q_int(r, x);
      } else if (disc > 0.0) {
        const double om = std::sqrt(disc);
        const std::complex<double> z(-0.5 * damping, om);
        j0 = g_int_c(z, x).imag() / om;
        j1 = h_int_c(z, x).imag() / om;
      } else {
        const double ka = std::sqrt(-disc);
        const double rp = -0.5 * damping + ka, rm = -0.5 * damping - ka;
        j0 = (g_int(rp, x) - g_int(rm, x)) / (2.0 * ka);
        j1 = (h_int(rp, x) - h_int(rm, x)) / (2.0 * ka);
      }
      return;
    }
    case Kernel::dphi2: {
      // d/dt phi2 integrates back to phi2: j0 = phi2(x), j1 = x phi2(x) - J0_phi2(x).
      double p0, p1;
      kernel_moments(Kernel::phi2, m, nu, damping, x, p0, p1);
      const double phi2x = wave_phi2(x, m, damping);
      j0 = phi2x;
      j1 = x * phi2x - p0;
      (void)p1;
      return;
    }
  }
  throw std::logic_error("kernel_moments: unknown kernel");
}

SpectralField duhamel(Kernel kernel, std::span<const SpectralField> samples,
                      double t_low, double t_high, double nu, double damping) {
  if (samples.empty()) throw std::invalid_argument("duhamel: no samples");
  const SpectralField& f0 = samples.front();
  for (const auto& s : samples) {
    require_same_lattice(f0, s);
    require_components(s, f0.components, "duhamel");
  }
  SpectralField out(f0.lattice, f0.components);
  const double delta = t_high - t_low;
  if (delta == 0.0) return out;
  if (delta < 0.0) throw std::invalid_argument("duhamel: t_high < t_low");

  const int top = f0.lattice.max_norm2();
  const std::size_t k = samples.size() - 1;

  if (k == 0) {
    std::vector<double> w(top + 1);
    for (int m = 0; m <= top; ++m) {
      double j0, j1;
      kernel_moments(kernel, m, nu, damping, delta, j0, j1);
      w[m] = j0;
    }
    const int N = f0.lattice.cutoff;
    std::size_t idx = 0;
    for (int n1 = -N; n1 <= N; ++n1)
      for (int n2 = -N; n2 <= N; ++n2)
        for (int n3 = -N; n3 <= N; ++n3, ++idx) {
          const double f = w[LatticeSpec::norm2(n1, n2, n3)];
          for (int c = 0; c < f0.components; ++c)
            out.coeff[idx * f0.components + c] = f * f0.coeff[idx * f0.components + c];
        }
    return out;
  }

  // Piecewise-linear forcing: sample s_i covers tau in [h(k-1-i), h(k-i)]
  // after tau = t_high - s. coef[i][m] collects both substeps touching i.
  const double h = delta / static_cast<double>(k);
  std::vector<double> j0c(k + 1), j1c(k + 1);
  std::vector<std::vector<double>> coef(k + 1, std::vector<double>(top + 1, 0.0));
  for (int m = 0; m <= top; ++m) {
    for (std::size_t j = 0; j <= k; ++j)
      kernel_moments(kernel, m, nu, damping, h * static_cast<double>(j), j0c[j], j1c[j]);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = k - 1 - i;  // tau interval [h j, h (j+1)]
      const double b = h * static_cast<double>(j + 1);
      const double i0 = j0c[j + 1] - j0c[j];
      const double i1 = j1c[j + 1] - j1c[j];
      const double wr = (b * i0 - i1) / h;
      coef[i][m] += i0 - wr;
      coef[i + 1][m] += wr;
    }
  }

  const int N = f0.lattice.cutoff;
  for (std::size_t i = 0; i <= k; ++i) {
    const SpectralField& fi = samples[i];
    const std::vector<double>& cm = coef[i];
    std::size_t idx = 0;
    for (int n1 = -N; n1 <= N; ++n1)
      for (int n2 = -N; n2 <= N; ++n2)
        for (int n3 = -N; n3 <= N; ++n3, ++idx) {
          const double f = cm[LatticeSpec::norm2(n1, n2, n3)];
          for (int c = 0; c < f0.components; ++c)
            out.coeff[idx * f0.components + c] += f * fi.coeff[idx * f0.components + c];
        }
  }
  return out;
}

}  // namespace wmhd
