#include "wmhd/field.hpp"

#include <algorithm>
#include <cmath>

namespace wmhd {

void require_same_lattice(const SpectralField& a, const SpectralField& b) {
  if (!(a.lattice == b.lattice))
    throw std::invalid_argument("spectral fields live on different lattices");
}

void require_components(const SpectralField& a, int c, const char* who) {
  if (a.components != c)
    throw std::invalid_argument(std::string(who) + ": expected a field with " +
                                std::to_string(c) + " components");
}

static void require_same_shape(const SpectralField& a, const SpectralField& b) {
  require_same_lattice(a, b);
  if (a.components != b.components)
    throw std::invalid_argument("spectral fields have different component counts");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < coeff.size(); ++i) coeff[i] += o.coeff[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < coeff.size(); ++i) coeff[i] -= o.coeff[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  for (auto& z : coeff) z *= a;
  return *this;
}

SpectralField& SpectralField::operator*=(cplx a) {
  for (auto& z : coeff) z *= a;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double a, SpectralField f) { return f *= a; }

void axpy(double a, const SpectralField& x, SpectralField& y) {
  require_same_shape(x, y);
  for (std::size_t i = 0; i < y.coeff.size(); ++i) y.coeff[i] += a * x.coeff[i];
}

double weight(int n1, int n2, int n3, double s) {
  const double q = 1.0 + static_cast<double>(LatticeSpec::norm2(n1, n2, n3));
  return std::pow(q, 0.5 * s);
}

double weight(const std::array<int, 3>& n, double s) { return weight(n[0], n[1], n[2], s); }

double xnorm(const SpectralField& u, double s) {
  const int N = u.lattice.cutoff;
  const int c = u.components;
  double sum = 0.0;
  std::size_t idx = 0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3, ++idx) {
        double mag2 = 0.0;
        for (int k = 0; k < c; ++k) mag2 += std::norm(u.coeff[idx * c + k]);
        if (mag2 == 0.0) continue;
        sum += weight(n1, n2, n3, s) * std::sqrt(mag2);
      }
  return sum;
}

double hermitian_defect(const SpectralField& u) {
  const int N = u.lattice.cutoff;
  const int c = u.components;
  double worst = 0.0;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3) {
        const std::size_t a = u.lattice.index(n1, n2, n3);
        const std::size_t b = u.lattice.index(-n1, -n2, -n3);
        for (int k = 0; k < c; ++k)
          worst = std::max(worst, std::abs(u.coeff[b * c + k] - std::conj(u.coeff[a * c + k])));
      }
  return worst;
}

void symmetrize_hermitian(SpectralField& u) {
  const int N = u.lattice.cutoff;
  const int c = u.components;
  for (int n1 = -N; n1 <= N; ++n1)
    for (int n2 = -N; n2 <= N; ++n2)
      for (int n3 = -N; n3 <= N; ++n3) {
        // Visit each {n, -n} pair once: skip the lexicographically negative half.
        if (n1 < 0 || (n1 == 0 && (n2 < 0 || (n2 == 0 && n3 < 0)))) continue;
        const std::size_t a = u.lattice.index(n1, n2, n3);
        const std::size_t b = u.lattice.index(-n1, -n2, -n3);
        for (int k = 0; k < c; ++k) {
          if (a == b) {
            u.coeff[a * c + k] = cplx(u.coeff[a * c + k].real(), 0.0);
          } else {
            const cplx avg = 0.5 * (u.coeff[a * c + k] + std::conj(u.coeff[b * c + k]));
            u.coeff[a * c + k] = avg;
            u.coeff[b * c + k] = std::conj(avg);
          }
        }
      }
}

}  // namespace wmhd
