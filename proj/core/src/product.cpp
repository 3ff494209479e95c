#include "wmhd/product.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace wmhd {

SpectralField convolve_direct(const SpectralField& f, const SpectralField& g) {
  require_same_lattice(f, g);
  const int cf = f.components, cg = g.components;
  const int co = (cf == 1 && cg == 1) ? 1 : 3;
  if ((cf != 1 && cf != 3) || (cg != 1 && cg != 3))
    throw std::invalid_argument("convolve: components must be 1 or 3");
  SpectralField out(f.lattice, co);
  const int N = f.lattice.cutoff;

  std::size_t ia = 0;
  for (int a1 = -N; a1 <= N; ++a1)
    for (int a2 = -N; a2 <= N; ++a2)
      for (int a3 = -N; a3 <= N; ++a3, ++ia) {
        std::size_t ib = 0;
        for (int b1 = -N; b1 <= N; ++b1) {
          const int n1 = a1 + b1;
          if (n1 < -N || n1 > N) { ib += std::size_t(2 * N + 1) * std::size_t(2 * N + 1); continue; }
          for (int b2 = -N; b2 <= N; ++b2) {
            const int n2 = a2 + b2;
            if (n2 < -N || n2 > N) { ib += std::size_t(2 * N + 1); continue; }
            for (int b3 = -N; b3 <= N; ++b3, ++ib) {
              const int n3 = a3 + b3;
              if (n3 < -N || n3 > N) continue;
              const std::size_t io = out.lattice.index(n1, n2, n3);
              if (co == 1) {
                out.coeff[io] += f.coeff[ia] * g.coeff[ib];
              } else {
                for (int k = 0; k < 3; ++k) {
                  const cplx fa = (cf == 1) ? f.coeff[ia] : f.coeff[ia * 3 + k];
                  const cplx gb = (cg == 1) ? g.coeff[ib] : g.coeff[ib * 3 + k];
                  out.coeff[io * 3 + k] += fa * gb;
                }
              }
            }
          }
        }
      }
  return out;
}

int padded_edge(int edge_min) {
  auto smooth = [](int v) {
    for (int p : {2, 3, 5, 7})
      while (v % p == 0) v /= p;
    return v == 1;
  };
  int v = edge_min;
  while (!smooth(v)) ++v;
  return v;
}

namespace {
// FFTW planning and destruction are not thread-safe; execution on distinct
// plans is. One process-wide lock for the non-reentrant parts.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct SpectralProducts::Impl {
  int M = 0;
  std::size_t real_count = 0, half_count = 0;
  double* real = nullptr;
  fftw_complex* half = nullptr;
  fftw_plan c2r = nullptr, r2c = nullptr;
  std::vector<std::vector<double>> pool;

  explicit Impl(int big) : M(big) {
    real_count = std::size_t(M) * M * M;
    half_count = std::size_t(M) * M * (M / 2 + 1);
    real = fftw_alloc_real(real_count);
    half = fftw_alloc_complex(half_count);
    if (!real || !half) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(plan_mutex());
    c2r = fftw_plan_dft_c2r_3d(M, M, M, half, real, FFTW_ESTIMATE);
    r2c = fftw_plan_dft_r2c_3d(M, M, M, real, half, FFTW_ESTIMATE);
    if (!c2r || !r2c) throw std::runtime_error("FFTW plan creation failed");
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (c2r) fftw_destroy_plan(c2r);
    if (r2c) fftw_destroy_plan(r2c);
    fftw_free(real);
    fftw_free(half);
  }

  double* grid(std::size_t slot) {
    if (pool.size() <= slot) pool.resize(slot + 1);
    if (pool[slot].size() != real_count) pool[slot].assign(real_count, 0.0);
    return pool[slot].data();
  }

  int wrap(int x) const { return x < 0 ? x + M : x; }

  std::size_t half_index(int k1, int k2, int k3) const {
    return (std::size_t(k1) * M + k2) * (M / 2 + 1) + k3;
  }

  // Spectral -> physical samples on the padded grid, one component.
  // Requires a Hermitian input field (real fields only).
  void to_phys(const SpectralField& u, int comp, double* dst) {
    std::memset(half, 0, half_count * sizeof(fftw_complex));
    const int N = u.lattice.cutoff;
    const int c = u.components;
    for (int n1 = -N; n1 <= N; ++n1)
      for (int n2 = -N; n2 <= N; ++n2)
        for (int n3 = 0; n3 <= N; ++n3) {  // n3 < 0 is implied by Hermitian symmetry
          const cplx z = u.coeff[u.lattice.index(n1, n2, n3) * c + comp];
          const std::size_t h = half_index(wrap(n1), wrap(n2), n3);
          half[h][0] = z.real();
          half[h][1] = z.imag();
        }
    fftw_execute(c2r);  // destroys `half`, which is refilled per call
    std::memcpy(dst, real, real_count * sizeof(double));
  }

  // Physical product grid -> one spectral component of `out` (overwrites it).
  // mode_scale lets callers fold in a per-mode factor during extraction.
  template <class Scale>
  void from_phys(const double* src, SpectralField& out, int comp, Scale&& mode_scale, bool accumulate) {
    std::memcpy(real, src, real_count * sizeof(double));
    fftw_execute(r2c);
    const int N = out.lattice.cutoff;
    const int c = out.components;
    const double inv = 1.0 / double(real_count);
    for (int n1 = -N; n1 <= N; ++n1)
      for (int n2 = -N; n2 <= N; ++n2)
        for (int n3 = -N; n3 <= N; ++n3) {
          cplx z;
          if (n3 >= 0) {
            const std::size_t h = half_index(wrap(n1), wrap(n2), n3);
            z = cplx(half[h][0], half[h][1]);
          } else {
            const std::size_t h = half_index(wrap(-n1), wrap(-n2), -n3);
            z = std::conj(cplx(half[h][0], half[h][1]));
          }
          z *= inv;
          z = mode_scale(n1, n2, n3, z);
          cplx& o = out.coeff[out.lattice.index(n1, n2, n3) * c + comp];
          if (accumulate) o += z; else o = z;
        }
  }
};

SpectralProducts::SpectralProducts(LatticeSpec lat)
    : lat_(lat), big_(padded_edge(2 * lat.edge())) {
  impl_ = std::make_unique<Impl>(big_);
}

SpectralProducts::~SpectralProducts() = default;

namespace {
inline cplx identity_scale(int, int, int, cplx z) { return z; }
}  // namespace

SpectralField SpectralProducts::convolve(const SpectralField& f, const SpectralField& g) {
  require_same_lattice(f, g);
  if (!(f.lattice == lat_)) throw std::invalid_argument("SpectralProducts: wrong lattice");
  const int cf = f.components, cg = g.components;
  const int co = (cf == 1 && cg == 1) ? 1 : 3;
  SpectralField out(lat_, co);
  auto& im = *impl_;
  const std::size_t n = im.real_count;

  if (co == 1) {
    double* a = im.grid(0);
    double* b = im.grid(1);
    im.to_phys(f, 0, a);
    im.to_phys(g, 0, b);
    for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
    im.from_phys(a, out, 0, identity_scale, false);
    return out;
  }

  // Scalar arguments broadcast over the three components.
  double* fa = im.grid(0);
  double* fb = im.grid(1);
  double* fc = im.grid(2);
  double* gx = im.grid(3);
  double* prod = im.grid(4);
  if (cf == 1) {
    im.to_phys(f, 0, fa);
    fb = fc = fa;
  } else {
    im.to_phys(f, 0, fa);
    im.to_phys(f, 1, fb);
    im.to_phys(f, 2, fc);
  }
  double* fs[3] = {fa, fb, fc};
  for (int k = 0; k < 3; ++k) {
    im.to_phys(g, (cg == 1) ? 0 : k, gx);
    const double* fk = fs[(cf == 1) ? 0 : k];
    for (std::size_t i = 0; i < n; ++i) prod[i] = fk[i] * gx[i];
    im.from_phys(prod, out, k, identity_scale, false);
  }
  return out;
}

SpectralField SpectralProducts::cross(const SpectralField& f, const SpectralField& g) {
  require_same_lattice(f, g);
  if (!(f.lattice == lat_)) throw std::invalid_argument("SpectralProducts: wrong lattice");
  require_components(f, 3, "cross");
  require_components(g, 3, "cross");
  SpectralField out(lat_, 3);
  auto& im = *impl_;
  const std::size_t n = im.real_count;

  double* fg[6];
  for (int k = 0; k < 3; ++k) {
    fg[k] = im.grid(k);
    im.to_phys(f, k, fg[k]);
  }
  for (int k = 0; k < 3; ++k) {
    fg[3 + k] = im.grid(3 + k);
    im.to_phys(g, k, fg[3 + k]);
  }
  double* prod = im.grid(6);
  for (int k = 0; k < 3; ++k) {
    const int i1 = (k + 1) % 3, i2 = (k + 2) % 3;
    const double* f1 = fg[i1];
    const double* f2 = fg[i2];
    const double* g1 = fg[3 + i1];
    const double* g2 = fg[3 + i2];
    for (std::size_t i = 0; i < n; ++i) prod[i] = f1[i] * g2[i] - f2[i] * g1[i];
    im.from_phys(prod, out, k, identity_scale, false);
  }
  return out;
}

SpectralField SpectralProducts::tensor_divergence(const SpectralField& v, const SpectralField& w) {
  require_same_lattice(v, w);
  if (!(v.lattice == lat_)) throw std::invalid_argument("SpectralProducts: wrong lattice");
  require_components(v, 3, "tensor_divergence");
  require_components(w, 3, "tensor_divergence");
  SpectralField out(lat_, 3);
  auto& im = *impl_;
  const std::size_t n = im.real_count;

  double* vw[6];
  for (int k = 0; k < 3; ++k) {
    vw[k] = im.grid(k);
    im.to_phys(v, k, vw[k]);
  }
  for (int k = 0; k < 3; ++k) {
    vw[3 + k] = im.grid(3 + k);
    im.to_phys(w, k, vw[3 + k]);
  }
  double* prod = im.grid(6);
  const cplx I{0.0, 1.0};
  for (int i = 0; i < 3; ++i) {
    for (int l = 0; l < 3; ++l) {
      for (std::size_t p = 0; p < n; ++p) prod[p] = vw[i][p] * vw[3 + l][p];
      const int axis = l;
      auto deriv = [axis, I](int n1, int n2, int n3, cplx z) {
        const int nl = (axis == 0) ? n1 : (axis == 1) ? n2 : n3;
        return I * double(nl) * z;
      };
      im.from_phys(prod, out, i, deriv, l != 0);
    }
  }
  return out;
}

namespace {
SpectralProducts& cached_engine(LatticeSpec lat) {
  static std::mutex m;
  static std::map<int, std::unique_ptr<SpectralProducts>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[lat.cutoff];
  if (!slot) slot = std::make_unique<SpectralProducts>(lat);
  return *slot;
}
}  // namespace

SpectralField convolve_fft(const SpectralField& f, const SpectralField& g) {
  return cached_engine(f.lattice).convolve(f, g);
}

SpectralField cross(const SpectralField& f, const SpectralField& g) {
  return cached_engine(f.lattice).cross(f, g);
}

}  // namespace wmhd
