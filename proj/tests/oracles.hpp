// Independent oracles for the test suites. Everything here is brute-force
// and kept deliberately separate from the library implementation paths it
// checks: direct O(n^2) transforms, spatial-domain convolution, a dense
// normal-equations solver, and a literal windowed SSIM.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "evrec/deblur.hpp"
#include "evrec/image.hpp"

namespace oracle {

struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double unit() { return (next() >> 11) * 0x1.0p-53; }  // [0,1)
};

inline evrec::Image random_image(int w, int h, uint64_t seed) {
  evrec::Image img(w, h);
  Rng rng(seed);
  for (size_t i = 0; i < img.size(); ++i) img.data()[i] = rng.unit();
  return img;
}

// Direct discrete transform, negative-exponent forward convention.
inline evrec::Spectrum brute_dft(const evrec::Image& img) {
  const int w = img.width(), h = img.height();
  evrec::Spectrum out(w, h);
  for (int ky = 0; ky < h; ++ky) {
    for (int kx = 0; kx < w; ++kx) {
      std::complex<double> acc{0.0, 0.0};
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double phase = -2.0 * std::numbers::pi *
                               (static_cast<double>(kx) * x / w +
                                static_cast<double>(ky) * y / h);
          acc += img(x, y) * std::complex<double>(std::cos(phase), std::sin(phase));
        }
      }
      out(kx, ky) = acc;
    }
  }
  return out;
}

// Spatial-domain circular convolution with the kernel center at its middle
// tap, matching the solver's psf embedding.
inline evrec::Image brute_circular_conv(const evrec::Image& s,
                                        const evrec::deblur::BlurKernel& k) {
  const int w = s.width(), h = s.height(), c = k.size() / 2;
  evrec::Image out(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = 0; j < k.size(); ++j) {
        for (int i = 0; i < k.size(); ++i) {
          const int sx = (((x - (i - c)) % w) + w) % w;
          const int sy = (((y - (j - c)) % h) + h) % h;
          acc += k(i, j) * s(sx, sy);
        }
      }
      out(x, y) = acc;
    }
  }
  return out;
}

// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> m,
                                       std::vector<double> rhs) {
  const size_t n = rhs.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (size_t r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (size_t r = n; r-- > 0;) {
    double acc = rhs[r];
    for (size_t c = r + 1; c < n; ++c) acc -= m[r][c] * x[c];
    x[r] = acc / m[r][r];
  }
  return x;
}

// Minimizer of
//   ||K s - b||^2 + alpha (||Dh s - i||^2 + ||Dv s - i||^2)
//                 + gamma (||Dh s - zh||^2 + ||Dv s - zv||^2)
// via explicit circulant matrices and dense normal equations.
inline evrec::Image dense_latent_minimizer(const evrec::Image& b,
                                           const evrec::deblur::BlurKernel& k,
                                           const std::vector<double>& prior,
                                           const std::vector<double>& zh,
                                           const std::vector<double>& zv,
                                           double alpha, double gamma) {
  const int w = b.width(), h = b.height();
  const size_t n = static_cast<size_t>(w) * h;
  const int c = k.size() / 2;

  // column j of each operator matrix, built from unit responses
  std::vector<std::vector<double>> km(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> dh(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> dv(n, std::vector<double>(n, 0.0));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t col = static_cast<size_t>(y) * w + x;
      for (int j = 0; j < k.size(); ++j) {
        for (int i = 0; i < k.size(); ++i) {
          const int ox = (x + (i - c) + w) % w;
          const int oy = (y + (j - c) + h) % h;
          km[static_cast<size_t>(oy) * w + ox][col] += k(i, j);
        }
      }
      // dh row r has I(x+1)-I(x): unit at (x,y) contributes +1 to row of
      // (x-1,y) and -1 to its own row
      dh[static_cast<size_t>(y) * w + (x - 1 + w) % w][col] += 1.0;
      dh[col][col] += -1.0;
      dv[static_cast<size_t>((y - 1 + h) % h) * w + x][col] += 1.0;
      dv[col][col] += -1.0;
    }
  }

  auto add_normal = [n](std::vector<std::vector<double>>& m,
                        const std::vector<std::vector<double>>& a, double wgt) {
    for (size_t r = 0; r < n; ++r) {
      for (size_t cc = 0; cc < n; ++cc) {
        double acc = 0.0;
        for (size_t t = 0; t < n; ++t) acc += a[t][r] * a[t][cc];
        m[r][cc] += wgt * acc;
      }
    }
  };
  auto add_rhs = [n](std::vector<double>& rhs, const std::vector<std::vector<double>>& a,
                     const std::vector<double>& v, double wgt) {
    for (size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (size_t t = 0; t < n; ++t) acc += a[t][r] * v[t];
      rhs[r] += wgt * acc;
    }
  };

  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  add_normal(m, km, 1.0);
  add_normal(m, dh, alpha + gamma);
  add_normal(m, dv, alpha + gamma);
  std::vector<double> bv(b.data(), b.data() + n);
  add_rhs(rhs, km, bv, 1.0);
  add_rhs(rhs, dh, prior, alpha);
  add_rhs(rhs, dv, prior, alpha);
  add_rhs(rhs, dh, zh, gamma);
  add_rhs(rhs, dv, zv, gamma);

  std::vector<double> x = solve_dense(std::move(m), std::move(rhs));
  evrec::Image out(w, h);
  for (size_t i = 0; i < n; ++i) out.data()[i] = x[i];
  return out;
}

// Literal windowed SSIM: 11x11 Gaussian (sigma 1.5), per-window double loop.
inline double reference_ssim(const evrec::Image& a, const evrec::Image& b) {
  const int win = 11;
  double taps[win];
  double tsum = 0.0;
  for (int i = 0; i < win; ++i) {
    const double d = i - win / 2;
    taps[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    tsum += taps[i];
  }
  for (double& t : taps) t /= tsum;

  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0.0;
  size_t count = 0;
  for (int y0 = 0; y0 + win <= a.height(); ++y0) {
    for (int x0 = 0; x0 + win <= a.width(); ++x0) {
      double m1 = 0, m2 = 0, s11 = 0, s22 = 0, s12 = 0;
      for (int j = 0; j < win; ++j) {
        for (int i = 0; i < win; ++i) {
          const double wgt = taps[i] * taps[j];
          const double va = a(x0 + i, y0 + j), vb = b(x0 + i, y0 + j);
          m1 += wgt * va;
          m2 += wgt * vb;
          s11 += wgt * va * va;
          s22 += wgt * vb * vb;
          s12 += wgt * va * vb;
        }
      }
      const double v1 = s11 - m1 * m1, v2 = s22 - m2 * m2, cov = s12 - m1 * m2;
      total += ((2 * m1 * m2 + c1) * (2 * cov + c2)) /
               ((m1 * m1 + m2 * m2 + c1) * (v1 + v2 + c2));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

inline double max_abs_diff(const evrec::Image& a, const evrec::Image& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
  }
  return m;
}

}  // namespace oracle
