// Scalar reference kernels. These define the semantics; the AVX2 variants
// must match them bit-for-bit on elementwise ops (same expression per
// element, no FP contraction) and to rounding on reductions.
#include <cmath>
#include <cstddef>

#include "evrec/kernels.hpp"
#include "tables.hpp"

namespace evrec::kernels::scalar {

void grad_h(const double* img, double* gh, int w, int h) {
  for (int y = 0; y < h; ++y) {
    const double* row = img + static_cast<size_t>(y) * w;
    double* out = gh + static_cast<size_t>(y) * w;
    for (int x = 0; x < w - 1; ++x) out[x] = row[x + 1] - row[x];
    out[w - 1] = row[0] - row[w - 1];
  }
}

void grad_v(const double* img, double* gv, int w, int h) {
  for (int y = 0; y < h - 1; ++y) {
    const double* row = img + static_cast<size_t>(y) * w;
    const double* next = row + w;
    double* out = gv + static_cast<size_t>(y) * w;
    for (int x = 0; x < w; ++x) out[x] = next[x] - row[x];
  }
  const double* last = img + static_cast<size_t>(h - 1) * w;
  double* out = gv + static_cast<size_t>(h - 1) * w;
  for (int x = 0; x < w; ++x) out[x] = img[x] - last[x];
}

void hard_threshold(const double* gh, const double* gv, double thresh,
                    double* zh, double* zv, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const double m = gh[i] * gh[i] + gv[i] * gv[i];
    if (m <= thresh) {
      zh[i] = 0.0;
      zv[i] = 0.0;
    } else {
      zh[i] = gh[i];
      zv[i] = gv[i];
    }
  }
}

void magnitude(const double* gh, const double* gv, double* mag, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    mag[i] = std::sqrt(gh[i] * gh[i] + gv[i] * gv[i]);
  }
}

size_t count_active(const double* zh, const double* zv, size_t n) {
  size_t count = 0;
  for (size_t i = 0; i < n; ++i) {
    if (zh[i] != 0.0 || zv[i] != 0.0) ++count;
  }
  return count;
}

void latent_combine(const double* fk, const double* fb, const double* fi,
                    const double* fzh, const double* fzv,
                    const double* dh, const double* dv,
                    double alpha, double gamma, double* out, size_t n) {
  const double ag = alpha + gamma;
  for (size_t i = 0; i < n; ++i) {
    const size_t r = 2 * i, m = 2 * i + 1;
    const double kr = fk[r], ki = fk[m];
    const double br = fb[r], bi = fb[m];
    const double dhr = dh[r], dhi = dh[m];
    const double dvr = dv[r], dvi = dv[m];

    // conj(K)*B
    double nr = kr * br + ki * bi;
    double ni = kr * bi - ki * br;

    // + alpha * (conj(Dh)+conj(Dv)) * I
    const double er = dhr + dvr;
    const double ei = -(dhi + dvi);
    const double ir = fi[r], ii = fi[m];
    nr += alpha * (er * ir - ei * ii);
    ni += alpha * (er * ii + ei * ir);

    // + gamma * (conj(Dh)*Zh + conj(Dv)*Zv)
    const double zhr = fzh[r], zhi = fzh[m];
    const double zvr = fzv[r], zvi = fzv[m];
    double ar = dhr * zhr + dhi * zhi;
    double ai = dhr * zhi - dhi * zhr;
    ar += dvr * zvr + dvi * zvi;
    ai += dvr * zvi - dvi * zvr;
    nr += gamma * ar;
    ni += gamma * ai;

    const double den = (kr * kr + ki * ki) +
                       ag * ((dhr * dhr + dhi * dhi) + (dvr * dvr + dvi * dvi));
    if (den > 0.0) {
      out[r] = nr / den;
      out[m] = ni / den;
    } else {
      out[r] = 0.0;
      out[m] = 0.0;
    }
  }
}

void kernel_combine(const double* fsh, const double* fsv,
                    const double* fbh, const double* fbv,
                    double sigma, double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const size_t r = 2 * i, m = 2 * i + 1;
    const double shr = fsh[r], shi = fsh[m];
    const double svr = fsv[r], svi = fsv[m];
    const double bhr = fbh[r], bhi = fbh[m];
    const double bvr = fbv[r], bvi = fbv[m];

    double nr = shr * bhr + shi * bhi;
    double ni = shr * bhi - shi * bhr;
    nr += svr * bvr + svi * bvi;
    ni += svr * bvi - svi * bvr;

    const double den = (shr * shr + shi * shi) + (svr * svr + svi * svi) + sigma;
    if (den > 0.0) {
      out[r] = nr / den;
      out[m] = ni / den;
    } else {
      out[r] = 0.0;
      out[m] = 0.0;
    }
  }
}

void complex_mul(const double* a, const double* b, double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const size_t r = 2 * i, m = 2 * i + 1;
    const double ar = a[r], ai = a[m];
    const double br = b[r], bi = b[m];
    out[r] = ar * br - ai * bi;
    out[m] = ar * bi + ai * br;
  }
}

void scale(double* a, double s, size_t n) {
  for (size_t i = 0; i < n; ++i) a[i] *= s;
}

void clamp01(double* a, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    double v = a[i];
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    a[i] = v;
  }
}

double sum(const double* a, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double sum_sq_diff(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

const Ops table = {
    "scalar",   grad_h,         grad_v, hard_threshold, magnitude, count_active,
    latent_combine, kernel_combine, complex_mul, scale, clamp01, sum, sum_sq_diff,
};

}  // namespace evrec::kernels::scalar
