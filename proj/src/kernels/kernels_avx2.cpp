// AVX2 variants of the dispatch kernels. This TU is compiled with -mavx2 and
// only entered after the cpuid check in kernels.cpp, so keep everything that
// can execute AVX2 instructions inside this file.
//
// Elementwise kernels replicate the scalar expressions per element (mul/add
// only, no FMA) and are bit-identical to the scalar backend. Reductions sum
// four lanes and combine at the end, so they agree with scalar only to
// rounding.
#ifdef EVREC_HAVE_AVX2_TU

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

#include "evrec/kernels.hpp"
#include "tables.hpp"

namespace evrec::kernels::avx2 {
namespace {

struct C4 {
  __m256d re, im;  // lane order (0,2,1,3); consistent across all operands
};

inline C4 load4c(const double* p) {
  const __m256d a = _mm256_loadu_pd(p);
  const __m256d b = _mm256_loadu_pd(p + 4);
  return {_mm256_unpacklo_pd(a, b), _mm256_unpackhi_pd(a, b)};
}

inline void store4c(double* p, const C4& v) {
  _mm256_storeu_pd(p, _mm256_unpacklo_pd(v.re, v.im));
  _mm256_storeu_pd(p + 4, _mm256_unpackhi_pd(v.re, v.im));
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return ((lanes[0] + lanes[1]) + lanes[2]) + lanes[3];
}

}  // namespace

void grad_h(const double* img, double* gh, int w, int h) {
  for (int y = 0; y < h; ++y) {
    const double* row = img + static_cast<size_t>(y) * w;
    double* out = gh + static_cast<size_t>(y) * w;
    int x = 0;
    for (; x + 4 <= w - 1; x += 4) {
      const __m256d a = _mm256_loadu_pd(row + x);
      const __m256d b = _mm256_loadu_pd(row + x + 1);
      _mm256_storeu_pd(out + x, _mm256_sub_pd(b, a));
    }
    for (; x < w - 1; ++x) out[x] = row[x + 1] - row[x];
    out[w - 1] = row[0] - row[w - 1];
  }
}

void grad_v(const double* img, double* gv, int w, int h) {
  for (int y = 0; y < h; ++y) {
    const double* row = img + static_cast<size_t>(y) * w;
    const double* next = (y + 1 < h) ? row + w : img;
    double* out = gv + static_cast<size_t>(y) * w;
    int x = 0;
    for (; x + 4 <= w; x += 4) {
      const __m256d a = _mm256_loadu_pd(row + x);
      const __m256d b = _mm256_loadu_pd(next + x);
      _mm256_storeu_pd(out + x, _mm256_sub_pd(b, a));
    }
    for (; x < w; ++x) out[x] = next[x] - row[x];
  }
}

void hard_threshold(const double* gh, const double* gv, double thresh,
                    double* zh, double* zv, size_t n) {
  const __m256d th = _mm256_set1_pd(thresh);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(gh + i);
    const __m256d b = _mm256_loadu_pd(gv + i);
    const __m256d m = _mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    const __m256d keep = _mm256_cmp_pd(m, th, _CMP_GT_OQ);
    _mm256_storeu_pd(zh + i, _mm256_and_pd(keep, a));
    _mm256_storeu_pd(zv + i, _mm256_and_pd(keep, b));
  }
  for (; i < n; ++i) {
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
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(gh + i);
    const __m256d b = _mm256_loadu_pd(gv + i);
    const __m256d m = _mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    _mm256_storeu_pd(mag + i, _mm256_sqrt_pd(m));
  }
  for (; i < n; ++i) mag[i] = __builtin_sqrt(gh[i] * gh[i] + gv[i] * gv[i]);
}

size_t count_active(const double* zh, const double* zv, size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  size_t count = 0;
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_cmp_pd(_mm256_loadu_pd(zh + i), zero, _CMP_NEQ_UQ);
    const __m256d b = _mm256_cmp_pd(_mm256_loadu_pd(zv + i), zero, _CMP_NEQ_UQ);
    count += static_cast<size_t>(__builtin_popcount(
        static_cast<unsigned>(_mm256_movemask_pd(_mm256_or_pd(a, b)))));
  }
  for (; i < n; ++i) {
    if (zh[i] != 0.0 || zv[i] != 0.0) ++count;
  }
  return count;
}

void latent_combine(const double* fk, const double* fb, const double* fi,
                    const double* fzh, const double* fzv,
                    const double* dh, const double* dv,
                    double alpha, double gamma, double* out, size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vg = _mm256_set1_pd(gamma);
  const __m256d vag = _mm256_set1_pd(alpha + gamma);
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const C4 k = load4c(fk + 2 * i);
    const C4 b = load4c(fb + 2 * i);
    const C4 fin = load4c(fi + 2 * i);
    const C4 zh = load4c(fzh + 2 * i);
    const C4 zv = load4c(fzv + 2 * i);
    const C4 h = load4c(dh + 2 * i);
    const C4 v = load4c(dv + 2 * i);

    // conj(K)*B
    __m256d nr = _mm256_add_pd(_mm256_mul_pd(k.re, b.re), _mm256_mul_pd(k.im, b.im));
    __m256d ni = _mm256_sub_pd(_mm256_mul_pd(k.re, b.im), _mm256_mul_pd(k.im, b.re));

    // + alpha * (conj(Dh)+conj(Dv)) * I
    const __m256d er = _mm256_add_pd(h.re, v.re);
    const __m256d ei = _mm256_sub_pd(zero, _mm256_add_pd(h.im, v.im));
    const __m256d pr = _mm256_sub_pd(_mm256_mul_pd(er, fin.re), _mm256_mul_pd(ei, fin.im));
    const __m256d pi = _mm256_add_pd(_mm256_mul_pd(er, fin.im), _mm256_mul_pd(ei, fin.re));
    nr = _mm256_add_pd(nr, _mm256_mul_pd(va, pr));
    ni = _mm256_add_pd(ni, _mm256_mul_pd(va, pi));

    // + gamma * (conj(Dh)*Zh + conj(Dv)*Zv)
    __m256d ar = _mm256_add_pd(_mm256_mul_pd(h.re, zh.re), _mm256_mul_pd(h.im, zh.im));
    __m256d ai = _mm256_sub_pd(_mm256_mul_pd(h.re, zh.im), _mm256_mul_pd(h.im, zh.re));
    ar = _mm256_add_pd(ar, _mm256_add_pd(_mm256_mul_pd(v.re, zv.re), _mm256_mul_pd(v.im, zv.im)));
    ai = _mm256_add_pd(ai, _mm256_sub_pd(_mm256_mul_pd(v.re, zv.im), _mm256_mul_pd(v.im, zv.re)));
    nr = _mm256_add_pd(nr, _mm256_mul_pd(vg, ar));
    ni = _mm256_add_pd(ni, _mm256_mul_pd(vg, ai));

    const __m256d kk = _mm256_add_pd(_mm256_mul_pd(k.re, k.re), _mm256_mul_pd(k.im, k.im));
    const __m256d hh = _mm256_add_pd(_mm256_mul_pd(h.re, h.re), _mm256_mul_pd(h.im, h.im));
    const __m256d vv = _mm256_add_pd(_mm256_mul_pd(v.re, v.re), _mm256_mul_pd(v.im, v.im));
    const __m256d den = _mm256_add_pd(kk, _mm256_mul_pd(vag, _mm256_add_pd(hh, vv)));

    const __m256d ok = _mm256_cmp_pd(den, zero, _CMP_GT_OQ);
    C4 res;
    res.re = _mm256_and_pd(ok, _mm256_div_pd(nr, den));
    res.im = _mm256_and_pd(ok, _mm256_div_pd(ni, den));
    store4c(out + 2 * i, res);
  }
  if (i < n) {
    scalar::table.latent_combine(fk + 2 * i, fb + 2 * i, fi + 2 * i, fzh + 2 * i,
                                 fzv + 2 * i, dh + 2 * i, dv + 2 * i, alpha, gamma,
                                 out + 2 * i, n - i);
  }
}

void kernel_combine(const double* fsh, const double* fsv,
                    const double* fbh, const double* fbv,
                    double sigma, double* out, size_t n) {
  const __m256d vs = _mm256_set1_pd(sigma);
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const C4 sh = load4c(fsh + 2 * i);
    const C4 sv = load4c(fsv + 2 * i);
    const C4 bh = load4c(fbh + 2 * i);
    const C4 bv = load4c(fbv + 2 * i);

    __m256d nr = _mm256_add_pd(_mm256_mul_pd(sh.re, bh.re), _mm256_mul_pd(sh.im, bh.im));
    __m256d ni = _mm256_sub_pd(_mm256_mul_pd(sh.re, bh.im), _mm256_mul_pd(sh.im, bh.re));
    nr = _mm256_add_pd(nr, _mm256_add_pd(_mm256_mul_pd(sv.re, bv.re), _mm256_mul_pd(sv.im, bv.im)));
    ni = _mm256_add_pd(ni, _mm256_sub_pd(_mm256_mul_pd(sv.re, bv.im), _mm256_mul_pd(sv.im, bv.re)));

    const __m256d ehh = _mm256_add_pd(_mm256_mul_pd(sh.re, sh.re), _mm256_mul_pd(sh.im, sh.im));
    const __m256d evv = _mm256_add_pd(_mm256_mul_pd(sv.re, sv.re), _mm256_mul_pd(sv.im, sv.im));
    const __m256d den = _mm256_add_pd(_mm256_add_pd(ehh, evv), vs);

    const __m256d ok = _mm256_cmp_pd(den, zero, _CMP_GT_OQ);
    C4 res;
    res.re = _mm256_and_pd(ok, _mm256_div_pd(nr, den));
    res.im = _mm256_and_pd(ok, _mm256_div_pd(ni, den));
    store4c(out + 2 * i, res);
  }
  if (i < n) {
    scalar::table.kernel_combine(fsh + 2 * i, fsv + 2 * i, fbh + 2 * i, fbv + 2 * i,
                                 sigma, out + 2 * i, n - i);
  }
}

void complex_mul(const double* a, const double* b, double* out, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const C4 x = load4c(a + 2 * i);
    const C4 y = load4c(b + 2 * i);
    C4 res;
    res.re = _mm256_sub_pd(_mm256_mul_pd(x.re, y.re), _mm256_mul_pd(x.im, y.im));
    res.im = _mm256_add_pd(_mm256_mul_pd(x.re, y.im), _mm256_mul_pd(x.im, y.re));
    store4c(out + 2 * i, res);
  }
  if (i < n) scalar::table.complex_mul(a + 2 * i, b + 2 * i, out + 2 * i, n - i);
}

void scale(double* a, double s, size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
  }
  for (; i < n; ++i) a[i] *= s;
}

void clamp01(double* a, size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(a + i);
    v = _mm256_blendv_pd(v, zero, _mm256_cmp_pd(v, zero, _CMP_LT_OQ));
    v = _mm256_blendv_pd(v, one, _mm256_cmp_pd(v, one, _CMP_GT_OQ));
    _mm256_storeu_pd(a + i, v);
  }
  for (; i < n; ++i) {
    double v = a[i];
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    a[i] = v;
  }
}

double sum(const double* a, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double total = hsum(acc);
  for (; i < n; ++i) total += a[i];
  return total;
}

double sum_sq_diff(const double* a, const double* b, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

const Ops table = {
    "avx2",     grad_h,         grad_v, hard_threshold, magnitude, count_active,
    latent_combine, kernel_combine, complex_mul, scale, clamp01, sum, sum_sq_diff,
};

}  // namespace evrec::kernels::avx2

#endif  // EVREC_HAVE_AVX2_TU
