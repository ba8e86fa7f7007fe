#pragma once

#include <cstddef>

namespace evrec::kernels {

// Inner-loop kernels come in a scalar reference flavor and an AVX2 flavor,
// selected once at startup (cpuid, overridable via EVREC_KERNEL_BACKEND or
// set_backend). Elementwise kernels are required to produce bit-identical
// results across backends: both flavors evaluate the same IEEE expression
// per element and the build disables FP contraction. Reduction kernels
// accumulate in a different order under SIMD and agree only to rounding.
enum class Backend { scalar, avx2 };

struct Ops {
  const char* name;

  // forward differences, periodic wrap
  void (*grad_h)(const double* img, double* gh, int w, int h);
  void (*grad_v)(const double* img, double* gv, int w, int h);

  // zero the pair when gh^2+gv^2 <= thresh, copy it through otherwise
  void (*hard_threshold)(const double* gh, const double* gv, double thresh,
                         double* zh, double* zv, size_t n);
  void (*magnitude)(const double* gh, const double* gv, double* mag, size_t n);
  size_t (*count_active)(const double* zh, const double* zv, size_t n);

  // interleaved complex (re,im) arrays of n bins; out may not alias inputs
  void (*latent_combine)(const double* fk, const double* fb, const double* fi,
                         const double* fzh, const double* fzv,
                         const double* dh, const double* dv,
                         double alpha, double gamma, double* out, size_t n);
  void (*kernel_combine)(const double* fsh, const double* fsv,
                         const double* fbh, const double* fbv,
                         double sigma, double* out, size_t n);
  void (*complex_mul)(const double* a, const double* b, double* out, size_t n);

  // real elementwise / reductions
  void (*scale)(double* a, double s, size_t n);
  void (*clamp01)(double* a, size_t n);
  double (*sum)(const double* a, size_t n);
  double (*sum_sq_diff)(const double* a, const double* b, size_t n);
};

const Ops& ops();
Backend active();
void set_backend(Backend b);
bool avx2_supported();
const Ops& ops_for(Backend b);
const char* backend_name(Backend b);

}  // namespace evrec::kernels
