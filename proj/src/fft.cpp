#include "evrec/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "evrec/errors.hpp"
#include "evrec/kernels.hpp"

namespace evrec::fft {
namespace {

// One cached c2c plan pair per (w,h), executed on owned buffers under the
// cache lock. FFTW_ESTIMATE keeps planning deterministic across runs.
struct PlanEntry {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  size_t n = 0;

  void init(int w, int h) {
    n = static_cast<size_t>(w) * h;
    in = fftw_alloc_complex(n);
    out = fftw_alloc_complex(n);
    // fftw uses row count first
    fwd = fftw_plan_dft_2d(h, w, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(h, w, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~PlanEntry() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

class PlanCache {
 public:
  // Runs fn(entry) with the cache lock held.
  template <typename Fn>
  void with_plan(int w, int h, Fn&& fn) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(w, h);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      it = entries_.emplace(std::piecewise_construct, std::forward_as_tuple(key),
                            std::forward_as_tuple()).first;
      it->second.init(w, h);
    }
    fn(it->second);
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, int>, PlanEntry> entries_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void check_dims(int w, int h) {
  if (w <= 0 || h <= 0) throw InvalidParameter("transform dims must be positive");
}

}  // namespace

Spectrum forward(const double* planar, int w, int h) {
  check_dims(w, h);
  Spectrum s(w, h);
  cache().with_plan(w, h, [&](PlanEntry& e) {
    for (size_t i = 0; i < e.n; ++i) {
      e.in[i][0] = planar[i];
      e.in[i][1] = 0.0;
    }
    fftw_execute(e.fwd);
    double* dst = s.flat();
    for (size_t i = 0; i < e.n; ++i) {
      dst[2 * i] = e.out[i][0];
      dst[2 * i + 1] = e.out[i][1];
    }
  });
  return s;
}

Spectrum forward(const Image& img) { return forward(img.data(), img.width(), img.height()); }

Spectrum forward(const Spectrum& in) {
  check_dims(in.width(), in.height());
  Spectrum s(in.width(), in.height());
  cache().with_plan(in.width(), in.height(), [&](PlanEntry& e) {
    const double* src = in.flat();
    for (size_t i = 0; i < e.n; ++i) {
      e.in[i][0] = src[2 * i];
      e.in[i][1] = src[2 * i + 1];
    }
    fftw_execute(e.fwd);
    double* dst = s.flat();
    for (size_t i = 0; i < e.n; ++i) {
      dst[2 * i] = e.out[i][0];
      dst[2 * i + 1] = e.out[i][1];
    }
  });
  return s;
}

Image inverse_real(const Spectrum& in) {
  check_dims(in.width(), in.height());
  Image img(in.width(), in.height());
  cache().with_plan(in.width(), in.height(), [&](PlanEntry& e) {
    const double* src = in.flat();
    for (size_t i = 0; i < e.n; ++i) {
      e.in[i][0] = src[2 * i];
      e.in[i][1] = src[2 * i + 1];
    }
    fftw_execute(e.bwd);
    double* dst = img.data();
    for (size_t i = 0; i < e.n; ++i) dst[i] = e.out[i][0];
  });
  kernels::ops().scale(img.data(), 1.0 / static_cast<double>(img.size()), img.size());
  return img;
}

Spectrum inverse(const Spectrum& in) {
  check_dims(in.width(), in.height());
  Spectrum s(in.width(), in.height());
  cache().with_plan(in.width(), in.height(), [&](PlanEntry& e) {
    const double* src = in.flat();
    for (size_t i = 0; i < e.n; ++i) {
      e.in[i][0] = src[2 * i];
      e.in[i][1] = src[2 * i + 1];
    }
    fftw_execute(e.bwd);
    double* dst = s.flat();
    for (size_t i = 0; i < e.n; ++i) {
      dst[2 * i] = e.out[i][0];
      dst[2 * i + 1] = e.out[i][1];
    }
  });
  kernels::ops().scale(s.flat(), 1.0 / static_cast<double>(s.size()), 2 * s.size());
  return s;
}

}  // namespace evrec::fft
