#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "evrec/errors.hpp"

namespace evrec {

// Single-channel raster, row-major doubles, nominal range [0,1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0)
      : w_(width), h_(height), px_(static_cast<size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0) throw InvalidParameter("image dims must be positive");
  }

  int width() const { return w_; }
  int height() const { return h_; }
  size_t size() const { return px_.size(); }
  bool empty() const { return px_.empty(); }

  double operator()(int x, int y) const { return px_[static_cast<size_t>(y) * w_ + x]; }
  double& operator()(int x, int y) { return px_[static_cast<size_t>(y) * w_ + x]; }

  const double* data() const { return px_.data(); }
  double* data() { return px_.data(); }

  bool same_size(const Image& other) const { return w_ == other.w_ && h_ == other.h_; }

  bool operator==(const Image& other) const {
    return w_ == other.w_ && h_ == other.h_ && px_ == other.px_;
  }

 private:
  int w_ = 0, h_ = 0;
  std::vector<double> px_;
};

// Per-pixel (horizontal, vertical) forward differences, planar storage.
struct GradientField {
  int width = 0, height = 0;
  std::vector<double> gh, gv;

  GradientField() = default;
  GradientField(int w, int h)
      : width(w), height(h),
        gh(static_cast<size_t>(w) * h, 0.0),
        gv(static_cast<size_t>(w) * h, 0.0) {}

  size_t size() const { return gh.size(); }
};

// Full-grid complex transform coefficients, row-major bins.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(int width, int height)
      : w_(width), h_(height), bins_(static_cast<size_t>(width) * height) {}

  int width() const { return w_; }
  int height() const { return h_; }
  size_t size() const { return bins_.size(); }

  std::complex<double> operator()(int kx, int ky) const {
    return bins_[static_cast<size_t>(ky) * w_ + kx];
  }
  std::complex<double>& operator()(int kx, int ky) {
    return bins_[static_cast<size_t>(ky) * w_ + kx];
  }

  const std::complex<double>* data() const { return bins_.data(); }
  std::complex<double>* data() { return bins_.data(); }

  // Interleaved (re,im) view for the dispatch kernels.
  const double* flat() const { return reinterpret_cast<const double*>(bins_.data()); }
  double* flat() { return reinterpret_cast<double*>(bins_.data()); }

  bool same_size(const Spectrum& other) const { return w_ == other.w_ && h_ == other.h_; }

 private:
  int w_ = 0, h_ = 0;
  std::vector<std::complex<double>> bins_;
};

double min_value(const Image& img);
double max_value(const Image& img);
double max_abs(const Image& img);
Image clamp01(Image img);
bool all_finite(const Image& img);

}  // namespace evrec
