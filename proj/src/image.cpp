#include "evrec/image.hpp"

#include <cmath>

#include "evrec/kernels.hpp"

namespace evrec {

double min_value(const Image& img) {
  double m = img.size() ? img.data()[0] : 0.0;
  for (size_t i = 1; i < img.size(); ++i) m = std::min(m, img.data()[i]);
  return m;
}

double max_value(const Image& img) {
  double m = img.size() ? img.data()[0] : 0.0;
  for (size_t i = 1; i < img.size(); ++i) m = std::max(m, img.data()[i]);
  return m;
}

double max_abs(const Image& img) {
  double m = 0.0;
  for (size_t i = 0; i < img.size(); ++i) m = std::max(m, std::fabs(img.data()[i]));
  return m;
}

Image clamp01(Image img) {
  kernels::ops().clamp01(img.data(), img.size());
  return img;
}

bool all_finite(const Image& img) {
  for (size_t i = 0; i < img.size(); ++i) {
    if (!std::isfinite(img.data()[i])) return false;
  }
  return true;
}

}  // namespace evrec
