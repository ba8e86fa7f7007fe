#include "evrec/imageops.hpp"

#include <cmath>
#include <numbers>

#include "evrec/errors.hpp"
#include "evrec/fft.hpp"
#include "evrec/kernels.hpp"

namespace evrec::img {

GradientField gradient(const Image& image) {
  if (image.empty()) throw InvalidParameter("gradient of empty image");
  GradientField g(image.width(), image.height());
  const auto& k = kernels::ops();
  k.grad_h(image.data(), g.gh.data(), image.width(), image.height());
  k.grad_v(image.data(), g.gv.data(), image.width(), image.height());
  return g;
}

std::pair<Spectrum, Spectrum> derivative_spectra(int w, int h) {
  if (w < 1 || h < 1) throw InvalidParameter("derivative_spectra dims must be >= 1");
  // forward difference as a convolution filter: -1 at the origin, +1 at the
  // wrapped -1 position (collapses to zero for degenerate 1-wide axes)
  Image dh(w, h, 0.0);
  dh(0, 0) += -1.0;
  dh((w - 1) % w, 0) += 1.0;
  Image dv(w, h, 0.0);
  dv(0, 0) += -1.0;
  dv(0, (h - 1) % h) += 1.0;
  return {fft::forward(dh), fft::forward(dv)};
}

Spectrum fhat(const Image& theta0, const Image& theta1) {
  if (!theta0.same_size(theta1)) throw DimensionMismatch("fhat arguments differ in size");
  auto [dh, dv] = derivative_spectra(theta0.width(), theta0.height());
  Spectrum f0 = fft::forward(theta0);
  Spectrum f1 = fft::forward(theta1);
  Spectrum out(theta0.width(), theta0.height());
  for (size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = std::conj(dh.data()[i]) * f0.data()[i] +
                    std::conj(dv.data()[i]) * f1.data()[i];
  }
  return out;
}

namespace {

// Cosine crossfade over the 2*pad wrap gap between the two opposite edges.
inline double blend_weight(int g, int pad) {
  return 0.5 * (1.0 - std::cos(std::numbers::pi * g / (2.0 * pad + 1.0)));
}

}  // namespace

Image pad_and_taper(const Image& image, int pad) {
  if (pad < 0) throw InvalidParameter("pad must be >= 0");
  if (pad == 0) return image;
  const int w = image.width(), h = image.height();
  const int pw = w + 2 * pad, ph = h + 2 * pad;
  Image out(pw, ph, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out(x + pad, y + pad) = image(x, y);
  }
  // horizontal gap for the original rows
  for (int y = 0; y < h; ++y) {
    const double right = image(w - 1, y);
    const double left = image(0, y);
    for (int g = 1; g <= 2 * pad; ++g) {
      const int gx = (pad + w - 1 + g) % pw;
      const double u = blend_weight(g, pad);
      out(gx, y + pad) = (1.0 - u) * right + u * left;
    }
  }
  // vertical gap over the full padded width
  for (int x = 0; x < pw; ++x) {
    const double bottom = out(x, pad + h - 1);
    const double top = out(x, pad);
    for (int g = 1; g <= 2 * pad; ++g) {
      const int gy = (pad + h - 1 + g) % ph;
      const double u = blend_weight(g, pad);
      out(x, gy) = (1.0 - u) * bottom + u * top;
    }
  }
  return out;
}

Image crop_border(const Image& image, int pad) {
  if (pad < 0) throw InvalidParameter("pad must be >= 0");
  if (pad == 0) return image;
  if (image.width() <= 2 * pad || image.height() <= 2 * pad) {
    throw InvalidParameter("crop_border pad exceeds image");
  }
  return crop_region(image, pad, pad, image.width() - 2 * pad, image.height() - 2 * pad);
}

Image pad_zero(const Image& image, int pad) {
  if (pad < 0) throw InvalidParameter("pad must be >= 0");
  if (pad == 0) return image;
  Image out(image.width() + 2 * pad, image.height() + 2 * pad, 0.0);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) out(x + pad, y + pad) = image(x, y);
  }
  return out;
}

Image crop_region(const Image& image, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > image.width() ||
      y0 + h > image.height()) {
    throw InvalidParameter("crop_region out of bounds");
  }
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out(x, y) = image(x0 + x, y0 + y);
  }
  return out;
}

}  // namespace evrec::img
