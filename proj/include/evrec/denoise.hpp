#pragma once

#include <cstdint>

#include "evrec/events.hpp"
#include "evrec/image.hpp"

namespace evrec::denoise {

using events::EventStream;

// Per-pixel gradient supervision: 0 where the supervising magnitude falls in
// the suppression band around the modal value, the raw magnitude elsewhere.
struct GradientMask {
  int width = 0, height = 0;
  std::vector<double> g;

  GradientMask() = default;
  GradientMask(int w, int h)
      : width(w), height(h), g(static_cast<size_t>(w) * h, 0.0) {}

  double at(int x, int y) const { return g[static_cast<size_t>(y) * width + x]; }
};

struct DenoiseParams {
  // Supervision level, relative to the maximum gradient magnitude: the
  // suppression band is (q - omega*max|grad|, q + omega*max|grad|).
  double omega = 0.05;
  int mu = 2;              // spatial radius, Chebyshev, pixels
  int64_t nu_us = 5000;    // temporal radius, microseconds

  void validate() const;
};

// Builds the mask from the gradient-magnitude histogram (256 bins over the
// observed range, modal bin wins, ties toward the lower bin). `omega` here is
// absolute, in magnitude units; the band (q-omega, q+omega) is open.
GradientMask build_mask(const GradientField& grad, double omega);

// Keeps exactly the events whose pixel is unmasked.
EventStream mask_filter(const EventStream& stream, const GradientMask& mask);

// Seeds plus every raw event within Chebyshev distance mu and time distance
// nu of some seed (inclusive). Output stays a sorted sub-stream of raw.
EventStream expand_neighbors(const EventStream& raw, const EventStream& seeds,
                             int mu, int64_t nu_us);

// Gradient-supervised denoising: mask_filter with the supervision band scaled
// by max gradient magnitude, then neighbor expansion over the raw stream.
EventStream denoise(const EventStream& raw, const GradientField& grad,
                    const DenoiseParams& params);

// Baseline spatiotemporal-correlation filter: keeps events supported by at
// least `min_support` other events within the (mu, nu) neighborhood.
EventStream nn_filter(const EventStream& raw, int mu, int64_t nu_us, int min_support);

}  // namespace evrec::denoise
