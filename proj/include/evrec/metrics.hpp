#pragma once

#include <cstdint>
#include <optional>

#include "evrec/deblur.hpp"
#include "evrec/image.hpp"
#include "evrec/synth.hpp"

namespace evrec::metrics {

// Binary classification outcome of a denoising pass against ground-truth
// labels. Rates whose denominator is zero are reported as nullopt, not 0.
struct ClassificationReport {
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> tpr, fpr, ppv, acc;

  int64_t total() const { return tp + fp + tn + fn; }
};

double mse(const Image& a, const Image& b);

// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), C1=(0.01)^2,
// C2=(0.03)^2 for [0,1] data, mean over valid windows.
double ssim(const Image& a, const Image& b);

// Events in `kept` must be an in-order sub-sequence of labeled.stream.
ClassificationReport classify_report(const events::EventStream& kept,
                                     const synth::LabeledStream& labeled);

// Normalized cross-correlation maximized over integer shifts up to half the
// kernel size; 1.0 means identical up to translation.
double kernel_similarity(const deblur::BlurKernel& k1, const deblur::BlurKernel& k2);

}  // namespace evrec::metrics
