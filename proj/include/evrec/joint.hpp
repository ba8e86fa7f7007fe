#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "evrec/deblur.hpp"
#include "evrec/denoise.hpp"
#include "evrec/events.hpp"

namespace evrec::joint {

struct JointParams {
  deblur::DeblurParams deblur;
  denoise::DenoiseParams denoise;
  int64_t tau_us = 6000;  // event-accumulation interval
  double c = 1.0;         // contrast threshold; the prior is rescaled anyway
  // Re-integrate the prior from the denoised events after each iteration.
  // Off by default: the denoised set does not capture the full motion.
  bool reuse_denoised_prior = false;

  void validate() const;
};

struct IterationStat {
  double objective = 0.0;
  size_t retained = 0;
};

struct JointResult {
  Image sharp;
  deblur::BlurKernel kernel = deblur::BlurKernel::delta(1);
  std::vector<std::vector<deblur::BlurKernel>> kernel_grid;
  events::EventStream denoised;
  std::vector<IterationStat> per_iteration;  // exactly l_max entries
  bool prior_window_empty = false;  // no events in the exposure window; ran L0-only
};

using SnapshotFn =
    std::function<void(int iter, const Image& latent, const events::EventStream& denoised)>;

// Coarse-to-fine joint loop: integrate the event prior over the exposure
// window around t_b, then alternate one blind-deblurring outer iteration with
// a gradient-supervised denoising pass, l_max times.
JointResult reconstruct(const Image& blurry, const events::EventStream& raw,
                        int64_t t_b_us, const JointParams& params,
                        const SnapshotFn& observer = {});

// Patch-wise variant for non-uniform blur; the denoising pass runs on the
// feather-blended latent image.
JointResult reconstruct_nonuniform(const Image& blurry, const events::EventStream& raw,
                                   int64_t t_b_us, const JointParams& params,
                                   int patch, int overlap, const SnapshotFn& observer = {});

}  // namespace evrec::joint
