#include "evrec/joint.hpp"

#include "evrec/imageops.hpp"

namespace evrec::joint {

using events::EventStream;
using events::IntensityMap;

void JointParams::validate() const {
  deblur.validate();
  denoise.validate();
  if (tau_us <= 0) throw InvalidParameter("tau must be positive");
  if (!(c > 0.0)) throw InvalidParameter("contrast threshold must be positive");
}

namespace {

struct PriorSetup {
  IntensityMap map;
  bool window_empty = false;
  int64_t t_end = 0;
};

PriorSetup make_prior(const Image& blurry, const EventStream& raw, int64_t t_b_us,
                      const JointParams& params) {
  if (raw.width() != blurry.width() || raw.height() != blurry.height()) {
    throw DimensionMismatch("event stream geometry must match the image");
  }
  auto [t_start, t_end] = events::exposure_window_for_frame(t_b_us, params.tau_us);
  PriorSetup setup;
  setup.t_end = t_end;
  EventStream in_window = events::window(raw, t_start, t_end);
  if (in_window.empty()) {
    setup.window_empty = true;
    setup.map = IntensityMap(blurry.width(), blurry.height());
  } else {
    setup.map = events::integrate(raw, t_end, params.tau_us, params.c);
  }
  return setup;
}

// Shared loop over either deblurring stepper.
template <typename Stepper>
JointResult run_loop(Stepper& stepper, const EventStream& raw,
                     const JointParams& params, const PriorSetup& prior,
                     const SnapshotFn& observer) {
  JointResult result;
  result.prior_window_empty = prior.window_empty;
  result.per_iteration.reserve(params.deblur.l_max);

  Image latent;
  EventStream denoised(raw.width(), raw.height());
  for (int l = 1; l <= params.deblur.l_max; ++l) {
    deblur::IterationRecord rec = stepper.run_outer_iteration();
    latent = stepper.latent();
    denoised = denoise::denoise(raw, img::gradient(latent), params.denoise);
    result.per_iteration.push_back({rec.total, denoised.size()});
    if (observer) observer(l, latent, denoised);
    if (params.reuse_denoised_prior && l < params.deblur.l_max && !prior.window_empty) {
      stepper.set_prior(events::integrate(denoised, prior.t_end, params.tau_us, params.c));
    }
  }
  result.sharp = clamp01(latent);
  result.denoised = denoised;
  return result;
}

}  // namespace

JointResult reconstruct(const Image& blurry, const EventStream& raw, int64_t t_b_us,
                        const JointParams& params, const SnapshotFn& observer) {
  params.validate();
  PriorSetup prior = make_prior(blurry, raw, t_b_us, params);

  deblur::DeblurParams dp = params.deblur;
  if (prior.window_empty) dp.alpha = 0.0;  // fall back to plain L0 deblurring

  deblur::BlindDeblurrer stepper(blurry, prior.map, dp);
  JointParams effective = params;
  effective.deblur = dp;
  JointResult result = run_loop(stepper, raw, effective, prior, observer);
  result.kernel = stepper.kernel();
  result.kernel_grid = {{stepper.kernel()}};
  return result;
}

JointResult reconstruct_nonuniform(const Image& blurry, const EventStream& raw,
                                   int64_t t_b_us, const JointParams& params,
                                   int patch, int overlap, const SnapshotFn& observer) {
  params.validate();
  PriorSetup prior = make_prior(blurry, raw, t_b_us, params);

  deblur::DeblurParams dp = params.deblur;
  if (prior.window_empty) dp.alpha = 0.0;

  deblur::NonuniformDeblurrer stepper(blurry, prior.map, dp, patch, overlap);
  JointParams effective = params;
  effective.deblur = dp;
  JointResult result = run_loop(stepper, raw, effective, prior, observer);
  result.kernel_grid = stepper.kernels();
  result.kernel = result.kernel_grid[0][0];
  return result;
}

}  // namespace evrec::joint
