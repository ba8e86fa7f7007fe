#include "evrec/deblur.hpp"

#include <algorithm>
#include <cmath>

#include "evrec/fft.hpp"
#include "evrec/imageops.hpp"
#include "evrec/kernels.hpp"

namespace evrec::deblur {

BlurKernel::BlurKernel(int size) : size_(size) {
  if (size < 1 || size % 2 == 0) throw InvalidParameter("kernel size must be odd and >= 1");
  w_.assign(static_cast<size_t>(size) * size, 0.0);
}

BlurKernel BlurKernel::delta(int size) {
  BlurKernel k(size);
  k(size / 2, size / 2) = 1.0;
  return k;
}

void BlurKernel::finalize() {
  double sum = 0.0;
  for (double& v : w_) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (!(sum > 0.0)) throw DegenerateInput("kernel has no positive mass");
  for (double& v : w_) v /= sum;
}

void DeblurParams::validate() const {
  if (alpha < 0.0 || beta < 0.0 || sigma < 0.0) {
    throw InvalidParameter("deblur weights must be >= 0");
  }
  if (!(gamma0 > 0.0)) throw InvalidParameter("gamma0 must be > 0");
  if (gamma0 > gamma_max) throw InvalidParameter("gamma0 must not exceed gamma_max");
  if (!(gamma_scale > 1.0)) throw InvalidParameter("gamma_scale must be > 1");
  if (l_max < 1) throw InvalidParameter("l_max must be >= 1");
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw InvalidParameter("kernel_size must be odd and >= 1");
  }
}

Spectrum psf_spectrum(const BlurKernel& k, int w, int h) {
  if (k.size() > w || k.size() > h) throw InvalidParameter("kernel larger than image");
  Image embedded(w, h, 0.0);
  const int c = k.size() / 2;
  for (int j = 0; j < k.size(); ++j) {
    for (int i = 0; i < k.size(); ++i) {
      const int x = ((i - c) % w + w) % w;
      const int y = ((j - c) % h + h) % h;
      embedded(x, y) += k(i, j);
    }
  }
  return fft::forward(embedded);
}

Image convolve_circular(const Image& image, const BlurKernel& k) {
  Spectrum fk = psf_spectrum(k, image.width(), image.height());
  Spectrum fs = fft::forward(image);
  Spectrum prod(image.width(), image.height());
  kernels::ops().complex_mul(fk.flat(), fs.flat(), prod.flat(), prod.size());
  return fft::inverse_real(prod);
}

AuxGradient threshold_gradients(const GradientField& grad, double beta, double gamma) {
  if (!(gamma > 0.0)) throw InvalidParameter("gamma must be > 0");
  if (beta < 0.0) throw InvalidParameter("beta must be >= 0");
  AuxGradient z(grad.width, grad.height);
  kernels::ops().hard_threshold(grad.gh.data(), grad.gv.data(), beta / gamma,
                                z.zh.data(), z.zv.data(), grad.size());
  return z;
}

namespace {

void require_finite(const Image& img, const char* what) {
  if (!all_finite(img)) throw SolverDiverged(what);
}

// Shared spectral state for repeated latent solves against fixed B, I, k.
struct LatentContext {
  int w = 0, h = 0;
  Spectrum fb, fi, fk, dh, dv;

  LatentContext(const Image& blurry, const Image& prior) {
    w = blurry.width();
    h = blurry.height();
    if (!blurry.same_size(prior)) throw DimensionMismatch("prior size mismatch");
    fb = fft::forward(blurry);
    fi = fft::forward(prior);
    auto d = img::derivative_spectra(w, h);
    dh = std::move(d.first);
    dv = std::move(d.second);
  }

  void set_kernel(const BlurKernel& k) { fk = psf_spectrum(k, w, h); }

  Image solve(const AuxGradient& z, double alpha, double gamma) const {
    if (z.width != w || z.height != h) throw DimensionMismatch("aux gradient size mismatch");
    Spectrum fzh = fft::forward(z.zh.data(), w, h);
    Spectrum fzv = fft::forward(z.zv.data(), w, h);
    Spectrum out(w, h);
    kernels::ops().latent_combine(fk.flat(), fb.flat(), fi.flat(), fzh.flat(),
                                  fzv.flat(), dh.flat(), dv.flat(), alpha, gamma,
                                  out.flat(), out.size());
    Image s = fft::inverse_real(out);
    require_finite(s, "latent solve produced non-finite values");
    return s;
  }
};

}  // namespace

Image solve_latent(const Image& blurry, const BlurKernel& k,
                   const events::IntensityMap& prior, const AuxGradient& z,
                   double alpha, double gamma) {
  if (alpha < 0.0 || gamma < 0.0) throw InvalidParameter("weights must be >= 0");
  if (prior.width != blurry.width() || prior.height != blurry.height()) {
    throw DimensionMismatch("prior size mismatch");
  }
  LatentContext ctx(blurry, events::to_image(prior));
  ctx.set_kernel(k);
  return ctx.solve(z, alpha, gamma);
}

BlurKernel estimate_kernel(const GradientField& grad_s, const GradientField& grad_b,
                           double sigma, int kernel_size) {
  if (grad_s.width != grad_b.width || grad_s.height != grad_b.height) {
    throw DimensionMismatch("gradient fields differ in size");
  }
  if (!(sigma > 0.0)) throw InvalidParameter("sigma must be > 0");
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw InvalidParameter("kernel_size must be odd and >= 1");
  }
  if (kernel_size > grad_s.width || kernel_size > grad_s.height) {
    throw InvalidParameter("kernel_size exceeds image");
  }
  bool any = false;
  for (size_t i = 0; i < grad_s.size() && !any; ++i) {
    any = grad_s.gh[i] != 0.0 || grad_s.gv[i] != 0.0;
  }
  if (!any) throw DegenerateInput("latent gradient is identically zero");

  const int w = grad_s.width, h = grad_s.height;
  Spectrum fsh = fft::forward(grad_s.gh.data(), w, h);
  Spectrum fsv = fft::forward(grad_s.gv.data(), w, h);
  Spectrum fbh = fft::forward(grad_b.gh.data(), w, h);
  Spectrum fbv = fft::forward(grad_b.gv.data(), w, h);
  Spectrum ratio(w, h);
  kernels::ops().kernel_combine(fsh.flat(), fsv.flat(), fbh.flat(), fbv.flat(),
                                sigma, ratio.flat(), ratio.size());
  Image raw = fft::inverse_real(ratio);
  require_finite(raw, "kernel estimate produced non-finite values");

  BlurKernel k(kernel_size);
  const int r = kernel_size / 2;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const int x = (dx % w + w) % w;
      const int y = (dy % h + h) % h;
      k(dx + r, dy + r) = raw(x, y);
    }
  }
  k.finalize();
  return k;
}

// ---------------------------------------------------------------------------

struct BlindDeblurrer::Impl {
  DeblurParams params;
  int pad = 0;
  Image blurry_orig;
  Image blurry_pad;
  Image prior_pad;  // normalized against the original image, zero-padded
  GradientField grad_b;
  LatentContext ctx;
  Image latent;
  BlurKernel k;
  int iters = 0;

  Impl(const Image& blurry, const events::IntensityMap& prior, const DeblurParams& p)
      : params(p),
        pad(2 * p.kernel_size),
        blurry_orig(blurry),
        blurry_pad(img::pad_and_taper(blurry, pad)),
        prior_pad(padded_prior(blurry, prior, pad)),
        grad_b(img::gradient(blurry_pad)),
        ctx(blurry_pad, prior_pad),
        latent(blurry_pad),
        k(BlurKernel::delta(p.kernel_size)) {
    ctx.set_kernel(k);
  }

  static Image padded_prior(const Image& blurry, const events::IntensityMap& prior,
                            int pad) {
    if (prior.width != blurry.width() || prior.height != blurry.height()) {
      throw DimensionMismatch("prior geometry must match the blurry image");
    }
    events::IntensityMap scaled = events::normalize_to_gradient(prior, blurry);
    return img::pad_zero(events::to_image(scaled), pad);
  }

  IterationRecord run_outer() {
    AuxGradient z(ctx.w, ctx.h);
    for (double gamma = params.gamma0; gamma <= params.gamma_max;
         gamma *= params.gamma_scale) {
      z = threshold_gradients(img::gradient(latent), params.beta, gamma);
      latent = ctx.solve(z, params.alpha, gamma);
    }
    k = estimate_kernel(img::gradient(latent), grad_b, params.sigma, params.kernel_size);
    ctx.set_kernel(k);
    ++iters;
    return objective(z);
  }

  IterationRecord objective(const AuxGradient& z) const {
    const auto& ops = kernels::ops();
    Image reblurred = convolve_circular(latent, k);
    IterationRecord rec;
    rec.iter = iters;
    rec.fidelity = ops.sum_sq_diff(reblurred.data(), blurry_pad.data(), blurry_pad.size());
    GradientField g = img::gradient(latent);
    rec.event_term =
        params.alpha * (ops.sum_sq_diff(g.gh.data(), prior_pad.data(), prior_pad.size()) +
                        ops.sum_sq_diff(g.gv.data(), prior_pad.data(), prior_pad.size()));
    rec.l0_count = ops.count_active(z.zh.data(), z.zv.data(), z.zh.size());
    rec.total = rec.fidelity + rec.event_term + params.beta * static_cast<double>(rec.l0_count);
    if (!std::isfinite(rec.total)) throw SolverDiverged("objective is not finite");
    return rec;
  }
};

BlindDeblurrer::BlindDeblurrer(const Image& blurry, const events::IntensityMap& prior,
                               const DeblurParams& params) {
  params.validate();
  impl_ = std::make_unique<Impl>(blurry, prior, params);
}

BlindDeblurrer::~BlindDeblurrer() = default;
BlindDeblurrer::BlindDeblurrer(BlindDeblurrer&&) noexcept = default;
BlindDeblurrer& BlindDeblurrer::operator=(BlindDeblurrer&&) noexcept = default;

IterationRecord BlindDeblurrer::run_outer_iteration() { return impl_->run_outer(); }

Image BlindDeblurrer::latent() const {
  return img::crop_border(impl_->latent, impl_->pad);
}

const Image& BlindDeblurrer::latent_padded() const { return impl_->latent; }
const BlurKernel& BlindDeblurrer::kernel() const { return impl_->k; }
int BlindDeblurrer::iterations_run() const { return impl_->iters; }

void BlindDeblurrer::set_prior(const events::IntensityMap& prior) {
  impl_->prior_pad = Impl::padded_prior(impl_->blurry_orig, prior, impl_->pad);
  impl_->ctx.fi = fft::forward(impl_->prior_pad);
}

BlindResult deblur_blind(const Image& blurry, const events::IntensityMap& prior,
                         const DeblurParams& params) {
  BlindDeblurrer solver(blurry, prior, params);
  BlindResult res;
  res.history.reserve(params.l_max);
  for (int l = 0; l < params.l_max; ++l) res.history.push_back(solver.run_outer_iteration());
  res.latent = clamp01(solver.latent());
  res.kernel = solver.kernel();
  return res;
}

// ---------------------------------------------------------------------------

namespace {

struct PatchSlot {
  int x0 = 0, y0 = 0;
  std::unique_ptr<BlindDeblurrer> solver;
};

std::vector<int> tile_offsets(int extent, int patch, int overlap) {
  std::vector<int> offsets;
  if (patch >= extent) {
    offsets.push_back(0);
    return offsets;
  }
  const int step = patch - overlap;
  for (int o = 0; o + patch < extent; o += step) offsets.push_back(o);
  offsets.push_back(extent - patch);
  return offsets;
}

}  // namespace

struct NonuniformDeblurrer::Impl {
  DeblurParams params;
  int patch = 0, overlap = 0;
  int w = 0, h = 0;
  int patch_w = 0, patch_h = 0;
  std::vector<int> xs, ys;
  std::vector<PatchSlot> slots;  // row-major over (ys, xs)
  int iters = 0;
  bool single = false;

  Image blend() const {
    if (single) return slots[0].solver->latent();
    Image acc(w, h, 0.0);
    Image wsum(w, h, 0.0);
    for (const PatchSlot& s : slots) {
      Image part = s.solver->latent();
      for (int y = 0; y < part.height(); ++y) {
        const double wy = feather(y, part.height());
        for (int x = 0; x < part.width(); ++x) {
          const double wxy = feather(x, part.width()) * wy;
          acc(s.x0 + x, s.y0 + y) += wxy * part(x, y);
          wsum(s.x0 + x, s.y0 + y) += wxy;
        }
      }
    }
    for (size_t i = 0; i < acc.size(); ++i) acc.data()[i] /= wsum.data()[i];
    return acc;
  }

  double feather(int i, int extent) const {
    const double edge = std::min(i + 1, extent - i);
    return std::min(edge / (overlap + 1.0), 1.0);
  }
};

NonuniformDeblurrer::NonuniformDeblurrer(const Image& blurry,
                                         const events::IntensityMap& prior,
                                         const DeblurParams& params, int patch,
                                         int overlap) {
  params.validate();
  if (patch < 2 * params.kernel_size) {
    throw InvalidParameter("patch must be at least twice the kernel size");
  }
  if (overlap < 0 || overlap >= (patch + 1) / 2) {
    throw InvalidParameter("overlap must be non-negative and < patch/2");
  }
  if (prior.width != blurry.width() || prior.height != blurry.height()) {
    throw DimensionMismatch("prior geometry must match the blurry image");
  }
  impl_ = std::make_unique<Impl>();
  impl_->params = params;
  impl_->patch = patch;
  impl_->overlap = overlap;
  impl_->w = blurry.width();
  impl_->h = blurry.height();
  impl_->xs = tile_offsets(blurry.width(), patch, overlap);
  impl_->ys = tile_offsets(blurry.height(), patch, overlap);
  impl_->patch_w = std::min(patch, blurry.width());
  impl_->patch_h = std::min(patch, blurry.height());
  impl_->single = impl_->xs.size() == 1 && impl_->ys.size() == 1 &&
                  impl_->patch_w == blurry.width() && impl_->patch_h == blurry.height();

  Image prior_img = events::to_image(prior);
  for (int y0 : impl_->ys) {
    for (int x0 : impl_->xs) {
      PatchSlot slot;
      slot.x0 = x0;
      slot.y0 = y0;
      Image b = img::crop_region(blurry, x0, y0, impl_->patch_w, impl_->patch_h);
      Image p = img::crop_region(prior_img, x0, y0, impl_->patch_w, impl_->patch_h);
      events::IntensityMap pm(impl_->patch_w, impl_->patch_h);
      std::copy(p.data(), p.data() + p.size(), pm.values.begin());
      slot.solver = std::make_unique<BlindDeblurrer>(b, pm, params);
      impl_->slots.push_back(std::move(slot));
    }
  }
}

NonuniformDeblurrer::~NonuniformDeblurrer() = default;
NonuniformDeblurrer::NonuniformDeblurrer(NonuniformDeblurrer&&) noexcept = default;
NonuniformDeblurrer& NonuniformDeblurrer::operator=(NonuniformDeblurrer&&) noexcept = default;

IterationRecord NonuniformDeblurrer::run_outer_iteration() {
  IterationRecord agg;
  for (PatchSlot& s : impl_->slots) {
    IterationRecord r = s.solver->run_outer_iteration();
    agg.fidelity += r.fidelity;
    agg.event_term += r.event_term;
    agg.l0_count += r.l0_count;
    agg.total += r.total;
  }
  agg.iter = ++impl_->iters;
  return agg;
}

Image NonuniformDeblurrer::latent() const { return impl_->blend(); }

std::vector<std::vector<BlurKernel>> NonuniformDeblurrer::kernels() const {
  std::vector<std::vector<BlurKernel>> grid;
  size_t idx = 0;
  for (size_t row = 0; row < impl_->ys.size(); ++row) {
    std::vector<BlurKernel> line;
    for (size_t col = 0; col < impl_->xs.size(); ++col) {
      line.push_back(impl_->slots[idx++].solver->kernel());
    }
    grid.push_back(std::move(line));
  }
  return grid;
}

int NonuniformDeblurrer::iterations_run() const { return impl_->iters; }

void NonuniformDeblurrer::set_prior(const events::IntensityMap& prior) {
  if (prior.width != impl_->w || prior.height != impl_->h) {
    throw DimensionMismatch("prior geometry mismatch");
  }
  Image prior_img = events::to_image(prior);
  for (PatchSlot& s : impl_->slots) {
    Image p = img::crop_region(prior_img, s.x0, s.y0, impl_->patch_w, impl_->patch_h);
    events::IntensityMap pm(impl_->patch_w, impl_->patch_h);
    std::copy(p.data(), p.data() + p.size(), pm.values.begin());
    s.solver->set_prior(pm);
  }
}

NonuniformResult deblur_nonuniform(const Image& blurry, const events::IntensityMap& prior,
                                   const DeblurParams& params, int patch, int overlap) {
  NonuniformDeblurrer solver(blurry, prior, params, patch, overlap);
  NonuniformResult res;
  res.history.reserve(params.l_max);
  for (int l = 0; l < params.l_max; ++l) res.history.push_back(solver.run_outer_iteration());
  res.latent = clamp01(solver.latent());
  res.kernels = solver.kernels();
  return res;
}

}  // namespace evrec::deblur
