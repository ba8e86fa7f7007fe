#pragma once

#include <memory>
#include <vector>

#include "evrec/events.hpp"
#include "evrec/image.hpp"

namespace evrec::deblur {

// Square point-spread function with odd side. After finalize() all weights
// are non-negative and sum to 1 (within 1e-12).
class BlurKernel {
 public:
  explicit BlurKernel(int size);
  static BlurKernel delta(int size);

  int size() const { return size_; }
  double operator()(int x, int y) const { return w_[static_cast<size_t>(y) * size_ + x]; }
  double& operator()(int x, int y) { return w_[static_cast<size_t>(y) * size_ + x]; }
  const std::vector<double>& weights() const { return w_; }

  // Zeroes negative weights and normalizes the sum to 1; throws
  // DegenerateInput when no positive mass remains.
  void finalize();

  bool operator==(const BlurKernel&) const = default;

 private:
  int size_ = 0;
  std::vector<double> w_;
};

struct DeblurParams {
  double alpha = 0.24;       // event-prior weight
  double beta = 0.004;       // L0 weight
  double sigma = 1.0;        // kernel Tikhonov weight
  double gamma0 = 0.008;     // initial splitting weight (2*beta)
  double gamma_max = 1e5;    // splitting weight ceiling
  double gamma_scale = 2.0;  // per-inner-step multiplier
  int l_max = 5;             // outer iterations
  int kernel_size = 25;      // odd

  void validate() const;
};

// Auxiliary gradient pair from the splitting step: each pixel is either
// exactly (0,0) or an exact copy of the source gradient pixel.
struct AuxGradient {
  int width = 0, height = 0;
  std::vector<double> zh, zv;

  AuxGradient() = default;
  AuxGradient(int w, int h)
      : width(w), height(h),
        zh(static_cast<size_t>(w) * h, 0.0),
        zv(static_cast<size_t>(w) * h, 0.0) {}
};

struct IterationRecord {
  int iter = 0;
  double fidelity = 0.0;
  double event_term = 0.0;
  size_t l0_count = 0;
  double total = 0.0;
};

struct BlindResult {
  Image latent;
  BlurKernel kernel = BlurKernel::delta(1);
  std::vector<IterationRecord> history;
};

struct NonuniformResult {
  Image latent;
  std::vector<std::vector<BlurKernel>> kernels;  // [row][col]
  std::vector<IterationRecord> history;          // summed over patches
};

// Spectrum of the kernel embedded as a circular-convolution filter with its
// center at the origin of a w-by-h grid.
Spectrum psf_spectrum(const BlurKernel& k, int w, int h);

Image convolve_circular(const Image& image, const BlurKernel& k);

// Closed-form minimizer of the split latent-image objective
//   ||S (*) k - B||^2 + alpha (||dh S - I||^2 + ||dv S - I||^2)
//                    + gamma (||dh S - zh||^2 + ||dv S - zv||^2)
// under circular convolution. B is expected pre-padded/tapered.
Image solve_latent(const Image& blurry, const BlurKernel& k,
                   const events::IntensityMap& prior, const AuxGradient& z,
                   double alpha, double gamma);

// Joint hard threshold: the pair is zeroed when gh^2 + gv^2 <= beta/gamma
// (boundary inclusive), otherwise copied through unchanged.
AuxGradient threshold_gradients(const GradientField& grad, double beta, double gamma);

// Gradient-domain Tikhonov kernel estimate: per-bin
//   (conj(F dh S) F dh B + conj(F dv S) F dv B) / (|F dh S|^2 + |F dv S|^2 + sigma)
// cropped to kernel_size around the origin (wrapped), then finalized.
BlurKernel estimate_kernel(const GradientField& grad_s, const GradientField& grad_b,
                           double sigma, int kernel_size);

// One blind-deblurring instance that can be stepped one outer iteration at a
// time; deblur_blind runs it to completion. Holds the padded problem and the
// cached spectra.
class BlindDeblurrer {
 public:
  BlindDeblurrer(const Image& blurry, const events::IntensityMap& prior,
                 const DeblurParams& params);
  ~BlindDeblurrer();
  BlindDeblurrer(BlindDeblurrer&&) noexcept;
  BlindDeblurrer& operator=(BlindDeblurrer&&) noexcept;

  IterationRecord run_outer_iteration();

  Image latent() const;  // cropped to the input geometry, not clamped
  const Image& latent_padded() const;
  const BlurKernel& kernel() const;
  int iterations_run() const;

  // Swap the event prior (normalized against the original image, re-padded).
  void set_prior(const events::IntensityMap& prior);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class NonuniformDeblurrer {
 public:
  NonuniformDeblurrer(const Image& blurry, const events::IntensityMap& prior,
                      const DeblurParams& params, int patch, int overlap);
  ~NonuniformDeblurrer();
  NonuniformDeblurrer(NonuniformDeblurrer&&) noexcept;
  NonuniformDeblurrer& operator=(NonuniformDeblurrer&&) noexcept;

  IterationRecord run_outer_iteration();
  Image latent() const;  // feather-blended, input geometry, not clamped
  std::vector<std::vector<BlurKernel>> kernels() const;
  int iterations_run() const;
  void set_prior(const events::IntensityMap& prior);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

BlindResult deblur_blind(const Image& blurry, const events::IntensityMap& prior,
                         const DeblurParams& params);

NonuniformResult deblur_nonuniform(const Image& blurry, const events::IntensityMap& prior,
                                   const DeblurParams& params, int patch, int overlap);

}  // namespace evrec::deblur
