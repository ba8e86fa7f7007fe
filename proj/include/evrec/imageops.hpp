#pragma once

#include <utility>

#include "evrec/image.hpp"

namespace evrec::img {

// Forward differences with periodic wrap, matching the circular-convolution
// model of the spectral solvers.
GradientField gradient(const Image& image);

// Transforms of the forward-difference stencils embedded at the origin of a
// w-by-h grid, as circular-convolution filters. For a 1-by-N row the
// horizontal spectrum is exp(2*pi*i*k/N) - 1.
std::pair<Spectrum, Spectrum> derivative_spectra(int w, int h);

// conj(F(dh)) * F(theta0) + conj(F(dv)) * F(theta1)
Spectrum fhat(const Image& theta0, const Image& theta1);

// Replicate-pad by `pad` on each side, then cosine-blend the pad band toward
// the wrapped opposite edge so the result is near-periodic. crop_border is
// the inverse.
Image pad_and_taper(const Image& image, int pad);
Image crop_border(const Image& image, int pad);

Image pad_zero(const Image& image, int pad);
Image crop_region(const Image& image, int x0, int y0, int w, int h);

}  // namespace evrec::img
