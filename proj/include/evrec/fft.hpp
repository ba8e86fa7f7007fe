#pragma once

#include "evrec/image.hpp"

namespace evrec::fft {

// Unnormalized forward 2D transform; inverse carries the 1/(w*h) factor so
// inverse(forward(x)) == x to rounding. Plans are cached per size behind a
// mutex; all entry points are safe to call from multiple threads.
Spectrum forward(const Image& img);
Spectrum forward(const double* planar, int w, int h);
Spectrum forward(const Spectrum& s);

// Inverse transform of a (conjugate-symmetric) spectrum; returns the real
// part, dropping the rounding-level imaginary residue.
Image inverse_real(const Spectrum& s);
Spectrum inverse(const Spectrum& s);

}  // namespace evrec::fft
