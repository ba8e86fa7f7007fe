#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "evrec/deblur.hpp"
#include "evrec/events.hpp"
#include "evrec/image.hpp"

namespace evrec::synth {

// Uniform translation at `velocity` pixels per millisecond over `duration_ms`.
struct MotionSpec {
  double vh = 0.0;
  double vv = 0.0;
  double duration_ms = 0.0;

  void validate() const;
};

// Event stream with per-event ground truth: 1 = signal, 0 = injected noise.
struct LabeledStream {
  events::EventStream stream;
  std::vector<uint8_t> labels;
};

// Bilinear resampling with periodic wrap; content moves by (dx, dy) pixels.
Image translate(const Image& image, double dx, double dy);

// Circular convolution with the kernel, clamped to [0,1].
Image blur_synthesize(const Image& sharp, const deblur::BlurKernel& k);

// Brightness-constancy event simulation: the scene is `sharp` translating at
// the given velocity; per-pixel log-intensity increments accumulate in
// residual registers and every full crossing of the contrast threshold emits
// one event. Timestamps are the step times in microseconds.
events::EventStream simulate_events(const Image& sharp, const MotionSpec& motion,
                                    double c, double dt_ms);

// Same trigger model over the composite scene bg + translate(sprite, v*t);
// the background stays static so only the sprite fires events.
events::EventStream simulate_composite(const Image& bg, const Image& sprite,
                                       const MotionSpec& motion, double c, double dt_ms);

// Adds floor(ratio * |stream|) uniform random events over the stream's
// spatial and temporal extent. Deterministic in `seed`.
LabeledStream inject_noise(const events::EventStream& stream, double ratio, uint64_t seed);

// Uniform line kernel for a linear displacement of (dx, dy) pixels, centered.
deblur::BlurKernel motion_line_kernel(double dx, double dy, int size);

// Deterministic test patterns: "shapes" (rectangles, bars, disc, stripes,
// glyph strokes) and "bars".
Image pattern(const std::string& name, int w, int h);

struct CaseBundle {
  std::string name;
  Image sharp;   // scene at the frame timestamp
  Image blurry;  // sharp convolved with the kernel
  LabeledStream labeled;
  deblur::BlurKernel kernel = deblur::BlurKernel::delta(1);
  int64_t t_b_us = 0;
  int64_t tau_us = 0;
  double c = 0.0;
  std::map<std::string, std::string> meta;
};

// End-to-end fixture: pattern -> simulated events over the motion duration,
// frame at the midpoint, blur via the supplied kernel, noise injection.
CaseBundle make_case(const std::string& name, int width, int height,
                     const MotionSpec& motion, const deblur::BlurKernel& kernel,
                     double c, int64_t tau_us, double noise_ratio, uint64_t seed,
                     double dt_ms = 0.25);

}  // namespace evrec::synth
