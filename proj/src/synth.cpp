#include "evrec/synth.hpp"

#include <algorithm>
#include <cmath>

namespace evrec::synth {

using events::Event;
using events::EventStream;

void MotionSpec::validate() const {
  if (!std::isfinite(vh) || !std::isfinite(vv)) throw InvalidParameter("velocity must be finite");
  if (!(duration_ms > 0.0)) throw InvalidParameter("duration must be positive");
}

Image translate(const Image& image, double dx, double dy) {
  const int w = image.width(), h = image.height();
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    const double v = y - dy;
    const int iv = static_cast<int>(std::floor(v));
    const double fv = v - iv;
    const int y0 = ((iv % h) + h) % h;
    const int y1 = (y0 + 1) % h;
    for (int x = 0; x < w; ++x) {
      const double u = x - dx;
      const int iu = static_cast<int>(std::floor(u));
      const double fu = u - iu;
      const int x0 = ((iu % w) + w) % w;
      const int x1 = (x0 + 1) % w;
      out(x, y) = (1.0 - fu) * (1.0 - fv) * image(x0, y0) +
                  fu * (1.0 - fv) * image(x1, y0) +
                  (1.0 - fu) * fv * image(x0, y1) +
                  fu * fv * image(x1, y1);
    }
  }
  return out;
}

Image blur_synthesize(const Image& sharp, const deblur::BlurKernel& k) {
  return clamp01(deblur::convolve_circular(sharp, k));
}

namespace {

constexpr double kLogEps = 1e-3;  // below the 8-bit quantization step

void log_intensity(const Image& frame, std::vector<double>& out) {
  out.resize(frame.size());
  for (size_t i = 0; i < frame.size(); ++i) out[i] = std::log(frame.data()[i] + kLogEps);
}

// Shared trigger loop: frame_at(t_ms) yields the scene, per-pixel residual
// accumulators emit one event per full threshold crossing.
template <typename FrameFn>
EventStream simulate_core(int w, int h, const MotionSpec& motion, double c,
                          double dt_ms, FrameFn&& frame_at) {
  motion.validate();
  if (!(c > 0.0)) throw InvalidParameter("contrast threshold must be positive");
  if (!(dt_ms > 0.0) || dt_ms > motion.duration_ms) {
    throw InvalidParameter("step must be positive and at most the duration");
  }

  std::vector<double> prev, cur;
  log_intensity(frame_at(0.0), prev);
  std::vector<double> acc(prev.size(), 0.0);

  EventStream out(w, h);
  double t = 0.0;
  while (t < motion.duration_ms - 1e-12) {
    t = std::min(t + dt_ms, motion.duration_ms);
    log_intensity(frame_at(t), cur);
    const int64_t t_us = std::llround(t * 1000.0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const size_t i = static_cast<size_t>(y) * w + x;
        acc[i] += cur[i] - prev[i];
        while (acc[i] >= c) {
          out.append({x, y, t_us, +1});
          acc[i] -= c;
        }
        while (acc[i] <= -c) {
          out.append({x, y, t_us, -1});
          acc[i] += c;
        }
      }
    }
    prev.swap(cur);
  }
  return out;
}

}  // namespace

EventStream simulate_events(const Image& sharp, const MotionSpec& motion,
                            double c, double dt_ms) {
  return simulate_core(sharp.width(), sharp.height(), motion, c, dt_ms,
                       [&](double t_ms) {
                         return translate(sharp, motion.vh * t_ms, motion.vv * t_ms);
                       });
}

EventStream simulate_composite(const Image& bg, const Image& sprite,
                               const MotionSpec& motion, double c, double dt_ms) {
  if (!bg.same_size(sprite)) throw DimensionMismatch("composite layers differ in size");
  return simulate_core(bg.width(), bg.height(), motion, c, dt_ms, [&](double t_ms) {
    Image moved = translate(sprite, motion.vh * t_ms, motion.vv * t_ms);
    Image frame = bg;
    for (size_t i = 0; i < frame.size(); ++i) frame.data()[i] += moved.data()[i];
    return clamp01(std::move(frame));
  });
}

namespace {

// splitmix64; self-contained so fixtures are identical across platforms
struct Rng {
  uint64_t state;

  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(next()) * n) >> 64);
  }
};

}  // namespace

LabeledStream inject_noise(const EventStream& stream, double ratio, uint64_t seed) {
  if (ratio < 0.0) throw InvalidParameter("noise ratio must be >= 0");
  const size_t n_noise = static_cast<size_t>(ratio * static_cast<double>(stream.size()));

  std::vector<Event> noise;
  noise.reserve(n_noise);
  if (n_noise > 0) {
    const int64_t t0 = stream[0].t;
    const int64_t t1 = stream[stream.size() - 1].t;
    Rng rng(seed);
    for (size_t i = 0; i < n_noise; ++i) {
      Event e;
      e.x = static_cast<int>(rng.below(stream.width()));
      e.y = static_cast<int>(rng.below(stream.height()));
      e.t = t0 + static_cast<int64_t>(rng.below(static_cast<uint64_t>(t1 - t0) + 1));
      e.p = rng.below(2) ? +1 : -1;
      noise.push_back(e);
    }
    std::stable_sort(noise.begin(), noise.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
  }

  // merge, originals first on timestamp ties
  LabeledStream out;
  out.stream = EventStream(stream.width(), stream.height());
  out.labels.reserve(stream.size() + noise.size());
  size_t i = 0, j = 0;
  while (i < stream.size() || j < noise.size()) {
    const bool take_signal =
        j >= noise.size() || (i < stream.size() && stream[i].t <= noise[j].t);
    if (take_signal) {
      out.stream.append(stream[i++]);
      out.labels.push_back(1);
    } else {
      out.stream.append(noise[j++]);
      out.labels.push_back(0);
    }
  }
  return out;
}

deblur::BlurKernel motion_line_kernel(double dx, double dy, int size) {
  deblur::BlurKernel k(size);
  const int c = size / 2;
  if (std::fabs(dx) / 2.0 > c || std::fabs(dy) / 2.0 > c) {
    throw InvalidParameter("kernel raster too small for the displacement");
  }
  const double len = std::hypot(dx, dy);
  const int samples = std::max(1, static_cast<int>(std::ceil(len * 8.0)) + 1);
  const double w = 1.0 / samples;
  for (int s = 0; s < samples; ++s) {
    const double f = samples == 1 ? 0.5 : static_cast<double>(s) / (samples - 1);
    const double px = c + (f - 0.5) * dx;
    const double py = c + (f - 0.5) * dy;
    const int x0 = static_cast<int>(std::floor(px));
    const int y0 = static_cast<int>(std::floor(py));
    const double fx = px - x0, fy = py - y0;
    auto splat = [&](int x, int y, double wgt) {
      if (x >= 0 && x < size && y >= 0 && y < size) k(x, y) += wgt;
    };
    splat(x0, y0, w * (1.0 - fx) * (1.0 - fy));
    splat(x0 + 1, y0, w * fx * (1.0 - fy));
    splat(x0, y0 + 1, w * (1.0 - fx) * fy);
    splat(x0 + 1, y0 + 1, w * fx * fy);
  }
  k.finalize();
  return k;
}

namespace {

void fill_rect(Image& im, double x0, double y0, double x1, double y1, double v) {
  const int ax = static_cast<int>(x0 * im.width()), bx = static_cast<int>(x1 * im.width());
  const int ay = static_cast<int>(y0 * im.height()), by = static_cast<int>(y1 * im.height());
  for (int y = std::max(0, ay); y < std::min(im.height(), by); ++y) {
    for (int x = std::max(0, ax); x < std::min(im.width(), bx); ++x) im(x, y) = v;
  }
}

Image pattern_shapes(int w, int h) {
  Image im(w, h, 0.2);
  fill_rect(im, 0.08, 0.10, 0.30, 0.45, 0.85);
  fill_rect(im, 0.14, 0.18, 0.24, 0.34, 0.35);
  for (int bar = 0; bar < 5; ++bar) {
    const double y0 = 0.12 + bar * 0.06;
    fill_rect(im, 0.40, y0, 0.62, y0 + 0.03, 0.9);
  }
  const double cx = 0.78 * w, cy = 0.28 * h, r = 0.13 * std::min(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= r * r) im(x, y) = 0.7;
    }
  }
  for (int y = static_cast<int>(0.55 * h); y < static_cast<int>(0.90 * h); ++y) {
    for (int x = static_cast<int>(0.08 * w); x < static_cast<int>(0.46 * w); ++x) {
      if ((x + y) % 14 < 6) im(x, y) = 0.6;
    }
  }
  fill_rect(im, 0.60, 0.58, 0.615, 0.88, 0.95);  // glyph strokes
  fill_rect(im, 0.60, 0.60, 0.80, 0.63, 0.95);
  fill_rect(im, 0.60, 0.72, 0.74, 0.75, 0.95);
  fill_rect(im, 0.86, 0.55, 0.875, 0.85, 0.95);
  fill_rect(im, 0.80, 0.82, 0.96, 0.85, 0.95);
  const double bx = 0.85 * w, by = 0.70 * h, s2 = std::pow(0.07 * std::min(w, h), 2.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - bx, dy = y - by;
      im(x, y) = std::min(1.0, im(x, y) + 0.25 * std::exp(-(dx * dx + dy * dy) / (2.0 * s2)));
    }
  }
  return im;
}

Image pattern_bars(int w, int h) {
  Image im(w, h, 0.2);
  for (int x = 0; x < w; ++x) {
    if ((x / std::max(1, w / 16)) % 2 == 0) {
      for (int y = 0; y < h; ++y) im(x, y) = 0.85;
    }
  }
  fill_rect(im, 0.0, 0.45, 1.0, 0.55, 0.6);
  return im;
}

// Dense rows of thin text-like strokes with a couple of solid anchors.
// Thin strokes are the hard case for blind deblurring: a motion kernel a few
// times wider than the strokes wipes them out of the blurry frame.
Image pattern_text(int w, int h) {
  Image im(w, h, 0.15);
  auto rect = [&](int x0, int y0, int x1, int y1, double v) {
    for (int y = std::max(0, y0); y < std::min(h, y1); ++y) {
      for (int x = std::max(0, x0); x < std::min(w, x1); ++x) im(x, y) = v;
    }
  };
  uint64_t state = 12345;
  auto rnd = [&]() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state >> 33;
  };
  const int stroke = 3;
  for (int y0 = 14; y0 + 24 < h - 48; y0 += 48) {
    int x = 10;
    while (x < w - 30) {
      const int glyphs = 2 + static_cast<int>(rnd() % 5);
      for (int g = 0; g < glyphs && x < w - 20; ++g) {
        const int kind = static_cast<int>(rnd() % 4);
        rect(x, y0, x + stroke, y0 + 20, 0.9);
        if (kind == 1) rect(x, y0, x + 10, y0 + stroke, 0.9);
        if (kind == 2) rect(x, y0 + 18, x + 10, y0 + 18 + stroke, 0.9);
        if (kind == 3) rect(x, y0 + 9, x + 8, y0 + 9 + stroke, 0.9);
        x += 12;
      }
      x += 14;
    }
  }
  rect(30, h - 40, 90, h - 14, 0.7);
  rect(w - 110, h - 44, w - 40, h - 12, 0.55);
  return im;
}

// Text-like scene: thick strokes, boxes and discs over a flat background.
// Piecewise-constant by construction, which is what the L0 prior models.
Image pattern_glyphs(int w, int h) {
  Image im(w, h, 0.15);
  for (int row = 0; row < 3; ++row) {
    const double oy = 0.06 + row * 0.32;
    for (int g = 0; g < 5; ++g) {
      const double ox = 0.05 + g * 0.19;
      fill_rect(im, ox, oy, ox + 0.025, oy + 0.22, 0.9);  // vertical stroke
      fill_rect(im, ox, oy, ox + 0.12, oy + 0.035, 0.9);  // top bar
      if ((g + row) % 2) fill_rect(im, ox, oy + 0.09, ox + 0.10, oy + 0.125, 0.9);
      if ((g + row) % 3 == 0) fill_rect(im, ox + 0.05, oy + 0.15, ox + 0.14, oy + 0.20, 0.55);
    }
  }
  for (int d = 0; d < 3; ++d) {
    const double cx = (0.2 + 0.3 * d) * w, cy = 0.5 * h, r = 0.05 * h + 2.0 * d;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dx = x - cx, dy = y - cy;
        if (dx * dx + dy * dy < r * r) im(x, y) = 0.75;
      }
    }
  }
  return im;
}

}  // namespace

Image pattern(const std::string& name, int w, int h) {
  if (w < 8 || h < 8) throw InvalidParameter("pattern size too small");
  if (name == "shapes") return pattern_shapes(w, h);
  if (name == "bars") return pattern_bars(w, h);
  if (name == "glyphs") return pattern_glyphs(w, h);
  if (name == "text") return pattern_text(w, h);
  throw InvalidParameter("unknown pattern: " + name);
}

CaseBundle make_case(const std::string& name, int width, int height,
                     const MotionSpec& motion, const deblur::BlurKernel& kernel,
                     double c, int64_t tau_us, double noise_ratio, uint64_t seed,
                     double dt_ms) {
  CaseBundle bundle;
  bundle.name = name;
  Image base = pattern(name, width, height);
  EventStream ev = simulate_events(base, motion, c, dt_ms);

  const double t_b_ms = motion.duration_ms / 2.0;
  bundle.t_b_us = std::llround(t_b_ms * 1000.0);
  bundle.tau_us = tau_us;
  bundle.c = c;
  bundle.sharp = translate(base, motion.vh * t_b_ms, motion.vv * t_b_ms);
  bundle.blurry = blur_synthesize(bundle.sharp, kernel);
  bundle.kernel = kernel;
  bundle.labeled = inject_noise(ev, noise_ratio, seed);

  auto put = [&](const std::string& k, const std::string& v) { bundle.meta[k] = v; };
  put("case", name);
  put("width", std::to_string(width));
  put("height", std::to_string(height));
  put("vh_px_per_ms", std::to_string(motion.vh));
  put("vv_px_per_ms", std::to_string(motion.vv));
  put("duration_ms", std::to_string(motion.duration_ms));
  put("dt_ms", std::to_string(dt_ms));
  put("contrast", std::to_string(c));
  put("tau_us", std::to_string(tau_us));
  put("t_b_us", std::to_string(bundle.t_b_us));
  put("noise_ratio", std::to_string(noise_ratio));
  put("seed", std::to_string(seed));
  put("kernel_size", std::to_string(kernel.size()));
  return bundle;
}

}  // namespace evrec::synth
