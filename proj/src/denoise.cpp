#include "evrec/denoise.hpp"

#include <algorithm>
#include <cmath>

#include "evrec/kernels.hpp"

namespace evrec::denoise {

using events::Event;

void DenoiseParams::validate() const {
  if (omega < 0.0) throw InvalidParameter("omega must be >= 0");
  if (mu < 0) throw InvalidParameter("mu must be >= 0");
  if (nu_us < 0) throw InvalidParameter("nu must be >= 0");
}

GradientMask build_mask(const GradientField& grad, double omega) {
  if (omega < 0.0) throw InvalidParameter("omega must be >= 0");
  const size_t n = grad.size();
  std::vector<double> mag(n);
  kernels::ops().magnitude(grad.gh.data(), grad.gv.data(), mag.data(), n);

  double lo = mag.empty() ? 0.0 : mag[0], hi = lo;
  for (double v : mag) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  double q = lo;
  if (hi > lo) {
    constexpr int kBins = 256;
    int counts[kBins] = {0};
    const double scale = kBins / (hi - lo);
    for (double v : mag) {
      int b = static_cast<int>((v - lo) * scale);
      if (b >= kBins) b = kBins - 1;
      ++counts[b];
    }
    int best = 0;
    for (int b = 1; b < kBins; ++b) {
      if (counts[b] > counts[best]) best = b;  // ties keep the lower bin
    }
    q = lo + (best + 0.5) * (hi - lo) / kBins;
  }

  GradientMask mask(grad.width, grad.height);
  for (size_t i = 0; i < n; ++i) {
    const bool suppressed = mag[i] > q - omega && mag[i] < q + omega;
    mask.g[i] = suppressed ? 0.0 : mag[i];
  }
  return mask;
}

EventStream mask_filter(const EventStream& stream, const GradientMask& mask) {
  if (mask.width != stream.width() || mask.height != stream.height()) {
    throw DimensionMismatch("mask geometry mismatch");
  }
  EventStream out(stream.width(), stream.height());
  for (const Event& e : stream) {
    if (mask.at(e.x, e.y) != 0.0) out.append(e);
  }
  return out;
}

namespace {

// Per-pixel sorted timestamp buckets for neighborhood queries.
struct PixelIndex {
  int w = 0, h = 0;
  std::vector<std::vector<int64_t>> times;

  explicit PixelIndex(const EventStream& s)
      : w(s.width()), h(s.height()), times(static_cast<size_t>(w) * h) {
    for (const Event& e : s) {
      times[static_cast<size_t>(e.y) * w + e.x].push_back(e.t);  // already sorted by t
    }
  }

  size_t count_in(int x, int y, int64_t t0, int64_t t1) const {
    const auto& v = times[static_cast<size_t>(y) * w + x];
    auto lo = std::lower_bound(v.begin(), v.end(), t0);
    auto hi = std::upper_bound(lo, v.end(), t1);
    return static_cast<size_t>(hi - lo);
  }

  bool any_in(int x, int y, int64_t t0, int64_t t1) const {
    const auto& v = times[static_cast<size_t>(y) * w + x];
    auto lo = std::lower_bound(v.begin(), v.end(), t0);
    return lo != v.end() && *lo <= t1;
  }
};

}  // namespace

EventStream expand_neighbors(const EventStream& raw, const EventStream& seeds,
                             int mu, int64_t nu_us) {
  if (raw.width() != seeds.width() || raw.height() != seeds.height()) {
    throw DimensionMismatch("stream geometry mismatch");
  }
  if (mu < 0 || nu_us < 0) throw InvalidParameter("neighborhood radii must be >= 0");
  if (seeds.empty()) return EventStream(raw.width(), raw.height());

  PixelIndex index(seeds);
  EventStream out(raw.width(), raw.height());
  for (const Event& e : raw) {
    const int x0 = std::max(0, e.x - mu), x1 = std::min(raw.width() - 1, e.x + mu);
    const int y0 = std::max(0, e.y - mu), y1 = std::min(raw.height() - 1, e.y + mu);
    bool near = false;
    for (int y = y0; y <= y1 && !near; ++y) {
      for (int x = x0; x <= x1 && !near; ++x) {
        near = index.any_in(x, y, e.t - nu_us, e.t + nu_us);
      }
    }
    if (near) out.append(e);
  }
  return out;
}

EventStream denoise(const EventStream& raw, const GradientField& grad,
                    const DenoiseParams& params) {
  params.validate();
  const size_t n = grad.size();
  std::vector<double> mag(n);
  kernels::ops().magnitude(grad.gh.data(), grad.gv.data(), mag.data(), n);
  double mag_max = 0.0;
  for (double v : mag) mag_max = std::max(mag_max, v);

  GradientMask mask = build_mask(grad, params.omega * mag_max);
  EventStream seeds = mask_filter(raw, mask);
  return expand_neighbors(raw, seeds, params.mu, params.nu_us);
}

EventStream nn_filter(const EventStream& raw, int mu, int64_t nu_us, int min_support) {
  if (min_support < 1) throw InvalidParameter("min_support must be >= 1");
  if (mu < 0 || nu_us < 0) throw InvalidParameter("neighborhood radii must be >= 0");

  PixelIndex index(raw);
  EventStream out(raw.width(), raw.height());
  for (const Event& e : raw) {
    const int x0 = std::max(0, e.x - mu), x1 = std::min(raw.width() - 1, e.x + mu);
    const int y0 = std::max(0, e.y - mu), y1 = std::min(raw.height() - 1, e.y + mu);
    size_t support = 0;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        support += index.count_in(x, y, e.t - nu_us, e.t + nu_us);
      }
    }
    // the event counts itself once
    if (support >= static_cast<size_t>(min_support) + 1) out.append(e);
  }
  return out;
}

}  // namespace evrec::denoise
