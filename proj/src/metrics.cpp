#include "evrec/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "evrec/kernels.hpp"

namespace evrec::metrics {

double mse(const Image& a, const Image& b) {
  if (!a.same_size(b)) throw DimensionMismatch("mse images differ in size");
  if (a.empty()) throw InvalidParameter("mse of empty images");
  return kernels::ops().sum_sq_diff(a.data(), b.data(), a.size()) /
         static_cast<double>(a.size());
}

namespace {

constexpr int kWin = 11;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian_taps() {
  std::vector<double> taps(kWin);
  const double sigma = 1.5;
  double sum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - kWin / 2;
    taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// separable valid-mode filtering: output is (w-10) x (h-10)
Image filter_valid(const Image& in, const std::vector<double>& taps) {
  const int w = in.width(), h = in.height();
  Image tmp(w - kWin + 1, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x + kWin <= w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWin; ++k) acc += taps[k] * in(x + k, y);
      tmp(x, y) = acc;
    }
  }
  Image out(w - kWin + 1, h - kWin + 1);
  for (int y = 0; y + kWin <= h; ++y) {
    for (int x = 0; x < tmp.width(); ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWin; ++k) acc += taps[k] * tmp(x, y + k);
      out(x, y) = acc;
    }
  }
  return out;
}

Image multiply(const Image& a, const Image& b) {
  Image out(a.width(), a.height());
  for (size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  if (!a.same_size(b)) throw DimensionMismatch("ssim images differ in size");
  if (a.width() < kWin || a.height() < kWin) {
    throw InvalidParameter("ssim needs at least an 11x11 image");
  }
  const std::vector<double> taps = gaussian_taps();

  Image mu1 = filter_valid(a, taps);
  Image mu2 = filter_valid(b, taps);
  Image saa = filter_valid(multiply(a, a), taps);
  Image sbb = filter_valid(multiply(b, b), taps);
  Image sab = filter_valid(multiply(a, b), taps);

  double total = 0.0;
  for (size_t i = 0; i < mu1.size(); ++i) {
    const double m1 = mu1.data()[i], m2 = mu2.data()[i];
    const double v1 = saa.data()[i] - m1 * m1;
    const double v2 = sbb.data()[i] - m2 * m2;
    const double cov = sab.data()[i] - m1 * m2;
    const double num = (2.0 * m1 * m2 + kC1) * (2.0 * cov + kC2);
    const double den = (m1 * m1 + m2 * m2 + kC1) * (v1 + v2 + kC2);
    total += num / den;
  }
  return total / static_cast<double>(mu1.size());
}

ClassificationReport classify_report(const events::EventStream& kept,
                                     const synth::LabeledStream& labeled) {
  if (kept.width() != labeled.stream.width() || kept.height() != labeled.stream.height()) {
    throw DimensionMismatch("stream geometry mismatch");
  }
  if (labeled.labels.size() != labeled.stream.size()) {
    throw ConsistencyError("label count does not match stream");
  }

  ClassificationReport r;
  size_t j = 0;
  for (size_t i = 0; i < labeled.stream.size(); ++i) {
    const bool is_signal = labeled.labels[i] != 0;
    const bool was_kept = j < kept.size() && kept[j] == labeled.stream[i];
    if (was_kept) ++j;
    if (is_signal) {
      was_kept ? ++r.tp : ++r.fn;
    } else {
      was_kept ? ++r.fp : ++r.tn;
    }
  }
  if (j != kept.size()) {
    throw ConsistencyError("kept stream is not a sub-sequence of the labeled stream");
  }

  auto rate = [](int64_t num, int64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.tpr = rate(r.tp, r.tp + r.fn);
  r.fpr = rate(r.fp, r.fp + r.tn);
  r.ppv = rate(r.tp, r.tp + r.fp);
  r.acc = rate(r.tp + r.tn, r.total());
  return r;
}

double kernel_similarity(const deblur::BlurKernel& k1, const deblur::BlurKernel& k2) {
  const int size = std::max(k1.size(), k2.size());
  auto embed = [size](const deblur::BlurKernel& k) {
    std::vector<double> grid(static_cast<size_t>(size) * size, 0.0);
    const int off = (size - k.size()) / 2;
    for (int y = 0; y < k.size(); ++y) {
      for (int x = 0; x < k.size(); ++x) {
        grid[static_cast<size_t>(y + off) * size + x + off] = k(x, y);
      }
    }
    return grid;
  };
  const std::vector<double> a = embed(k1);
  const std::vector<double> b = embed(k2);

  auto energy = [](const std::vector<double>& v) {
    double e = 0.0;
    for (double x : v) e += x * x;
    return e;
  };
  const double ea = energy(a), eb = energy(b);
  if (ea == 0.0 || eb == 0.0) throw DegenerateInput("zero-energy kernel");

  const int r = size / 2;
  double best = -1.0;
  for (int sy = -r; sy <= r; ++sy) {
    for (int sx = -r; sx <= r; ++sx) {
      double dot = 0.0;
      for (int y = 0; y < size; ++y) {
        const int yb = y - sy;
        if (yb < 0 || yb >= size) continue;
        for (int x = 0; x < size; ++x) {
          const int xb = x - sx;
          if (xb < 0 || xb >= size) continue;
          dot += a[static_cast<size_t>(y) * size + x] * b[static_cast<size_t>(yb) * size + xb];
        }
      }
      best = std::max(best, dot / std::sqrt(ea * eb));
    }
  }
  return best;
}

}  // namespace evrec::metrics
