#include "evrec/events.hpp"

#include <algorithm>
#include <cmath>

#include "evrec/imageops.hpp"

namespace evrec::events {

EventStream::EventStream(int width, int height) : w_(width), h_(height) {
  if (width <= 0 || height <= 0) throw InvalidParameter("stream geometry must be positive");
}

void EventStream::append(const Event& e) {
  if (e.p != 1 && e.p != -1) throw InvalidParameter("event polarity must be +1 or -1");
  if (e.x < 0 || e.x >= w_ || e.y < 0 || e.y >= h_) {
    throw InvalidParameter("event outside sensor geometry");
  }
  if (!events_.empty() && e.t < events_.back().t) {
    throw InvalidParameter("event timestamps must be non-decreasing");
  }
  events_.push_back(e);
}

EventStream EventStream::from_unsorted(int width, int height, std::vector<Event> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
  EventStream s(width, height);
  s.events_.reserve(events.size());
  for (const Event& e : events) s.append(e);
  return s;
}

IntensityMap integrate(const EventStream& stream, int64_t t_end, int64_t tau_us, double c) {
  if (tau_us <= 0) throw InvalidParameter("integration window must be positive");
  if (c <= 0.0) throw InvalidParameter("contrast threshold must be positive");
  std::vector<int64_t> counts(static_cast<size_t>(stream.width()) * stream.height(), 0);
  const int64_t t_start = t_end - tau_us;
  for (const Event& e : stream) {
    if (e.t > t_start && e.t <= t_end) {
      counts[static_cast<size_t>(e.y) * stream.width() + e.x] += e.p;
    }
  }
  IntensityMap map(stream.width(), stream.height());
  for (size_t i = 0; i < counts.size(); ++i) {
    map.values[i] = c * static_cast<double>(counts[i]);
  }
  return map;
}

EventStream window(const EventStream& stream, int64_t t_start, int64_t t_end) {
  if (t_start > t_end) throw InvalidParameter("inverted window");
  EventStream out(stream.width(), stream.height());
  for (const Event& e : stream) {
    if (e.t > t_start && e.t <= t_end) out.append(e);
  }
  return out;
}

std::pair<int64_t, int64_t> exposure_window_for_frame(int64_t t_b, int64_t tau_us) {
  if (tau_us <= 0) throw InvalidParameter("exposure duration must be positive");
  const int64_t t_start = t_b - tau_us / 2;
  return {t_start, t_start + tau_us};
}

IntensityMap normalize_to_gradient(IntensityMap map, const Image& reference) {
  if (reference.width() != map.width || reference.height() != map.height) {
    throw DimensionMismatch("normalize_to_gradient geometry mismatch");
  }
  double map_max = 0.0;
  for (double v : map.values) map_max = std::max(map_max, std::fabs(v));
  if (map_max == 0.0) return map;
  GradientField g = img::gradient(reference);
  double grad_max = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    grad_max = std::max(grad_max, std::max(std::fabs(g.gh[i]), std::fabs(g.gv[i])));
  }
  if (grad_max == 0.0) return map;
  const double s = grad_max / map_max;
  for (double& v : map.values) v *= s;
  return map;
}

Image to_image(const IntensityMap& map) {
  Image img(map.width, map.height);
  std::copy(map.values.begin(), map.values.end(), img.data());
  return img;
}

}  // namespace evrec::events
