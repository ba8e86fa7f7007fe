#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "evrec/errors.hpp"
#include "evrec/image.hpp"

namespace evrec::events {

// Timestamped polarity spike. Timestamps are integer microseconds; polarity
// is exactly -1 or +1.
struct Event {
  int x = 0;
  int y = 0;
  int64_t t = 0;
  int p = 1;

  bool operator==(const Event&) const = default;
};

// Sorted-by-timestamp event container tied to a sensor geometry.
// Immutable once built; ties keep insertion order.
class EventStream {
 public:
  EventStream() = default;
  EventStream(int width, int height);

  // Appends an event; rejects out-of-geometry coordinates, p not in {-1,+1},
  // and timestamps that move backwards.
  void append(const Event& e);

  // Builds a stream from possibly-unsorted events (stable sort by t).
  static EventStream from_unsorted(int width, int height, std::vector<Event> events);

  int width() const { return w_; }
  int height() const { return h_; }
  size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const Event& operator[](size_t i) const { return events_[i]; }
  const std::vector<Event>& events() const { return events_; }

  auto begin() const { return events_.begin(); }
  auto end() const { return events_.end(); }

  bool operator==(const EventStream&) const = default;

 private:
  int w_ = 0, h_ = 0;
  std::vector<Event> events_;
};

// Per-pixel quantized log-intensity change accumulated from events, in
// multiples of the contrast threshold.
struct IntensityMap {
  int width = 0, height = 0;
  std::vector<double> values;

  IntensityMap() = default;
  IntensityMap(int w, int h)
      : width(w), height(h), values(static_cast<size_t>(w) * h, 0.0) {}

  double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
};

// Signed event count per pixel over the half-open window (t_end - tau, t_end],
// scaled by the contrast threshold c. Integer accumulation happens before the
// final scale, so partitioned windows add exactly.
IntensityMap integrate(const EventStream& stream, int64_t t_end, int64_t tau_us, double c);

// Sub-stream with t in (t_start, t_end], same geometry, order preserved.
EventStream window(const EventStream& stream, int64_t t_start, int64_t t_end);

// Exposure interval [t_b - tau/2, t_b + tau/2] for a frame stamped at its
// exposure midpoint.
std::pair<int64_t, int64_t> exposure_window_for_frame(int64_t t_b, int64_t tau_us);

// Rescales the map so its max absolute value matches the max absolute value
// of the forward differences of `reference`. No-op when either side is zero.
IntensityMap normalize_to_gradient(IntensityMap map, const Image& reference);

Image to_image(const IntensityMap& map);

}  // namespace evrec::events
