#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "evrec/events.hpp"
#include "evrec/imageops.hpp"
#include "evrec/io.hpp"
#include "evrec/synth.hpp"
#include "oracles.hpp"

using namespace evrec;
using deblur::BlurKernel;
using events::EventStream;
using synth::MotionSpec;

TEST_SUITE_BEGIN("synth");

TEST_CASE("blur_synthesize: delta kernel is the identity") {
  Image s = oracle::random_image(16, 16, 3);
  Image b = synth::blur_synthesize(s, BlurKernel::delta(5));
  CHECK(oracle::max_abs_diff(s, b) < 1e-12);
}

TEST_CASE("blur_synthesize: full-size uniform kernel averages everything") {
  Image s = oracle::random_image(9, 9, 4);
  BlurKernel k(9);
  for (int j = 0; j < 9; ++j) {
    for (int i = 0; i < 9; ++i) k(i, j) = 1.0;
  }
  k.finalize();
  double mean = 0.0;
  for (size_t i = 0; i < s.size(); ++i) mean += s.data()[i];
  mean /= static_cast<double>(s.size());
  Image b = synth::blur_synthesize(s, k);
  for (size_t i = 0; i < b.size(); ++i) {
    CHECK(b.data()[i] == doctest::Approx(mean).epsilon(1e-10));
  }
}

TEST_CASE("blur_synthesize matches brute-force spatial convolution") {
  Image s = oracle::random_image(24, 20, 5);
  BlurKernel k(7);
  oracle::Rng rng(6);
  for (int j = 0; j < 7; ++j) {
    for (int i = 0; i < 7; ++i) k(i, j) = rng.unit();
  }
  k.finalize();
  Image got = synth::blur_synthesize(s, k);
  Image brute = clamp01(oracle::brute_circular_conv(s, k));
  CHECK(oracle::max_abs_diff(got, brute) < 1e-8);
}

namespace {

// vertical step edge: left half `a`, right half `b`
Image step_edge(int w, int h, double a, double b) {
  Image im(w, h, a);
  for (int y = 0; y < h; ++y) {
    for (int x = w / 2; x < w; ++x) im(x, y) = b;
  }
  return im;
}

}  // namespace

TEST_CASE("simulate_events: edge-parallel motion triggers nothing") {
  Image edge = step_edge(16, 16, 0.25, 0.75);
  EventStream ev = synth::simulate_events(edge, MotionSpec{0.0, 1.0, 2.0}, 0.2, 0.25);
  CHECK(ev.empty());
}

TEST_CASE("simulate_events: perpendicular motion fires the closed-form count") {
  const double a = 0.25, b = 0.75, c = 0.5;
  Image edge = step_edge(16, 16, a, b);
  // 2 px displacement over 2 ms
  EventStream ev = synth::simulate_events(edge, MotionSpec{1.0, 0.0, 2.0}, c, 0.25);
  CHECK(!ev.empty());

  const double dlog = std::log(b + 1e-3) - std::log(a + 1e-3);
  const int expected = static_cast<int>(std::floor(dlog / c));

  std::map<std::pair<int, int>, int> pos, neg;
  for (const auto& e : ev) {
    (e.p > 0 ? pos : neg)[{e.x, e.y}]++;
  }
  for (int y = 0; y < 16; ++y) {
    // content moves right: columns 0,1 brighten (wrap), columns 8,9 darken
    for (int x : {0, 1}) {
      CHECK(pos[{x, y}] == expected);
      CHECK(neg.count({x, y}) == 0);
    }
    for (int x : {8, 9}) {
      CHECK(neg[{x, y}] == expected);
      CHECK(pos.count({x, y}) == 0);
    }
  }
  // nowhere else
  for (const auto& e : ev) {
    CHECK((e.x == 0 || e.x == 1 || e.x == 8 || e.x == 9));
  }
}

TEST_CASE("simulate_events: doubling the threshold halves counts within one") {
  Image edge = step_edge(16, 16, 0.25, 0.75);
  const MotionSpec motion{1.0, 0.0, 2.0};
  const size_t n1 = synth::simulate_events(edge, motion, 0.25, 0.25).size();
  const size_t n2 = synth::simulate_events(edge, motion, 0.5, 0.25).size();
  const double dlog = std::log(0.751) - std::log(0.251);
  const size_t per_pixel_1 = static_cast<size_t>(std::floor(dlog / 0.25));
  const size_t per_pixel_2 = static_cast<size_t>(std::floor(dlog / 0.5));
  CHECK(n1 == per_pixel_1 * 64);  // 4 columns x 16 rows
  CHECK(n2 == per_pixel_2 * 64);
  CHECK(per_pixel_1 / 2 - per_pixel_2 <= 1);
}

TEST_CASE("events colocate with swept high-gradient pixels") {
  Image s = synth::pattern("shapes", 48, 48);
  const MotionSpec motion{-1.0, -0.5, 4.0};
  const double c = 0.25;
  EventStream ev = synth::simulate_events(s, motion, c, 0.25);
  REQUIRE(!ev.empty());

  // union of high-gradient pixels over the motion path, dilated by one pixel
  std::vector<uint8_t> mask(48 * 48, 0);
  for (double t = 0.0; t <= motion.duration_ms + 1e-9; t += 0.25) {
    Image f = synth::translate(s, motion.vh * t, motion.vv * t);
    evrec::GradientField g = evrec::img::gradient(f);
    for (size_t i = 0; i < g.size(); ++i) {
      if (std::hypot(g.gh[i], g.gv[i]) > c) mask[i] = 1;
    }
  }
  std::vector<uint8_t> dilated(48 * 48, 0);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 48; ++x) {
      for (int dy = -1; dy <= 1 && !dilated[y * 48 + x]; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (mask[((y + dy + 48) % 48) * 48 + (x + dx + 48) % 48]) {
            dilated[y * 48 + x] = 1;
            break;
          }
        }
      }
    }
  }
  size_t hits = 0;
  for (const auto& e : ev) hits += dilated[static_cast<size_t>(e.y) * 48 + e.x];
  CHECK(static_cast<double>(hits) >= 0.99 * static_cast<double>(ev.size()));
}

TEST_CASE("integrating all simulated events recovers the log-intensity change") {
  Image s = synth::pattern("shapes", 48, 48);
  const MotionSpec motion{-1.5, -0.5, 3.0};
  const double c = 0.2;
  EventStream ev = synth::simulate_events(s, motion, c, 0.25);
  events::IntensityMap m = events::integrate(ev, 3000, 3000, c);

  Image end = synth::translate(s, motion.vh * 3.0, motion.vv * 3.0);
  double worst = 0.0;
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 48; ++x) {
      const double expected = std::log(end(x, y) + 1e-3) - std::log(s(x, y) + 1e-3);
      worst = std::max(worst, std::fabs(expected - m.at(x, y)));
    }
  }
  CHECK(worst <= c);
}

TEST_CASE("inject_noise: ratio0 is the identity, counts and determinism hold") {
  EventStream s(64, 48);
  oracle::Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    s.append({static_cast<int>(rng.next() % 64), static_cast<int>(rng.next() % 48),
              static_cast<int64_t>(i * 10), rng.next() % 2 ? 1 : -1});
  }
  synth::LabeledStream clean = synth::inject_noise(s, 0.0, 1);
  CHECK(clean.stream == s);
  for (uint8_t l : clean.labels) CHECK(l == 1);

  synth::LabeledStream noisy = synth::inject_noise(s, 0.5, 42);
  CHECK(noisy.stream.size() == 1500);
  size_t noise_count = 0;
  for (uint8_t l : noisy.labels) noise_count += l == 0;
  CHECK(noise_count == 500);

  synth::LabeledStream again = synth::inject_noise(s, 0.5, 42);
  CHECK(again.stream == noisy.stream);
  CHECK(again.labels == noisy.labels);

  synth::LabeledStream other = synth::inject_noise(s, 0.5, 43);
  CHECK(other.stream.events() != noisy.stream.events());
}

TEST_CASE("injected noise is spatially uniform (chi-square, 64 cells)") {
  EventStream s(80, 80);
  for (int i = 0; i < 20000; ++i) s.append({40, 40, i, 1});
  synth::LabeledStream noisy = synth::inject_noise(s, 0.6, 1234);  // 12000 noise events

  double cells[64] = {0.0};
  size_t total = 0;
  for (size_t i = 0; i < noisy.stream.size(); ++i) {
    if (noisy.labels[i]) continue;
    const auto& e = noisy.stream[i];
    cells[(e.y / 10) * 8 + e.x / 10] += 1.0;
    ++total;
  }
  REQUIRE(total == 12000);
  const double expected = static_cast<double>(total) / 64.0;
  double chi2 = 0.0;
  for (double obs : cells) chi2 += (obs - expected) * (obs - expected) / expected;
  CHECK(chi2 < 92.01);  // upper 1% quantile of chi-square with 63 dof
}

TEST_CASE("motion_line_kernel integrates to one and matches the direction") {
  BlurKernel k = synth::motion_line_kernel(6.0, 0.0, 9);
  double sum = 0.0;
  for (double v : k.weights()) sum += v;
  CHECK(sum == doctest::Approx(1.0));
  // mass only on the center row (and its bilinear neighbors)
  for (int j = 0; j < 9; ++j) {
    for (int i = 0; i < 9; ++i) {
      if (j != 4) CHECK(k(i, j) == 0.0);
    }
  }
  CHECK_THROWS_AS(synth::motion_line_kernel(20.0, 0.0, 9), InvalidParameter);
}

TEST_CASE("make_case is deterministic and writes a complete bundle") {
  MotionSpec motion{-1.0, -0.25, 4.0};
  BlurKernel k = synth::motion_line_kernel(-2.0, -0.5, 5);
  synth::CaseBundle b1 = synth::make_case("bars", 64, 48, motion, k, 0.25, 2000, 0.5, 9);
  synth::CaseBundle b2 = synth::make_case("bars", 64, 48, motion, k, 0.25, 2000, 0.5, 9);
  CHECK(b1.sharp == b2.sharp);
  CHECK(b1.labeled.stream == b2.labeled.stream);

  namespace fs = std::filesystem;
  const fs::path dir1 = fs::temp_directory_path() / "evrec_case_a";
  const fs::path dir2 = fs::temp_directory_path() / "evrec_case_b";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  io::write_case(b1, dir1);
  io::write_case(b2, dir2);
  for (const char* name : {"sharp.pgm", "blurry.pgm", "events.csv", "labels.csv",
                           "kernel.txt", "meta.txt"}) {
    std::ifstream f1(dir1 / name, std::ios::binary);
    std::ifstream f2(dir2 / name, std::ios::binary);
    REQUIRE(f1.good());
    REQUIRE(f2.good());
    std::string c1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string c2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(c1 == c2);
  }
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("make_case with zero velocity yields pure injected noise") {
  MotionSpec still{0.0, 0.0, 4.0};
  BlurKernel k = BlurKernel::delta(3);
  synth::CaseBundle b = synth::make_case("bars", 32, 32, still, k, 0.25, 2000, 0.5, 3);
  for (uint8_t l : b.labeled.labels) CHECK(l == 0);  // no signal events at all
}

TEST_CASE("DAVIS-sized shapes pattern has the requested geometry") {
  Image p = synth::pattern("shapes", 346, 260);
  CHECK(p.width() == 346);
  CHECK(p.height() == 260);
  CHECK_THROWS_AS(synth::pattern("nope", 32, 32), InvalidParameter);
}

TEST_SUITE_END();
