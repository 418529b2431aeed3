#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pulsekit/binarize.hpp"
#include "pulsekit/rng.hpp"

using namespace pulsekit;

namespace {

Spectrogram make_spec(std::vector<double> power, std::size_t n_time,
                      std::size_t n_freq) {
  Spectrogram s;
  s.power = std::move(power);
  s.geom.n_time = n_time;
  s.geom.n_freq = n_freq;
  s.geom.time_bin_s = 0.0205;
  s.geom.freq_bin_hz = 3.90625;
  return s;
}

IntensityImage make_image(std::vector<double> pixels, std::size_t n_time,
                          std::size_t n_freq) {
  IntensityImage img;
  img.pixels = std::move(pixels);
  img.geom.n_time = n_time;
  img.geom.n_freq = n_freq;
  return img;
}

}  // namespace

TEST_SUITE_BEGIN("binarize");

TEST_CASE("constant-power spectrogram maps to an all-zero image") {
  const Spectrogram s = make_spec(std::vector<double>(64, 3.7), 8, 8);
  const IntensityImage img = to_intensity_image(s);
  for (double v : img.pixels) CHECK(v == 0.0);
}

TEST_CASE("two-valued power {p, 100p} maps to intensities {0, 1}") {
  // a 20 dB spread sits inside the 60 dB range, so min-max pins the ends
  std::vector<double> power(32, 1e-3);
  for (std::size_t i = 0; i < 16; ++i) power[2 * i + 1] = 1e-1;
  const IntensityImage img = to_intensity_image(make_spec(power, 4, 8));
  for (std::size_t i = 0; i < 32; ++i) {
    CHECK(img.pixels[i] == (i % 2 ? 1.0 : 0.0));
  }
}

TEST_CASE("power scaling leaves the intensity image unchanged") {
  RngEngine rng(11);
  std::vector<double> power(1024);
  for (double& p : power) p = std::exp(uniform_range(rng, -6.0, 2.0));
  const IntensityImage base = to_intensity_image(make_spec(power, 32, 32));

  for (double c2 : {1e-4, 4.0, 1e4}) {
    std::vector<double> scaled = power;
    for (double& p : scaled) p *= c2;
    const IntensityImage out = to_intensity_image(make_spec(scaled, 32, 32));
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
      CHECK(out.pixels[i] == doctest::Approx(base.pixels[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("dynamic range floor clamps deep valleys") {
  // 80 dB below peak floors at -60 dB -> intensity 0; zero power likewise
  std::vector<double> power = {1.0, 1e-8, 0.0, 1e-3};
  const IntensityImage img = to_intensity_image(make_spec(power, 2, 2), 60.0);
  CHECK(img.pixels[0] == 1.0);
  CHECK(img.pixels[1] == 0.0);
  CHECK(img.pixels[2] == 0.0);
  CHECK(img.pixels[3] == doctest::Approx(0.5));  // -30 dB of a 60 dB span
}

TEST_CASE("mask level: constant image") {
  const IntensityImage img = make_image(std::vector<double>(100, 0.42), 10,
                                        10);
  const MaskLevel level = compute_mask_level(img, 1.75);
  CHECK(level.mu == doctest::Approx(0.42));
  CHECK(level.sigma == doctest::Approx(0.0));
  CHECK(level.gamma == doctest::Approx(0.42));
}

TEST_CASE("mask level: half zeros / half ones") {
  std::vector<double> pixels(200, 0.0);
  for (std::size_t i = 100; i < 200; ++i) pixels[i] = 1.0;
  const MaskLevel level = compute_mask_level(make_image(pixels, 10, 20),
                                             1.75);
  // Bernoulli(1/2): mu = 0.5, sigma = 0.5, gamma = 1.75*0.5 + 0.5
  CHECK(level.mu == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(level.sigma == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(level.gamma == doctest::Approx(1.375).epsilon(1e-15));

  // 1 < 1.375: strict comparison turns nothing white
  const BinaryImage bw = apply_mask(make_image(pixels, 10, 20), level);
  for (auto b : bw.bits) CHECK(b == 0);
}

TEST_CASE("mask level matches the two-pass oracle on random images") {
  RngEngine rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pixels(64 * 64);
    for (double& p : pixels) p = uniform_range(rng, 0.0, 1.0);
    const MaskLevel level = compute_mask_level(make_image(pixels, 64, 64),
                                               1.75);
    const auto ref = oracle::mean_std(pixels);
    const double gamma_ref = 1.75 * ref.std + ref.mean;
    CHECK(std::abs(level.gamma - gamma_ref) <= 1e-12 * std::abs(gamma_ref));
  }
}

TEST_CASE("bimodal image: exactly the bright cluster turns white") {
  // 4% of pixels at 1.0, the rest near 0: gamma lands between the clusters
  RngEngine rng(99);
  const std::size_t n = 2500;
  std::vector<double> pixels(n);
  std::size_t bright = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 25 == 0) {
      pixels[i] = 1.0;
      ++bright;
    } else {
      pixels[i] = uniform_range(rng, 0.0, 0.05);
    }
  }
  const IntensityImage img = make_image(pixels, 50, 50);
  const MaskLevel level = compute_mask_level(img, 1.75);
  CHECK(level.gamma > 0.05);
  CHECK(level.gamma < 1.0);

  const BinaryImage bw = apply_mask(img, level);
  std::size_t white = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (bw.bits[i]) {
      ++white;
      CHECK(pixels[i] == 1.0);
    }
  }
  CHECK(white == bright);
}

TEST_CASE("raising gamma only shrinks the white set") {
  RngEngine rng(5);
  std::vector<double> pixels(900);
  for (double& p : pixels) p = uniform_range(rng, 0.0, 1.0);
  const IntensityImage img = make_image(pixels, 30, 30);

  MaskLevel lo = compute_mask_level(img, 1.0);
  MaskLevel hi = compute_mask_level(img, 2.0);
  REQUIRE(lo.gamma < hi.gamma);
  const BinaryImage bw_lo = apply_mask(img, lo);
  const BinaryImage bw_hi = apply_mask(img, hi);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (bw_hi.bits[i]) CHECK(bw_lo.bits[i]);  // white at hi implies white at lo
  }
}

TEST_CASE("white fraction of gaussian images stays in the 1.75-sigma tail") {
  RngEngine rng(31415);
  double total_fraction = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pixels(4096);
    for (double& p : pixels) p = 0.5 + 0.1 * gaussian(rng);
    const IntensityImage img = make_image(pixels, 64, 64);
    const BinaryImage bw = apply_mask(img, compute_mask_level(img, 1.75));
    std::size_t white = 0;
    for (auto b : bw.bits) white += b;
    const double fraction = static_cast<double>(white) / 4096.0;
    CHECK(fraction >= 0.01);
    CHECK(fraction <= 0.08);
    total_fraction += fraction;
  }
  // concentrates near the ~4% upper-tail mass beyond 1.75 sigma
  CHECK(total_fraction / 100.0 == doctest::Approx(0.04).epsilon(0.3));
}

TEST_CASE("end-to-end gain invariance of the binarization stage") {
  RngEngine rng(7);
  std::vector<double> power(2048);
  for (double& p : power) p = std::exp(uniform_range(rng, -4.0, 4.0));

  const Spectrogram base = make_spec(power, 64, 32);
  const IntensityImage img1 = to_intensity_image(base);
  const BinaryImage bw1 = apply_mask(img1, compute_mask_level(img1, 1.75));

  for (double c2 : {1e-4, 1e4}) {
    std::vector<double> scaled = power;
    for (double& p : scaled) p *= c2;
    const IntensityImage img2 =
        to_intensity_image(make_spec(scaled, 64, 32));
    const BinaryImage bw2 = apply_mask(img2, compute_mask_level(img2, 1.75));
    CHECK(bw1.bits == bw2.bits);
  }
}

TEST_SUITE_END();
