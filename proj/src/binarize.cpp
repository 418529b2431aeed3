#include "pulsekit/binarize.hpp"

#include <cmath>

#include "pulsekit/error.hpp"
#include "pulsekit/kernels.hpp"

namespace pulsekit {

IntensityImage to_intensity_image(const Spectrogram& spec,
                                  double dyn_range_db) {
  if (spec.power.empty()) throw data_error("empty spectrogram");
  if (!(dyn_range_db > 0.0)) throw data_error("dyn_range_db must be > 0");

  const std::size_t n = spec.power.size();
  IntensityImage img;
  img.geom = spec.geom;
  img.pixels.resize(n);

  const double peak = kernels::min_max(spec.power.data(), n).max;
  if (peak <= 0.0) {
    // silent input: zero dynamic range
    std::fill(img.pixels.begin(), img.pixels.end(), 0.0);
    return img;
  }
  const double peak_db = 10.0 * std::log10(peak);
  const double floor_db = peak_db - dyn_range_db;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = spec.power[i];
    const double db = p > 0.0 ? 10.0 * std::log10(p) : floor_db;
    img.pixels[i] = std::max(db, floor_db);
  }
  const auto mm = kernels::min_max(img.pixels.data(), n);
  if (mm.max <= mm.min) {
    std::fill(img.pixels.begin(), img.pixels.end(), 0.0);
    return img;
  }
  const double inv_span = 1.0 / (mm.max - mm.min);
  for (double& v : img.pixels) v = (v - mm.min) * inv_span;
  return img;
}

MaskLevel compute_mask_level(const IntensityImage& img, double coefficient) {
  if (img.pixels.empty()) throw data_error("empty intensity image");
  const std::size_t n = img.pixels.size();
  // two passes: mean first, then deviations about it (population variance)
  const double mu =
      kernels::sum(img.pixels.data(), n) / static_cast<double>(n);
  const double var = kernels::sum_squared_diff(img.pixels.data(), n, mu) /
                     static_cast<double>(n);
  MaskLevel level;
  level.mu = mu;
  level.sigma = std::sqrt(var);
  level.coefficient = coefficient;
  level.gamma = coefficient * level.sigma + level.mu;
  return level;
}

BinaryImage apply_mask(const IntensityImage& img, const MaskLevel& level) {
  BinaryImage bw;
  bw.geom = img.geom;
  bw.bits.resize(img.pixels.size());
  kernels::threshold_greater(img.pixels.data(), img.pixels.size(), level.gamma,
                             bw.bits.data());
  return bw;
}

}  // namespace pulsekit
