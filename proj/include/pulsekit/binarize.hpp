// Spectrogram -> gray-scale intensity image -> statistical threshold mask.
// The dB conversion plus per-slice min-max normalization makes the stage
// invariant to input gain, which is what lets one threshold rule work across
// sensors with different levels.
#pragma once

#include <cstdint>
#include <vector>

#include "pulsekit/dsp.hpp"

namespace pulsekit {

// Intensities in [0, 1], same shape and geometry as the source spectrogram.
struct IntensityImage {
  std::vector<double> pixels;
  TfGeometry geom;

  double at(std::size_t t, std::size_t f) const {
    return pixels[t * geom.n_freq + f];
  }
};

// gamma = coefficient * sigma + mu over all pixels of one image.
struct MaskLevel {
  double gamma = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double coefficient = 1.75;
};

struct BinaryImage {
  std::vector<std::uint8_t> bits;  // {0,1}, row-major [time][freq]
  TfGeometry geom;

  std::uint8_t at(std::size_t t, std::size_t f) const {
    return bits[t * geom.n_freq + f];
  }
};

// Power -> dB with a dynamic-range floor at (max - dyn_range_db), then affine
// min-max normalization to [0, 1]. A constant image maps to all zeros.
IntensityImage to_intensity_image(const Spectrogram& spec,
                                  double dyn_range_db = 60.0);

// mu = mean, sigma = population standard deviation of all pixels.
MaskLevel compute_mask_level(const IntensityImage& img,
                             double coefficient = 1.75);

// bits = 1 where pixel > gamma (strict).
BinaryImage apply_mask(const IntensityImage& img, const MaskLevel& level);

}  // namespace pulsekit
