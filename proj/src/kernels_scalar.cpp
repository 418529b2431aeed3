// Scalar reference kernels. These define the semantics; the SIMD lanes may
// reorder floating-point reductions but must agree to tight tolerance (exactly
// for the integer/comparison kernels). Keep them simple and obviously correct.
#include "pulsekit/kernels.hpp"

namespace pulsekit::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double c, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sum_squares(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void sum_and_sum_squares(const double* x, std::size_t n, double* out_sum,
                         double* out_sum_sq) {
  double s = 0.0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += x[i];
    s2 += x[i] * x[i];
  }
  *out_sum = s;
  *out_sum_sq = s2;
}

double sum_squared_diff(const double* x, std::size_t n, double center) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - center;
    acc += d * d;
  }
  return acc;
}

MinMax min_max(const double* x, std::size_t n) {
  MinMax mm{x[0], x[0]};
  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] < mm.min) mm.min = x[i];
    if (x[i] > mm.max) mm.max = x[i];
  }
  return mm;
}

void complex_power(const double* re_im, double* out, std::size_t n,
                   double scale) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = re_im[2 * i];
    const double im = re_im[2 * i + 1];
    out[i] = scale * (re * re + im * im);
  }
}

void threshold_greater(const double* x, std::size_t n, double threshold,
                       std::uint8_t* bits) {
  for (std::size_t i = 0; i < n; ++i) bits[i] = x[i] > threshold ? 1 : 0;
}

std::uint32_t count_ones(const std::uint8_t* bits, std::size_t n) {
  std::uint32_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += bits[i];
  return acc;
}

}  // namespace pulsekit::kernels::scalar
