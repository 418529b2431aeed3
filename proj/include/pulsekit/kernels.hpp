// Data-parallel inner-loop kernels: scalar reference implementations plus
// SIMD variants (AVX2 on x86-64, NEON on arm64) selected once at runtime.
// Every dispatched kernel has a scalar twin under kernels::scalar so the two
// lanes can be equivalence-tested against each other.
#pragma once

#include <cstddef>
#include <cstdint>

namespace pulsekit::kernels {

enum class Lane { scalar, avx2, neon };

// Lane chosen by CPU detection at startup (or forced via force_lane).
Lane active_lane();
const char* lane_name(Lane lane);

// Overrides dispatch, e.g. to pin the scalar lane in equivalence tests.
// Forcing an unsupported lane falls back to scalar.
void force_lane(Lane lane);

// -- dispatched entry points -------------------------------------------------

// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

// out[i] = a[i]*b[i]
void multiply(const double* a, const double* b, double* out, std::size_t n);

// y[i] += c*x[i]
void axpy(double c, const double* x, double* y, std::size_t n);

double sum(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
void sum_and_sum_squares(const double* x, std::size_t n, double* out_sum,
                         double* out_sum_sq);

// sum_i (x[i] - center)^2
double sum_squared_diff(const double* x, std::size_t n, double center);

struct MinMax {
  double min;
  double max;
};
MinMax min_max(const double* x, std::size_t n);

// out[i] = scale * (re_im[2i]^2 + re_im[2i+1]^2), re_im interleaved complex.
void complex_power(const double* re_im, double* out, std::size_t n,
                   double scale);

// bits[i] = x[i] > threshold ? 1 : 0
void threshold_greater(const double* x, std::size_t n, double threshold,
                       std::uint8_t* bits);

// sum of byte values (projection row count over a {0,1} image row)
std::uint32_t count_ones(const std::uint8_t* bits, std::size_t n);

// -- scalar reference lane (always available, used as test oracle) -----------

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void multiply(const double* a, const double* b, double* out, std::size_t n);
void axpy(double c, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
void sum_and_sum_squares(const double* x, std::size_t n, double* out_sum,
                         double* out_sum_sq);
double sum_squared_diff(const double* x, std::size_t n, double center);
MinMax min_max(const double* x, std::size_t n);
void complex_power(const double* re_im, double* out, std::size_t n,
                   double scale);
void threshold_greater(const double* x, std::size_t n, double threshold,
                       std::uint8_t* bits);
std::uint32_t count_ones(const std::uint8_t* bits, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define PULSEKIT_HAVE_AVX2_LANE 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void multiply(const double* a, const double* b, double* out, std::size_t n);
void axpy(double c, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
void sum_and_sum_squares(const double* x, std::size_t n, double* out_sum,
                         double* out_sum_sq);
double sum_squared_diff(const double* x, std::size_t n, double center);
MinMax min_max(const double* x, std::size_t n);
void complex_power(const double* re_im, double* out, std::size_t n,
                   double scale);
void threshold_greater(const double* x, std::size_t n, double threshold,
                       std::uint8_t* bits);
std::uint32_t count_ones(const std::uint8_t* bits, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define PULSEKIT_HAVE_NEON_LANE 1
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void multiply(const double* a, const double* b, double* out, std::size_t n);
void axpy(double c, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
void sum_and_sum_squares(const double* x, std::size_t n, double* out_sum,
                         double* out_sum_sq);
double sum_squared_diff(const double* x, std::size_t n, double center);
MinMax min_max(const double* x, std::size_t n);
void complex_power(const double* re_im, double* out, std::size_t n,
                   double scale);
void threshold_greater(const double* x, std::size_t n, double threshold,
                       std::uint8_t* bits);
std::uint32_t count_ones(const std::uint8_t* bits, std::size_t n);
}  // namespace neon
#endif

}  // namespace pulsekit::kernels
