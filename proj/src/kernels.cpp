// Runtime lane selection. The lane is picked once from CPU capabilities and
// can be pinned explicitly (tests compare lanes against each other).
#include "pulsekit/kernels.hpp"

namespace pulsekit::kernels {

namespace {

Lane detect_lane() {
#if defined(PULSEKIT_HAVE_AVX2_LANE)
  if (__builtin_cpu_supports("avx2")) return Lane::avx2;
#endif
#if defined(PULSEKIT_HAVE_NEON_LANE)
  return Lane::neon;
#endif
  return Lane::scalar;
}

Lane g_lane = detect_lane();

}  // namespace

Lane active_lane() { return g_lane; }

const char* lane_name(Lane lane) {
  switch (lane) {
    case Lane::avx2:
      return "avx2";
    case Lane::neon:
      return "neon";
    case Lane::scalar:
      return "scalar";
  }
  return "scalar";
}

void force_lane(Lane lane) {
  switch (lane) {
    case Lane::avx2:
#if defined(PULSEKIT_HAVE_AVX2_LANE)
      if (__builtin_cpu_supports("avx2")) {
        g_lane = Lane::avx2;
        return;
      }
#endif
      break;
    case Lane::neon:
#if defined(PULSEKIT_HAVE_NEON_LANE)
      g_lane = Lane::neon;
      return;
#endif
      break;
    case Lane::scalar:
      break;
  }
  g_lane = Lane::scalar;
}

#if defined(PULSEKIT_HAVE_AVX2_LANE)
#define PULSEKIT_DISPATCH(call)                        \
  do {                                                 \
    if (g_lane == Lane::avx2) return avx2::call;       \
    return scalar::call;                               \
  } while (0)
#elif defined(PULSEKIT_HAVE_NEON_LANE)
#define PULSEKIT_DISPATCH(call)                        \
  do {                                                 \
    if (g_lane == Lane::neon) return neon::call;       \
    return scalar::call;                               \
  } while (0)
#else
#define PULSEKIT_DISPATCH(call) return scalar::call
#endif

double dot(const double* a, const double* b, std::size_t n) {
  PULSEKIT_DISPATCH(dot(a, b, n));
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  PULSEKIT_DISPATCH(multiply(a, b, out, n));
}

void axpy(double c, const double* x, double* y, std::size_t n) {
  PULSEKIT_DISPATCH(axpy(c, x, y, n));
}

double sum(const double* x, std::size_t n) { PULSEKIT_DISPATCH(sum(x, n)); }

double sum_squares(const double* x, std::size_t n) {
  PULSEKIT_DISPATCH(sum_squares(x, n));
}

void sum_and_sum_squares(const double* x, std::size_t n, double* out_sum,
                         double* out_sum_sq) {
  PULSEKIT_DISPATCH(sum_and_sum_squares(x, n, out_sum, out_sum_sq));
}

double sum_squared_diff(const double* x, std::size_t n, double center) {
  PULSEKIT_DISPATCH(sum_squared_diff(x, n, center));
}

MinMax min_max(const double* x, std::size_t n) {
  PULSEKIT_DISPATCH(min_max(x, n));
}

void complex_power(const double* re_im, double* out, std::size_t n,
                   double scale) {
  PULSEKIT_DISPATCH(complex_power(re_im, out, n, scale));
}

void threshold_greater(const double* x, std::size_t n, double threshold,
                       std::uint8_t* bits) {
  PULSEKIT_DISPATCH(threshold_greater(x, n, threshold, bits));
}

std::uint32_t count_ones(const std::uint8_t* bits, std::size_t n) {
  PULSEKIT_DISPATCH(count_ones(bits, n));
}

#undef PULSEKIT_DISPATCH

}  // namespace pulsekit::kernels
