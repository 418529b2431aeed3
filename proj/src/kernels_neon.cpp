// NEON kernel lane for arm64. float64x2_t is 2-wide, so loops advance in
// pairs with a scalar remainder, mirroring the AVX2 lane structure.
#include "pulsekit/kernels.hpp"

#if defined(__aarch64__) || defined(__ARM_NEON)

#include <arm_neon.h>

namespace pulsekit::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  double r = vaddvq_f64(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double c, const double* x, double* y, std::size_t n) {
  const float64x2_t cv = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), cv, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += c * x[i];
}

double sum(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double r = vaddvq_f64(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

double sum_squares(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double r = vaddvq_f64(acc);
  for (; i < n; ++i) r += x[i] * x[i];
  return r;
}

void sum_and_sum_squares(const double* x, std::size_t n, double* out_sum,
                         double* out_sum_sq) {
  float64x2_t s = vdupq_n_f64(0.0);
  float64x2_t s2 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    s = vaddq_f64(s, v);
    s2 = vfmaq_f64(s2, v, v);
  }
  double rs = vaddvq_f64(s);
  double rs2 = vaddvq_f64(s2);
  for (; i < n; ++i) {
    rs += x[i];
    rs2 += x[i] * x[i];
  }
  *out_sum = rs;
  *out_sum_sq = rs2;
}

double sum_squared_diff(const double* x, std::size_t n, double center) {
  const float64x2_t cv = vdupq_n_f64(center);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), cv);
    acc = vfmaq_f64(acc, d, d);
  }
  double r = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = x[i] - center;
    r += d * d;
  }
  return r;
}

MinMax min_max(const double* x, std::size_t n) {
  if (n < 2) return scalar::min_max(x, n);
  float64x2_t vmin = vld1q_f64(x);
  float64x2_t vmax = vmin;
  std::size_t i = 2;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    vmin = vminq_f64(vmin, v);
    vmax = vmaxq_f64(vmax, v);
  }
  MinMax mm{vminvq_f64(vmin), vmaxvq_f64(vmax)};
  for (; i < n; ++i) {
    if (x[i] < mm.min) mm.min = x[i];
    if (x[i] > mm.max) mm.max = x[i];
  }
  return mm;
}

void complex_power(const double* re_im, double* out, std::size_t n,
                   double scale) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // de-interleave two (re, im) pairs
    const float64x2x2_t v = vld2q_f64(re_im + 2 * i);
    float64x2_t p = vmulq_f64(v.val[0], v.val[0]);
    p = vfmaq_f64(p, v.val[1], v.val[1]);
    vst1q_f64(out + i, vmulq_n_f64(p, scale));
  }
  for (; i < n; ++i) {
    const double re = re_im[2 * i];
    const double im = re_im[2 * i + 1];
    out[i] = scale * (re * re + im * im);
  }
}

void threshold_greater(const double* x, std::size_t n, double threshold,
                       std::uint8_t* bits) {
  const float64x2_t tv = vdupq_n_f64(threshold);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t cmp = vcgtq_f64(vld1q_f64(x + i), tv);
    bits[i] = static_cast<std::uint8_t>(vgetq_lane_u64(cmp, 0) & 1);
    bits[i + 1] = static_cast<std::uint8_t>(vgetq_lane_u64(cmp, 1) & 1);
  }
  for (; i < n; ++i) bits[i] = x[i] > threshold ? 1 : 0;
}

std::uint32_t count_ones(const std::uint8_t* bits, std::size_t n) {
  std::uint32_t total = 0;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t v = vld1q_u8(bits + i);
    total += vaddvq_u8(v);  // byte values are 0/1 so no overflow within 16
  }
  for (; i < n; ++i) total += bits[i];
  return total;
}

}  // namespace pulsekit::kernels::neon

#endif  // arm
