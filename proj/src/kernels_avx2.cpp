// AVX2 kernel lane. Compiled with -mavx2 -mfma on x86-64 only; callers reach
// it through the runtime dispatch in kernels.cpp, never directly.
#include "pulsekit/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace pulsekit::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double c, const double* x, double* y, std::size_t n) {
  const __m256d cv = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(cv, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += c * x[i];
}

double sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double sum_squares(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(x + i);
    const __m256d v1 = _mm256_loadu_pd(x + i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc0 = _mm256_fmadd_pd(v, v, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void sum_and_sum_squares(const double* x, std::size_t n, double* out_sum,
                         double* out_sum_sq) {
  __m256d s = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    s = _mm256_add_pd(s, v);
    s2 = _mm256_fmadd_pd(v, v, s2);
  }
  double rs = hsum(s);
  double rs2 = hsum(s2);
  for (; i < n; ++i) {
    rs += x[i];
    rs2 += x[i] * x[i];
  }
  *out_sum = rs;
  *out_sum_sq = rs2;
}

double sum_squared_diff(const double* x, std::size_t n, double center) {
  const __m256d cv = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), cv);
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - center;
    r += d * d;
  }
  return r;
}

MinMax min_max(const double* x, std::size_t n) {
  if (n < 4) return scalar::min_max(x, n);
  __m256d vmin = _mm256_loadu_pd(x);
  __m256d vmax = vmin;
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    vmin = _mm256_min_pd(vmin, v);
    vmax = _mm256_max_pd(vmax, v);
  }
  alignas(32) double bmin[4];
  alignas(32) double bmax[4];
  _mm256_store_pd(bmin, vmin);
  _mm256_store_pd(bmax, vmax);
  MinMax mm{bmin[0], bmax[0]};
  for (int k = 1; k < 4; ++k) {
    if (bmin[k] < mm.min) mm.min = bmin[k];
    if (bmax[k] > mm.max) mm.max = bmax[k];
  }
  for (; i < n; ++i) {
    if (x[i] < mm.min) mm.min = x[i];
    if (x[i] > mm.max) mm.max = x[i];
  }
  return mm;
}

void complex_power(const double* re_im, double* out, std::size_t n,
                   double scale) {
  const __m256d sv = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // two registers hold four interleaved (re, im) pairs
    const __m256d v0 = _mm256_loadu_pd(re_im + 2 * i);
    const __m256d v1 = _mm256_loadu_pd(re_im + 2 * i + 4);
    const __m256d sq0 = _mm256_mul_pd(v0, v0);
    const __m256d sq1 = _mm256_mul_pd(v1, v1);
    // hadd yields [c0, c2, c1, c3]; permute restores element order
    __m256d p = _mm256_hadd_pd(sq0, sq1);
    p = _mm256_permute4x64_pd(p, 0xD8);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(p, sv));
  }
  for (; i < n; ++i) {
    const double re = re_im[2 * i];
    const double im = re_im[2 * i + 1];
    out[i] = scale * (re * re + im * im);
  }
}

void threshold_greater(const double* x, std::size_t n, double threshold,
                       std::uint8_t* bits) {
  const __m256d tv = _mm256_set1_pd(threshold);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d cmp = _mm256_cmp_pd(_mm256_loadu_pd(x + i), tv, _CMP_GT_OQ);
    const int mask = _mm256_movemask_pd(cmp);
    bits[i] = static_cast<std::uint8_t>(mask & 1);
    bits[i + 1] = static_cast<std::uint8_t>((mask >> 1) & 1);
    bits[i + 2] = static_cast<std::uint8_t>((mask >> 2) & 1);
    bits[i + 3] = static_cast<std::uint8_t>((mask >> 3) & 1);
  }
  for (; i < n; ++i) bits[i] = x[i] > threshold ? 1 : 0;
}

std::uint32_t count_ones(const std::uint8_t* bits, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(v, zero));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) total += bits[i];
  return static_cast<std::uint32_t>(total);
}

}  // namespace pulsekit::kernels::avx2

#endif  // x86-64
