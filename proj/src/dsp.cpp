#include "pulsekit/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pulsekit/error.hpp"
#include "pulsekit/kernels.hpp"

namespace pulsekit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxTaps = 4001;
constexpr std::size_t kResponseGridPoints = 4096;

// T_m(x), extended beyond [-1, 1] through the cosh identity.
double cheb_poly(int m, double x) {
  if (std::abs(x) <= 1.0) return std::cos(m * std::acos(x));
  const double t = std::cosh(m * std::acosh(std::abs(x)));
  return (x > 0.0 || m % 2 == 0) ? t : -t;
}

void validate_spec(const FilterSpec& spec, int sample_rate) {
  if (!(spec.pass_lo_hz > 0.0) || !(spec.pass_lo_hz < spec.pass_hi_hz) ||
      !(spec.pass_hi_hz < sample_rate / 2.0)) {
    throw data_error("filter spec: need 0 < pass_lo < pass_hi < Nyquist");
  }
  if (!(spec.transition_hz > 0.0)) {
    throw data_error("filter spec: transition width must be positive");
  }
  if (!(spec.stop_attenuation_db >= 0.0) ||
      !(spec.passband_ripple_db > 0.0)) {
    throw data_error("filter spec: bad attenuation/ripple");
  }
}

struct GridCheck {
  bool pass = false;
  double passband_dev_db = 0.0;
  double stopband_max_db = 0.0;
};

GridCheck check_response(const std::vector<double>& taps,
                         const FilterSpec& spec, int sample_rate) {
  const double nyquist = sample_rate / 2.0;
  std::vector<double> freqs(kResponseGridPoints);
  for (std::size_t i = 0; i < kResponseGridPoints; ++i) {
    freqs[i] = nyquist * static_cast<double>(i) / (kResponseGridPoints - 1);
  }
  const std::vector<double> mag = magnitude_response(taps, sample_rate, freqs);

  const double stop_lo = spec.pass_lo_hz - spec.transition_hz;
  const double stop_hi = spec.pass_hi_hz + spec.transition_hz;
  GridCheck r;
  r.stopband_max_db = -1e9;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double db = 20.0 * std::log10(std::max(mag[i], 1e-300));
    if (freqs[i] >= spec.pass_lo_hz && freqs[i] <= spec.pass_hi_hz) {
      r.passband_dev_db = std::max(r.passband_dev_db, std::abs(db));
    } else if (freqs[i] <= stop_lo || freqs[i] >= stop_hi) {
      r.stopband_max_db = std::max(r.stopband_max_db, db);
    }
  }
  r.pass = r.passband_dev_db <= spec.passband_ripple_db &&
           r.stopband_max_db <= -spec.stop_attenuation_db;
  return r;
}

std::vector<double> make_analysis_window(const std::string& kind, int n) {
  std::vector<double> w(n, 1.0);
  const double denom = n - 1;
  if (kind == "blackman") {
    for (int i = 0; i < n; ++i) {
      const double x = 2.0 * kPi * i / denom;
      w[i] = 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
    }
  } else if (kind == "hann") {
    for (int i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / denom);
    }
  } else if (kind == "hamming") {
    for (int i = 0; i < n; ++i) {
      w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / denom);
    }
  } else if (kind != "rectangular") {
    throw schema_error("unknown analysis window kind: " + kind);
  }
  return w;
}

}  // namespace

std::vector<double> chebyshev_window(int length, double sidelobe_db) {
  if (length < 3 || length % 2 == 0) {
    throw data_error("chebyshev window length must be odd and >= 3");
  }
  const int order = length - 1;
  const double r = std::pow(10.0, sidelobe_db / 20.0);
  const double beta = std::cosh(std::acosh(r) / order);

  std::vector<double> freq_samples(length);
  for (int k = 0; k < length; ++k) {
    freq_samples[k] = cheb_poly(order, beta * std::cos(kPi * k / length));
  }
  const int half = (length - 1) / 2;
  std::vector<double> w(length);
  double peak = 0.0;
  for (int i = 0; i < length; ++i) {
    double acc = freq_samples[0];
    for (int k = 1; k <= half; ++k) {
      acc += 2.0 * freq_samples[k] *
             std::cos(2.0 * kPi * k * (i - half) / length);
    }
    w[i] = acc / length;
    peak = std::max(peak, w[i]);
  }
  for (double& v : w) v /= peak;
  return w;
}

std::vector<double> magnitude_response(const std::vector<double>& taps,
                                       int sample_rate,
                                       const std::vector<double>& freqs_hz) {
  std::vector<double> mag(freqs_hz.size());
  for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
    const double w = 2.0 * kPi * freqs_hz[i] / sample_rate;
    std::complex<double> h(0.0, 0.0);
    for (std::size_t n = 0; n < taps.size(); ++n) {
      h += taps[n] * std::polar(1.0, -w * static_cast<double>(n));
    }
    mag[i] = std::abs(h);
  }
  return mag;
}

std::vector<double> windowed_bandpass(double f1_hz, double f2_hz,
                                      int sample_rate, int ntaps,
                                      double sidelobe_db) {
  const std::vector<double> window = chebyshev_window(ntaps, sidelobe_db);
  const double w1 = 2.0 * kPi * f1_hz / sample_rate;
  const double w2 = 2.0 * kPi * f2_hz / sample_rate;
  const int mid = (ntaps - 1) / 2;
  std::vector<double> taps(ntaps);
  for (int i = 0; i < ntaps; ++i) {
    const int n = i - mid;
    const double ideal =
        n == 0 ? (w2 - w1) / kPi
               : (std::sin(w2 * n) - std::sin(w1 * n)) / (kPi * n);
    taps[i] = ideal * window[i];
  }
  // unity gain at the passband center
  const double center_hz = (f1_hz + f2_hz) / 2.0;
  const double g = magnitude_response(taps, sample_rate, {center_hz})[0];
  for (double& t : taps) t /= g;
  return taps;
}

std::vector<double> filter_same(const std::vector<double>& x,
                                const std::vector<double>& taps) {
  const auto len = static_cast<std::ptrdiff_t>(x.size());
  const auto ntaps = static_cast<std::ptrdiff_t>(taps.size());
  const std::ptrdiff_t delay = (ntaps - 1) / 2;
  std::vector<double> out(x.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < len; ++i) {
    // symmetric taps let convolution + delay compensation collapse into a
    // centered correlation: out[i] = sum_k h[k] x[i - delay + k]
    const std::ptrdiff_t base = i - delay;
    const std::ptrdiff_t k0 = std::max<std::ptrdiff_t>(0, -base);
    const std::ptrdiff_t k1 = std::min(ntaps, len - base);
    if (k0 >= k1) continue;
    out[static_cast<std::size_t>(i)] =
        kernels::dot(taps.data() + k0, x.data() + base + k0,
                     static_cast<std::size_t>(k1 - k0));
  }
  return out;
}

FilterKernel design_bandpass(const FilterSpec& spec, int sample_rate) {
  validate_spec(spec, sample_rate);

  // The window's sidelobe level bounds both the stopband gain and the
  // passband ripple of the finished filter, so design for whichever of the
  // two is more demanding, plus margin.
  const double ripple_att_db =
      20.0 *
      std::log10(1.0 / (std::pow(10.0, spec.passband_ripple_db / 20.0) - 1.0));
  const double design_att_db =
      std::max(spec.stop_attenuation_db, ripple_att_db) + 6.0;

  // Cutoffs sit mid-transition so the band edges see full gain.
  const double f1 = std::max(spec.pass_lo_hz - spec.transition_hz / 2.0, 1e-6);
  const double f2 =
      std::min(spec.pass_hi_hz + spec.transition_hz / 2.0,
               sample_rate / 2.0 - 1e-6);

  const double delta_w = 2.0 * kPi * spec.transition_hz / sample_rate;
  int ntaps =
      static_cast<int>(std::ceil((design_att_db - 7.95) / (2.285 * delta_w)));
  ntaps = std::max(ntaps, 11);
  if (ntaps % 2 == 0) ++ntaps;

  while (true) {
    ntaps = std::min(ntaps, kMaxTaps);
    std::vector<double> taps =
        windowed_bandpass(f1, f2, sample_rate, ntaps, design_att_db);
    const GridCheck check = check_response(taps, spec, sample_rate);
    if (check.pass) {
      FilterKernel kernel;
      kernel.taps = std::move(taps);
      kernel.group_delay_samples = (ntaps - 1) / 2;
      kernel.sample_rate = sample_rate;
      kernel.spec = spec;
      return kernel;
    }
    if (ntaps >= kMaxTaps) break;
    ntaps = ntaps + ntaps / 3;
    if (ntaps % 2 == 0) ++ntaps;
  }
  throw data_error("infeasible-spec: no FIR up to " +
                   std::to_string(kMaxTaps) +
                   " taps meets the requested band/attenuation/ripple");
}

SignalSlice apply_filter(const SignalSlice& slice,
                         const FilterKernel& kernel) {
  if (slice.sample_rate != kernel.sample_rate) {
    throw data_error("rate-mismatch: kernel designed for " +
                     std::to_string(kernel.sample_rate) + " Hz, slice is " +
                     std::to_string(slice.sample_rate) + " Hz");
  }
  SignalSlice out = slice;
  out.samples = filter_same(slice.samples, kernel.taps);
  return out;
}

Fft::Fft(std::size_t n) : n_(n) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw data_error("FFT size must be a power of two >= 2");
  }
  bit_reverse_.resize(n);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rev = 0;
    for (std::size_t b = 0; b < bits; ++b) {
      if (i & (std::size_t{1} << b)) rev |= std::size_t{1} << (bits - 1 - b);
    }
    bit_reverse_[i] = rev;
  }
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    twiddles_[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) /
                                       static_cast<double>(n));
  }
}

void Fft::transform(std::complex<double>* data) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j = bit_reverse_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = twiddles_[k * stride];
        std::complex<double>& a = data[start + k];
        std::complex<double>& b = data[start + k + len / 2];
        const std::complex<double> t = w * b;
        b = a - t;
        a += t;
      }
    }
  }
}

Spectrogram compute_spectrogram(const SignalSlice& slice, const StftParams& p,
                                double f_lo_hz, double f_hi_hz) {
  const std::size_t nfft = static_cast<std::size_t>(p.nfft);
  if (slice.samples.size() < nfft) {
    throw data_error("slice-too-short: need at least " +
                     std::to_string(nfft) + " samples");
  }
  if (p.hop_samples <= 0 || p.hop_samples > p.nfft) {
    throw data_error("stft hop must satisfy 0 < hop <= nfft");
  }
  const double nyquist = slice.sample_rate / 2.0;
  const double bin_hz = static_cast<double>(slice.sample_rate) / p.nfft;
  if (!(f_lo_hz < f_hi_hz) || f_hi_hz > nyquist + 1e-9) {
    throw data_error("crop-out-of-range: need f_lo < f_hi <= Nyquist");
  }
  // retained bins: f_lo <= k * bin_hz <= f_hi (tolerant at exact edges)
  const std::size_t max_bin = nfft / 2;
  std::size_t k_lo = static_cast<std::size_t>(
      std::ceil(f_lo_hz / bin_hz - 1e-9));
  std::size_t k_hi = std::min(
      max_bin,
      static_cast<std::size_t>(std::floor(f_hi_hz / bin_hz + 1e-9)));
  if (k_lo > k_hi) throw data_error("crop-out-of-range: no bins in band");

  const std::size_t hop = static_cast<std::size_t>(p.hop_samples);
  const std::size_t n_frames = (slice.samples.size() - nfft) / hop + 1;
  const std::size_t n_bins = k_hi - k_lo + 1;

  Spectrogram s;
  s.geom.n_time = n_frames;
  s.geom.n_freq = n_bins;
  s.geom.time_bin_s = static_cast<double>(hop) / slice.sample_rate;
  s.geom.freq_bin_hz = bin_hz;
  s.geom.f0_hz = static_cast<double>(k_lo) * bin_hz;
  s.geom.start_time = slice.start_time;
  s.geom.frame_center_s =
      static_cast<double>(nfft) / (2.0 * slice.sample_rate);
  s.power.resize(n_frames * n_bins);

  const std::vector<double> window = make_analysis_window(p.window_kind,
                                                          p.nfft);
  const Fft fft(nfft);
  std::vector<double> windowed(nfft);
  std::vector<std::complex<double>> freq(nfft);
  std::vector<double> frame_power(max_bin + 1);
  const double scale = 1.0 / static_cast<double>(nfft);

  for (std::size_t f = 0; f < n_frames; ++f) {
    const double* frame = slice.samples.data() + f * hop;
    kernels::multiply(frame, window.data(), windowed.data(), nfft);
    for (std::size_t i = 0; i < nfft; ++i) freq[i] = {windowed[i], 0.0};
    fft.transform(freq.data());
    // std::complex<double> is layout-compatible with double[2]
    kernels::complex_power(reinterpret_cast<const double*>(freq.data()),
                           frame_power.data(), max_bin + 1, scale);
    std::copy_n(frame_power.data() + k_lo, n_bins,
                s.power.data() + f * n_bins);
  }
  return s;
}

}  // namespace pulsekit
