// Bandpass conditioning and spectrogram computation.
//
// The FIR design is the window method with a Dolph-Chebyshev window: the
// window's equiripple sidelobe level is chosen from the requested stopband
// attenuation and passband ripple, the tap count from the transition width,
// and the finished kernel is verified against the spec on a dense frequency
// grid before it is returned.
#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "pulsekit/audio_io.hpp"

namespace pulsekit {

struct FilterSpec {
  double pass_lo_hz = 75.0;
  double pass_hi_hz = 350.0;
  double stop_attenuation_db = 30.0;
  double transition_hz = 40.0;
  double passband_ripple_db = 0.1;
};

struct FilterKernel {
  std::vector<double> taps;  // symmetric, odd length (linear phase)
  int group_delay_samples = 0;
  int sample_rate = 0;
  FilterSpec spec;
};

struct StftParams {
  int nfft = 512;
  std::string window_kind = "blackman";
  int hop_samples = 41;  // 8% of the 512-point frame
};

// Time-frequency geometry shared by the spectrogram and the image stages
// derived from it.
struct TfGeometry {
  std::size_t n_time = 0;    // rows (frames)
  std::size_t n_freq = 0;    // columns (retained bins)
  double time_bin_s = 0.0;   // hop / sample_rate
  double freq_bin_hz = 0.0;  // sample_rate / nfft
  double f0_hz = 0.0;        // frequency of first retained bin
  double start_time = 0.0;   // slice start, seconds
  double frame_center_s = 0.0;  // offset of a frame's center from its start

  // Absolute time of the center of frame n.
  double frame_time(std::size_t n) const {
    return start_time + static_cast<double>(n) * time_bin_s + frame_center_s;
  }
};

// Cropped one-sided power spectrogram, row-major [time][freq].
// Normalization: power = |X(k)|^2 / nfft, so summing two-sided power over all
// bins of one frame equals the windowed-sample energy of that frame.
struct Spectrogram {
  std::vector<double> power;
  TfGeometry geom;

  double at(std::size_t t, std::size_t f) const {
    return power[t * geom.n_freq + f];
  }
};

// Dolph-Chebyshev window, odd length, peak normalized to 1. Exposed for the
// designer's tests.
std::vector<double> chebyshev_window(int length, double sidelobe_db);

// Magnitude response |H(f)| of a tap sequence at the given frequencies.
std::vector<double> magnitude_response(const std::vector<double>& taps,
                                       int sample_rate,
                                       const std::vector<double>& freqs_hz);

// Plain window-method bandpass taps (Dolph-Chebyshev window, unity gain at
// the band center, no grid verification). Utility for measurement and
// synthesis filters; design_bandpass wraps this with the verification loop.
std::vector<double> windowed_bandpass(double f1_hz, double f2_hz,
                                      int sample_rate, int ntaps,
                                      double sidelobe_db);

// Same-length centered filtering with symmetric taps (zero-padded edges).
std::vector<double> filter_same(const std::vector<double>& x,
                                const std::vector<double>& taps);

// Designs a linear-phase bandpass FIR meeting `spec` at `sample_rate`.
// Throws data_error("infeasible-spec ...") if no kernel up to 4001 taps
// passes the response grid check.
FilterKernel design_bandpass(const FilterSpec& spec, int sample_rate);

// Same-length filtering with group-delay compensation: the output is aligned
// to the input timeline (an impulse comes back as the tap sequence centered
// on the impulse position).
SignalSlice apply_filter(const SignalSlice& slice, const FilterKernel& kernel);

// In-place radix-2 FFT over a power-of-two-sized buffer.
class Fft {
 public:
  explicit Fft(std::size_t n);
  std::size_t size() const { return n_; }
  void transform(std::complex<double>* data) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> bit_reverse_;
  std::vector<std::complex<double>> twiddles_;
};

// Windowed power spectrogram of the slice, cropped to [f_lo, f_hi].
Spectrogram compute_spectrogram(const SignalSlice& slice, const StftParams& p,
                                double f_lo_hz, double f_hi_hz);

}  // namespace pulsekit
