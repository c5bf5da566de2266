#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tsdict::detail {

struct FftwDeleter {
  void operator()(void* p) const;
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

/// Real FFT of a mean-centered series, padded to the next power of two.
class SeriesSpectrum {
 public:
  explicit SeriesSpectrum(std::span<const double> series);

  std::size_t series_length() const { return length_; }
  std::size_t fft_size() const { return fft_size_; }

  /// Dot product of `query` with every length-m window of the centered
  /// series (entry i starts at sample i). Thread-safe.
  std::vector<double> sliding_dot(std::span<const double> query) const;

 private:
  std::size_t length_;
  std::size_t fft_size_;
  FftwBuffer<std::complex<double>> spectrum_;
};

}  // namespace tsdict::detail
