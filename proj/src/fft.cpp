#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <utility>

namespace tsdict::detail {

namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

// FFTW's planner is not thread-safe; plans are created once per size under
// this lock and then executed concurrently through the new-array interface.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto* real = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  auto* cplx = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
  const int len = static_cast<int>(n);
  PlanPair p{fftw_plan_dft_r2c_1d(len, real, cplx, FFTW_ESTIMATE),
             fftw_plan_dft_c2r_1d(len, cplx, real, FFTW_ESTIMATE)};
  fftw_free(real);
  fftw_free(cplx);
  return cache.emplace(n, p).first->second;
}

template <typename T>
FftwBuffer<T> allocate(std::size_t count) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * count)));
}

}  // namespace

void FftwDeleter::operator()(void* p) const { fftw_free(p); }

SeriesSpectrum::SeriesSpectrum(std::span<const double> series)
    : length_(series.size()), fft_size_(std::bit_ceil(std::max<std::size_t>(series.size(), 2))) {
  double sum = 0.0;
  for (double v : series) sum += v;
  const double mean = sum / static_cast<double>(length_);

  auto real = allocate<double>(fft_size_);
  std::transform(series.begin(), series.end(), real.get(), [mean](double v) { return v - mean; });
  std::fill(real.get() + length_, real.get() + fft_size_, 0.0);

  spectrum_ = allocate<std::complex<double>>(fft_size_ / 2 + 1);
  fftw_execute_dft_r2c(plans_for(fft_size_).forward, real.get(),
                       reinterpret_cast<fftw_complex*>(spectrum_.get()));
}

std::vector<double> SeriesSpectrum::sliding_dot(std::span<const double> query) const {
  const std::size_t m = query.size();
  const std::size_t bins = fft_size_ / 2 + 1;
  const PlanPair& plans = plans_for(fft_size_);

  auto real = allocate<double>(fft_size_);
  std::fill(real.get(), real.get() + fft_size_, 0.0);
  std::reverse_copy(query.begin(), query.end(), real.get());

  auto cplx = allocate<std::complex<double>>(bins);
  fftw_execute_dft_r2c(plans.forward, real.get(), reinterpret_cast<fftw_complex*>(cplx.get()));
  for (std::size_t k = 0; k < bins; ++k) cplx[k] *= spectrum_[k];
  fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(cplx.get()), real.get());

  // Circular convolution index m-1+i holds the dot product for window i.
  const double scale = 1.0 / static_cast<double>(fft_size_);
  std::vector<double> out(length_ - m + 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = real[m - 1 + i] * scale;
  return out;
}

}  // namespace tsdict::detail
