#pragma once

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "anisoflow/grid.hpp"

namespace anisoflow::detail {

// FFTW plans are created with FFTW_ESTIMATE so results do not depend on
// timing measurements; the same input always yields the same bits.
class FftPlan {
 public:
  explicit FftPlan(int n) : size_(static_cast<std::size_t>(n) * n * n) {
    buffer_ = fftw_alloc_complex(size_);
    if (buffer_ == nullptr) throw std::bad_alloc();
    forward_ = fftw_plan_dft_3d(n, n, n, buffer_, buffer_, FFTW_FORWARD,
                                FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_3d(n, n, n, buffer_, buffer_, FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
    if (forward_ == nullptr || backward_ == nullptr) {
      fftw_free(buffer_);
      throw std::runtime_error("fftw plan creation failed");
    }
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }

  // Unnormalized forward transform: out(k) = sum_x in(x) exp(-2 pi i k.x).
  void forward(std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out) {
    run(forward_, in, out);
  }
  void backward(std::span<const std::complex<double>> in,
                std::span<std::complex<double>> out) {
    run(backward_, in, out);
  }

 private:
  void run(fftw_plan plan, std::span<const std::complex<double>> in,
           std::span<std::complex<double>> out) {
    std::lock_guard lock(mutex_);
    std::memcpy(buffer_, in.data(), size_ * sizeof(fftw_complex));
    fftw_execute(plan);
    std::memcpy(static_cast<void*>(out.data()), buffer_, size_ * sizeof(fftw_complex));
  }

  std::size_t size_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::mutex mutex_;
};

inline FftPlan& plan_for(int n) {
  static std::mutex registry_mutex;
  static std::map<int, std::unique_ptr<FftPlan>> registry;
  std::lock_guard lock(registry_mutex);
  auto& slot = registry[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

}  // namespace anisoflow::detail
