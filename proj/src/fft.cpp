#include "fermigns/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <new>

namespace fermigns::detail {

namespace {
// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

ComplexFft3d::ComplexFft3d(int n) : n_(n) {
  const std::size_t count = static_cast<std::size_t>(n) * n * n;
  auto* data = fftw_alloc_complex(count);
  if (data == nullptr) throw std::bad_alloc();
  data_ = data;
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_3d(n, n, n, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_3d(n, n, n, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexFft3d::~ComplexFft3d() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  fftw_free(data_);
}

std::span<cplx> ComplexFft3d::buffer() {
  const std::size_t count = static_cast<std::size_t>(n_) * n_ * n_;
  return {reinterpret_cast<cplx*>(data_), count};
}

void ComplexFft3d::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void ComplexFft3d::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

RealFft3d::RealFft3d(int m) : m_(m) {
  const std::size_t count = static_cast<std::size_t>(m) * m * m;
  const std::size_t half = static_cast<std::size_t>(m) * m * (m / 2 + 1);
  real_ = fftw_alloc_real(count);
  auto* spec = fftw_alloc_complex(half);
  if (real_ == nullptr || spec == nullptr) throw std::bad_alloc();
  spectrum_ = spec;
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_r2c_3d(m, m, m, real_, spec, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_c2r_3d(m, m, m, spec, real_, FFTW_ESTIMATE);
}

RealFft3d::~RealFft3d() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  fftw_free(real_);
  fftw_free(spectrum_);
}

std::span<double> RealFft3d::real_buffer() {
  return {real_, static_cast<std::size_t>(m_) * m_ * m_};
}

std::span<cplx> RealFft3d::spectrum() {
  return {reinterpret_cast<cplx*>(spectrum_), static_cast<std::size_t>(m_) * m_ * (m_ / 2 + 1)};
}

// c2r destroys its input; callers refill the spectrum before every backward().
void RealFft3d::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void RealFft3d::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

ComplexFft3d& complex_fft(int n) {
  thread_local std::map<int, std::unique_ptr<ComplexFft3d>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<ComplexFft3d>(n);
  return *slot;
}

RealFft3d& real_fft(int m) {
  thread_local std::map<int, std::unique_ptr<RealFft3d>> cache;
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<RealFft3d>(m);
  return *slot;
}

}  // namespace fermigns::detail
