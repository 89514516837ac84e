#pragma once

#include <complex>
#include <span>

// Thin RAII layer over FFTW. Plans use FFTW_ESTIMATE so that the chosen
// algorithm, and hence every rounding, is independent of timing.
namespace fermigns::detail {

using cplx = std::complex<double>;

/// In-place complex 3-D transform of an n^3 buffer (unnormalized both ways).
class ComplexFft3d {
 public:
  explicit ComplexFft3d(int n);
  ~ComplexFft3d();
  ComplexFft3d(const ComplexFft3d&) = delete;
  ComplexFft3d& operator=(const ComplexFft3d&) = delete;

  int points() const { return n_; }
  std::span<cplx> buffer();
  void forward();
  void backward();

 private:
  int n_;
  void* data_;
  void* forward_plan_;
  void* backward_plan_;
};

/// Real-to-half-complex 3-D transform of an m^3 array (unnormalized).
class RealFft3d {
 public:
  explicit RealFft3d(int m);
  ~RealFft3d();
  RealFft3d(const RealFft3d&) = delete;
  RealFft3d& operator=(const RealFft3d&) = delete;

  int points() const { return m_; }
  std::span<double> real_buffer();
  /// m * m * (m/2 + 1) coefficients, last axis halved.
  std::span<cplx> spectrum();
  void forward();
  void backward();

 private:
  int m_;
  double* real_;
  void* spectrum_;
  void* forward_plan_;
  void* backward_plan_;
};

/// Per-thread cached transforms.
ComplexFft3d& complex_fft(int n);
RealFft3d& real_fft(int m);

}  // namespace fermigns::detail
