#ifndef KDSIM_FFT_HPP
#define KDSIM_FFT_HPP

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "kdsim/constants.hpp"

namespace kdsim {

namespace detail {
// FFTW plan creation is not thread safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace detail

// Out-of-place 2D complex transforms for a fixed (ny, nx) shape,
// row-major with x fastest. Plans use FFTW_ESTIMATE: plan selection is
// then deterministic, which the reproducibility contract needs.
class Fft2D {
public:
  Fft2D(int ny, int nx) : ny_(ny), nx_(nx) {
    in_ = fftw_alloc_complex(std::size_t(nx) * ny);
    out_ = fftw_alloc_complex(std::size_t(nx) * ny);
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fwd_ = fftw_plan_dft_2d(ny, nx, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(ny, nx, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2D() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(in_);
    fftw_free(out_);
  }
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  void forward(const std::complex<double>* src, std::complex<double>* dst) {
    run(fwd_, src, dst, 1.0);
  }
  // Normalized inverse, so backward(forward(x)) == x.
  void backward(const std::complex<double>* src, std::complex<double>* dst) {
    run(bwd_, src, dst, 1.0 / (double(nx_) * double(ny_)));
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }

private:
  void run(fftw_plan p, const std::complex<double>* src, std::complex<double>* dst,
           double scale) {
    std::size_t n = std::size_t(nx_) * ny_;
    for (std::size_t i = 0; i < n; ++i) {
      in_[i][0] = src[i].real();
      in_[i][1] = src[i].imag();
    }
    fftw_execute(p);
    for (std::size_t i = 0; i < n; ++i)
      dst[i] = std::complex<double>(out_[i][0] * scale, out_[i][1] * scale);
  }

  int ny_, nx_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

// FFT bin frequencies in angular units, 2 pi f, matching FFTW's output
// order (non-negative first, then negative).
inline std::vector<double> fft_wavenumbers(int n, double spacing) {
  std::vector<double> k(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int f = i < (n + 1) / 2 ? i : i - n;
    k[std::size_t(i)] = 2.0 * pi * double(f) / (double(n) * spacing);
  }
  return k;
}

} // namespace kdsim

#endif
