#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <type_traits>

#include "bolax/error.hpp"

namespace bolax {

using cplx = std::complex<double>;

namespace detail {

// FFTW's planner is not reentrant; execution of an existing plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    if (p != nullptr) {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(p);
    }
  }
};

using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

/// Unnormalized complex DFT of a fixed length, in place.
///   forward:  X_k = sum_j x_j exp(-2 pi i j k / n)
///   backward: x_j = sum_k X_k exp(+2 pi i j k / n)
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    if (n == 0) throw ConfigurationError("Fft: zero length");
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_.reset(fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, flags));
    backward_.reset(fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, flags));
    fftw_free(buf);
    if (!forward_ || !backward_) throw NumericError("Fft: FFTW planning failed");
  }

  std::size_t size() const { return n_; }

  void forward(std::span<cplx> data) const {
    check(data.size());
    fftw_execute_dft(forward_.get(), detail::as_fftw(data.data()), detail::as_fftw(data.data()));
  }

  void backward(std::span<cplx> data) const {
    check(data.size());
    fftw_execute_dft(backward_.get(), detail::as_fftw(data.data()), detail::as_fftw(data.data()));
  }

 private:
  void check(std::size_t m) const {
    if (m != n_) throw ConfigurationError("Fft: buffer length does not match plan");
  }

  std::size_t n_;
  detail::PlanHandle forward_;
  detail::PlanHandle backward_;
};

}  // namespace bolax
