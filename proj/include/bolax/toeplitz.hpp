#pragma once

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <vector>

#include "bolax/error.hpp"
#include "bolax/fft.hpp"

namespace bolax {

/// Hermitian Toeplitz matrix T(j, k) = t_{j-k}, t_{-m} = conj(t_m), applied in O(n log n)
/// through a circulant embedding of size 2n.
class HermitianToeplitz {
 public:
  HermitianToeplitz() = default;

  /// col[m] = t_m, m = 0..n-1. The imaginary part of t_0 is discarded.
  explicit HermitianToeplitz(std::vector<cplx> col) : col_(std::move(col)) {
    const std::size_t n = col_.size();
    if (n == 0) throw ConfigurationError("HermitianToeplitz: empty first column");
    col_[0] = col_[0].real();
    fft_ = std::make_shared<Fft>(2 * n);
    symbol_.assign(2 * n, cplx{});
    for (std::size_t m = 0; m < n; ++m) symbol_[m] = col_[m];
    for (std::size_t m = 1; m < n; ++m) symbol_[2 * n - m] = std::conj(col_[m]);
    fft_->forward(symbol_);
  }

  std::size_t size() const { return col_.size(); }

  cplx entry(std::size_t j, std::size_t k) const {
    return (j >= k) ? col_[j - k] : std::conj(col_[k - j]);
  }

  const std::vector<cplx>& first_column() const { return col_; }

  /// y = T x
  void apply(std::span<const cplx> x, std::span<cplx> y) const {
    const std::size_t n = col_.size();
    if (x.size() != n || y.size() != n) throw ConfigurationError("HermitianToeplitz: size mismatch");
    std::vector<cplx> buf(2 * n, cplx{});
    std::copy(x.begin(), x.end(), buf.begin());
    fft_->forward(buf);
    for (std::size_t k = 0; k < 2 * n; ++k) buf[k] *= symbol_[k];
    fft_->backward(buf);
    const double scale = 1.0 / static_cast<double>(2 * n);
    for (std::size_t j = 0; j < n; ++j) y[j] = buf[j] * scale;
  }

  Eigen::MatrixXcd dense() const {
    const auto n = static_cast<Eigen::Index>(col_.size());
    Eigen::MatrixXcd A(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        A(j, k) = entry(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
    return A;
  }

 private:
  std::vector<cplx> col_;
  std::shared_ptr<Fft> fft_;
  std::vector<cplx> symbol_;
};

}  // namespace bolax
