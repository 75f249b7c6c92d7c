#include "kernels_impl.hpp"

#include "btca/kernels/bmsb_formula.hpp"

namespace btca::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* bias, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dot(w + r * cols, x, cols) + (bias ? bias[r] : 0.0);
  }
}

void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* d, double* y) {
  for (std::size_t r = 0; r < rows; ++r) axpy(d[r], w + r * cols, y, cols);
}

void rank1_acc(double* g, std::size_t rows, std::size_t cols, const double* d, const double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy(d[r], x, g + r * cols, cols);
}

void bmsb(const double* price, const double* sma, const double* ema, double* out, std::size_t n,
          double price_coeff, double scaling_coeff) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = bmsb_branch::evaluate(price[i], sma[i], ema[i], price_coeff, scaling_coeff);
  }
}

void zscore(const double* x, const double* mean, const double* inv_std, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - mean[i]) * inv_std[i];
}

}  // namespace btca::kernels::scalar
