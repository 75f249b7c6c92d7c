#pragma once

// Data-parallel inner loops behind the indicator batch path and the MLP.
//
// Every variant implements the same contract as the scalar table; the scalar
// table is the reference the others are equivalence-tested against. Variants
// that reassociate sums (dot, gemv) agree with scalar to rounding, not bitwise.

#include <cstddef>
#include <span>
#include <string_view>

namespace btca::kernels {

struct KernelTable {
  const char* name;

  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// y = W x + bias, W row-major rows x cols; bias may be null.
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* bias, double* y);
  /// y += W^T d, W row-major rows x cols.
  void (*gemv_t_acc)(const double* w, std::size_t rows, std::size_t cols, const double* d, double* y);
  /// G += d x^T, G row-major rows x cols.
  void (*rank1_acc)(double* g, std::size_t rows, std::size_t cols, const double* d, const double* x);
  /// out[i] = bmsb(price[i], sma[i], ema[i]) for fixed coefficients.
  void (*bmsb)(const double* price, const double* sma, const double* ema, double* out, std::size_t n,
               double price_coeff, double scaling_coeff);
  /// out[i] = (x[i] - mean[i]) * inv_std[i]
  void (*zscore)(const double* x, const double* mean, const double* inv_std, double* out, std::size_t n);
};

const KernelTable& scalar_table();
/// Null when the variant was not compiled in or the CPU lacks the instructions.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// The table used by library code. Picked once: BTCA_KERNELS=scalar|avx2|neon
/// overrides, otherwise the widest supported variant.
const KernelTable& active();

/// Forces a variant by name for the rest of the process; returns false if unavailable.
bool select(std::string_view name);

// Span conveniences over active().
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace btca::kernels
