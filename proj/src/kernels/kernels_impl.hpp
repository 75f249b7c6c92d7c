#pragma once

#include "btca/kernels/kernels.hpp"

namespace btca::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* bias, double* y);
void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* d, double* y);
void rank1_acc(double* g, std::size_t rows, std::size_t cols, const double* d, const double* x);
void bmsb(const double* price, const double* sma, const double* ema, double* out, std::size_t n,
          double price_coeff, double scaling_coeff);
void zscore(const double* x, const double* mean, const double* inv_std, double* out, std::size_t n);
}  // namespace scalar

#if defined(BTCA_HAVE_AVX2)
const KernelTable& avx2_table_unchecked();
#endif
#if defined(BTCA_HAVE_NEON)
const KernelTable& neon_table_unchecked();
#endif

}  // namespace btca::kernels
