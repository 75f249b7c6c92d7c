// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; callers reach it through the dispatch table after a CPUID check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace btca::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
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

// Same operation order as the scalar formula with no contraction, so results
// are bitwise identical to scalar.
void bmsb(const double* price, const double* sma, const double* ema, double* out, std::size_t n,
          double price_coeff, double scaling_coeff) {
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d hundred = _mm256_set1_pd(100.0);
  const __m256d one_minus_kp = _mm256_set1_pd(1.0 - price_coeff);
  const __m256d one_plus_kp = _mm256_set1_pd(1.0 + price_coeff);
  const __m256d one_minus_ks = _mm256_set1_pd(1.0 - scaling_coeff);
  const __m256d slope = _mm256_set1_pd(scaling_coeff / price_coeff);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_loadu_pd(price + i);
    const __m256d mu = _mm256_div_pd(_mm256_add_pd(_mm256_loadu_pd(sma + i), _mm256_loadu_pd(ema + i)), two);
    const __m256d band_low = _mm256_mul_pd(mu, one_minus_kp);
    const __m256d band_high = _mm256_mul_pd(mu, one_plus_kp);

    const __m256d mid =
        _mm256_mul_pd(_mm256_mul_pd(_mm256_div_pd(_mm256_sub_pd(p, mu), mu), slope), hundred);
    const __m256d low = _mm256_mul_pd(
        _mm256_sub_pd(_mm256_div_pd(_mm256_mul_pd(p, one_minus_ks), band_low), one), hundred);
    const __m256d high = _mm256_mul_pd(
        _mm256_sub_pd(one, _mm256_div_pd(_mm256_mul_pd(band_high, one_minus_ks), p)), hundred);

    const __m256d in_band =
        _mm256_and_pd(_mm256_cmp_pd(p, band_low, _CMP_GT_OQ), _mm256_cmp_pd(p, band_high, _CMP_LT_OQ));
    const __m256d below = _mm256_cmp_pd(p, band_low, _CMP_LE_OQ);

    __m256d result = _mm256_blendv_pd(high, low, below);
    result = _mm256_blendv_pd(result, mid, in_band);
    _mm256_storeu_pd(out + i, result);
  }
  scalar::bmsb(price + i, sma + i, ema + i, out + i, n - i, price_coeff, scaling_coeff);
}

void zscore(const double* x, const double* mean, const double* inv_std, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d centered = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(mean + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(centered, _mm256_loadu_pd(inv_std + i)));
  }
  for (; i < n; ++i) out[i] = (x[i] - mean[i]) * inv_std[i];
}

}  // namespace btca::kernels::avx2

namespace btca::kernels {

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{"avx2",          avx2::dot,       avx2::axpy, avx2::gemv, avx2::gemv_t_acc,
                                 avx2::rank1_acc, avx2::bmsb, avx2::zscore};
  return table;
}

}  // namespace btca::kernels
