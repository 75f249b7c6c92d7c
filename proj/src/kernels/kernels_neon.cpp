// AArch64 NEON variants (float64x2). Advanced SIMD is mandatory on AArch64,
// so no runtime probe is needed beyond the build-time architecture check.

#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace btca::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* bias, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(w + r * cols, x, cols) + (bias ? bias[r] : 0.0);
}

void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* d, double* y) {
  for (std::size_t r = 0; r < rows; ++r) axpy(d[r], w + r * cols, y, cols);
}

void rank1_acc(double* g, std::size_t rows, std::size_t cols, const double* d, const double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy(d[r], x, g + r * cols, cols);
}

void bmsb(const double* price, const double* sma, const double* ema, double* out, std::size_t n,
          double price_coeff, double scaling_coeff) {
  const float64x2_t two = vdupq_n_f64(2.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t hundred = vdupq_n_f64(100.0);
  const float64x2_t one_minus_kp = vdupq_n_f64(1.0 - price_coeff);
  const float64x2_t one_plus_kp = vdupq_n_f64(1.0 + price_coeff);
  const float64x2_t one_minus_ks = vdupq_n_f64(1.0 - scaling_coeff);
  const float64x2_t slope = vdupq_n_f64(scaling_coeff / price_coeff);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t p = vld1q_f64(price + i);
    const float64x2_t mu = vdivq_f64(vaddq_f64(vld1q_f64(sma + i), vld1q_f64(ema + i)), two);
    const float64x2_t band_low = vmulq_f64(mu, one_minus_kp);
    const float64x2_t band_high = vmulq_f64(mu, one_plus_kp);

    const float64x2_t mid = vmulq_f64(vmulq_f64(vdivq_f64(vsubq_f64(p, mu), mu), slope), hundred);
    const float64x2_t low = vmulq_f64(vsubq_f64(vdivq_f64(vmulq_f64(p, one_minus_ks), band_low), one), hundred);
    const float64x2_t high = vmulq_f64(vsubq_f64(one, vdivq_f64(vmulq_f64(band_high, one_minus_ks), p)), hundred);

    const uint64x2_t in_band = vandq_u64(vcgtq_f64(p, band_low), vcltq_f64(p, band_high));
    const uint64x2_t below = vcleq_f64(p, band_low);
    float64x2_t result = vbslq_f64(below, low, high);
    result = vbslq_f64(in_band, mid, result);
    vst1q_f64(out + i, result);
  }
  scalar::bmsb(price + i, sma + i, ema + i, out + i, n - i, price_coeff, scaling_coeff);
}

void zscore(const double* x, const double* mean, const double* inv_std, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vmulq_f64(vsubq_f64(vld1q_f64(x + i), vld1q_f64(mean + i)), vld1q_f64(inv_std + i)));
  }
  for (; i < n; ++i) out[i] = (x[i] - mean[i]) * inv_std[i];
}

}  // namespace btca::kernels::neon

namespace btca::kernels {

const KernelTable& neon_table_unchecked() {
  static const KernelTable table{"neon",          neon::dot,       neon::axpy, neon::gemv, neon::gemv_t_acc,
                                 neon::rank1_acc, neon::bmsb, neon::zscore};
  return table;
}

}  // namespace btca::kernels
