#pragma once

// Piecewise BMSB index, shared by the per-day indicator and the scalar kernel.
//
// mu is the mean of the SMA and EMA. Prices inside the band (mu(1-kp), mu(1+kp))
// map linearly onto (-100 ks, 100 ks); outside, the index approaches -100 as
// price -> 0 and +100 as price -> infinity. The three pieces meet continuously.

namespace btca::bmsb_branch {

inline double middle(double p, double mu, double kp, double ks) { return ((p - mu) / mu) * (ks / kp) * 100.0; }

inline double lower(double p, double mu, double kp, double ks) {
  return (p * (1.0 - ks) / (mu * (1.0 - kp)) - 1.0) * 100.0;
}

inline double upper(double p, double mu, double kp, double ks) {
  return (1.0 - mu * (1.0 + kp) * (1.0 - ks) / p) * 100.0;
}

inline double evaluate(double p, double sma, double ema, double kp, double ks) {
  const double mu = (sma + ema) / 2.0;
  const double band_low = mu * (1.0 - kp);
  const double band_high = mu * (1.0 + kp);
  if (p > band_low && p < band_high) return middle(p, mu, kp, ks);
  if (p <= band_low) return lower(p, mu, kp, ks);
  return upper(p, mu, kp, ks);
}

}  // namespace btca::bmsb_branch
