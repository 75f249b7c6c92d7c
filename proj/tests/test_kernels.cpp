#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "btca/kernels/kernels.hpp"
#include "doctest.h"

using btca::kernels::KernelTable;

namespace {

std::vector<const KernelTable*> simd_variants() {
  std::vector<const KernelTable*> out;
  if (const auto* t = btca::kernels::avx2_table()) out.push_back(t);
  if (const auto* t = btca::kernels::neon_table()) out.push_back(t);
  return out;
}

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("dispatch picks a usable table and honours select") {
  const auto& active = btca::kernels::active();
  CHECK(active.dot != nullptr);
  const std::string before = active.name;
  CHECK(btca::kernels::select("scalar"));
  CHECK(std::string(btca::kernels::active().name) == "scalar");
  CHECK_FALSE(btca::kernels::select("sse9"));
  CHECK(btca::kernels::select(before));
  MESSAGE("active kernels: " << std::string(btca::kernels::active().name));
}

TEST_CASE("simd variants agree with scalar reference") {
  const auto& ref = btca::kernels::scalar_table();
  std::mt19937_64 rng(11);
  for (const auto* simd : simd_variants()) {
    CAPTURE(simd->name);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 33u, 210u, 1001u}) {
      CAPTURE(n);
      auto a = random_vec(n, rng), b = random_vec(n, rng);

      double bound = 0.0;
      for (std::size_t i = 0; i < n; ++i) bound += std::abs(a[i] * b[i]);
      CHECK(std::abs(simd->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-14 * (bound + 1.0));

      auto y1 = random_vec(n, rng), y2 = y1;
      ref.axpy(0.37, a.data(), y1.data(), n);
      simd->axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-15).scale(1.0));

      auto mean = random_vec(n, rng), inv = random_vec(n, rng, 0.0, 3.0);
      std::vector<double> z1(n), z2(n);
      ref.zscore(a.data(), mean.data(), inv.data(), z1.data(), n);
      simd->zscore(a.data(), mean.data(), inv.data(), z2.data(), n);
      CHECK(bitwise_equal(z1, z2));

      auto p = random_vec(n, rng, 1.0, 1000.0), s = random_vec(n, rng, 100.0, 900.0),
           e = random_vec(n, rng, 100.0, 900.0);
      std::vector<double> i1(n), i2(n);
      ref.bmsb(p.data(), s.data(), e.data(), i1.data(), n, 0.15, 0.7);
      simd->bmsb(p.data(), s.data(), e.data(), i2.data(), n, 0.15, 0.7);
      CHECK(bitwise_equal(i1, i2));
    }

    for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 64}, {64, 210}, {3, 5}, {64, 64}}) {
      auto w = random_vec(rows * cols, rng), x = random_vec(cols, rng), bias = random_vec(rows, rng);
      std::vector<double> y1(rows), y2(rows);
      ref.gemv(w.data(), rows, cols, x.data(), bias.data(), y1.data());
      simd->gemv(w.data(), rows, cols, x.data(), bias.data(), y2.data());
      for (std::size_t r = 0; r < rows; ++r) CHECK(std::abs(y1[r] - y2[r]) <= 1e-13 * (cols + 1.0));

      auto d = random_vec(rows, rng);
      auto t1 = random_vec(cols, rng), t2 = t1;
      ref.gemv_t_acc(w.data(), rows, cols, d.data(), t1.data());
      simd->gemv_t_acc(w.data(), rows, cols, d.data(), t2.data());
      for (std::size_t c = 0; c < cols; ++c) CHECK(std::abs(t1[c] - t2[c]) <= 1e-13 * (rows + 1.0));

      auto g1 = random_vec(rows * cols, rng), g2 = g1;
      ref.rank1_acc(g1.data(), rows, cols, d.data(), x.data());
      simd->rank1_acc(g2.data(), rows, cols, d.data(), x.data());
      for (std::size_t k = 0; k < rows * cols; ++k) CHECK(std::abs(g1[k] - g2[k]) <= 1e-15 * 4.0);
    }
  }
}

TEST_CASE("bmsb kernel handles exact band edges like the scalar branches") {
  const auto& ref = btca::kernels::scalar_table();
  std::vector<double> mu{100.0, 100.0, 100.0, 100.0, 200.0, 200.0, 200.0, 200.0, 50.0};
  std::vector<double> p{85.0, 115.0, 100.0, 1.0, 170.0, 230.0, 1e9, 1e-9, 50.0};
  std::vector<double> out_ref(p.size());
  ref.bmsb(p.data(), mu.data(), mu.data(), out_ref.data(), p.size(), 0.15, 0.7);
  for (const auto* simd : simd_variants()) {
    std::vector<double> out(p.size());
    simd->bmsb(p.data(), mu.data(), mu.data(), out.data(), p.size(), 0.15, 0.7);
    CHECK(bitwise_equal(out, out_ref));
  }
  CHECK(out_ref[2] == 0.0);
  CHECK(out_ref[8] == 0.0);
}
