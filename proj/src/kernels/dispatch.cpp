#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"

namespace btca::kernels {

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",          scalar::dot,  scalar::axpy,  scalar::gemv, scalar::gemv_t_acc,
                                 scalar::rank1_acc, scalar::bmsb, scalar::zscore};
  return table;
}

const KernelTable* avx2_table() {
#if defined(BTCA_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(BTCA_HAVE_NEON)
  return &neon_table_unchecked();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* by_name(std::string_view name) {
  if (name == "scalar") return &scalar_table();
  if (name == "avx2") return avx2_table();
  if (name == "neon") return neon_table();
  return nullptr;
}

const KernelTable* initial_choice() {
  if (const char* forced = std::getenv("BTCA_KERNELS")) {
    if (const auto* table = by_name(forced)) return table;
  }
  if (const auto* t = avx2_table()) return t;
  if (const auto* t = neon_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_choice()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const auto* table = by_name(name);
  if (!table) return false;
  current().store(table, std::memory_order_release);
  return true;
}

}  // namespace btca::kernels
