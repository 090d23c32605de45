#include "qict/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace qict::kernels {
namespace {

const Table& best_table() {
  if (const char* forced = std::getenv("QICT_ISA"); forced != nullptr && std::string_view(forced) == "scalar") {
    return scalar_table();
  }
  if (const Table* avx2 = avx2_table(); avx2 != nullptr && cpu_has_avx2()) return *avx2;
  return scalar_table();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{&best_table()};
  return table;
}

} // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table& active() { return *current().load(std::memory_order_acquire); }

bool select(Isa isa) {
  if (isa == Isa::scalar) {
    current().store(&scalar_table(), std::memory_order_release);
    return true;
  }
  const Table* avx2 = avx2_table();
  if (avx2 == nullptr || !cpu_has_avx2()) return false;
  current().store(avx2, std::memory_order_release);
  return true;
}

std::string_view name(Isa isa) {
  switch (isa) {
  case Isa::scalar: return "scalar";
  case Isa::avx2: return "avx2";
  }
  return "unknown";
}

} // namespace qict::kernels
