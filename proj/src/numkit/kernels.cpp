#include "automlp/numkit/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "automlp/errors.hpp"

namespace automlp::numkit::kernels {
namespace {

const KernelTable* initial_table() {
  if (const char* env = std::getenv("AUTOMLP_ISA"); env != nullptr && *env != '\0') {
    const Isa isa = parse_isa(env);
    if (isa == Isa::kAvx2 && avx2_table() != nullptr) return avx2_table();
    return &scalar_table();
  }
  return best_available() == Isa::kAvx2 ? avx2_table() : &scalar_table();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable& scalar_table() { return detail::kScalarTable; }

bool cpu_supports_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* avx2_table() {
  static const KernelTable* table =
      cpu_supports_avx2() ? detail::avx2_table_if_compiled() : nullptr;
  return table;
}

Isa best_available() { return avx2_table() != nullptr ? Isa::kAvx2 : Isa::kScalar; }

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

void select(Isa isa) {
  if (isa == Isa::kScalar) {
    active_slot().store(&scalar_table());
    return;
  }
  if (avx2_table() == nullptr) throw ArgumentError("AVX2 kernels are not available on this CPU");
  active_slot().store(avx2_table());
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "auto") return best_available();
  throw ArgumentError("unknown instruction set '" + std::string(name) +
                      "' (expected scalar, avx2 or auto)");
}

ScopedIsa::ScopedIsa(Isa isa) : previous_(active().isa) { select(isa); }
ScopedIsa::~ScopedIsa() { select(previous_); }

}  // namespace automlp::numkit::kernels
