#pragma once

// Inner-loop kernels behind every dense product in the library.
//
// Each instruction set provides the same KernelTable. The scalar table is the
// reference; wider tables must agree with it to rounding (tests/unit/test_kernels.cpp).
// The active table is picked once at startup from the CPU features, or from the
// AUTOMLP_ISA environment variable ("scalar" or "avx2") when set.

#include <cstddef>
#include <string_view>

namespace automlp::numkit::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  const char* name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // c[m x n] += a[m x k] * b[k x n]
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                  std::size_t n);
  // c[m x n] += a[m x k] * b[n x k]^T
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                  std::size_t n);
  // c[m x n] += a[k x m]^T * b[k x n]
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                  std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the library was built without AVX2 support or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

bool cpu_supports_avx2();

const KernelTable& active();

// Throws ArgumentError when the requested ISA is unavailable on this machine.
void select(Isa isa);
Isa parse_isa(std::string_view name);
Isa best_available();

// Restores the previously active table on scope exit.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa);
  ~ScopedIsa();
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

namespace detail {
// Per-ISA tables; defined in kernels_scalar.cpp / kernels_avx2.cpp.
extern const KernelTable kScalarTable;
const KernelTable* avx2_table_if_compiled();
}  // namespace detail

}  // namespace automlp::numkit::kernels
