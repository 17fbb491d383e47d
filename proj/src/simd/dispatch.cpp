#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pitchbench/simd/kernels.h"

namespace pitchbench::simd {

namespace {

constexpr KernelTable kScalarTable{Backend::kScalar, &scalar::Dot, &scalar::SumSqDiff,
                                   &scalar::SumSq};

#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2Table{Backend::kAvx2, &avx2::Dot, &avx2::SumSqDiff, &avx2::SumSq};
#endif

const KernelTable& SelectActive() {
  if (const char* env = std::getenv("PITCHBENCH_SIMD"); env != nullptr) {
    if (std::string(env) == "scalar") return kScalarTable;
  }
  if (BackendSupported(Backend::kAvx2)) return Kernels(Backend::kAvx2);
  return kScalarTable;
}

}  // namespace

bool BackendSupported(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& Kernels(Backend backend) {
  if (!BackendSupported(backend)) {
    throw std::invalid_argument("SIMD backend not supported on this CPU: " +
                                std::string(BackendName(backend)));
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (backend == Backend::kAvx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& ActiveKernels() {
  static const KernelTable& active = SelectActive();
  return active;
}

std::string_view BackendName(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace pitchbench::simd
