#pragma once

// Inner-loop arithmetic kernels shared by the correlation, difference and
// filtering code. Every kernel has a scalar reference implementation and,
// where the CPU supports it, a vectorized variant selected at runtime.

#include <cstddef>
#include <string_view>

namespace pitchbench::simd {

enum class Backend { kScalar, kAvx2 };

struct KernelTable {
  Backend backend;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i (a[i] - b[i])^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  // sum_i a[i]^2
  double (*sum_sq)(const double* a, std::size_t n);
};

namespace scalar {
double Dot(const double* a, const double* b, std::size_t n);
double SumSqDiff(const double* a, const double* b, std::size_t n);
double SumSq(const double* a, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double Dot(const double* a, const double* b, std::size_t n);
double SumSqDiff(const double* a, const double* b, std::size_t n);
double SumSq(const double* a, std::size_t n);
}  // namespace avx2
#endif

/// True when the running CPU can execute `backend`.
bool BackendSupported(Backend backend);

/// Kernel table for a specific backend. Throws std::invalid_argument if the
/// backend is not supported on this CPU.
const KernelTable& Kernels(Backend backend);

/// Table used by the library. Chosen once per process: the best supported
/// backend, unless PITCHBENCH_SIMD=scalar is set in the environment.
const KernelTable& ActiveKernels();

std::string_view BackendName(Backend backend);

}  // namespace pitchbench::simd
