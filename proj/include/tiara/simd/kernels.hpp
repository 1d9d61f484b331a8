#pragma once
// Inner-loop arithmetic shared by the transforms and the attention code.
//
// Every kernel has a scalar reference implementation. Vector variants are
// compiled per ISA and chosen once at startup from the CPU feature bits;
// TIARA_SIMD=scalar|avx2|neon in the environment overrides the choice.
// Vector variants reassociate sums, so results agree with the scalar path to
// rounding, not bit-for-bit.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace tiara::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*max)(const double* a, std::size_t n);  // n >= 1
  void (*divide)(double* a, std::size_t n, double denom);
  // Sum_j x_j * exp(-i 2 pi k j / N) with twiddles cos_t/sin_t of length N,
  // where n <= N. Writes real and imaginary parts.
  void (*dft_bin)(const double* x, std::size_t n, const double* cos_t, const double* sin_t,
                  std::size_t period, std::size_t k, double* re, double* im);
};

/// True when the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Kernel table for a specific ISA. Throws DomainError if unavailable.
const KernelTable& kernels_for(Isa isa);

/// The table used by the library.
const KernelTable& active() noexcept;

/// Pin the active ISA (tests, benchmarking). Throws DomainError if unavailable.
void force_isa(Isa isa);

/// Return to the auto-detected ISA.
void reset_isa() noexcept;

// Convenience wrappers over active().
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double max(std::span<const double> a);
void divide(std::span<double> a, double denom);

}  // namespace tiara::simd
