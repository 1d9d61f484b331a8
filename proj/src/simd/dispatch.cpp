#include <atomic>
#include <cstdlib>
#include <string>

#include "tiara/errors.hpp"
#include "variants.hpp"

namespace tiara::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(TIARA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* table_ptr(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return &detail::scalar_table();
    case Isa::kAvx2:
#if defined(TIARA_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_table();
#endif
      return nullptr;
    case Isa::kNeon:
#if defined(TIARA_HAVE_NEON)
      return &detail::neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable* detect() noexcept {
  if (const char* env = std::getenv("TIARA_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon})
      if (want == isa_name(isa))
        if (const KernelTable* t = table_ptr(isa)) return t;
  }
  for (Isa isa : {Isa::kAvx2, Isa::kNeon})
    if (const KernelTable* t = table_ptr(isa)) return t;
  return &detail::scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> current{detect()};
  return current;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept { return table_ptr(isa) != nullptr; }

const KernelTable& kernels_for(Isa isa) {
  const KernelTable* t = table_ptr(isa);
  if (t == nullptr)
    throw DomainError("SIMD variant '" + std::string(isa_name(isa)) + "' is not available");
  return *t;
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

void force_isa(Isa isa) { slot().store(&kernels_for(isa), std::memory_order_release); }

void reset_isa() noexcept { slot().store(detect(), std::memory_order_release); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("dot: length mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

double max(std::span<const double> a) {
  if (a.empty()) throw DomainError("max: empty input");
  return active().max(a.data(), a.size());
}

void divide(std::span<double> a, double denom) { active().divide(a.data(), a.size(), denom); }

}  // namespace tiara::simd
