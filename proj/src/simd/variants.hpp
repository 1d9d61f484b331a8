#pragma once

#include "tiara/simd/kernels.hpp"

namespace tiara::simd::detail {

const KernelTable& scalar_table() noexcept;

#if defined(TIARA_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif

#if defined(TIARA_HAVE_NEON)
const KernelTable& neon_table() noexcept;
#endif

}  // namespace tiara::simd::detail
