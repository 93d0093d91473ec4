#pragma once

#include "unlearn_audit/kernels.hpp"

namespace unlearn_audit::kernels::detail {

#if defined(UA_HAVE_AVX2_TU)
const KernelTable& avx2_kernels();
#endif

#if defined(UA_HAVE_NEON_TU)
const KernelTable& neon_kernels();
#endif

}  // namespace unlearn_audit::kernels::detail
