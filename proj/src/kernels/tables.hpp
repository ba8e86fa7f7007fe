#pragma once

#include "evrec/kernels.hpp"

namespace evrec::kernels {

namespace scalar {
extern const Ops table;
}

#ifdef EVREC_HAVE_AVX2_TU
namespace avx2 {
extern const Ops table;
}
#endif

}  // namespace evrec::kernels
