// Backend selection. Defaults to the widest supported instruction set;
// EVREC_KERNEL_BACKEND=scalar|avx2 overrides, set_backend() overrides both.
#include "evrec/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "evrec/errors.hpp"
#include "tables.hpp"

namespace evrec::kernels {

bool avx2_supported() {
#if defined(EVREC_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Ops& ops_for(Backend b) {
#ifdef EVREC_HAVE_AVX2_TU
  if (b == Backend::avx2) {
    if (!avx2_supported()) throw InvalidParameter("avx2 backend not supported on this cpu");
    return avx2::table;
  }
#else
  if (b == Backend::avx2) throw InvalidParameter("avx2 backend not built");
#endif
  return scalar::table;
}

namespace {

Backend pick_default() {
  if (const char* env = std::getenv("EVREC_KERNEL_BACKEND")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::avx2;
    return Backend::scalar;
  }
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend> g_backend{pick_default()};

}  // namespace

const Ops& ops() { return ops_for(g_backend.load(std::memory_order_relaxed)); }

Backend active() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  ops_for(b);  // validates
  g_backend.store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

}  // namespace evrec::kernels
