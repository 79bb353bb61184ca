#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "csflab/kernels.hpp"

namespace csflab::kernels {
namespace {

Backend detect() {
  if (const char* env = std::getenv("CSFLAB_SIMD")) {
    if (std::string(env) == "scalar") return Backend::Scalar;
  }
  return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_supported())
    throw std::invalid_argument("AVX2 backend requested on a CPU without AVX2/FMA");
  current().store(b, std::memory_order_relaxed);
}

const Table& table_for(Backend b) {
#if defined(__x86_64__) || defined(__i386__)
  if (b == Backend::Avx2) return avx2::table;
#endif
  (void)b;
  return scalar::table;
}

}  // namespace csflab::kernels
