#include <atomic>
#include <cstdlib>
#include <string_view>

#include "geostat/errors.hpp"
#include "geostat/kernels.hpp"

namespace geostat::kernels {

namespace {

const KernelSet kScalar{Isa::Scalar, "scalar", &scalar::gemm, &scalar::syrk,
                        &scalar::trsm_right_lower_trans, &scalar::dot,
                        &scalar::exp_sums};

#ifdef GEOSTAT_BUILD_AVX2
const KernelSet kAvx2{Isa::Avx2, "avx2", &avx2::gemm, &avx2::syrk,
                      &avx2::trsm_right_lower_trans, &avx2::dot,
                      &avx2::exp_sums};

bool host_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
#endif

const KernelSet* initial_kernels() {
  const KernelSet* best = &kScalar;
  if (const KernelSet* wide = avx2_kernels()) best = wide;
  if (const char* env = std::getenv("GEOSTAT_ISA")) {
    const std::string_view want(env);
    if (want == "scalar") return &kScalar;
    if (want == "avx2" && avx2_kernels()) return avx2_kernels();
  }
  return best;
}

std::atomic<const KernelSet*>& active_slot() {
  static std::atomic<const KernelSet*> slot{initial_kernels()};
  return slot;
}

}  // namespace

const KernelSet& scalar_kernels() { return kScalar; }

const KernelSet* avx2_kernels() {
#ifdef GEOSTAT_BUILD_AVX2
  static const bool supported = host_has_avx2();
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

bool isa_supported(Isa isa) {
  return isa == Isa::Scalar || avx2_kernels() != nullptr;
}

const KernelSet& active_kernels() {
  return *active_slot().load(std::memory_order_acquire);
}

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw DomainError("requested kernel ISA is not available");
  active_slot().store(isa == Isa::Scalar ? &kScalar : avx2_kernels(),
                      std::memory_order_release);
}

}  // namespace geostat::kernels
