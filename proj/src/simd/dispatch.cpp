#include <cstdlib>
#include <stdexcept>
#include <string>

#include "nlos/simd/kernels.hpp"

namespace nlos::simd {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &detail::oracle_rows_scalar, &detail::fast_row_scalar};
#if defined(NLOS_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &detail::oracle_rows_avx2, &detail::fast_row_avx2};
#endif
#if defined(NLOS_HAVE_NEON)
constexpr KernelTable kNeon{Isa::neon, &detail::oracle_rows_neon, &detail::fast_row_neon};
#endif

const KernelTable& select_active() {
  if (const char* env = std::getenv("NLOS_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa) && isa_supported(isa)) return kernels(isa);
    }
  }
  if (isa_supported(Isa::avx2)) return kernels(Isa::avx2);
  if (isa_supported(Isa::neon)) return kernels(Isa::neon);
  return kScalar;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(NLOS_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(NLOS_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& kernels(Isa isa) {
  if (!isa_supported(isa)) throw std::invalid_argument("SIMD variant not available: " + std::string(isa_name(isa)));
  switch (isa) {
#if defined(NLOS_HAVE_AVX2)
    case Isa::avx2:
      return kAvx2;
#endif
#if defined(NLOS_HAVE_NEON)
    case Isa::neon:
      return kNeon;
#endif
    default:
      return kScalar;
  }
}

const KernelTable& kernels() {
  static const KernelTable& active = select_active();
  return active;
}

}  // namespace nlos::simd
