// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string>

#include "polarbench/error.hpp"
#include "polarbench/simd/kernels.hpp"

namespace polarbench::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
      if (detail::avx2_kernels() == nullptr) return false;
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon: return detail::neon_kernels() != nullptr;
  }
  return false;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

const Kernels& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw ConfigError("SIMD variant '" + std::string(isa_name(isa)) + "' is not available on this machine");
  }
  switch (isa) {
    case Isa::avx2: return *detail::avx2_kernels();
    case Isa::neon: return *detail::neon_kernels();
    case Isa::scalar: break;
  }
  return detail::scalar_kernels();
}

namespace {

const Kernels& resolve() {
  if (const char* forced = std::getenv("POLARBENCH_SIMD")) {
    const std::string want(forced);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa)) return kernels_for(isa);
    }
    throw ConfigError("POLARBENCH_SIMD='" + want + "' is not one of scalar, avx2, neon");
  }
  const auto isas = supported_isas();
  return kernels_for(isas.back());
}

}  // namespace

const Kernels& active() {
  static const Kernels& k = resolve();
  return k;
}

}  // namespace polarbench::simd
