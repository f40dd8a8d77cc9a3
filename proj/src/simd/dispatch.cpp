#include <cstdlib>
#include <string_view>

#include "phir/simd/kernels.hpp"

namespace phir::simd {

const Kernels& active() {
  static const Kernels& chosen = [] () -> const Kernels& {
    const char* env = std::getenv("PHIR_FORCE_SCALAR");
    const bool force = env && *env && std::string_view(env) != "0";
    const Kernels* avx = avx2_kernels();
    return (!force && avx) ? *avx : scalar_kernels();
  }();
  return chosen;
}

}  // namespace phir::simd
