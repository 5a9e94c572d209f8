#include "tkv/kernels.hpp"

#include <cstdlib>
#include <string>

namespace tkv::kernels {

#if TKV_HAVE_AVX2
namespace detail {
const Ops* avx2_table();  // defined in kernels_avx2.cpp
}
#endif

const Ops* avx2_ops() {
#if TKV_HAVE_AVX2
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return detail::avx2_table();
#endif
    return nullptr;
}

const Ops& active() {
    static const Ops* chosen = [] {
        const char* env = std::getenv("TKV_SIMD");
        const std::string mode = env ? env : "auto";
        if (mode == "scalar") return &scalar_ops();
        const Ops* simd = avx2_ops();
        if (simd) return simd;
        return &scalar_ops();  // "avx2" without hardware support degrades gracefully
    }();
    return *chosen;
}

}  // namespace tkv::kernels
