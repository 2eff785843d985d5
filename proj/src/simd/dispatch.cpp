#include <cstdlib>
#include <string_view>

#include "gwc/simd/kernels.hpp"

namespace gwc::simd {

#if defined(GWC_HAVE_AVX2_KERNELS)
namespace detail {
const kernel_table& avx2_table() noexcept;
}
#endif

const kernel_table* avx2_kernels() noexcept
{
#if defined(GWC_HAVE_AVX2_KERNELS)
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const kernel_table& active_kernels() noexcept
{
    static const kernel_table& chosen = [&]() -> const kernel_table& {
        const char* env = std::getenv("GWC_SIMD");
        const std::string_view request = env ? env : "auto";
        if (request == "scalar") {
            return scalar_kernels();
        }
        if (const auto* avx2 = avx2_kernels()) {
            return *avx2;
        }
        return scalar_kernels();
    }();
    return chosen;
}

} // namespace gwc::simd
