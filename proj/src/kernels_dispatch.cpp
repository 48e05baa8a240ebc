#include "flicker/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

#include "flicker/errors.hpp"

namespace flicker::kernels {

bool cpu_has_avx2() {
#if FLICKER_HAVE_AVX2_BUILD
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Lane lane_from_name(const char* name) {
    if (std::strcmp(name, "auto") == 0) return Lane::Auto;
    if (std::strcmp(name, "scalar") == 0) return Lane::Scalar;
    if (std::strcmp(name, "avx2") == 0) return Lane::Avx2;
    throw input_error(std::string("unknown SIMD lane '") + name +
                      "' (expected auto, scalar, or avx2)");
}

static Lane env_lane() {
    const char* env = std::getenv("FLICKER_SIMD");
    if (env == nullptr || *env == '\0') return Lane::Auto;
    return lane_from_name(env);
}

static Lane resolve(Lane lane) {
    if (lane == Lane::Auto) lane = env_lane();
    if (lane == Lane::Auto) lane = cpu_has_avx2() ? Lane::Avx2 : Lane::Scalar;
    if (lane == Lane::Avx2 && !cpu_has_avx2()) lane = Lane::Scalar;
    return lane;
}

InvDistBatchFn select_inv_dist_batch(Lane lane) {
#if FLICKER_HAVE_AVX2_BUILD
    if (resolve(lane) == Lane::Avx2) return inv_dist_batch_avx2;
#endif
    return inv_dist_batch_scalar;
}

const char* resolve_lane_name(Lane lane) {
    return resolve(lane) == Lane::Avx2 ? "avx2" : "scalar";
}

}  // namespace flicker::kernels
