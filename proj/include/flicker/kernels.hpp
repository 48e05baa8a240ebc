#pragma once
// Batch inverse-distance kernels.
//
// The Monte-Carlo g-factor integrator spends nearly all of its time computing
// 1/|p - a| and 1/|p - b| for large batches of sample points against the two
// fixed lead positions. That loop is pure arithmetic (sub/mul/add/sqrt/div),
// so it ships in two variants: a scalar reference and an AVX2 one, selected
// at runtime. Per-point outputs (not a fused sum) are produced because the
// caller still needs the individual distances for importance-sampling
// densities and region membership.

#include <cstddef>

#include "flicker/vec3.hpp"

namespace flicker::kernels {

// out_a[i] = 1/|p_i - a|, out_b[i] = 1/|p_i - b|; points in SoA layout.
using InvDistBatchFn = void (*)(const double* xs, const double* ys, const double* zs,
                                std::size_t n, Vec3 a, Vec3 b,
                                double* out_a, double* out_b);

void inv_dist_batch_scalar(const double* xs, const double* ys, const double* zs,
                           std::size_t n, Vec3 a, Vec3 b,
                           double* out_a, double* out_b);

#if defined(__x86_64__) || defined(_M_X64)
#define FLICKER_HAVE_AVX2_BUILD 1
void inv_dist_batch_avx2(const double* xs, const double* ys, const double* zs,
                         std::size_t n, Vec3 a, Vec3 b,
                         double* out_a, double* out_b);
#else
#define FLICKER_HAVE_AVX2_BUILD 0
#endif

enum class Lane { Auto, Scalar, Avx2 };

// Runtime selection. Auto picks the widest lane the CPU supports; the
// FLICKER_SIMD environment variable (auto|scalar|avx2) overrides, and an
// explicit lane argument overrides both. Requesting Avx2 where unsupported
// falls back to scalar.
InvDistBatchFn select_inv_dist_batch(Lane lane = Lane::Auto);

// Name of the lane `select_inv_dist_batch` resolves to ("scalar" or "avx2").
const char* resolve_lane_name(Lane lane = Lane::Auto);

Lane lane_from_name(const char* name);  // throws input_error on unknown name

bool cpu_has_avx2();

}  // namespace flicker::kernels
