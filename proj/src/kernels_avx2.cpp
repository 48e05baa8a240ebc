// AVX2 variant of the inverse-distance batch kernel. Compiled with a per
// function target attribute so the rest of the build stays baseline; the
// dispatcher only hands out this symbol after a cpuid check.

#include "flicker/kernels.hpp"

#if FLICKER_HAVE_AVX2_BUILD

#include <immintrin.h>

#include <cmath>

namespace flicker::kernels {

__attribute__((target("avx2,fma")))
void inv_dist_batch_avx2(const double* xs, const double* ys, const double* zs,
                         std::size_t n, Vec3 a, Vec3 b,
                         double* out_a, double* out_b) {
    const __m256d ax = _mm256_set1_pd(a.x);
    const __m256d ay = _mm256_set1_pd(a.y);
    const __m256d az = _mm256_set1_pd(a.z);
    const __m256d bx = _mm256_set1_pd(b.x);
    const __m256d by = _mm256_set1_pd(b.y);
    const __m256d bz = _mm256_set1_pd(b.z);
    const __m256d one = _mm256_set1_pd(1.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d px = _mm256_loadu_pd(xs + i);
        __m256d py = _mm256_loadu_pd(ys + i);
        __m256d pz = _mm256_loadu_pd(zs + i);

        __m256d dxa = _mm256_sub_pd(px, ax);
        __m256d dya = _mm256_sub_pd(py, ay);
        __m256d dza = _mm256_sub_pd(pz, az);
        __m256d ra2 = _mm256_mul_pd(dxa, dxa);
        ra2 = _mm256_fmadd_pd(dya, dya, ra2);
        ra2 = _mm256_fmadd_pd(dza, dza, ra2);

        __m256d dxb = _mm256_sub_pd(px, bx);
        __m256d dyb = _mm256_sub_pd(py, by);
        __m256d dzb = _mm256_sub_pd(pz, bz);
        __m256d rb2 = _mm256_mul_pd(dxb, dxb);
        rb2 = _mm256_fmadd_pd(dyb, dyb, rb2);
        rb2 = _mm256_fmadd_pd(dzb, dzb, rb2);

        _mm256_storeu_pd(out_a + i, _mm256_div_pd(one, _mm256_sqrt_pd(ra2)));
        _mm256_storeu_pd(out_b + i, _mm256_div_pd(one, _mm256_sqrt_pd(rb2)));
    }

    // remainder
    for (; i < n; ++i) {
        double dxa = xs[i] - a.x, dya = ys[i] - a.y, dza = zs[i] - a.z;
        double dxb = xs[i] - b.x, dyb = ys[i] - b.y, dzb = zs[i] - b.z;
        double ra2 = dxa * dxa + dya * dya + dza * dza;
        double rb2 = dxb * dxb + dyb * dyb + dzb * dzb;
        out_a[i] = 1.0 / std::sqrt(ra2);
        out_b[i] = 1.0 / std::sqrt(rb2);
    }
}

}  // namespace flicker::kernels

#endif  // FLICKER_HAVE_AVX2_BUILD
