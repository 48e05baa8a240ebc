#include "flicker/kernels.hpp"

#include <cmath>

namespace flicker::kernels {

void inv_dist_batch_scalar(const double* xs, const double* ys, const double* zs,
                           std::size_t n, Vec3 a, Vec3 b,
                           double* out_a, double* out_b) {
    for (std::size_t i = 0; i < n; ++i) {
        double dxa = xs[i] - a.x, dya = ys[i] - a.y, dza = zs[i] - a.z;
        double dxb = xs[i] - b.x, dyb = ys[i] - b.y, dzb = zs[i] - b.z;
        double ra2 = dxa * dxa + dya * dya + dza * dza;
        double rb2 = dxb * dxb + dyb * dyb + dzb * dzb;
        out_a[i] = 1.0 / std::sqrt(ra2);
        out_b[i] = 1.0 / std::sqrt(rb2);
    }
}

}  // namespace flicker::kernels
