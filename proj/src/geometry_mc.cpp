// Monte-Carlo g-factor backend.
//
// Mixture importance sampling: half the draws are uniform over the region,
// the other half concentrate in small balls around the leads with density
// proportional to 1/s^2, which cancels the 1/|r - lead| growth of the
// integrand and keeps the estimator variance bounded. Samples are generated
// and reduced in fixed-size chunks with a per-chunk generator seeded from
// (seed, chunk index), so results are reproducible for a fixed seed and lane
// no matter how the chunks would be scheduled.

#include <cmath>
#include <cstdint>
#include <vector>

#include "flicker/kernels.hpp"
#include "geometry_internal.hpp"

namespace flicker::geometry::detail {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kChunk = 16384;

struct SplitMix {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // uniform on the open interval (0,1)
    double u01() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }
};

struct UniformSampler {
    const SampleGeometry* geom;
    const VoxelGrid* vox = nullptr;
    std::vector<int> occupied;  // flat indices for voxel grids

    explicit UniformSampler(const SampleGeometry& g) : geom(&g) {
        if (std::holds_alternative<VoxelGrid>(g.region)) {
            vox = &std::get<VoxelGrid>(g.region);
            for (int k = 0; k < vox->nz; ++k)
                for (int j = 0; j < vox->ny; ++j)
                    for (int i = 0; i < vox->nx; ++i)
                        if (vox->occupied(i, j, k))
                            occupied.push_back((k * vox->ny + j) * vox->nx + i);
        }
    }

    Vec3 draw(SplitMix& rng) const {
        if (std::holds_alternative<Box>(geom->region)) {
            const auto& b = std::get<Box>(geom->region);
            return {rng.u01() * b.l, rng.u01() * b.w, rng.u01() * b.h};
        }
        if (std::holds_alternative<Ball>(geom->region)) {
            const auto& b = std::get<Ball>(geom->region);
            double r = b.R * std::cbrt(rng.u01());
            double ct = 2.0 * rng.u01() - 1.0;
            double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            double phi = 2.0 * kPi * rng.u01();
            return {r * st * std::cos(phi), r * st * std::sin(phi), r * ct};
        }
        std::size_t idx = std::min(occupied.size() - 1,
                                   std::size_t(rng.u01() * double(occupied.size())));
        int flat = occupied[idx];
        int i = flat % vox->nx;
        int j = (flat / vox->nx) % vox->ny;
        int k = flat / (vox->nx * vox->ny);
        return {vox->origin.x + (i + rng.u01()) * vox->spacing.x,
                vox->origin.y + (j + rng.u01()) * vox->spacing.y,
                vox->origin.z + (k + rng.u01()) * vox->spacing.z};
    }
};

Vec3 draw_ball(const LeadBall& ball, SplitMix& rng) {
    double s = ball.rho * rng.u01();
    double ct = 2.0 * rng.u01() - 1.0;
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double phi = 2.0 * kPi * rng.u01();
    return {ball.center.x + s * st * std::cos(phi),
            ball.center.y + s * st * std::sin(phi), ball.center.z + s * ct};
}

void update_stats(const std::vector<double>& means, double& mean, double& err) {
    double m = 0.0;
    for (double v : means) m += v;
    m /= double(means.size());
    double var = 0.0;
    for (double v : means) var += (v - m) * (v - m);
    if (means.size() > 1)
        var /= double(means.size()) * (double(means.size()) - 1.0);
    mean = m;
    err = std::sqrt(var);
}

}  // namespace

WeightedIntegral integrate_monte_carlo(const SampleGeometry& geom,
                                    const LeadPair& leads,
                                    const WeightFn& weight,
                                    const QuadratureConfig& cfg) {
    const double omega = geom.volume();
    std::vector<LeadBall> balls = plan_lead_balls(geom, leads);
    std::erase_if(balls, [](const LeadBall& b) { return b.rho <= 0.0; });

    // mixture weights: half uniform, the rest split across the lead balls
    const double w_uniform = balls.empty() ? 1.0 : 0.5;
    const double w_ball = balls.empty() ? 0.0 : 0.5 / double(balls.size());

    UniformSampler uniform(geom);
    auto kernel = kernels::select_inv_dist_batch(cfg.lane);

    const bool coincident = leads.x == leads.xp;

    std::vector<double> xs(kChunk), ys(kChunk), zs(kChunk);
    std::vector<double> inv_a(kChunk), inv_b(kChunk);

    std::vector<double> chunk_means;
    std::uint64_t samples = 0;
    double mean = 0.0, err = 0.0;
    bool converged = false;

    const std::uint64_t max_chunks = (cfg.budget + kChunk - 1) / kChunk;
    for (std::uint64_t chunk = 0; chunk < max_chunks; ++chunk) {
        SplitMix rng{cfg.seed * 0x9E3779B97F4A7C15ULL + chunk * 0xD1342543DE82EF95ULL +
                     0x2545F4914F6CDD1DULL};
        std::size_t n = std::size_t(std::min<std::uint64_t>(kChunk, cfg.budget - samples));
        for (std::size_t i = 0; i < n; ++i) {
            double pick = rng.u01();
            Vec3 p;
            if (pick < w_uniform || balls.empty()) {
                p = uniform.draw(rng);
            } else {
                std::size_t which =
                    std::min(balls.size() - 1,
                             std::size_t((pick - w_uniform) / w_ball));
                p = draw_ball(balls[which], rng);
            }
            xs[i] = p.x;
            ys[i] = p.y;
            zs[i] = p.z;
        }

        kernel(xs.data(), ys.data(), zs.data(), n, leads.x, leads.xp,
               inv_a.data(), inv_b.data());

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Vec3 p{xs[i], ys[i], zs[i]};
            bool inside = geom.contains(p);
            double q = inside ? w_uniform / omega : 0.0;
            for (const auto& ball : balls) {
                double inv = ball.lead_index == 0 ? inv_a[i] : inv_b[i];
                if (inv * ball.rho > 1.0)
                    q += w_ball * inv * inv / (4.0 * kPi * ball.rho);
            }
            if (!inside || q <= 0.0) continue;
            double pair = coincident ? 2.0 * inv_a[i] : inv_a[i] + inv_b[i];
            sum += weight(p) * pair / q;
        }
        chunk_means.push_back(sum / double(n));
        samples += n;

        // the chunk-variance estimate is too noisy to trust below ~16 chunks
        // (a low chi-squared fluctuation plus the stopping rule would bias
        // the reported error low), so never stop earlier
        if (chunk_means.size() >= 16) {
            update_stats(chunk_means, mean, err);
            if (err <= cfg.rel_tol * std::abs(mean) && mean != 0.0) {
                converged = true;
                break;
            }
        }
    }

    if (!converged && !chunk_means.empty()) {
        update_stats(chunk_means, mean, err);
        converged = chunk_means.size() >= 16 &&
                    err <= cfg.rel_tol * std::abs(mean) && mean != 0.0;
    }

    WeightedIntegral res;
    res.value = mean / omega;
    res.err_estimate = err / omega;
    res.converged = converged;
    res.evaluations = samples;
    res.backend = "monte-carlo";
    res.lane = kernels::resolve_lane_name(cfg.lane);
    return res;
}

}  // namespace flicker::geometry::detail
