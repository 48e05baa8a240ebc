#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "flicker/errors.hpp"
#include "flicker/kernels.hpp"
#include "oracles.hpp"

using namespace flicker;
using namespace flicker::kernels;

namespace {

struct Batch {
    std::vector<double> xs, ys, zs;
    Vec3 a, b;

    explicit Batch(std::size_t n, std::uint64_t seed) {
        std::mt19937_64 gen = oracle::rng(seed);
        std::uniform_real_distribution<double> coord(-5.0, 5.0);
        xs.resize(n);
        ys.resize(n);
        zs.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = coord(gen);
            ys[i] = coord(gen);
            zs[i] = coord(gen);
        }
        a = Vec3{coord(gen), coord(gen), coord(gen)};
        b = Vec3{coord(gen), coord(gen), coord(gen)};
    }

    void run(InvDistBatchFn fn, std::vector<double>& oa, std::vector<double>& ob) const {
        oa.assign(xs.size(), 0.0);
        ob.assign(xs.size(), 0.0);
        fn(xs.data(), ys.data(), zs.data(), xs.size(), a, b, oa.data(), ob.data());
    }
};

// guard object so an env override never leaks into other test cases
struct EnvSimd {
    explicit EnvSimd(const char* v) { setenv("FLICKER_SIMD", v, 1); }
    ~EnvSimd() { unsetenv("FLICKER_SIMD"); }
};

}  // namespace

TEST_CASE("scalar kernel computes inverse distances") {
    Batch batch(257, 11);
    std::vector<double> oa, ob;
    batch.run(inv_dist_batch_scalar, oa, ob);
    for (std::size_t i = 0; i < batch.xs.size(); ++i) {
        const Vec3 p{batch.xs[i], batch.ys[i], batch.zs[i]};
        CHECK(oracle::rel_diff(oa[i], 1.0 / distance(p, batch.a)) <= 1e-15);
        CHECK(oracle::rel_diff(ob[i], 1.0 / distance(p, batch.b)) <= 1e-15);
    }
}

TEST_CASE("lanes agree element by element, remainder lengths included") {
    if (!cpu_has_avx2()) {
        MESSAGE("no AVX2 on this machine; cross-lane equivalence skipped");
        return;
    }
#if FLICKER_HAVE_AVX2_BUILD
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 100u, 1003u}) {
        Batch batch(n, 1000 + n);
        std::vector<double> sa, sb, va, vb;
        batch.run(inv_dist_batch_scalar, sa, sb);
        batch.run(inv_dist_batch_avx2, va, vb);
        for (std::size_t i = 0; i < n; ++i) {
            // the whole translation unit is compiled for fma, so both the
            // wide path and its remainder loop contract the squared-distance
            // sum; agreement with the baseline build is ulp-level, not bitwise
            CHECK(oracle::rel_diff(sa[i], va[i]) <= 1e-14);
            CHECK(oracle::rel_diff(sb[i], vb[i]) <= 1e-14);
        }
    }
#endif
}

TEST_CASE("each lane is bitwise deterministic across calls") {
    Batch batch(515, 99);
    std::vector<double> a1, b1, a2, b2;
    for (Lane lane : {Lane::Scalar, Lane::Avx2}) {
        InvDistBatchFn fn = select_inv_dist_batch(lane);
        batch.run(fn, a1, b1);
        batch.run(fn, a2, b2);
        CHECK(std::memcmp(a1.data(), a2.data(), a1.size() * sizeof(double)) == 0);
        CHECK(std::memcmp(b1.data(), b2.data(), b1.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("lane names parse and unknown names are rejected") {
    CHECK(lane_from_name("auto") == Lane::Auto);
    CHECK(lane_from_name("scalar") == Lane::Scalar);
    CHECK(lane_from_name("avx2") == Lane::Avx2);
    CHECK_THROWS_WITH_AS(lane_from_name("sse9"),
                         doctest::Contains("unknown SIMD lane"), input_error);
}

TEST_CASE("explicit lane selection resolves as requested") {
    CHECK(std::string(resolve_lane_name(Lane::Scalar)) == "scalar");
    CHECK(select_inv_dist_batch(Lane::Scalar) == inv_dist_batch_scalar);
    if (cpu_has_avx2()) {
        CHECK(std::string(resolve_lane_name(Lane::Avx2)) == "avx2");
#if FLICKER_HAVE_AVX2_BUILD
        CHECK(select_inv_dist_batch(Lane::Avx2) == inv_dist_batch_avx2);
#endif
        CHECK(std::string(resolve_lane_name(Lane::Auto)) == "avx2");
    } else {
        // requesting the wide lane on unsupported hardware falls back
        CHECK(std::string(resolve_lane_name(Lane::Avx2)) == "scalar");
        CHECK(select_inv_dist_batch(Lane::Avx2) == inv_dist_batch_scalar);
    }
}

TEST_CASE("FLICKER_SIMD steers Auto but loses to an explicit lane") {
    {
        EnvSimd env("scalar");
        CHECK(std::string(resolve_lane_name(Lane::Auto)) == "scalar");
        CHECK(select_inv_dist_batch(Lane::Auto) == inv_dist_batch_scalar);
        if (cpu_has_avx2()) {
            CHECK(std::string(resolve_lane_name(Lane::Avx2)) == "avx2");
        }
    }
    if (cpu_has_avx2()) {
        EnvSimd env("avx2");
        CHECK(std::string(resolve_lane_name(Lane::Auto)) == "avx2");
    }
    {
        EnvSimd env("");
        const std::string expect = cpu_has_avx2() ? "avx2" : "scalar";
        CHECK(std::string(resolve_lane_name(Lane::Auto)) == expect);
    }
}

TEST_CASE("degenerate batches behave") {
    // n = 0 touches nothing
    std::vector<double> oa(3, -7.0), ob(3, -7.0);
    inv_dist_batch_scalar(nullptr, nullptr, nullptr, 0, Vec3{}, Vec3{}, oa.data(),
                          ob.data());
    CHECK(oa[0] == -7.0);
    CHECK(ob[2] == -7.0);

    // a point sitting on a lead produces inf, not a crash; the integrators
    // never feed such points but the kernel contract is total
    const double xs = 1.0, ys = 2.0, zs = 3.0;
    double ra = 0.0, rb = 0.0;
    inv_dist_batch_scalar(&xs, &ys, &zs, 1, Vec3{1.0, 2.0, 3.0}, Vec3{0.0, 0.0, 0.0},
                          &ra, &rb);
    CHECK(std::isinf(ra));
    CHECK(ra > 0.0);
    CHECK(oracle::rel_diff(rb, 1.0 / std::sqrt(14.0)) <= 1e-15);
}
