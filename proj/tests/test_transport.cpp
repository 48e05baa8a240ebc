#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "flicker/errors.hpp"
#include "flicker/transport.hpp"
#include "oracles.hpp"

using namespace flicker;
using namespace flicker::transport;
using doctest::Contains;

#define CHECK_REL(a, b, tol)      \
    do {                          \
        const double va_ = (a);   \
        const double vb_ = (b);   \
        CAPTURE(va_);             \
        CAPTURE(vb_);             \
        CHECK(oracle::rel_diff(va_, vb_) <= (tol)); \
    } while (0)

namespace {

const Constants& codata() { return constants(ConstantSet::Codata); }
const Constants& rounded() { return constants(ConstantSet::PaperRounded); }

// gold film from the 1/f-noise comparison data set
Material gold_film() {
    Material m;
    m.n_cm3 = 5.9e22;
    m.m_g = codata().m_e;
    m.d_cm = 2.57e-8;
    m.charge_cgs = codata().e;
    m.sigma_cgs = convert(Quantity::si(1.2e6, Dimension::conductivity()),
                          UnitSystem::CGS)
                      .value;
    return m;
}

MobilityTensor diag_tensor(double a, double b, double c, Vec3 n) {
    MobilityTensor t;
    t.m = {{{a, 0.0, 0.0}, {0.0, b, 0.0}, {0.0, 0.0, c}}};
    t.direction = n;
    return t;
}

// rotation about a random axis, built from a unit quaternion
std::array<std::array<double, 3>, 3> random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    double q[4];
    double n2 = 0.0;
    for (double& c : q) {
        c = gauss(rng);
        n2 += c * c;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (double& c : q) c *= inv;
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
             {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
             {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

std::array<std::array<double, 3>, 3> rotate(
    const std::array<std::array<double, 3>, 3>& R,
    const std::array<std::array<double, 3>, 3>& M) {
    std::array<std::array<double, 3>, 3> RM{}, out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) RM[i][j] += R[i][k] * M[k][j];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) out[i][j] += RM[i][k] * R[j][k];
    return out;
}

Vec3 apply(const std::array<std::array<double, 3>, 3>& R, Vec3 v) {
    return {R[0][0] * v.x + R[0][1] * v.y + R[0][2] * v.z,
            R[1][0] * v.x + R[1][1] * v.y + R[1][2] * v.z,
            R[2][0] * v.x + R[2][1] * v.y + R[2][2] * v.z};
}

}  // namespace

TEST_CASE("conductivity and carrier density give the film's mobility") {
    const Quantity sigma = Quantity::si(1.2e6, Dimension::conductivity());
    const Quantity n = Quantity::cgs(5.9e22, Dimension::number_density());

    const Quantity mu = mobility_from_conductivity(sigma, n, codata());
    CHECK(mu.system == UnitSystem::CGS);
    CHECK(mu.dim == Dimension::mobility());
    CHECK_REL(mu.value, oracle::kVossMuCgs, 1e-12);

    // back to the lab unit cm^2/(V s); lands near the film's nominal 1.3
    const double mu_lab = mu.value / oracle::kVoltPerStatvolt;
    CHECK_REL(mu_lab, oracle::kVossMuCm2Vs, 1e-12);
    CHECK_REL(mu_lab, 1.3, 0.03);

    // same answer when both inputs arrive in the other system
    const Quantity mu2 = mobility_from_conductivity(
        convert(sigma, UnitSystem::CGS), convert(n, UnitSystem::SI), codata());
    CHECK_REL(mu2.value, mu.value, 1e-12);

    // requested output system is honored and round-trips
    const Quantity mu_si =
        mobility_from_conductivity(sigma, n, codata(), UnitSystem::SI);
    CHECK(mu_si.system == UnitSystem::SI);
    CHECK_REL(convert(mu_si, UnitSystem::CGS).value, mu.value, 1e-12);
}

TEST_CASE("mobility from conductivity is linear in sigma and guards its inputs") {
    const Quantity n = Quantity::cgs(5.9e22, Dimension::number_density());
    const Quantity s1 = Quantity::si(1.2e6, Dimension::conductivity());
    const Quantity s2 = Quantity::si(2.4e6, Dimension::conductivity());

    const double m1 = mobility_from_conductivity(s1, n, codata()).value;
    const double m2 = mobility_from_conductivity(s2, n, codata()).value;
    CHECK_REL(m2, 2.0 * m1, 1e-14);

    // doubling the density halves the mobility
    const Quantity n2 = Quantity::cgs(1.18e23, Dimension::number_density());
    const double mh = mobility_from_conductivity(s1, n2, codata()).value;
    CHECK_REL(mh, 0.5 * m1, 1e-14);

    // a dead conductor has zero mobility, not an error
    const double mz =
        mobility_from_conductivity(Quantity::si(0.0, Dimension::conductivity()),
                                   n, codata())
            .value;
    CHECK(mz == 0.0);

    // the paper-rounded charge shifts the value by the e ratio
    const double mr = mobility_from_conductivity(s1, n, rounded()).value;
    CHECK_REL(mr * rounded().e, m1 * codata().e, 1e-14);

    CHECK_THROWS_WITH_AS(
        mobility_from_conductivity(Quantity::si(1.0, Dimension::voltage()), n,
                                   codata()),
        Contains("first argument is not a conductivity"), input_error);
    CHECK_THROWS_WITH_AS(
        mobility_from_conductivity(s1, Quantity::si(1.0, Dimension::voltage()),
                                   codata()),
        Contains("second argument is not a number density"), input_error);
    CHECK_THROWS_WITH_AS(
        mobility_from_conductivity(
            Quantity::si(-1.0, Dimension::conductivity()), n, codata()),
        Contains("conductivity must be nonnegative"), input_error);
    CHECK_THROWS_WITH_AS(
        mobility_from_conductivity(
            s1, Quantity::cgs(0.0, Dimension::number_density()), codata()),
        Contains("carrier density must be positive"), input_error);
}

TEST_CASE("four-point resistance converts to a conductivity") {
    const Quantity R = Quantity::si(100.0, Dimension::resistance());

    // film strip: 625 um long, 8 um wide, 25 nm thick (extents in cm)
    const Quantity s = sigma_from_resistance(R, 0.0625, 8e-4, 2.5e-6);
    CHECK(s.system == UnitSystem::SI);
    CHECK(s.dim == Dimension::conductivity());
    CHECK_REL(s.value, 3.125e7, 1e-12);

    // doubling the resistance halves the conductivity
    const Quantity s2 =
        sigma_from_resistance(Quantity::si(200.0, Dimension::resistance()),
                              0.0625, 8e-4, 2.5e-6);
    CHECK_REL(s2.value, 0.5 * s.value, 1e-14);

    // 1 cm cube at 1 ohm: sigma = 0.01/(1 * 1e-4) = 100 S/m
    const Quantity cube =
        sigma_from_resistance(Quantity::si(1.0, Dimension::resistance()), 1.0,
                              1.0, 1.0);
    CHECK_REL(cube.value, 100.0, 1e-14);

    // CGS output agrees with the unit converter
    const Quantity scgs =
        sigma_from_resistance(R, 0.0625, 8e-4, 2.5e-6, UnitSystem::CGS);
    CHECK(scgs.system == UnitSystem::CGS);
    CHECK_REL(scgs.value,
              s.value * conversion_factor(Dimension::conductivity(),
                                          UnitSystem::SI, UnitSystem::CGS),
              1e-14);

    CHECK_THROWS_WITH_AS(
        sigma_from_resistance(Quantity::si(1.0, Dimension::voltage()), 1.0, 1.0,
                              1.0),
        Contains("first argument is not a resistance"), input_error);
    CHECK_THROWS_WITH_AS(
        sigma_from_resistance(Quantity::si(0.0, Dimension::resistance()), 1.0,
                              1.0, 1.0),
        Contains("resistance must be positive"), input_error);
    CHECK_THROWS_WITH_AS(sigma_from_resistance(R, 1.0, -1.0, 1.0),
                         Contains("sample extents must be positive"),
                         input_error);
}

TEST_CASE("tensor mobility projects along the field direction") {
    std::mt19937_64 rng = oracle::rng(71);
    std::normal_distribution<double> gauss;

    // isotropic tensor: any direction sees the same scalar
    for (int trial = 0; trial < 8; ++trial) {
        Vec3 n{gauss(rng), gauss(rng), gauss(rng)};
        n = (1.0 / n.norm()) * n;
        MobilityTensor t = diag_tensor(1.3, 1.3, 1.3, n);
        CHECK_REL(t.project(), 1.3, 1e-14);
    }

    // anisotropic film: field along x picks out the x component
    CHECK(diag_tensor(2.0, 1.0, 1.0, {1.0, 0.0, 0.0}).project() == 2.0);
    CHECK(diag_tensor(2.0, 1.0, 1.0, {0.0, 1.0, 0.0}).project() == 1.0);

    // 45 degrees in the xy plane averages the two
    const double s = std::sqrt(0.5);
    CHECK_REL(diag_tensor(2.0, 1.0, 1.0, {s, s, 0.0}).project(), 1.5, 1e-14);

    // rotating tensor and direction together leaves the projection alone
    for (int trial = 0; trial < 30; ++trial) {
        std::array<std::array<double, 3>, 3> A{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) A[i][j] = gauss(rng);
        MobilityTensor t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                t.m[i][j] = 0.0;
                for (int k = 0; k < 3; ++k) t.m[i][j] += A[k][i] * A[k][j];
            }
        Vec3 n{gauss(rng), gauss(rng), gauss(rng)};
        n = (1.0 / n.norm()) * n;
        t.direction = n;
        const double base = t.project();

        const auto R = random_rotation(rng);
        MobilityTensor rt;
        rt.m = rotate(R, t.m);
        rt.direction = apply(R, n);
        CHECK_REL(rt.project(), base, 1e-10);
    }
}

TEST_CASE("tensor eigenvalues come back sorted and match closed forms") {
    // diagonal fast path
    auto ev = diag_tensor(3.0, 1.0, 2.0, {1.0, 0.0, 0.0}).eigenvalues();
    CHECK(ev[0] == 1.0);
    CHECK(ev[1] == 2.0);
    CHECK(ev[2] == 3.0);

    // 2x2 block [[2,1],[1,2]] has eigenvalues 1 and 3
    MobilityTensor t;
    t.m = {{{2.0, 1.0, 0.0}, {1.0, 2.0, 0.0}, {0.0, 0.0, 5.0}}};
    t.direction = {0.0, 0.0, 1.0};
    ev = t.eigenvalues();
    CHECK_REL(ev[0], 1.0, 1e-12);
    CHECK_REL(ev[1], 3.0, 1e-12);
    CHECK_REL(ev[2], 5.0, 1e-12);

    // equilateral all-ones matrix: 0, 0, 3
    MobilityTensor ones;
    ones.m = {{{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}}};
    ev = ones.eigenvalues();
    CHECK(std::abs(ev[0]) <= 1e-14);
    CHECK(std::abs(ev[1]) <= 1e-14);
    CHECK_REL(ev[2], 3.0, 1e-12);

    // random symmetric matrices: trace and Frobenius norm are preserved
    std::mt19937_64 rng = oracle::rng(72);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 25; ++trial) {
        MobilityTensor r;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) r.m[i][j] = r.m[j][i] = gauss(rng);
        ev = r.eigenvalues();
        CHECK(ev[0] <= ev[1]);
        CHECK(ev[1] <= ev[2]);
        const double tr = r.m[0][0] + r.m[1][1] + r.m[2][2];
        double frob = 0.0, frob_ev = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) frob += r.m[i][j] * r.m[i][j];
        for (double e : ev) frob_ev += e * e;
        const double scale = std::sqrt(frob) + 1.0;
        CHECK(std::abs(ev[0] + ev[1] + ev[2] - tr) <= 1e-12 * scale);
        CHECK(std::abs(frob_ev - frob) <= 1e-11 * scale * scale);
    }
}

TEST_CASE("tensor validation rejects malformed input") {
    MobilityTensor zero;
    zero.direction = {1.0, 0.0, 0.0};
    CHECK_THROWS_WITH_AS(zero.validate(), Contains("mobility tensor is zero"),
                         input_error);

    MobilityTensor asym = diag_tensor(1.0, 1.0, 1.0, {1.0, 0.0, 0.0});
    asym.m[0][1] = 0.5;
    CHECK_THROWS_WITH_AS(asym.validate(),
                         Contains("mobility tensor must be symmetric"),
                         input_error);

    MobilityTensor neg = diag_tensor(-1.0, 1.0, 1.0, {1.0, 0.0, 0.0});
    CHECK_THROWS_WITH_AS(neg.validate(),
                         Contains("mobility tensor has a negative eigenvalue"),
                         input_error);

    MobilityTensor tilt = diag_tensor(1.0, 1.0, 1.0, {1.0, 1.0, 0.0});
    CHECK_THROWS_WITH_AS(tilt.validate(),
                         Contains("direction must be unit length"), input_error);

    // tiny asymmetry within the tolerance is accepted
    MobilityTensor near = diag_tensor(1.0, 1.0, 1.0, {1.0, 0.0, 0.0});
    near.m[0][1] = 1e-13;
    near.m[1][0] = 0.0;
    CHECK_NOTHROW(near.validate());
}

TEST_CASE("material validation demands a usable description") {
    Material m = gold_film();
    CHECK_NOTHROW(m.validate());

    Material bad = m;
    bad.n_cm3 = 0.0;
    CHECK_THROWS_WITH_AS(bad.validate(),
                         Contains("carrier density must be positive"),
                         input_error);
    bad = m;
    bad.m_g = -1.0;
    CHECK_THROWS_WITH_AS(bad.validate(),
                         Contains("carrier mass must be positive"), input_error);
    bad = m;
    bad.d_cm = 0.0;
    CHECK_THROWS_WITH_AS(bad.validate(),
                         Contains("lattice spacing must be positive"),
                         input_error);
    bad = m;
    bad.charge_cgs = 0.0;
    CHECK_THROWS_WITH_AS(bad.validate(),
                         Contains("carrier charge must be positive"),
                         input_error);
    bad = m;
    bad.sigma_cgs.reset();
    CHECK_THROWS_WITH_AS(
        bad.validate(),
        Contains("needs a conductivity or a mobility spec"), input_error);
    bad.mobility = ScalarMobility{1.3};
    CHECK_NOTHROW(bad.validate());
    bad = m;
    bad.sigma_cgs = -1.0;
    CHECK_THROWS_WITH_AS(bad.validate(),
                         Contains("conductivity must be nonnegative"),
                         input_error);
}

TEST_CASE("effective mobility follows the material's spec") {
    const Material film = gold_film();

    // no explicit spec: derive from conductivity
    const Quantity mu = effective_mobility(film, 330.0, codata());
    CHECK(mu.system == UnitSystem::CGS);
    CHECK(mu.dim == Dimension::mobility());
    CHECK_REL(mu.value, oracle::kVossMuCgs, 1e-12);

    // the explicit FromConductivity spec gives the identical number
    Material explicit_spec = film;
    explicit_spec.mobility = FromConductivity{};
    CHECK(effective_mobility(explicit_spec, 330.0, codata()).value == mu.value);

    // scalar spec wins over the conductivity when both are present
    Material scalar = film;
    scalar.mobility = ScalarMobility{1.3};
    CHECK_REL(effective_mobility(scalar, 330.0, codata()).value,
              oracle::kMu13Cgs, 1e-10);

    // tensor spec projects first, then converts
    Material tensor = film;
    tensor.mobility = diag_tensor(2.6, 1.3, 1.3, {0.0, 1.0, 0.0});
    CHECK_REL(effective_mobility(tensor, 330.0, codata()).value,
              oracle::kMu13Cgs, 1e-10);

    // referring to a conductivity the material lacks is an error
    Material missing = film;
    missing.sigma_cgs.reset();
    missing.mobility = FromConductivity{};
    CHECK_THROWS_WITH_AS(
        effective_mobility(missing, 330.0, codata()),
        Contains("refers to conductivity but the material has none"),
        input_error);

    Material nonpos = film;
    nonpos.mobility = ScalarMobility{0.0};
    CHECK_THROWS_WITH_AS(effective_mobility(nonpos, 330.0, codata()),
                         Contains("mobility must be positive"), input_error);

    // a tensor whose projection vanishes along the field is rejected
    Material nullproj = film;
    nullproj.mobility = diag_tensor(1.0, 1.0, 0.0, {0.0, 0.0, 1.0});
    CHECK_THROWS_WITH_AS(effective_mobility(nullproj, 330.0, codata()),
                         Contains("projected mobility must be positive"),
                         input_error);

    CHECK_THROWS_WITH_AS(effective_mobility(film, 0.0, codata()),
                         Contains("temperature must be positive"), input_error);
    CHECK_THROWS_WITH_AS(effective_mobility(film, -10.0, codata()),
                         Contains("temperature must be positive"), input_error);
}

TEST_CASE("bulk-metal mobility falls off as 1/T above 50 K") {
    Material m = gold_film();
    m.mobility = BulkMetal1OverT{1.3, 330.0};

    const double ref_cgs = mobility_to_cgs(1.3);
    Warnings warn;

    // at the anchor the reference value comes back
    CHECK_REL(effective_mobility(m, 330.0, codata(), &warn).value, ref_cgs,
              1e-14);
    // doubling T halves mu
    CHECK_REL(effective_mobility(m, 660.0, codata(), &warn).value,
              0.5 * ref_cgs, 1e-14);
    // 1/T continues down to the 50 K floor
    CHECK_REL(effective_mobility(m, 100.0, codata(), &warn).value,
              ref_cgs * 3.3, 1e-14);
    CHECK(warn.empty());

    // below the floor the 50 K value is used and a warning is recorded
    const double at_floor = effective_mobility(m, 50.0, codata(), &warn).value;
    CHECK(warn.empty());
    CHECK_REL(at_floor, ref_cgs * 330.0 / 50.0, 1e-14);
    const double below = effective_mobility(m, 20.0, codata(), &warn).value;
    REQUIRE(warn.size() == 1);
    CHECK(warn[0] ==
          "temperature below the 1/T law's range; using the 50 K value");
    CHECK(below == at_floor);

    Material bad = m;
    bad.mobility = BulkMetal1OverT{1.3, 0.0};
    CHECK_THROWS_WITH_AS(effective_mobility(bad, 330.0, codata()),
                         Contains("needs positive reference point"),
                         input_error);
    bad.mobility = BulkMetal1OverT{-1.3, 330.0};
    CHECK_THROWS_WITH_AS(effective_mobility(bad, 330.0, codata()),
                         Contains("needs positive reference point"),
                         input_error);
}

TEST_CASE("mobility-temperature product is exactly constant under the 1/T law") {
    Material m = gold_film();
    m.mobility = BulkMetal1OverT{1.3, 330.0};

    const double expected = mobility_to_cgs(1.3) * 330.0;
    const Quantity p330 = mobility_temperature_product(m, 330.0, codata());
    CHECK(p330.system == UnitSystem::CGS);
    CHECK(p330.dim == Dimension::mobility() * Dimension::temperature());
    CHECK(p330.value == expected);

    // bit-for-bit constant across the law's range, not merely close
    for (double T : {50.0, 77.0, 150.0, 300.0, 330.0, 660.0, 2000.0})
        CHECK(mobility_temperature_product(m, T, codata()).value == expected);

    // below the floor the product follows the clamped mobility times T
    Warnings warn;
    const double p20 = mobility_temperature_product(m, 20.0, codata(), &warn).value;
    REQUIRE(warn.size() == 1);
    CHECK(warn[0] ==
          "temperature below the 1/T law's range; using the 50 K value");
    CHECK_REL(p20, mobility_to_cgs(1.3) * 330.0 / 50.0 * 20.0, 1e-14);
    CHECK(p20 < expected);

    // for a temperature-independent spec the product is just mu * T
    Material scalar = gold_film();
    scalar.mobility = ScalarMobility{1.3};
    const double ps = mobility_temperature_product(scalar, 412.0, codata()).value;
    CHECK_REL(ps, mobility_to_cgs(1.3) * 412.0, 1e-14);

    const Material film = gold_film();
    CHECK_REL(mobility_temperature_product(film, 330.0, codata()).value,
              oracle::kVossMuCgs * 330.0, 1e-12);

    CHECK_THROWS_WITH_AS(mobility_temperature_product(m, 0.0, codata()),
                         Contains("temperature must be positive"), input_error);
}
