#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "flicker/errors.hpp"
#include "flicker/quadrature.hpp"
#include "flicker/spectral.hpp"
#include "oracles.hpp"

using namespace flicker;
using namespace flicker::spectral;
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

constexpr double kInf = std::numeric_limits<double>::infinity();

SpectrumSeries series(std::vector<double> w,
                      std::vector<std::complex<double>> v) {
    return SpectrumSeries{std::move(w), std::move(v)};
}

// the standard eight-point grid used below
const std::vector<double> kGrid{-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0};

}  // namespace

TEST_CASE("correlation closed forms: zero lag, infinite band, sign of tau") {
    auto zero = correlation_from_odd_psd(1.0, 0.0, 10.0);
    CHECK(zero.value == 0.0);
    CHECK(zero.exact);
    CHECK(zero.err_estimate == 0.0);
    CHECK(zero.tail_bound == 0.0);

    auto dead = correlation_from_odd_psd(0.0, 2.5, 10.0);
    CHECK(dead.value == 0.0);
    CHECK(dead.exact);

    auto full = correlation_from_odd_psd(3.0, 1.0, kInf);
    CHECK(full.value == 1.5);
    CHECK(full.exact);
    auto fullneg = correlation_from_odd_psd(3.0, -1.0, kInf);
    CHECK(fullneg.value == -1.5);

    // finite-band results are odd in tau, bit for bit
    auto plus = correlation_from_odd_psd(2.0, 0.7, 5.0);
    auto minus = correlation_from_odd_psd(2.0, -0.7, 5.0);
    CHECK(minus.value == -plus.value);
    CHECK(minus.err_estimate == plus.err_estimate);
    CHECK(minus.tail_bound == plus.tail_bound);
    CHECK_FALSE(plus.exact);
    CHECK(plus.converged);
}

TEST_CASE("band-limited correlation matches the sine-integral table") {
    // F at the first spectral zero: the ringing overshoot peak
    auto gibbs = correlation_from_odd_psd(1.0, 1.0, 0.5);
    CHECK_REL(gibbs.value, oracle::kGibbsPoint, 1e-12);
    CHECK_REL(gibbs.value, oracle::kSiPi / M_PI, 1e-12);
    // overshoot above the asymptotic level, not below
    CHECK(gibbs.value > 0.5);

    // spot values against the frozen table, value = (A/pi) Si(2 pi F tau)
    auto s1 = correlation_from_odd_psd(1.0, 1.0 / (2.0 * M_PI), 1.0);
    CHECK_REL(s1.value, oracle::kSi1 / M_PI, 1e-12);
    auto s10 = correlation_from_odd_psd(1.0, 10.0 / (2.0 * M_PI), 1.0);
    CHECK_REL(s10.value, oracle::kSi10 / M_PI, 1e-12);

    // deep band: 2 pi F tau = 1e3 sits within half a percent of A/2
    auto deep = correlation_from_odd_psd(1.0, 1.0, 1e3 / (2.0 * M_PI));
    CHECK_REL(deep.value, oracle::kSi1000 / M_PI, 1e-12);
    CHECK(std::abs(deep.value - 0.5) <= 0.005 * 0.5);
    CHECK(std::abs(deep.value - 0.5) <= deep.tail_bound + 1e-14);

    // amplitude enters linearly, including the error fields
    auto a1 = correlation_from_odd_psd(1.0, 0.3, 7.5);
    auto a3 = correlation_from_odd_psd(3.0, 0.3, 7.5);
    CHECK_REL(a3.value, 3.0 * a1.value, 1e-15);
    CHECK_REL(a3.tail_bound, 3.0 * a1.tail_bound, 1e-15);

    // small-lag limit: c ~ 2 A F tau
    auto tiny = correlation_from_odd_psd(1.0, 1e-9, 1.0);
    CHECK_REL(tiny.value, 2e-9, 1e-12);

    CHECK_THROWS_WITH_AS(correlation_from_odd_psd(-1.0, 1.0, 1.0),
                         Contains("amplitude must be nonnegative"), input_error);
    CHECK_THROWS_WITH_AS(correlation_from_odd_psd(1.0, 1.0, 0.0),
                         Contains("band cutoff must be positive"), input_error);
    CHECK_THROWS_WITH_AS(correlation_from_odd_psd(1.0, 1.0, -2.0),
                         Contains("band cutoff must be positive"), input_error);
}

TEST_CASE("odd band power settles onto the closed-form limit") {
    // cutoffs aligned with the integrand's zeros at multiples of 1/(2 tau)
    const std::vector<double> cuts{0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};

    for (double gamma : {0.5, 1.0, 1.5}) {
        CAPTURE(gamma);
        auto rep = total_power_convergence(gamma, 1.0, cuts, 1e-9);
        REQUIRE(rep.entries.size() == cuts.size());
        CHECK(rep.convergent);
        CHECK_REL(rep.limit_estimate, oracle::power_sine_limit(gamma, 1.0),
                  5e-9);

        // the last band value sits within its own tail bound of the limit
        const auto& last = rep.entries.back();
        CHECK(std::abs(rep.limit_estimate - last.value) <=
              last.tail_bound * (1.0 + 1e-9) + 1e-12 * std::abs(rep.limit_estimate));

        // bounds shrink along the sequence
        CHECK(rep.entries.front().tail_bound > last.tail_bound);
    }

    // gamma = 1 is the flicker case: band value is Si(2 pi F), limit pi/2
    auto flicker_rep = total_power_convergence(1.0, 1.0, cuts, 1e-9);
    CHECK_REL(flicker_rep.entries[0].value, oracle::kSiPi, 1e-12);
    CHECK_REL(flicker_rep.limit_estimate, M_PI / 2.0, 5e-9);

    // negative lag flips every signed field exactly
    auto neg = total_power_convergence(1.0, -1.0, cuts, 1e-9);
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        CHECK(neg.entries[i].value == -flicker_rep.entries[i].value);
        CHECK(neg.entries[i].tail_bound == flicker_rep.entries[i].tail_bound);
    }
    CHECK(neg.limit_estimate == -flicker_rep.limit_estimate);
    CHECK(neg.convergent);
}

TEST_CASE("randomized exponents and lags reach their limits") {
    std::mt19937_64 rng = oracle::rng(91);
    std::uniform_real_distribution<double> gdist(0.1, 1.9);
    std::uniform_real_distribution<double> tdist(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double gamma = gdist(rng);
        const double tau = std::copysign(std::pow(10.0, tdist(rng)),
                                         trial % 2 ? -1.0 : 1.0);
        CAPTURE(gamma);
        CAPTURE(tau);
        const double f1 = 1.0 / (2.0 * std::abs(tau));
        auto rep = total_power_convergence(
            gamma, tau, {f1, 2.0 * f1, 4.0 * f1, 8.0 * f1, 16.0 * f1}, 1e-9);
        CHECK(rep.convergent);
        const double sign = tau > 0.0 ? 1.0 : -1.0;
        CHECK_REL(rep.limit_estimate,
                  sign * oracle::power_sine_limit(gamma, std::abs(tau)), 5e-9);
    }
}

TEST_CASE("even continuation diverges for every admissible exponent") {
    const std::vector<double> cuts{2.0, 4.0, 16.0, 256.0};

    auto half = total_power_convergence(0.5, 1.0, cuts, 1e-9);
    CHECK(half.even_diverges);
    CHECK(half.even_growth == "F^0.5");

    auto one = total_power_convergence(1.0, 1.0, cuts, 1e-9);
    CHECK(one.even_diverges);
    CHECK(one.even_growth == "log F");

    auto threehalf = total_power_convergence(1.5, 1.0, cuts, 1e-9);
    CHECK(threehalf.even_diverges);
    CHECK(threehalf.even_growth == "F^0.5");

    // the diagnostic follows its closed band integral and keeps growing
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const double F = cuts[i];
        CHECK_REL(one.entries[i].even_diagnostic, 2.0 * std::log(F), 1e-13);
        const double root_band = 2.0 * (std::sqrt(F) - 1.0 / std::sqrt(F));
        CHECK_REL(half.entries[i].even_diagnostic, root_band, 1e-13);
        CHECK_REL(threehalf.entries[i].even_diagnostic, root_band, 1e-13);
        if (i > 0) {
            CHECK(one.entries[i].even_diagnostic >
                  one.entries[i - 1].even_diagnostic);
            CHECK(threehalf.entries[i].even_diagnostic >
                  threehalf.entries[i - 1].even_diagnostic);
        }
    }

    // meanwhile the odd band integral has long since stopped moving
    const double last_step = std::abs(threehalf.entries[3].value -
                                      threehalf.entries[2].value);
    const double first_step = std::abs(threehalf.entries[1].value -
                                       threehalf.entries[0].value);
    CHECK(last_step < first_step);
}

TEST_CASE("convergence study rejects malformed requests") {
    const std::vector<double> cuts{1.0, 2.0};
    CHECK_THROWS_WITH_AS(total_power_convergence(0.0, 1.0, cuts),
                         Contains("exponent outside (0, 2)"), input_error);
    CHECK_THROWS_WITH_AS(total_power_convergence(2.0, 1.0, cuts),
                         Contains("exponent outside (0, 2)"), input_error);
    CHECK_THROWS_WITH_AS(total_power_convergence(-0.5, 1.0, cuts),
                         Contains("exponent outside (0, 2)"), input_error);
    CHECK_THROWS_WITH_AS(total_power_convergence(1.0, 0.0, cuts),
                         Contains("lag must be nonzero"), input_error);
    CHECK_THROWS_WITH_AS(total_power_convergence(1.0, 1.0, {5.0}),
                         Contains("need at least two cutoffs"), input_error);
    CHECK_THROWS_WITH_AS(total_power_convergence(1.0, 1.0, {2.0, 1.0}),
                         Contains("must be positive and increasing"),
                         input_error);
    CHECK_THROWS_WITH_AS(total_power_convergence(1.0, 1.0, {-1.0, 1.0}),
                         Contains("must be positive and increasing"),
                         input_error);
}

TEST_CASE("parity split recognises a pure odd imaginary spectrum") {
    // S = -i A / w, the shape produced by the noise engine
    const double A = 2.25;
    std::vector<std::complex<double>> v;
    for (double w : kGrid) v.emplace_back(0.0, -A / w);
    auto parts = psd_parity_decompose(series(kGrid, v));

    for (std::size_t i = 0; i < kGrid.size(); ++i) {
        CHECK(parts.even_real[i] == 0.0);
        CHECK(parts.odd_imag[i] == -A / kGrid[i]);
        CHECK(parts.residual[i] == std::complex<double>(0.0, 0.0));
    }
    CHECK(parts.residual_norm == 0.0);
    CHECK(parts.input_norm > 0.0);
}

TEST_CASE("parity split separates polynomial even and odd parts exactly") {
    // S = w^2 + i w^3: even real plus odd imaginary, nothing left over
    std::vector<std::complex<double>> v;
    for (double w : kGrid) v.emplace_back(w * w, w * w * w);
    auto parts = psd_parity_decompose(series(kGrid, v));
    for (std::size_t i = 0; i < kGrid.size(); ++i) {
        const double w = kGrid[i];
        CHECK(parts.even_real[i] == w * w);
        CHECK(parts.odd_imag[i] == w * w * w);
        CHECK(parts.residual[i] == std::complex<double>(0.0, 0.0));
    }
    CHECK(parts.residual_norm == 0.0);

    // S = w (odd real): entirely residual
    std::vector<std::complex<double>> odd_real;
    for (double w : kGrid) odd_real.emplace_back(w, 0.0);
    auto rej = psd_parity_decompose(series(kGrid, odd_real));
    for (std::size_t i = 0; i < kGrid.size(); ++i) {
        CHECK(rej.even_real[i] == 0.0);
        CHECK(rej.odd_imag[i] == 0.0);
        CHECK(rej.residual[i] == odd_real[i]);
    }
    CHECK(rej.residual_norm == rej.input_norm);

    // S = i w^2 (even imaginary): also entirely residual
    std::vector<std::complex<double>> even_imag;
    for (double w : kGrid) even_imag.emplace_back(0.0, w * w);
    auto rej2 = psd_parity_decompose(series(kGrid, even_imag));
    CHECK(rej2.residual_norm == rej2.input_norm);
    for (std::size_t i = 0; i < kGrid.size(); ++i)
        CHECK(rej2.odd_imag[i] == 0.0);
}

TEST_CASE("parity split reconstructs, projects, and preserves power") {
    std::mt19937_64 rng = oracle::rng(92);
    std::normal_distribution<double> gauss;

    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::complex<double>> v;
        for (std::size_t i = 0; i < kGrid.size(); ++i)
            v.emplace_back(gauss(rng), gauss(rng));
        auto parts = psd_parity_decompose(series(kGrid, v));

        // re-adding the parts recovers the sample to an ulp
        for (std::size_t i = 0; i < kGrid.size(); ++i) {
            const std::complex<double> rec(parts.even_real[i],
                                           parts.odd_imag[i]);
            CHECK(std::abs(rec + parts.residual[i] - v[i]) <=
                  1e-15 * (std::abs(v[i]) + 1.0));
        }

        // decomposing the classified part again changes nothing
        std::vector<std::complex<double>> cls;
        for (std::size_t i = 0; i < kGrid.size(); ++i)
            cls.emplace_back(parts.even_real[i], parts.odd_imag[i]);
        auto again = psd_parity_decompose(series(kGrid, cls));
        CHECK(again.residual_norm == 0.0);
        for (std::size_t i = 0; i < kGrid.size(); ++i) {
            CHECK(again.even_real[i] == parts.even_real[i]);
            CHECK(again.odd_imag[i] == parts.odd_imag[i]);
        }

        // the residual itself carries no classifiable part
        std::vector<std::complex<double>> res(parts.residual);
        auto anti = psd_parity_decompose(series(kGrid, res));
        for (std::size_t i = 0; i < kGrid.size(); ++i) {
            CHECK(std::abs(anti.even_real[i]) <= 1e-15 * parts.input_norm);
            CHECK(std::abs(anti.odd_imag[i]) <= 1e-15 * parts.input_norm);
        }

        // the three parts are orthogonal: power adds up
        double cls2 = 0.0;
        for (std::size_t i = 0; i < kGrid.size(); ++i)
            cls2 += parts.even_real[i] * parts.even_real[i] +
                    parts.odd_imag[i] * parts.odd_imag[i];
        const double in2 = parts.input_norm * parts.input_norm;
        const double sum2 = cls2 + parts.residual_norm * parts.residual_norm;
        CHECK(std::abs(sum2 - in2) <= 1e-13 * in2);
    }
}

TEST_CASE("parity split rejects grids it cannot pair") {
    CHECK_THROWS_WITH_AS(psd_parity_decompose(series({}, {})),
                         Contains("empty spectrum"), input_error);
    CHECK_THROWS_WITH_AS(
        psd_parity_decompose(series({-1.0, 1.0}, {{1.0, 0.0}})),
        Contains("grid and values differ in length"), input_error);
    CHECK_THROWS_WITH_AS(
        psd_parity_decompose(
            series({-1.0, 1.0, 2.0}, {{1, 0}, {1, 0}, {1, 0}})),
        Contains("pair every +w with a -w"), input_error);
    CHECK_THROWS_WITH_AS(
        psd_parity_decompose(
            series({1.0, -1.0, -2.0, 2.0}, {{1, 0}, {1, 0}, {1, 0}, {1, 0}})),
        Contains("strictly increasing"), input_error);
    CHECK_THROWS_WITH_AS(
        psd_parity_decompose(
            series({-2.0, 0.0, 1.0, 2.0}, {{1, 0}, {1, 0}, {1, 0}, {1, 0}})),
        Contains("must not contain zero frequency"), input_error);
    CHECK_THROWS_WITH_AS(
        psd_parity_decompose(
            series({-3.0, -1.0, 1.0, 2.0}, {{1, 0}, {1, 0}, {1, 0}, {1, 0}})),
        Contains("symmetric about zero"), input_error);
}
