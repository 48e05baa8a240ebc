#include "flicker/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace flicker::spectral {

using quadrature::OscResult;
using quadrature::power_sine_integral;

CorrelationResult correlation_from_odd_psd(double A, double tau, double F,
                                           double tol) {
    if (!(A >= 0.0)) throw input_error("spectrum amplitude must be nonnegative");
    if (!(F > 0.0)) throw input_error("band cutoff must be positive");
    CorrelationResult out;
    if (tau == 0.0 || A == 0.0) {
        out.exact = true;
        return out;  // odd integrand, the correlation vanishes at tau = 0
    }
    const double sign = tau > 0.0 ? 1.0 : -1.0;
    if (std::isinf(F)) {
        out.value = sign * A / 2.0;  // Si(inf) = pi/2
        out.exact = true;
        return out;
    }
    const OscResult band = power_sine_integral(1.0, std::abs(tau), F, tol);
    out.value = sign * (A / M_PI) * band.value;
    out.err_estimate = (A / M_PI) * band.err_estimate;
    out.tail_bound = (A / M_PI) * band.tail_bound;
    out.converged = band.converged;
    return out;
}

namespace {

double even_band_integral(double gamma, double F) {
    // int_{1/F}^{F} f^-gamma df, the band power of the absolute-value spectrum
    if (gamma == 1.0) return 2.0 * std::log(F);
    return (std::pow(F, 1.0 - gamma) - std::pow(F, gamma - 1.0)) / (1.0 - gamma);
}

}  // namespace

ConvergenceReport total_power_convergence(double gamma, double tau,
                                          const std::vector<double>& F_sequence,
                                          double tol) {
    if (!(gamma > 0.0 && gamma < 2.0))
        throw input_error(
            "exponent outside (0, 2): odd continuation does not converge");
    if (tau == 0.0) throw input_error("lag must be nonzero");
    if (F_sequence.size() < 2)
        throw input_error("need at least two cutoffs to judge convergence");
    for (std::size_t i = 0; i + 1 < F_sequence.size(); ++i)
        if (!(F_sequence[i] > 0.0 && F_sequence[i] < F_sequence[i + 1]))
            throw input_error("cutoff sequence must be positive and increasing");

    const double sign = tau > 0.0 ? 1.0 : -1.0;
    const double at = std::abs(tau);

    ConvergenceReport rep;
    rep.entries.reserve(F_sequence.size());
    for (double F : F_sequence) {
        const OscResult band = power_sine_integral(gamma, at, F, tol);
        ConvergenceEntry e;
        e.F = F;
        e.value = sign * band.value;
        e.tail_bound = band.tail_bound;
        e.even_diagnostic = even_band_integral(gamma, F);
        rep.entries.push_back(e);
    }

    const OscResult full = power_sine_integral(
        gamma, at, std::numeric_limits<double>::infinity(), tol);
    rep.limit_estimate = sign * full.value;

    // Cauchy check: each successive difference must respect the half-period
    // bound of the earlier cutoff, and both the differences and the bounds
    // themselves must be heading down across the sequence.
    const double scale = std::max(std::abs(rep.limit_estimate), 1e-300);
    bool cauchy = true;
    double first_diff = 0.0, last_diff = 0.0;
    for (std::size_t i = 0; i + 1 < rep.entries.size(); ++i) {
        const double diff =
            std::abs(rep.entries[i + 1].value - rep.entries[i].value);
        const double bound = rep.entries[i].tail_bound;
        if (diff > bound * (1.0 + 1e-9) + 1e-14 * scale) cauchy = false;
        if (i == 0) first_diff = diff;
        last_diff = diff;
    }
    const double first_bound = rep.entries.front().tail_bound;
    const double final_bound = rep.entries.back().tail_bound;
    rep.convergent = cauchy && last_diff <= first_diff + 1e-14 * scale &&
                     final_bound <= first_bound;

    // The even continuation grows like a power (or log) of the cutoff.
    rep.even_diverges = true;
    if (gamma == 1.0) {
        rep.even_growth = "log F";
    } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "F^%g", std::abs(1.0 - gamma));
        rep.even_growth = buf;
    }
    return rep;
}

ParityParts psd_parity_decompose(const SpectrumSeries& s) {
    const std::size_t n = s.omega.size();
    if (n == 0) throw input_error("empty spectrum");
    if (s.value.size() != n)
        throw input_error("spectrum grid and values differ in length");
    if (n % 2 != 0)
        throw input_error("grid must pair every +w with a -w (even length, no zero)");
    double wscale = 0.0;
    for (double w : s.omega) wscale = std::max(wscale, std::abs(w));
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(s.omega[i] < s.omega[i + 1]))
            throw input_error("grid must be strictly increasing");
    for (std::size_t i = 0; i < n; ++i) {
        if (s.omega[i] == 0.0)
            throw input_error("grid must not contain zero frequency");
        const double mismatch = std::abs(s.omega[i] + s.omega[n - 1 - i]);
        if (mismatch > 1e-12 * wscale)
            throw input_error("grid must be symmetric about zero");
    }

    ParityParts out;
    out.even_real.resize(n);
    out.odd_imag.resize(n);
    out.residual.resize(n);
    double in2 = 0.0, res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> sp = s.value[i];
        const std::complex<double> sm = s.value[n - 1 - i];  // S(-w)
        out.even_real[i] = 0.5 * (sp.real() + sm.real());
        out.odd_imag[i] = 0.5 * (sp.imag() - sm.imag());
        const std::complex<double> rec(out.even_real[i], out.odd_imag[i]);
        out.residual[i] = sp - rec;
        in2 += std::norm(sp);
        res2 += std::norm(out.residual[i]);
    }
    out.input_norm = std::sqrt(in2);
    out.residual_norm = std::sqrt(res2);
    return out;
}

}  // namespace flicker::spectral
