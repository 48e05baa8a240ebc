#include "flicker/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace flicker::noise {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::complex<double> kI{0.0, 1.0};
}  // namespace

void BiasCondition::validate() const {
    if (!(U0_statvolt >= 0.0)) throw input_error("bias voltage must be nonnegative");
    if (!(T_K > 0.0)) throw input_error("temperature must be positive");
}

double eta_coefficient(Quantity g, Quantity mu, double T_K, const Constants& k) {
    if (!(g.dim == Dimension::inv_length()))
        throw input_error("eta_coefficient: first argument is not an inverse length");
    if (!(mu.dim == Dimension::mobility()))
        throw input_error("eta_coefficient: second argument is not a mobility");
    const double g_cgs = convert(g, UnitSystem::CGS).value;
    const double mu_cgs = convert(mu, UnitSystem::CGS).value;
    if (!(g_cgs > 0.0)) throw input_error("geometric factor must be positive");
    if (!(mu_cgs > 0.0)) throw input_error("mobility must be positive");
    if (!(T_K > 0.0)) throw input_error("temperature must be positive");
    return k.eta_prefactor * g_cgs * mu_cgs * T_K;
}

Quantity voltage_psd(double eta, Quantity U0, double f_hz, UnitSystem out) {
    if (!(eta >= 0.0)) throw input_error("eta must be nonnegative");
    if (!(U0.dim == Dimension::voltage()))
        throw input_error("voltage_psd: second argument is not a voltage");
    if (!(f_hz > 0.0))
        throw input_error("spectrum has a pole at zero frequency; need f > 0");
    const double u = convert(U0, UnitSystem::CGS).value;
    const double val = eta * u * u / (kTwoPi * f_hz);
    return convert(Quantity::cgs(val, Dimension::spectral_density()), out);
}

std::complex<double> voltage_psd_complex(double eta, Quantity U0, double omega) {
    if (!(eta >= 0.0)) throw input_error("eta must be nonnegative");
    if (!(U0.dim == Dimension::voltage()))
        throw input_error("voltage_psd: second argument is not a voltage");
    if (omega == 0.0)
        throw input_error("spectrum has a pole at zero frequency; need omega != 0");
    const double u = convert(U0, UnitSystem::CGS).value;
    return -kI * eta * u * u / omega;
}

Quantity NoisePrediction::psd(double f_hz, UnitSystem out) const {
    return voltage_psd(eta, Quantity::cgs(U0_statvolt, Dimension::voltage()), f_hz,
                       out);
}

std::complex<double> NoisePrediction::psd_complex(double omega) const {
    return voltage_psd_complex(eta, Quantity::cgs(U0_statvolt, Dimension::voltage()),
                               omega);
}

NoisePrediction make_prediction(Quantity g, Quantity mu, const BiasCondition& bias,
                                const Constants& k) {
    bias.validate();
    NoisePrediction p;
    p.eta = eta_coefficient(g, mu, bias.T_K, k);
    p.g_cm_inv = convert(g, UnitSystem::CGS).value;
    p.mu_cgs = convert(mu, UnitSystem::CGS).value;
    p.T_K = bias.T_K;
    p.U0_statvolt = bias.U0_statvolt;
    return p;
}

DriftField homogeneous_drift(Vec3 v_cm_s) {
    return [v_cm_s](const Vec3&) { return v_cm_s; };
}

DriftField linear_response_drift(double mu_cgs, Vec3 E_statvolt_cm) {
    const Vec3 v = mu_cgs * E_statvolt_cm;
    return [v](const Vec3&) { return v; };
}

GeneralSpectrumResult general_spectrum(const geometry::SampleGeometry& geom,
                                       const geometry::LeadPair& leads,
                                       const DriftField& vbar, Vec3 E_statvolt_cm,
                                       double beta_inv_erg, double omega,
                                       const Constants& k,
                                       const geometry::QuadratureConfig& cfg,
                                       Warnings* warn) {
    if (!vbar) throw input_error("drift field is empty");
    if (!(beta_inv_erg > 0.0)) throw input_error("inverse temperature must be positive");
    if (omega == 0.0)
        throw input_error("spectrum has a pole at zero frequency; need omega != 0");

    const auto weight = [&](const Vec3& r) { return E_statvolt_cm.dot(vbar(r)); };
    const geometry::WeightedIntegral J =
        geometry::weighted_pair_integral(geom, leads, weight, cfg, warn);

    const double sep2 = (leads.xp - leads.x).norm2();
    // eta_prefactor carries 2 e^3 / (3 hbar^2 c^3) times k_B; dividing the
    // Boltzmann constant back out leaves the coefficient the drift integral
    // needs, and keeps the two constant sets consistent with eta_coefficient.
    const double coeff = k.eta_prefactor / (k.k_B * beta_inv_erg);

    GeneralSpectrumResult res;
    res.value = -kI * coeff * sep2 * J.value / omega;
    res.err_estimate = std::abs(coeff) * sep2 * J.err_estimate / std::abs(omega);
    res.converged = J.converged;
    res.evaluations = J.evaluations;
    res.backend = J.backend;
    return res;
}

std::complex<double> zero_field_green(const ZeroFieldState& st, Vec3 x,
                                      double beta, double omega,
                                      const Constants& k) {
    if (!(st.m_g > 0.0)) throw input_error("carrier mass must be positive");
    if (!(beta > 0.0)) throw input_error("inverse temperature must be positive");
    if (omega == 0.0)
        throw input_error("kernel has a pole at zero frequency; need omega != 0");
    const Vec3 rp = x - st.x0;
    const double r = rp.norm();
    if (!(r > 0.0))
        throw input_error("observation point coincides with the localization center");
    const double c3 = k.c * k.c * k.c;
    const double amp = -2.0 * k.e * k.e * st.qbar.dot(rp) /
                       (st.m_g * st.m_g * beta * omega * r * r * r * c3);
    return kI * amp;
}

ZeroFieldPsd zero_field_voltage_psd(const ZeroFieldState& st, Vec3 x, Vec3 xp,
                                    double beta, double omega, const Constants& k) {
    ZeroFieldPsd out;
    // The kernel depends only on the second (source-side) argument, so the
    // four pieces pair up and cancel. Assemble them naively anyway: the test
    // for the null result is only meaningful if the cancellation happens here.
    const std::complex<double> g_x = zero_field_green(st, x, beta, omega, k);
    const std::complex<double> g_xp = zero_field_green(st, xp, beta, omega, k);
    out.terms = {g_x, g_xp, g_xp, g_x};
    out.value = out.terms[0] + out.terms[1] - out.terms[2] - out.terms[3];
    return out;
}

const char* to_string(BoundStatus s) {
    switch (s) {
        case BoundStatus::Pass: return "pass";
        case BoundStatus::Warn: return "warn";
        case BoundStatus::Fail: return "fail";
    }
    return "?";
}

namespace {

BoundStatus status_of(double margin) {
    if (!(margin >= 0.0)) return BoundStatus::Fail;  // catches NaN
    if (margin < 0.01) return BoundStatus::Pass;
    if (margin < 1.0) return BoundStatus::Warn;
    return BoundStatus::Fail;
}

}  // namespace

BoundStatus ValidityReport::worst() const {
    BoundStatus w = BoundStatus::Pass;
    for (const auto& e : entries)
        if (static_cast<int>(e.status) > static_cast<int>(w)) w = e.status;
    return w;
}

ValidityReport validity_report(const transport::Material& mat,
                               const BiasCondition& bias, double lead_sep_cm,
                               double f_lo, double f_hi, const Constants& k) {
    mat.validate();
    bias.validate();
    if (!(f_lo > 0.0 && f_hi >= f_lo))
        throw input_error("frequency band must satisfy 0 < f_lo <= f_hi");
    if (!(lead_sep_cm >= 0.0)) throw input_error("lead separation must be nonnegative");

    ValidityReport rep;
    Warnings mob_warn;
    const double mu = transport::effective_mobility(mat, bias.T_K, k, &mob_warn).value;
    for (auto& w : mob_warn) rep.notes.push_back(std::move(w));

    {
        BoundEntry e;
        e.name = "bias-softness";
        e.value = mu * bias.U0_statvolt * bias.U0_statvolt;
        e.threshold = k.soft_bound_rhs;
        e.margin = e.value / e.threshold;
        e.status = status_of(e.margin);
        if (e.status == BoundStatus::Fail)
            e.note = "bias too hard: the soft-potential expansion is unreliable";
        rep.entries.push_back(e);
    }

    const double field_coeff = k.field_bound_coeff >= 0.0
                                   ? k.field_bound_coeff
                                   : mat.d_cm * mat.m_g / k.e;
    double E;  // statvolt/cm between the leads
    if (bias.U0_statvolt == 0.0)
        E = 0.0;
    else if (lead_sep_cm == 0.0)
        E = std::numeric_limits<double>::infinity();
    else
        E = bias.U0_statvolt / lead_sep_cm;
    const double f_star = E > 0.0 ? std::sqrt(E / field_coeff) / kTwoPi : 0.0;
    {
        BoundEntry e;  // worst at the low end: the threshold grows as omega^2
        e.name = "field-weakness";
        e.value = E;
        const double w_lo = kTwoPi * f_lo;
        e.threshold = field_coeff * w_lo * w_lo;
        e.margin = e.value / e.threshold;
        e.status = status_of(e.margin);
        if (e.status == BoundStatus::Fail) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "strong-field regime below %.3g Hz: the linear-in-field "
                          "spectrum does not apply there",
                          f_star);
            e.note = buf;
            rep.notes.push_back(e.note);
        }
        rep.entries.push_back(e);
    }

    const double f_quantum = k.freq_temp_coeff * bias.T_K;
    {
        BoundEntry e;  // worst at the high end
        e.name = "quantum-window";
        e.value = f_hi;
        e.threshold = f_quantum;
        e.margin = e.value / e.threshold;
        e.status = status_of(e.margin);
        if (e.status == BoundStatus::Fail)
            e.note = "band reaches quantum frequencies: classical occupation "
                     "replacement breaks down";
        rep.entries.push_back(e);
    }

    double lo = std::max(f_lo, f_star);
    double hi = std::min(f_hi, f_quantum);
    if (rep.entries[0].margin >= 1.0 || !(rep.entries[0].margin >= 0.0)) {
        rep.trusted_window_empty = true;  // bias bound is frequency independent
        lo = 0.0;
        hi = 0.0;
    } else if (!(lo < hi)) {
        rep.trusted_window_empty = true;
    }
    rep.trusted_f_lo = lo;
    rep.trusted_f_hi = hi;
    return rep;
}

BoseCheck bose_approx_error(double omega, double T_K, const Constants& k) {
    if (!(omega > 0.0)) throw input_error("frequency must be positive");
    if (!(T_K > 0.0)) throw input_error("temperature must be positive");
    BoseCheck b;
    b.x = k.hbar_over_k * omega / T_K;
    b.exact = 1.0 / std::expm1(b.x);
    b.approx = 1.0 / b.x;
    b.rel_error = (b.approx - b.exact) / b.exact;
    return b;
}

}  // namespace flicker::noise
