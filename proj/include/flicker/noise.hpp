#pragma once
// The voltage-noise engine: the dimensionless coefficient eta, the 1/f
// voltage spectrum in both conventions, the general two-lead spectrum as a
// volume integral over the drift field, the zero-drift cancellation, and
// the applicability diagnostics that decide how far to trust all of it.
//
// Everything internal is CGS; outputs convert on request.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "flicker/errors.hpp"
#include "flicker/geometry.hpp"
#include "flicker/transport.hpp"
#include "flicker/units.hpp"
#include "flicker/vec3.hpp"

namespace flicker::noise {

struct BiasCondition {
    double U0_statvolt = 0.0;  // voltage across the leads
    double T_K = 0.0;

    void validate() const;  // U0 >= 0, T > 0
};

// eta = prefactor * g * mu * T; dimensionless, order 1e-14 for metal films.
double eta_coefficient(Quantity g, Quantity mu, double T_K, const Constants& k);

// One-sided real spectrum eta U0^2 / (2 pi f); f > 0. Output V^2/Hz in SI.
Quantity voltage_psd(double eta, Quantity U0, double f_hz, UnitSystem out);

// Two-sided odd convention, -i eta U0^2 / omega; purely imaginary, odd.
std::complex<double> voltage_psd_complex(double eta, Quantity U0, double omega);

struct NoisePrediction {
    double eta = 0.0;
    double g_cm_inv = 0.0;
    double mu_cgs = 0.0;
    double T_K = 0.0;
    double U0_statvolt = 0.0;

    Quantity psd(double f_hz, UnitSystem out) const;
    std::complex<double> psd_complex(double omega) const;
};

NoisePrediction make_prediction(Quantity g, Quantity mu, const BiasCondition& bias,
                                const Constants& k);

// Mean drift velocity as a field over the sample, cm/s.
using DriftField = std::function<Vec3(const Vec3&)>;

DriftField homogeneous_drift(Vec3 v_cm_s);
DriftField linear_response_drift(double mu_cgs, Vec3 E_statvolt_cm);

struct GeneralSpectrumResult {
    std::complex<double> value;  // statvolt^2 s at angular frequency omega
    double err_estimate = 0.0;
    bool converged = true;
    std::uint64_t evaluations = 0;
    std::string backend;
};

// Two-lead voltage spectrum for an arbitrary drift profile:
//   -i * K * T * |x' - x|^2 * (1/V) int (E . vbar(r)) (1/|r-x| + 1/|r-x'|) / omega
// For vbar = mu E and E = U0/|x'-x| this collapses to -i eta U0^2 / omega,
// which the tests pin against eta_coefficient.
GeneralSpectrumResult general_spectrum(const geometry::SampleGeometry& geom,
                                       const geometry::LeadPair& leads,
                                       const DriftField& vbar, Vec3 E_statvolt_cm,
                                       double beta_inv_erg, double omega,
                                       const Constants& k,
                                       const geometry::QuadratureConfig& cfg,
                                       Warnings* warn = nullptr);

// An unbiased localized carrier: no drift, only the mean momentum survives.
struct ZeroFieldState {
    Vec3 x0;          // localization center, cm
    Vec3 qbar;        // mean momentum, g cm/s
    double m_g = 0.0;
};

// Potential-correlation kernel at observation point x. Purely imaginary,
// odd in omega, and independent of which lead asks: that independence is
// what kills the voltage spectrum below.
std::complex<double> zero_field_green(const ZeroFieldState& st, Vec3 x,
                                      double beta, double omega,
                                      const Constants& k);

struct ZeroFieldPsd {
    std::complex<double> value;                 // the full two-lead assembly
    std::array<std::complex<double>, 4> terms;  // xx, x'x', xx', x'x pieces
};

// C(x,x) + C(x',x') - C(x,x') - C(x',x); cancels identically because the
// kernel depends only on its second argument.
ZeroFieldPsd zero_field_voltage_psd(const ZeroFieldState& st, Vec3 x, Vec3 xp,
                                    double beta, double omega, const Constants& k);

enum class BoundStatus { Pass, Warn, Fail };

const char* to_string(BoundStatus s);

struct BoundEntry {
    std::string name;
    double value = 0.0;      // the physical combination being bounded
    double threshold = 0.0;  // what it must stay well below
    double margin = 0.0;     // value / threshold
    BoundStatus status = BoundStatus::Pass;
    std::string note;
};

struct ValidityReport {
    std::vector<BoundEntry> entries;
    double trusted_f_lo = 0.0;  // Hz; empty window reported separately
    double trusted_f_hi = 0.0;
    bool trusted_window_empty = false;
    std::vector<std::string> notes;

    BoundStatus worst() const;
};

// Checks the three applicability bounds over [f_lo, f_hi]:
//   - bias softness:    mu U0^2 well below c^2 hbar/e (frequency independent)
//   - field weakness:   U0/sep well below (d m / e) omega^2, worst at f_lo
//   - quantum regime:   f well below (k/hbar) T, worst at f_hi
// margin = value/threshold; pass < 0.01, warn < 1, fail >= 1. A failing
// field bound attaches an explanatory note rather than throwing: callers
// report, they do not refuse.
ValidityReport validity_report(const transport::Material& mat,
                               const BiasCondition& bias, double lead_sep_cm,
                               double f_lo, double f_hi, const Constants& k);

struct BoseCheck {
    double x = 0.0;      // hbar omega / k T
    double exact = 0.0;  // 1 / (e^x - 1)
    double approx = 0.0; // 1 / x
    double rel_error = 0.0;
};

BoseCheck bose_approx_error(double omega, double T_K, const Constants& k);

}  // namespace flicker::noise
