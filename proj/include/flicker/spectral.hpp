#pragma once
// Odd-spectrum toolkit: band-limited correlation recovery, total-power
// convergence diagnostics, and parity decomposition of sampled spectra.
//
// The spectra handled here are purely imaginary and odd in frequency,
// S(-w) = -S(w), so the inverse transform is a sine integral and the
// total power converges where the naive even continuation would not.

#include <complex>
#include <string>
#include <vector>

#include "flicker/errors.hpp"
#include "flicker/quadrature.hpp"

namespace flicker::spectral {

struct CorrelationResult {
    double value = 0.0;
    double err_estimate = 0.0;
    double tail_bound = 0.0;  // bound on the contribution excluded above F
    bool converged = true;
    bool exact = false;  // closed form used (tau = 0 or F = inf)
};

// c(tau) = (A/pi) * Si(2 pi F |tau|) * sign(tau) for S(w) = -i A sign(w)/|w|
// restricted to |f| <= F. F may be infinite; tau = 0 gives exactly 0.
CorrelationResult correlation_from_odd_psd(double A, double tau, double F,
                                           double tol = 1e-8);

struct ConvergenceEntry {
    double F = 0.0;
    double value = 0.0;          // band integral of sin(2 pi f tau) / f^gamma
    double tail_bound = 0.0;     // first omitted half-period
    double even_diagnostic = 0.0;  // same band under |S|: int_{1/F}^{F} f^-gamma
};

struct ConvergenceReport {
    std::vector<ConvergenceEntry> entries;
    bool convergent = false;       // Cauchy behaviour of the odd band integrals
    double limit_estimate = 0.0;   // infinite-band value
    bool even_diverges = false;    // the diagnostic grows without bound
    std::string even_growth;       // "F^p" or "log F"
};

// Evaluates the band integral along an increasing cutoff sequence and
// contrasts it with the absolute-value (even) continuation, whose band
// integral diverges for every gamma in (0, 2).
ConvergenceReport total_power_convergence(double gamma, double tau,
                                          const std::vector<double>& F_sequence,
                                          double tol = 1e-8);

struct SpectrumSeries {
    std::vector<double> omega;                // symmetric grid, no zero
    std::vector<std::complex<double>> value;  // S(omega)
};

struct ParityParts {
    std::vector<double> even_real;   // Re part symmetrised
    std::vector<double> odd_imag;    // Im part antisymmetrised
    std::vector<std::complex<double>> residual;  // S - (even + i odd)
    double input_norm = 0.0;     // l2 norm of the samples
    double residual_norm = 0.0;  // exactly how much failed to classify
};

// Splits samples on a +/- symmetric grid into an even real part and an odd
// imaginary part; anything else (odd real, even imaginary) lands in the
// residual, which is stored as the exact difference S - (even + i odd).
// The three parts are l2-orthogonal up to rounding.
ParityParts psd_parity_decompose(const SpectrumSeries& s);

}  // namespace flicker::spectral
