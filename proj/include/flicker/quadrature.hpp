#pragma once
// 1D quadrature building blocks: Gauss-Legendre rules, the sine integral,
// and oscillatory integrals over sin(2 pi f tau) weights.
//
// The oscillatory integrals are split at the integrand's zeros and each
// half-period is integrated by Gauss-Legendre; infinite upper limits are
// reached by iterated averaging of the alternating partial sums. Plain
// adaptive quadrature stalls on these tails (the half-period areas decay
// like a power of the frequency), averaging converges geometrically.

#include <functional>
#include <vector>

namespace flicker::quadrature {

// n-point Gauss-Legendre rule on [-1, 1]; nodes/weights cached per n.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendre& gauss_legendre(int n);

double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    int n = 16);

// Sine integral Si(x) = int_0^x sin(u)/u du. Power series below |x| = 6,
// complex continued fraction for E1(ix) above; absolute error < 1e-12
// across the switchover.
double si(double x);

struct OscResult {
    double value = 0.0;
    double err_estimate = 0.0;  // averaging residual / series truncation
    double tail_bound = 0.0;    // area of the first omitted half-period
    int segments = 0;
    bool converged = true;
};

// I(F) = int_0^F sin(2 pi f tau) / f^gamma df with 0 < gamma < 2, tau > 0.
// Pass F = infinity for the full improper integral. The f -> 0 endpoint is
// handled by the small-argument series of sin (integrable term by term for
// gamma < 2); interior half-periods by Gauss-Legendre.
OscResult power_sine_integral(double gamma, double tau, double F, double tol);

// int_0^inf sin(u)/u * exp(-a u) du, a > 0. Equals arctan(1/a).
OscResult damped_sinc_integral(double a, double tol);

}  // namespace flicker::quadrature
