#include "flicker/quadrature.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>

#include "flicker/errors.hpp"

namespace flicker::quadrature {

namespace {

constexpr double kPi = 3.14159265358979323846;

GaussLegendre build_gauss_legendre(int n) {
    GaussLegendre rule;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    // Newton on P_n with the usual Chebyshev-flavored initial guesses;
    // nodes come out in decreasing order, filled symmetrically.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<size_t>(i)] = -x;
        rule.nodes[static_cast<size_t>(n - 1 - i)] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[static_cast<size_t>(i)] = w;
        rule.weights[static_cast<size_t>(n - 1 - i)] = w;
    }
    return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
    if (n < 1 || n > 128) throw input_error("Gauss-Legendre order out of range");
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussLegendre& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

// ---------------------------------------------------------------------------
// Sine integral
// ---------------------------------------------------------------------------

namespace {

double si_series(double x) {
    // sum (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
    double term = x;  // x^(2k+1)/(2k+1)!, k = 0
    double sum = x;   // first contribution, divided by (2k+1)=1
    for (int k = 1; k < 64; ++k) {
        term *= -x * x / ((2.0 * k) * (2.0 * k + 1.0));
        double add = term / (2.0 * k + 1.0);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

double si_continued_fraction(double x) {
    // E1(ix) by the even-contracted continued fraction with modified Lentz,
    // then Si(x) = pi/2 + Im(E1(ix)).
    using C = std::complex<double>;
    const double fpmin = std::numeric_limits<double>::min() / 1e-10;
    C z(0.0, x);
    C b = z + 1.0;
    C c(1.0 / fpmin, 0.0);
    C d = 1.0 / b;
    C h = d;
    for (int k = 1; k < 400; ++k) {
        double a = -double(k) * double(k);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        C del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    C e1 = h * C(std::cos(x), -std::sin(x));
    return kPi / 2.0 + e1.imag();
}

}  // namespace

double si(double x) {
    if (x < 0.0) return -si(-x);
    if (x == 0.0) return 0.0;
    if (x < 6.0) return si_series(x);
    return si_continued_fraction(x);
}

// ---------------------------------------------------------------------------
// Oscillatory integrals
// ---------------------------------------------------------------------------

namespace {

// Partial sums of an alternating-ish segment series with iterated averaging
// (van Wijngaarden). The averaged tail converges geometrically where the raw
// partial sums only crawl in at a power law.
class AveragedTail {
  public:
    void push(double segment) {
        partial_ += segment;
        last_segment_ = segment;
        sums_.push_back(partial_);
        if (sums_.size() > kWindow) sums_.erase(sums_.begin());
    }

    // Averaged estimate of the limit plus a residual estimate.
    void estimate(double& value, double& residual) const {
        std::vector<double> row = sums_;
        residual = std::abs(last_segment_);
        if (row.empty()) { value = 0.0; return; }
        double prev = row.back();
        while (row.size() > 1) {
            for (size_t i = 0; i + 1 < row.size(); ++i)
                row[i] = 0.5 * (row[i] + row[i + 1]);
            row.pop_back();
            // residual tracked as change across the last two depths
            if (row.size() == 1) residual = std::abs(row[0] - prev);
            prev = row[0];
        }
        value = row[0];
    }

    double raw_sum() const { return partial_; }
    double last_segment() const { return last_segment_; }
    size_t count() const { return sums_.size(); }

  private:
    static constexpr size_t kWindow = 36;
    std::vector<double> sums_;
    double partial_ = 0.0;
    double last_segment_ = 0.0;
};

// int_0^a sin(2 pi tau f) / f^gamma df by term-by-term integration of the
// sine series; valid for 2 pi tau a <= ~pi and any gamma < 2.
double small_f_series(double gamma, double tau, double a) {
    const double b = 2.0 * kPi * tau;
    const double ba = b * a;
    // term k: (-1)^k (ba)^(2k+1) / (2k+1)! * a^(1-gamma) / (2k+2-gamma)
    double pow_term = ba;  // (ba)^(2k+1)/(2k+1)!
    double scale = std::pow(a, 1.0 - gamma);
    double sum = pow_term * scale / (2.0 - gamma);
    for (int k = 1; k < 64; ++k) {
        pow_term *= -ba * ba / ((2.0 * k) * (2.0 * k + 1.0));
        double add = pow_term * scale / (2.0 * k + 2.0 - gamma);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

}  // namespace

OscResult power_sine_integral(double gamma, double tau, double F, double tol) {
    if (!(gamma > 0.0 && gamma < 2.0))
        throw input_error("exponent outside (0, 2): odd continuation does not converge");
    if (!(tau > 0.0)) throw input_error("tau must be positive");
    if (!(F > 0.0)) throw input_error("band limit must be positive");
    if (!(tol > 0.0)) tol = 1e-10;

    OscResult res;
    const double f1 = 1.0 / (2.0 * tau);  // first zero of sin(2 pi tau f)
    const bool infinite = std::isinf(F);

    auto integrand = [&](double f) {
        return std::sin(2.0 * kPi * tau * f) / std::pow(f, gamma);
    };

    // endpoint piece; F == f1 falls through so the bound covers a full
    // omitted half-period instead of the empty remainder
    if (!infinite && F < f1) {
        res.value = small_f_series(gamma, tau, F);
        res.segments = 1;
        res.tail_bound = std::abs(gl_integrate(integrand, F, f1, 16));
        res.err_estimate = 1e-16 * std::abs(res.value);
        return res;
    }

    double head = small_f_series(gamma, tau, f1);
    res.segments = 1;

    if (!infinite) {
        double sum = head;
        double fk = f1;
        long k = 1;
        while (fk < F) {
            double fnext = (k + 1) * f1;
            double upper = std::min(fnext, F);
            sum += gl_integrate(integrand, fk, upper, 16);
            ++res.segments;
            fk = fnext;
            ++k;
        }
        res.value = sum;
        // first omitted half-period, for the alternating tail bound
        double z0 = std::ceil(F / f1) * f1;
        res.tail_bound = std::abs(gl_integrate(integrand, z0, z0 + f1, 16));
        res.err_estimate = 1e-15 * std::abs(res.value);
        return res;
    }

    // infinite band: averaged alternating tail
    AveragedTail tail;
    double value = head, residual = std::abs(head);
    double fk = f1;
    const int max_segments = 4000;
    for (int k = 1; k <= max_segments; ++k) {
        double fnext = fk + f1;
        double seg = gl_integrate(integrand, fk, fnext, 16);
        tail.push(seg);
        fk = fnext;
        ++res.segments;
        if (k >= 8 && k % 4 == 0) {
            double t, r;
            tail.estimate(t, r);
            value = head + t;
            residual = r;
            if (residual <= tol * std::abs(value) && residual > 0.0) break;
        }
    }
    res.value = value;
    res.err_estimate = residual;
    res.tail_bound = std::abs(tail.last_segment());
    res.converged = residual <= tol * std::abs(value);
    return res;
}

OscResult damped_sinc_integral(double a, double tol) {
    if (!(a > 0.0)) throw input_error("damping must be positive");
    if (!(tol > 0.0)) tol = 1e-10;

    auto integrand = [&](double u) { return std::sin(u) / u * std::exp(-a * u); };

    OscResult res;
    double head;
    if (a > 1.0) {
        // strong damping confines the mass to u ~ 1/a; split the first
        // half-period there so Gauss-Legendre sees the boundary layer
        double c = std::min(kPi / 2.0, 1.0 / a);
        head = gl_integrate(integrand, 0.0, c, 24) + gl_integrate(integrand, c, kPi, 24);
    } else {
        head = gl_integrate(integrand, 0.0, kPi, 24);
    }
    res.segments = 1;

    AveragedTail tail;
    double value = head, residual = std::abs(head);
    const int max_segments = 6000;
    for (int k = 1; k <= max_segments; ++k) {
        double seg = gl_integrate(integrand, k * kPi, (k + 1) * kPi, 16);
        tail.push(seg);
        ++res.segments;
        if (k >= 8 && k % 4 == 0) {
            double t, r;
            tail.estimate(t, r);
            value = head + t;
            residual = r;
            if (residual <= tol * std::abs(value) && residual > 0.0) break;
        }
    }
    res.value = value;
    res.err_estimate = residual;
    res.tail_bound = std::abs(tail.last_segment());
    res.converged = residual <= tol * std::abs(value);
    return res;
}

}  // namespace flicker::quadrature
