#include "flicker/units.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace flicker {

const char* to_string(UnitSystem s) {
    return s == UnitSystem::CGS ? "cgs" : "si";
}

Rational::Rational(int n, int d) : num(n), den(d) {
    if (den == 0) throw input_error("rational exponent with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    int g = std::gcd(std::abs(num), den);
    if (g > 1) { num /= g; den /= g; }
}

Rational Rational::operator+(Rational o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}

Rational Rational::operator-(Rational o) const {
    return Rational(num * o.den - o.num * den, den * o.den);
}

Rational Rational::operator*(int k) const { return Rational(num * k, den); }

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Dimension Dimension::base(int which, Rational r) {
    Dimension d;
    d.exp[static_cast<size_t>(which)] = r;
    return d;
}

Dimension Dimension::inv_length() { return dimensionless() / length(); }
Dimension Dimension::frequency() { return dimensionless() / time(); }

Dimension Dimension::energy() {
    return mass() * length().pow(Rational(2)) / time().pow(Rational(2));
}

Dimension Dimension::voltage() { return energy() / charge(); }
Dimension Dimension::electric_field() { return voltage() / length(); }
Dimension Dimension::resistance() { return voltage() * time() / charge(); }

Dimension Dimension::conductivity() {
    // 1/(resistance * length)
    return dimensionless() / (resistance() * length());
}

Dimension Dimension::mobility() {
    // velocity per field strength: L T^-1 / (M L T^-2 Q^-1) = M^-1 T Q
    return velocity() / electric_field();
}

Dimension Dimension::number_density() { return dimensionless() / length().pow(Rational(3)); }
Dimension Dimension::spectral_density() { return voltage().pow(Rational(2)) * time(); }
Dimension Dimension::momentum() { return mass() * velocity(); }
Dimension Dimension::velocity() { return length() / time(); }

Dimension Dimension::operator*(const Dimension& o) const {
    Dimension r;
    for (size_t i = 0; i < exp.size(); ++i) r.exp[i] = exp[i] + o.exp[i];
    return r;
}

Dimension Dimension::operator/(const Dimension& o) const {
    Dimension r;
    for (size_t i = 0; i < exp.size(); ++i) r.exp[i] = exp[i] - o.exp[i];
    return r;
}

Dimension Dimension::pow(Rational r) const {
    Dimension out;
    for (size_t i = 0; i < exp.size(); ++i)
        out.exp[i] = Rational(exp[i].num * r.num, exp[i].den * r.den);
    return out;
}

bool Dimension::is_dimensionless() const {
    for (const auto& e : exp)
        if (!e.is_zero()) return false;
    return true;
}

static const char* kBaseNames[5] = {"length", "mass", "time", "charge", "temperature"};
static const char* kBaseSymbols[5] = {"L", "M", "T", "Q", "Th"};

std::string Dimension::str() const {
    std::string out;
    for (size_t i = 0; i < exp.size(); ++i) {
        if (exp[i].is_zero()) continue;
        if (!out.empty()) out += " ";
        out += kBaseSymbols[i];
        if (!(exp[i] == Rational(1))) out += "^" + exp[i].str();
    }
    return out.empty() ? "1" : out;
}

static void require_same_system(const Quantity& a, const Quantity& b, const char* op) {
    if (a.system != b.system)
        throw input_error(std::string("mixed-system arithmetic (") + op + "): " +
                          to_string(a.system) + " vs " + to_string(b.system) +
                          "; convert explicitly first");
}

Quantity Quantity::operator+(const Quantity& o) const {
    require_same_system(*this, o, "+");
    if (!(dim == o.dim))
        throw input_error("adding quantities of different dimension: " + dim.str() +
                          " vs " + o.dim.str());
    return {value + o.value, dim, system};
}

Quantity Quantity::operator-(const Quantity& o) const {
    require_same_system(*this, o, "-");
    if (!(dim == o.dim))
        throw input_error("subtracting quantities of different dimension: " + dim.str() +
                          " vs " + o.dim.str());
    return {value - o.value, dim, system};
}

Quantity Quantity::operator*(const Quantity& o) const {
    require_same_system(*this, o, "*");
    return {value * o.value, dim * o.dim, system};
}

Quantity Quantity::operator/(const Quantity& o) const {
    require_same_system(*this, o, "/");
    return {value / o.value, dim / o.dim, system};
}

Quantity Quantity::pow(Rational r) const {
    double v = std::pow(value, r.as_double());
    return {v, dim.pow(r), system};
}

// SI->CGS multiplicative factor per base dimension:
//   m -> cm, kg -> g, s -> s, C -> statC, K -> K.
// The charge factor is 0.1 * c with c in cm/s, exact by definition of the
// coulomb's Gaussian image.
static const double kBaseFactorSiToCgs[5] = {100.0, 1000.0, 1.0, 2.99792458e9, 1.0};

static double ipow(double b, int n) {
    if (n < 0) return 1.0 / ipow(b, -n);
    double r = 1.0;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

double conversion_factor(const Dimension& d, UnitSystem from, UnitSystem to) {
    if (from == to) return 1.0;
    double factor = 1.0;
    for (size_t i = 0; i < d.exp.size(); ++i) {
        const Rational& e = d.exp[i];
        if (e.is_zero()) continue;
        if (e.den != 1 && e.den != 2)
            throw input_error(std::string("unsupported dimension vector: exponent ") +
                              e.str() + " on " + kBaseNames[i]);
        if (std::abs(e.num) > 12 * e.den)
            throw input_error(std::string("unsupported dimension vector: exponent ") +
                              e.str() + " on " + kBaseNames[i] + " out of range");
        double base = kBaseFactorSiToCgs[i];
        double f = (e.den == 1) ? ipow(base, e.num)
                                : std::pow(base, e.as_double());
        factor *= f;
    }
    return (from == UnitSystem::SI) ? factor : 1.0 / factor;
}

Quantity convert(const Quantity& q, UnitSystem target) {
    if (q.system == target) return q;
    double f = conversion_factor(q.dim, q.system, target);
    return {q.value * f, q.dim, target};
}

double mobility_to_cgs(double mu_cm2_per_volt_s) {
    if (mu_cm2_per_volt_s < 0.0)
        throw input_error("negative mobility");
    return mu_cm2_per_volt_s * 299.792458;
}

// ---------------------------------------------------------------------------
// Constant sets
// ---------------------------------------------------------------------------

static Constants make_codata() {
    Constants k{};
    k.name = "codata";
    // CODATA 2018, converted to CGS-Gaussian.
    k.e = 1.602176634e-19 * 2.99792458e9;  // statC
    k.hbar = 1.054571817e-27;              // erg s
    k.c = 2.99792458e10;                   // cm/s
    k.k_B = 1.380649e-16;                  // erg/K
    k.m_e = 9.1093837015e-28;              // g
    k.alpha = k.e * k.e / (k.hbar * k.c);
    k.literal_coefficients = false;
    k.eta_prefactor = 2.0 * k.alpha * k.alpha * k.k_B / (3.0 * k.e * k.c);
    k.soft_bound_rhs = k.c * k.c * k.hbar / k.e;
    k.field_bound_coeff = -1.0;  // computed from material (m*d/e) at use site
    k.freq_temp_coeff = k.k_B / k.hbar;
    k.hbar_over_k = k.hbar / k.k_B;
    return k;
}

static Constants make_paper_rounded() {
    Constants k{};
    k.name = "paper-rounded";
    k.e = 4.8e-10;
    k.hbar = 1.0e-27;
    k.c = 3.0e10;
    k.k_B = 1.0e-16;
    k.m_e = 9.1e-28;
    k.alpha = 1.0 / 137.0;
    k.literal_coefficients = true;
    k.eta_prefactor = 3.4e-22;
    k.soft_bound_rhs = 1.0e3;
    k.field_bound_coeff = 1.0e-25;
    k.freq_temp_coeff = 1.0e11;
    k.hbar_over_k = 1.0e-11;
    return k;
}

const Constants& constants(ConstantSet set) {
    static const Constants codata = make_codata();
    static const Constants rounded = make_paper_rounded();
    return set == ConstantSet::Codata ? codata : rounded;
}

static Quantity cgs_in(double value_cgs, Dimension d, UnitSystem s) {
    Quantity q = Quantity::cgs(value_cgs, d);
    return convert(q, s);
}

Quantity Constants::charge(UnitSystem s) const { return cgs_in(e, Dimension::charge(), s); }

Quantity Constants::planck_reduced(UnitSystem s) const {
    return cgs_in(hbar, Dimension::energy() * Dimension::time(), s);
}

Quantity Constants::light_speed(UnitSystem s) const {
    return cgs_in(c, Dimension::velocity(), s);
}

Quantity Constants::boltzmann(UnitSystem s) const {
    return cgs_in(k_B, Dimension::energy() / Dimension::temperature(), s);
}

Quantity Constants::electron_mass(UnitSystem s) const {
    return cgs_in(m_e, Dimension::mass(), s);
}

}  // namespace flicker
