#pragma once
// Two-system unit layer (CGS-Gaussian and SI).
//
// Every formula in this project is evaluated in CGS internally; SI shows up
// only at I/O boundaries. A Quantity is a value plus a rational-exponent
// dimension vector over (length, mass, time, charge, temperature) plus a
// system tag. Charge is a base dimension, so Gaussian quantities keep integer
// exponents and each base carries one exact SI->CGS factor.

#include <array>
#include <cstdint>
#include <string>

#include "flicker/errors.hpp"

namespace flicker {

enum class UnitSystem { CGS, SI };

const char* to_string(UnitSystem s);

// Exact rational, small enough for dimension exponents.
struct Rational {
    int num = 0;
    int den = 1;

    Rational() = default;
    Rational(int n, int d = 1);

    Rational operator+(Rational o) const;
    Rational operator-(Rational o) const;
    Rational operator*(int k) const;
    Rational operator-() const { return Rational(-num, den); }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool is_zero() const { return num == 0; }
    double as_double() const { return double(num) / double(den); }
    std::string str() const;
};

// Exponent vector over the five base dimensions.
struct Dimension {
    // order: length, mass, time, charge, temperature
    std::array<Rational, 5> exp{};

    static Dimension dimensionless() { return {}; }
    static Dimension base(int which, Rational r = Rational(1));

    static Dimension length() { return base(0); }
    static Dimension mass() { return base(1); }
    static Dimension time() { return base(2); }
    static Dimension charge() { return base(3); }
    static Dimension temperature() { return base(4); }

    // derived dimensions used by this artifact
    static Dimension inv_length();      // g-factor
    static Dimension frequency();       // Hz / s^-1
    static Dimension voltage();         // M L^2 T^-2 Q^-1
    static Dimension electric_field();  // voltage / length
    static Dimension resistance();      // M L^2 T^-1 Q^-2
    static Dimension conductivity();    // L^-3 M^-1 T Q^2
    static Dimension mobility();        // M^-1 T Q
    static Dimension number_density();  // L^-3
    static Dimension spectral_density();  // voltage^2 * time
    static Dimension energy();
    static Dimension momentum();
    static Dimension velocity();

    Dimension operator*(const Dimension& o) const;
    Dimension operator/(const Dimension& o) const;
    Dimension pow(Rational r) const;
    bool operator==(const Dimension& o) const { return exp == o.exp; }
    bool is_dimensionless() const;
    std::string str() const;
};

struct Quantity {
    double value = 0.0;
    Dimension dim;
    UnitSystem system = UnitSystem::CGS;

    Quantity() = default;
    Quantity(double v, Dimension d, UnitSystem s) : value(v), dim(d), system(s) {}

    static Quantity cgs(double v, Dimension d) { return {v, d, UnitSystem::CGS}; }
    static Quantity si(double v, Dimension d) { return {v, d, UnitSystem::SI}; }

    Quantity operator+(const Quantity& o) const;
    Quantity operator-(const Quantity& o) const;
    Quantity operator*(const Quantity& o) const;
    Quantity operator/(const Quantity& o) const;
    Quantity operator*(double s) const { return {value * s, dim, system}; }
    Quantity operator/(double s) const { return {value / s, dim, system}; }
    Quantity pow(Rational r) const;
};

inline Quantity operator*(double s, const Quantity& q) { return q * s; }

// Multiplicative factor taking a value of dimension `d` from `from` to `to`.
// Throws input_error for exponents outside the supported table, naming the
// offending base and exponent.
double conversion_factor(const Dimension& d, UnitSystem from, UnitSystem to);

Quantity convert(const Quantity& q, UnitSystem target);

// cm^2/(V s) -> cm^2/(statvolt s); the factor is the exact volt-per-statvolt
// ratio 299.792458.
double mobility_to_cgs(double mu_cm2_per_volt_s);

// ---------------------------------------------------------------------------
// Physical constants.
//
// Two sets. "codata" carries CODATA-2018 values and computes every derived
// coefficient from them. "paper-rounded" carries the order-of-magnitude
// roundings common in estimate work (hbar ~ 1e-27, k ~ 1e-16) together with
// the literal display coefficients those estimates produce; recomputing the
// eta prefactor from the rounded bases would give 2.7e-22 rather than the
// conventional 3.4e-22, so the coefficients are pinned, not derived.
// ---------------------------------------------------------------------------

enum class ConstantSet { Codata, PaperRounded };

struct Constants {
    const char* name;

    // CGS base values
    double e;      // statC
    double hbar;   // erg s
    double c;      // cm/s
    double k_B;    // erg/K
    double m_e;    // g
    double alpha;  // dimensionless

    // Derived coefficients used downstream. For the rounded set these are
    // literals; for codata they are computed from the bases above.
    double eta_prefactor;     // 2 alpha^2 k_B / (3 e c); multiplies g*mu*T
    double soft_bound_rhs;    // c^2 hbar / e, statvolt^2 cm^2 / (cm^2/statvolt/s ... CGS mixed)
    double field_bound_coeff; // m d / e when <0 is sentinel "compute from material"
    double freq_temp_coeff;   // k_B / hbar, Hz per kelvin scale
    double hbar_over_k;       // hbar / k_B, kelvin seconds

    bool literal_coefficients;

    Quantity charge(UnitSystem s = UnitSystem::CGS) const;
    Quantity planck_reduced(UnitSystem s = UnitSystem::CGS) const;
    Quantity light_speed(UnitSystem s = UnitSystem::CGS) const;
    Quantity boltzmann(UnitSystem s = UnitSystem::CGS) const;
    Quantity electron_mass(UnitSystem s = UnitSystem::CGS) const;
};

const Constants& constants(ConstantSet set);

}  // namespace flicker
