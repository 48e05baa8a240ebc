#pragma once
// Carrier transport: turns any of the supported material descriptions into
// the scalar effective mobility that enters the noise coefficient.
//
// Mobility specs are written in the lab unit cm^2/(V s); results come back
// as CGS quantities (cm^2/(statvolt s)) ready for the noise module.

#include <array>
#include <optional>
#include <variant>

#include "flicker/errors.hpp"
#include "flicker/units.hpp"
#include "flicker/vec3.hpp"

namespace flicker::transport {

// Symmetric 3x3 mobility tensor, entries in cm^2/(V s).
struct MobilityTensor {
    std::array<std::array<double, 3>, 3> m{};
    Vec3 direction;  // field direction, must be unit length

    double project() const;  // n^T m n, validated
    std::array<double, 3> eigenvalues() const;
    void validate() const;   // symmetric, nonnegative eigenvalues, |n| = 1
};

struct ScalarMobility {
    double mu = 0.0;  // cm^2/(V s)
};

struct FromConductivity {};  // mu = sigma / (e n), fields taken from Material

// 1/T law anchored at a reference point; applied for T >= 50 K only, below
// that the 50 K value is returned with a warning.
struct BulkMetal1OverT {
    double mu_ref = 0.0;  // cm^2/(V s) at T_ref
    double T_ref = 0.0;   // K
};

using MobilitySpec =
    std::variant<ScalarMobility, MobilityTensor, FromConductivity, BulkMetal1OverT>;

struct Material {
    double n_cm3 = 0.0;        // carrier density
    double m_g = 0.0;          // effective carrier mass
    double d_cm = 0.0;         // lattice spacing (validity bounds only)
    double charge_cgs = 0.0;   // carrier charge; filled from the constant set
    std::optional<double> sigma_cgs;  // conductivity in CGS (1/s)
    std::optional<MobilitySpec> mobility;

    void validate() const;  // n, m, d > 0; at least one of sigma/mobility
};

// mu = sigma/(e n). Inputs as quantities in either system; output CGS by
// default.
Quantity mobility_from_conductivity(Quantity sigma, Quantity n, const Constants& k,
                                    UnitSystem out = UnitSystem::CGS);

// sigma = l/(R w h) for a box sample measured end to end.
Quantity sigma_from_resistance(Quantity R, double l_cm, double w_cm, double h_cm,
                               UnitSystem out = UnitSystem::SI);

// Scalar mobility per the material's spec, CGS units.
Quantity effective_mobility(const Material& mat, double T_K, const Constants& k,
                            Warnings* warn = nullptr);

// mu(T) * T, the combination entering the noise coefficient; constant in T
// under the 1/T law (for T >= 50 K), which downstream asserts exactly.
Quantity mobility_temperature_product(const Material& mat, double T_K,
                                      const Constants& k, Warnings* warn = nullptr);

constexpr double kBulkLawMinTemperature = 50.0;  // K

}  // namespace flicker::transport
