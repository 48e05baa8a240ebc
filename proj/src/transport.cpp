#include "flicker/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flicker::transport {

namespace {

double tensor_max_abs(const std::array<std::array<double, 3>, 3>& m) {
    double a = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a = std::max(a, std::abs(m[i][j]));
    return a;
}

}  // namespace

std::array<double, 3> MobilityTensor::eigenvalues() const {
    // Closed form for a symmetric 3x3 via the trigonometric solution of the
    // characteristic cubic; no iteration, accurate to a few ulp.
    const auto& a = m;
    const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if (p1 == 0.0) {
        std::array<double, 3> ev{a[0][0], a[1][1], a[2][2]};
        std::sort(ev.begin(), ev.end());
        return ev;
    }
    const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) +
                      (a[2][2] - q) * (a[2][2] - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    std::array<std::array<double, 3>, 3> b{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
    const double detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                        b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                        b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    const double r = std::clamp(detb / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    std::array<double, 3> ev{e3, 3.0 * q - e1 - e3, e1};
    std::sort(ev.begin(), ev.end());
    return ev;
}

void MobilityTensor::validate() const {
    const double scale = tensor_max_abs(m);
    if (!(scale > 0.0)) throw input_error("mobility tensor is zero");
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(m[i][j] - m[j][i]) > 1e-12 * scale)
                throw input_error("mobility tensor must be symmetric");
    const auto ev = eigenvalues();
    if (ev[0] < -1e-12 * scale)
        throw input_error("mobility tensor has a negative eigenvalue");
    if (std::abs(direction.norm() - 1.0) > 1e-9)
        throw input_error("mobility tensor direction must be unit length");
}

double MobilityTensor::project() const {
    validate();
    const Vec3& n = direction;
    const double nv[3] = {n.x, n.y, n.z};
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += nv[i] * m[i][j] * nv[j];
    return s;
}

void Material::validate() const {
    if (!(n_cm3 > 0.0)) throw input_error("carrier density must be positive");
    if (!(m_g > 0.0)) throw input_error("carrier mass must be positive");
    if (!(d_cm > 0.0)) throw input_error("lattice spacing must be positive");
    if (!(charge_cgs > 0.0)) throw input_error("carrier charge must be positive");
    if (!sigma_cgs && !mobility)
        throw input_error(
            "material needs a conductivity or a mobility spec (or both)");
    if (sigma_cgs && !(*sigma_cgs >= 0.0))
        throw input_error("conductivity must be nonnegative");
}

Quantity mobility_from_conductivity(Quantity sigma, Quantity n, const Constants& k,
                                    UnitSystem out) {
    if (!(sigma.dim == Dimension::conductivity()))
        throw input_error("mobility_from_conductivity: first argument is not a conductivity");
    if (!(n.dim == Dimension::number_density()))
        throw input_error("mobility_from_conductivity: second argument is not a number density");
    const double s = convert(sigma, UnitSystem::CGS).value;
    const double nn = convert(n, UnitSystem::CGS).value;
    if (!(s >= 0.0)) throw input_error("conductivity must be nonnegative");
    if (!(nn > 0.0)) throw input_error("carrier density must be positive");
    const double mu = s / (k.e * nn);
    return convert(Quantity::cgs(mu, Dimension::mobility()), out);
}

Quantity sigma_from_resistance(Quantity R, double l_cm, double w_cm, double h_cm,
                               UnitSystem out) {
    if (!(R.dim == Dimension::resistance()))
        throw input_error("sigma_from_resistance: first argument is not a resistance");
    const double r_ohm = convert(R, UnitSystem::SI).value;
    if (!(r_ohm > 0.0)) throw input_error("resistance must be positive");
    if (!(l_cm > 0.0 && w_cm > 0.0 && h_cm > 0.0))
        throw input_error("sample extents must be positive");
    // end-to-end along l, cross section w*h; work in SI metres
    const double sigma_si = (l_cm / 100.0) / (r_ohm * (w_cm / 100.0) * (h_cm / 100.0));
    return convert(Quantity::si(sigma_si, Dimension::conductivity()), out);
}

namespace {

double mobility_cgs_from_spec(const Material& mat, const MobilitySpec& spec,
                              double T_K, const Constants& k, Warnings* warn) {
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, ScalarMobility>) {
                if (!(s.mu > 0.0)) throw input_error("mobility must be positive");
                return mobility_to_cgs(s.mu);
            } else if constexpr (std::is_same_v<S, MobilityTensor>) {
                const double mu = s.project();
                if (!(mu > 0.0))
                    throw input_error("projected mobility must be positive");
                return mobility_to_cgs(mu);
            } else if constexpr (std::is_same_v<S, FromConductivity>) {
                if (!mat.sigma_cgs)
                    throw input_error(
                        "mobility spec refers to conductivity but the material has none");
                return mobility_from_conductivity(
                           Quantity::cgs(*mat.sigma_cgs, Dimension::conductivity()),
                           Quantity::cgs(mat.n_cm3, Dimension::number_density()), k)
                    .value;
            } else {
                static_assert(std::is_same_v<S, BulkMetal1OverT>);
                if (!(s.mu_ref > 0.0 && s.T_ref > 0.0))
                    throw input_error("1/T mobility law needs positive reference point");
                double t = T_K;
                if (t < kBulkLawMinTemperature) {
                    t = kBulkLawMinTemperature;
                    if (warn)
                        warn->push_back(
                            "temperature below the 1/T law's range; using the 50 K value");
                }
                return mobility_to_cgs(s.mu_ref) * s.T_ref / t;
            }
        },
        spec);
}

}  // namespace

Quantity effective_mobility(const Material& mat, double T_K, const Constants& k,
                            Warnings* warn) {
    if (!(T_K > 0.0)) throw input_error("temperature must be positive");
    MobilitySpec spec = mat.mobility ? *mat.mobility : MobilitySpec{FromConductivity{}};
    const double mu = mobility_cgs_from_spec(mat, spec, T_K, k, warn);
    return Quantity::cgs(mu, Dimension::mobility());
}

Quantity mobility_temperature_product(const Material& mat, double T_K,
                                      const Constants& k, Warnings* warn) {
    if (!(T_K > 0.0)) throw input_error("temperature must be positive");
    const Dimension dim = Dimension::mobility() * Dimension::temperature();
    if (mat.mobility) {
        if (const auto* law = std::get_if<BulkMetal1OverT>(&*mat.mobility);
            law && T_K >= kBulkLawMinTemperature) {
            // evaluate the product directly so it is constant to the last ulp
            if (!(law->mu_ref > 0.0 && law->T_ref > 0.0))
                throw input_error("1/T mobility law needs positive reference point");
            return Quantity::cgs(mobility_to_cgs(law->mu_ref) * law->T_ref, dim);
        }
    }
    const double mu = effective_mobility(mat, T_K, k, warn).value;
    return Quantity::cgs(mu * T_K, dim);
}

}  // namespace flicker::transport
