#pragma once
// Sample regions, lead points, and the geometric factor
//
//   g = (1/Omega) int_Omega d3r ( 1/|r - x| + 1/|r - x'| )
//
// evaluated by the slab closed form where it applies and by singular-aware
// quadrature otherwise (deterministic adaptive cells, or Monte Carlo with
// importance-sampled lead balls). Also hosts numerical oracles for the two
// momentum-space Fourier identities the derivation leans on.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flicker/errors.hpp"
#include "flicker/kernels.hpp"
#include "flicker/units.hpp"
#include "flicker/vec3.hpp"

namespace flicker::geometry {

// Axis-aligned box occupying [0,l] x [0,w] x [0,h]. Extents are sorted on
// construction so that l >= w >= h.
struct Box {
    double l = 0.0, w = 0.0, h = 0.0;
    Box(double l_, double w_, double h_);
    double volume() const { return l * w * h; }
};

// Ball of radius R centered at the origin.
struct Ball {
    double R = 0.0;
    explicit Ball(double R_);
    double volume() const;
};

// Axis-aligned occupancy mask; voxel (i,j,k) spans
// origin + [i*dx,(i+1)*dx] x ... Mask is x-fastest.
struct VoxelGrid {
    Vec3 origin;
    Vec3 spacing;
    int nx = 0, ny = 0, nz = 0;
    std::vector<std::uint8_t> mask;

    VoxelGrid(Vec3 origin_, Vec3 spacing_, int nx_, int ny_, int nz_,
              std::vector<std::uint8_t> mask_);
    static VoxelGrid filled_box(const Box& b, int nx_, int ny_, int nz_);

    bool occupied(int i, int j, int k) const {
        return mask[static_cast<size_t>((k * ny + j) * nx + i)] != 0;
    }
    std::size_t occupied_count() const;
    double volume() const;
};

using Region = std::variant<Box, Ball, VoxelGrid>;

struct SampleGeometry {
    Region region;

    double volume() const;
    Vec3 bbox_lo() const;
    Vec3 bbox_hi() const;
    bool contains(const Vec3& p) const;
    double min_extent() const;
};

struct LeadPair {
    Vec3 x;
    Vec3 xp;
};

// Leads must lie inside or on the bounding box (hard error otherwise);
// leads inside the bbox but outside the region itself only warn.
void validate_leads(const SampleGeometry& geom, const LeadPair& leads,
                    Warnings* warn = nullptr);

enum class QuadMethod { DeterministicAdaptive, MonteCarlo };

struct QuadratureConfig {
    QuadMethod method = QuadMethod::MonteCarlo;
    double rel_tol = 1e-2;        // in (0, 0.5)
    std::uint64_t budget = 1'000'000;  // integrand evaluations; >= 1e3
    std::uint64_t seed = 1;
    kernels::Lane lane = kernels::Lane::Auto;

    void validate() const;
};

struct WeightedIntegral {
    double value = 0.0;         // CGS: weight units times 1/cm
    double err_estimate = 0.0;  // absolute, same units as value
    bool converged = true;
    std::uint64_t evaluations = 0;
    std::string backend;  // "deterministic" | "monte-carlo"
    std::string lane;     // SIMD lane for the MC backend, else empty
};

struct GFactorResult {
    Quantity g;                 // CGS, 1/cm
    double err_estimate = 0.0;  // absolute, same units as g
    bool converged = true;
    std::uint64_t evaluations = 0;
    std::string backend;  // "analytic" | "deterministic" | "monte-carlo"
    std::string lane;
};

// Slab approximation (2/l) ln(l/cutoff) with cutoff defaulting to w. Valid
// in log accuracy for h <= w << l; outside that aspect range the value is
// still returned but an applicability warning is appended.
Quantity g_factor_analytic(const Box& box, Warnings* warn = nullptr,
                           std::optional<double> cutoff = std::nullopt);

GFactorResult g_factor_numeric(const SampleGeometry& geom, const LeadPair& leads,
                               const QuadratureConfig& cfg,
                               Warnings* warn = nullptr);

// (1/Omega) int_Omega weight(r) (1/|r - x| + 1/|r - x'|) d3r for a bounded
// weight field; the drift-field spectrum reduces to this.
WeightedIntegral weighted_pair_integral(const SampleGeometry& geom,
                                        const LeadPair& leads,
                                        const std::function<double(const Vec3&)>& weight,
                                        const QuadratureConfig& cfg,
                                        Warnings* warn = nullptr);

// ---------------------------------------------------------------------------
// Fourier identity oracles
// ---------------------------------------------------------------------------

// int d3p/(2pi)^3 e^{ip.x} 4pi/p^2, regularized by e^{-eps p}. The angular
// integral reduces it to (2/(pi r)) int_0^inf du sin(u)/u e^{-(eps/r) u},
// whose closed form is (2/(pi r)) arctan(r/eps).
struct ScalarIdentity {
    double numeric = 0.0;
    double exact = 0.0;
    double diff = 0.0;
};

ScalarIdentity fourier_identity_scalar(double r, double eps, double tol = 1e-9);

// Gradient form: int d3p/(2pi)^3 e^{ip.x} 4pi p/p^2 = i x/|x|^3. The numeric
// side is a central finite difference of the regularized scalar identity; the
// exact side is the same regulator family differentiated in closed form.
struct VectorIdentity {
    Vec3 numeric;
    Vec3 exact;
    double rel_diff = 0.0;
};

VectorIdentity fourier_identity_vector(const Vec3& r_vec, double eps,
                                       double tol = 1e-9,
                                       double fd_step_rel = 1e-4);

}  // namespace flicker::geometry
