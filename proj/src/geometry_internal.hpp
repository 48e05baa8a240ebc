#pragma once
// Shared pieces of the two numeric g-factor backends.

#include <functional>
#include <vector>

#include "flicker/geometry.hpp"

namespace flicker::geometry::detail {

// Excision / importance ball around a lead. `fraction` is the solid-angle
// fraction of the ball inside the region (1 interior, 1/2 on a face, 1/4 on
// an edge, 1/8 at a corner). `multiplicity` is 2 when the two leads
// coincide and the ball serves both terms.
struct LeadBall {
    Vec3 center;
    double rho = 0.0;
    double fraction = 1.0;
    double curvature_err = 0.0;  // folded into the error estimate
    int multiplicity = 1;
    int lead_index = 0;  // 0 = x, 1 = x'
};

using WeightFn = std::function<double(const Vec3&)>;

std::vector<LeadBall> plan_lead_balls(const SampleGeometry& geom,
                                      const LeadPair& leads);

WeightedIntegral integrate_deterministic(const SampleGeometry& geom,
                                         const LeadPair& leads,
                                         const WeightFn& weight,
                                         const QuadratureConfig& cfg);

WeightedIntegral integrate_monte_carlo(const SampleGeometry& geom,
                                       const LeadPair& leads,
                                       const WeightFn& weight,
                                       const QuadratureConfig& cfg);

}  // namespace flicker::geometry::detail
