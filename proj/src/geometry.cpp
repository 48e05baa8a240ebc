#include "flicker/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "flicker/quadrature.hpp"
#include "geometry_internal.hpp"

namespace flicker::geometry {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

Box::Box(double l_, double w_, double h_) {
    if (!(l_ > 0.0) || !(w_ > 0.0) || !(h_ > 0.0))
        throw input_error("box extents must be strictly positive");
    double e[3] = {l_, w_, h_};
    std::sort(e, e + 3);
    l = e[2];
    w = e[1];
    h = e[0];
}

Ball::Ball(double R_) : R(R_) {
    if (!(R_ > 0.0)) throw input_error("ball radius must be strictly positive");
}

double Ball::volume() const { return 4.0 / 3.0 * kPi * R * R * R; }

VoxelGrid::VoxelGrid(Vec3 origin_, Vec3 spacing_, int nx_, int ny_, int nz_,
                     std::vector<std::uint8_t> mask_)
    : origin(origin_), spacing(spacing_), nx(nx_), ny(ny_), nz(nz_),
      mask(std::move(mask_)) {
    if (nx <= 0 || ny <= 0 || nz <= 0)
        throw input_error("voxel grid dimensions must be positive");
    if (!(spacing.x > 0.0 && spacing.y > 0.0 && spacing.z > 0.0))
        throw input_error("voxel spacing must be strictly positive");
    if (mask.size() != static_cast<size_t>(nx) * ny * nz)
        throw input_error("voxel mask size does not match grid dimensions");
    if (occupied_count() == 0)
        throw input_error("voxel grid has no occupied voxels (zero volume)");
}

VoxelGrid VoxelGrid::filled_box(const Box& b, int nx_, int ny_, int nz_) {
    std::vector<std::uint8_t> m(static_cast<size_t>(nx_) * ny_ * nz_, 1);
    return VoxelGrid({0, 0, 0}, {b.l / nx_, b.w / ny_, b.h / nz_}, nx_, ny_, nz_,
                     std::move(m));
}

std::size_t VoxelGrid::occupied_count() const {
    std::size_t n = 0;
    for (auto v : mask) n += (v != 0);
    return n;
}

double VoxelGrid::volume() const {
    return double(occupied_count()) * spacing.x * spacing.y * spacing.z;
}

double SampleGeometry::volume() const {
    return std::visit([](const auto& r) { return r.volume(); }, region);
}

Vec3 SampleGeometry::bbox_lo() const {
    if (std::holds_alternative<Ball>(region)) {
        double R = std::get<Ball>(region).R;
        return {-R, -R, -R};
    }
    if (std::holds_alternative<VoxelGrid>(region))
        return std::get<VoxelGrid>(region).origin;
    return {0, 0, 0};
}

Vec3 SampleGeometry::bbox_hi() const {
    if (std::holds_alternative<Ball>(region)) {
        double R = std::get<Ball>(region).R;
        return {R, R, R};
    }
    if (std::holds_alternative<VoxelGrid>(region)) {
        const auto& v = std::get<VoxelGrid>(region);
        return {v.origin.x + v.nx * v.spacing.x, v.origin.y + v.ny * v.spacing.y,
                v.origin.z + v.nz * v.spacing.z};
    }
    const auto& b = std::get<Box>(region);
    return {b.l, b.w, b.h};
}

bool SampleGeometry::contains(const Vec3& p) const {
    if (std::holds_alternative<Box>(region)) {
        const auto& b = std::get<Box>(region);
        return p.x >= 0 && p.x <= b.l && p.y >= 0 && p.y <= b.w && p.z >= 0 &&
               p.z <= b.h;
    }
    if (std::holds_alternative<Ball>(region)) {
        const auto& b = std::get<Ball>(region);
        return p.norm2() <= b.R * b.R;
    }
    const auto& v = std::get<VoxelGrid>(region);
    double fx = (p.x - v.origin.x) / v.spacing.x;
    double fy = (p.y - v.origin.y) / v.spacing.y;
    double fz = (p.z - v.origin.z) / v.spacing.z;
    if (fx < 0 || fy < 0 || fz < 0 || fx > v.nx || fy > v.ny || fz > v.nz)
        return false;
    int i = std::min(v.nx - 1, static_cast<int>(fx));
    int j = std::min(v.ny - 1, static_cast<int>(fy));
    int k = std::min(v.nz - 1, static_cast<int>(fz));
    return v.occupied(i, j, k);
}

double SampleGeometry::min_extent() const {
    if (std::holds_alternative<Box>(region)) {
        const auto& b = std::get<Box>(region);
        return b.h;  // normalized smallest
    }
    if (std::holds_alternative<Ball>(region)) return std::get<Ball>(region).R;
    const auto& v = std::get<VoxelGrid>(region);
    return std::min({v.spacing.x, v.spacing.y, v.spacing.z});
}

void validate_leads(const SampleGeometry& geom, const LeadPair& leads,
                    Warnings* warn) {
    Vec3 lo = geom.bbox_lo(), hi = geom.bbox_hi();
    double slack = 1e-12 * (hi - lo).norm();
    for (const Vec3* p : {&leads.x, &leads.xp}) {
        if (p->x < lo.x - slack || p->y < lo.y - slack || p->z < lo.z - slack ||
            p->x > hi.x + slack || p->y > hi.y + slack || p->z > hi.z + slack)
            throw input_error("lead point outside the region bounding box");
        if (warn && !geom.contains(*p))
            warn->push_back("lead lies outside the region (inside its bounding box)");
    }
}

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0 && rel_tol < 0.5))
        throw input_error("quadrature tolerance must lie in (0, 0.5)");
    if (budget < 1000)
        throw input_error("quadrature budget must be at least 1000");
}

// ---------------------------------------------------------------------------
// Slab closed form
// ---------------------------------------------------------------------------

Quantity g_factor_analytic(const Box& box, Warnings* warn,
                           std::optional<double> cutoff) {
    double cut = cutoff.value_or(box.w);
    if (!(cut > 0.0)) throw input_error("slab cutoff must be positive");
    double g = (2.0 / box.l) * std::log(box.l / cut);
    if (warn && !(box.h <= box.w && box.w <= box.l / 10.0))
        warn->push_back(
            "slab formula outside its aspect range (wants h <= w and w <= l/10)");
    return Quantity::cgs(g, Dimension::inv_length());
}

// ---------------------------------------------------------------------------
// Lead excision planning (shared by both numeric backends)
// ---------------------------------------------------------------------------

namespace detail {

namespace {

// Solid-angle fraction of a small ball around `p` inside an axis-aligned box,
// together with the largest rho keeping that fraction exact (distance to the
// nearest boundary feature not through p).
void box_ball_limits(const Box& b, const Vec3& p, double& fraction,
                     double& rho_cap) {
    double tol = 1e-12 * b.l;
    int on_faces = 0;
    double cap = b.l;
    const double coords[3] = {p.x, p.y, p.z};
    const double extents[3] = {b.l, b.w, b.h};
    for (int axis = 0; axis < 3; ++axis) {
        double d0 = coords[axis];
        double d1 = extents[axis] - coords[axis];
        bool on0 = std::abs(d0) <= tol;
        bool on1 = std::abs(d1) <= tol;
        if (on0 || on1) ++on_faces;
        if (!on0) cap = std::min(cap, d0);
        if (!on1) cap = std::min(cap, d1);
    }
    fraction = std::ldexp(1.0, -on_faces);  // 2^-faces
    rho_cap = cap;
}

void voxel_ball_limits(const VoxelGrid& v, const Vec3& p, double& fraction,
                       double& rho_cap, double& curvature) {
    // octant occupancy just off the lead decides the solid angle; the cap is
    // the nearest lattice plane not through the lead.
    double tol = 1e-9 * std::min({v.spacing.x, v.spacing.y, v.spacing.z});
    double cap = std::min({v.spacing.x, v.spacing.y, v.spacing.z});
    const double sp[3] = {v.spacing.x, v.spacing.y, v.spacing.z};
    const double rel[3] = {p.x - v.origin.x, p.y - v.origin.y, p.z - v.origin.z};
    for (int axis = 0; axis < 3; ++axis) {
        double f = rel[axis] / sp[axis];
        double frac = f - std::floor(f);
        double d = std::min(frac, 1.0 - frac) * sp[axis];
        if (d > tol) cap = std::min(cap, d);
        else cap = std::min(cap, sp[axis]);  // on a plane: next plane caps
    }
    int occupied_octants = 0;
    double delta = 0.5 * tol;
    SampleGeometry probe{v};
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1}) {
                Vec3 q{p.x + sx * delta, p.y + sy * delta, p.z + sz * delta};
                if (probe.contains(q)) ++occupied_octants;
            }
    if (occupied_octants == 0) occupied_octants = 8;  // degenerate; treat interior
    fraction = occupied_octants / 8.0;
    rho_cap = 0.45 * cap;
    curvature = 0.0;
}

}  // namespace

std::vector<LeadBall> plan_lead_balls(const SampleGeometry& geom,
                                      const LeadPair& leads) {
    std::vector<LeadBall> balls;
    double sep = distance(leads.x, leads.xp);
    bool coincident = sep == 0.0;
    double men = geom.min_extent();

    auto plan_one = [&](const Vec3& p) {
        LeadBall ball;
        ball.center = p;
        ball.multiplicity = coincident ? 2 : 1;
        if (!geom.contains(p)) {
            // lead outside the region: the kernel is bounded on the region,
            // no excision or importance ball required
            ball.rho = 0.0;
            ball.fraction = 0.0;
            return ball;
        }
        double cap = men, fraction = 1.0, curvature = 0.0;
        if (std::holds_alternative<Box>(geom.region)) {
            box_ball_limits(std::get<Box>(geom.region), p, fraction, cap);
        } else if (std::holds_alternative<Ball>(geom.region)) {
            const auto& B = std::get<Ball>(geom.region);
            double s = p.norm();
            double to_surface = B.R - s;
            double tol = 1e-12 * B.R;
            if (std::abs(to_surface) <= tol) {
                fraction = 0.5;
                cap = 0.2 * B.R;
                curvature = 1.0 / B.R;  // half-space approximation, curved wall
            } else {
                fraction = 1.0;
                cap = to_surface;
            }
        } else {
            voxel_ball_limits(std::get<VoxelGrid>(geom.region), p, fraction, cap,
                              curvature);
        }
        double rho = std::min(0.2 * men, 0.45 * cap);
        if (!coincident) rho = std::min(rho, 0.45 * sep);
        ball.rho = std::max(rho, 0.0);
        ball.fraction = fraction;
        // half-space approximation error for curved boundaries: relative
        // O(rho * curvature) of the ball term
        ball.curvature_err = curvature > 0.0
                                 ? fraction * 2.0 * kPi * ball.rho * ball.rho *
                                       (ball.rho * curvature)
                                 : 0.0;
        ball.multiplicity = coincident ? 2 : 1;
        return ball;
    };

    // canonical planning order, so g(x, x') and g(x', x) sample identically
    auto lex_less = [](const Vec3& a, const Vec3& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    };
    const bool swapped = lex_less(leads.xp, leads.x);
    balls.push_back(plan_one(swapped ? leads.xp : leads.x));
    balls.back().lead_index = swapped ? 1 : 0;
    if (!coincident) {
        balls.push_back(plan_one(swapped ? leads.x : leads.xp));
        balls.back().lead_index = swapped ? 0 : 1;
    }
    return balls;
}

// ---------------------------------------------------------------------------
// Deterministic adaptive backend
// ---------------------------------------------------------------------------

namespace {

struct Cell {
    Vec3 lo, hi;
    double est = 0.0;
    double err = 0.0;
    std::uint64_t id = 0;
};

struct CellOrder {
    bool operator()(const Cell& a, const Cell& b) const {
        if (a.err != b.err) return a.err < b.err;
        return a.id > b.id;  // deterministic tie-break
    }
};

}  // namespace

WeightedIntegral integrate_deterministic(const SampleGeometry& geom,
                                      const LeadPair& leads,
                                      const WeightFn& weight,
                                      const QuadratureConfig& cfg) {
    const double omega = geom.volume();
    const std::vector<LeadBall> balls = plan_lead_balls(geom, leads);

    std::uint64_t evals = 0;
    auto integrand = [&](const Vec3& p) {
        ++evals;
        if (!geom.contains(p)) return 0.0;
        double sum = 0.0;
        for (const auto& ball : balls) {
            double d = distance(p, ball.center);
            if (d > ball.rho) sum += ball.multiplicity / d;
        }
        return sum == 0.0 ? 0.0 : sum * weight(p);
    };

    // nearest/farthest distance from a point to an axis-aligned cell
    auto cell_dist = [](const Cell& c, const Vec3& p, double& dnear, double& dfar) {
        Vec3 q{std::clamp(p.x, c.lo.x, c.hi.x), std::clamp(p.y, c.lo.y, c.hi.y),
               std::clamp(p.z, c.lo.z, c.hi.z)};
        dnear = distance(p, q);
        Vec3 far{std::max(std::abs(p.x - c.lo.x), std::abs(c.hi.x - p.x)),
                 std::max(std::abs(p.y - c.lo.y), std::abs(c.hi.y - p.y)),
                 std::max(std::abs(p.z - c.lo.z), std::abs(c.hi.z - p.z))};
        dfar = far.norm();
    };

    auto estimate = [&](Cell& c) {
        Vec3 mid = (c.lo + c.hi) * 0.5;
        Vec3 ext = c.hi - c.lo;
        double vol = ext.x * ext.y * ext.z;
        double coarse = integrand(mid) * vol;
        double fine = 0.0;
        for (int sx : {-1, 1})
            for (int sy : {-1, 1})
                for (int sz : {-1, 1}) {
                    Vec3 q{mid.x + 0.25 * sx * ext.x, mid.y + 0.25 * sy * ext.y,
                           mid.z + 0.25 * sz * ext.z};
                    fine += integrand(q);
                }
        fine *= vol / 8.0;
        c.est = fine;
        c.err = std::abs(fine - coarse);

        // the two-level difference cannot see a discontinuity the sample
        // points all miss, so cells straddling an excision sphere or the
        // spherical region wall get a worst-case floor on top of it
        double wmag = std::abs(weight(mid));
        double kernel_cap = 0.0;
        for (const auto& ball : balls) {
            double dnear, dfar;
            cell_dist(c, ball.center, dnear, dfar);
            kernel_cap +=
                ball.multiplicity / std::max({dnear, ball.rho, 1e-300});
            if (ball.rho > 0.0 && dnear < ball.rho && dfar > ball.rho) {
                double overlap =
                    std::min(vol, (4.0 / 3.0) * kPi * std::pow(ball.rho, 3));
                c.err += overlap * ball.multiplicity * wmag / ball.rho;
            }
        }
        if (const auto* B = std::get_if<Ball>(&geom.region)) {
            double dnear, dfar;
            cell_dist(c, Vec3{0, 0, 0}, dnear, dfar);
            if (dnear < B->R && dfar > B->R)
                c.err += 0.5 * vol * kernel_cap * wmag;
        }
    };

    // analytic ball terms
    double ball_term = 0.0, ball_err = 0.0;
    for (const auto& ball : balls) {
        if (ball.rho <= 0.0) continue;
        double w = weight(ball.center);
        ball_term +=
            ball.multiplicity * ball.fraction * 2.0 * kPi * ball.rho * ball.rho * w;
        ball_err += ball.multiplicity * ball.curvature_err * std::abs(w);
    }

    std::uint64_t next_id = 0;
    std::priority_queue<Cell, std::vector<Cell>, CellOrder> queue;
    double total_est = ball_term;
    double total_err = ball_err;

    auto push_cell = [&](Vec3 lo, Vec3 hi) {
        Cell c{lo, hi, 0.0, 0.0, next_id++};
        estimate(c);
        total_est += c.est;
        total_err += c.err;
        queue.push(c);
    };

    if (std::holds_alternative<VoxelGrid>(geom.region)) {
        const auto& v = std::get<VoxelGrid>(geom.region);
        for (int k = 0; k < v.nz; ++k)
            for (int j = 0; j < v.ny; ++j)
                for (int i = 0; i < v.nx; ++i) {
                    if (!v.occupied(i, j, k)) continue;
                    Vec3 lo{v.origin.x + i * v.spacing.x, v.origin.y + j * v.spacing.y,
                            v.origin.z + k * v.spacing.z};
                    Vec3 hi{lo.x + v.spacing.x, lo.y + v.spacing.y, lo.z + v.spacing.z};
                    push_cell(lo, hi);
                }
    } else {
        push_cell(geom.bbox_lo(), geom.bbox_hi());
    }

    const double min_cell = 1e-14 * geom.min_extent();
    while (!queue.empty()) {
        // a split costs 18 evaluations; never start one the budget cannot cover
        if (total_err <= cfg.rel_tol * std::abs(total_est) ||
            evals + 18 > cfg.budget)
            break;
        Cell worst = queue.top();
        queue.pop();
        Vec3 ext = worst.hi - worst.lo;
        int axis = 0;
        if (ext.y > ext.x) axis = 1;
        if (ext.z > (axis == 0 ? ext.x : ext.y)) axis = 2;
        double len = axis == 0 ? ext.x : (axis == 1 ? ext.y : ext.z);
        if (len * 0.5 < min_cell) continue;  // keep contribution, stop refining
        total_est -= worst.est;
        total_err -= worst.err;
        Vec3 mid = worst.lo, mid2 = worst.hi;
        if (axis == 0) { mid.x = mid2.x = 0.5 * (worst.lo.x + worst.hi.x); }
        if (axis == 1) { mid.y = mid2.y = 0.5 * (worst.lo.y + worst.hi.y); }
        if (axis == 2) { mid.z = mid2.z = 0.5 * (worst.lo.z + worst.hi.z); }
        push_cell(worst.lo, mid2);
        push_cell(mid, worst.hi);
    }

    WeightedIntegral res;
    res.value = total_est / omega;
    res.err_estimate = total_err / omega;
    res.converged = total_err <= cfg.rel_tol * std::abs(total_est);
    res.evaluations = evals;
    res.backend = "deterministic";
    return res;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

GFactorResult g_factor_numeric(const SampleGeometry& geom, const LeadPair& leads,
                               const QuadratureConfig& cfg, Warnings* warn) {
    WeightedIntegral wi = weighted_pair_integral(
        geom, leads, [](const Vec3&) { return 1.0; }, cfg, warn);
    GFactorResult res;
    res.g = Quantity::cgs(wi.value, Dimension::inv_length());
    res.err_estimate = wi.err_estimate;
    res.converged = wi.converged;
    res.evaluations = wi.evaluations;
    res.backend = wi.backend;
    res.lane = wi.lane;
    return res;
}

WeightedIntegral weighted_pair_integral(const SampleGeometry& geom,
                                        const LeadPair& leads,
                                        const std::function<double(const Vec3&)>& weight,
                                        const QuadratureConfig& cfg, Warnings* warn) {
    cfg.validate();
    if (!(geom.volume() > 0.0)) throw input_error("degenerate region: zero volume");
    validate_leads(geom, leads, warn);
    WeightedIntegral res =
        cfg.method == QuadMethod::DeterministicAdaptive
            ? detail::integrate_deterministic(geom, leads, weight, cfg)
            : detail::integrate_monte_carlo(geom, leads, weight, cfg);
    if (warn && !res.converged)
        warn->push_back("quadrature budget exhausted before tolerance was reached");
    return res;
}

// ---------------------------------------------------------------------------
// Fourier identity oracles
// ---------------------------------------------------------------------------

ScalarIdentity fourier_identity_scalar(double r, double eps, double tol) {
    if (!(r > 0.0)) throw input_error("identity evaluation needs r > 0");
    if (!(eps > 0.0)) throw input_error("regulator must be positive");
    ScalarIdentity out;
    auto q = quadrature::damped_sinc_integral(eps / r, tol);
    out.numeric = 2.0 / (kPi * r) * q.value;
    out.exact = 2.0 / (kPi * r) * std::atan(r / eps);
    out.diff = out.numeric - out.exact;
    return out;
}

VectorIdentity fourier_identity_vector(const Vec3& r_vec, double eps, double tol,
                                       double fd_step_rel) {
    double r = r_vec.norm();
    if (!(r > 0.0)) throw input_error("identity evaluation needs |r| > 0");
    if (!(eps > 0.0)) throw input_error("regulator must be positive");
    double h = fd_step_rel * r;
    if (!(h > 0.0) || r + h == r)
        throw input_error("finite-difference step underflow");

    auto numeric_scalar = [&](double rr) {
        return 2.0 / (kPi * rr) * quadrature::damped_sinc_integral(eps / rr, tol).value;
    };
    double deriv = (numeric_scalar(r + h) - numeric_scalar(r - h)) / (2.0 * h);

    Vec3 unit = r_vec / r;
    VectorIdentity out;
    out.numeric = unit * (-deriv);
    // d/dr of (2/(pi r)) arctan(r/eps), same regulator family
    double exact_deriv =
        2.0 / kPi * (-std::atan(r / eps) / (r * r) + eps / (r * (eps * eps + r * r)));
    out.exact = unit * (-exact_deriv);
    double denom = out.exact.norm();
    out.rel_diff = denom > 0.0 ? (out.numeric - out.exact).norm() / denom : 0.0;
    return out;
}

}  // namespace flicker::geometry
