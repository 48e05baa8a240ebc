#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "flicker/spectral.hpp"
#include "flicker/workbench.hpp"

namespace flicker::workbench {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw input_error(path + ": " + what);
}

double opt_number(const json& in, const char* key, double def) {
    if (!in.contains(key)) return def;
    if (!in.at(key).is_number()) fail(std::string("inputs.") + key, "expected a number");
    return in.at(key).get<double>();
}

std::string opt_string(const json& in, const char* key, const char* def) {
    if (!in.contains(key)) return def;
    if (!in.at(key).is_string()) fail(std::string("inputs.") + key, "expected a string");
    return in.at(key).get<std::string>();
}

}  // namespace

GlobalOptions GlobalOptions::from_inputs(const json& in) {
    GlobalOptions g;
    const std::string u = opt_string(in, "units", "si");
    if (u == "si")
        g.units = UnitSystem::SI;
    else if (u == "cgs")
        g.units = UnitSystem::CGS;
    else
        fail("inputs.units", "expected si or cgs");
    const std::string c = opt_string(in, "constants", "codata");
    if (c == "codata")
        g.constants = ConstantSet::Codata;
    else if (c == "paper-rounded")
        g.constants = ConstantSet::PaperRounded;
    else
        fail("inputs.constants", "expected codata or paper-rounded");
    if (in.contains("seed")) {
        if (!in.at("seed").is_number_unsigned() && !in.at("seed").is_number_integer())
            fail("inputs.seed", "expected a nonnegative integer");
        const auto s = in.at("seed").get<long long>();
        if (s < 0) fail("inputs.seed", "expected a nonnegative integer");
        g.seed = static_cast<std::uint64_t>(s);
    }
    g.tolerance = opt_number(in, "tolerance", 1e-2);
    if (!(g.tolerance > 0.0)) fail("inputs.tolerance", "must be positive");
    g.lane = opt_string(in, "lane", "auto");
    kernels::lane_from_name(g.lane.c_str());  // validates
    return g;
}

json GlobalOptions::to_inputs() const {
    return {{"units", to_string(units)},
            {"constants", constants == ConstantSet::Codata ? "codata" : "paper-rounded"},
            {"seed", seed},
            {"tolerance", tolerance},
            {"lane", lane}};
}

namespace {

SampleDescriptor descriptor_from(const json& in) {
    if (!in.contains("descriptor")) fail("inputs.descriptor", "missing field");
    return ingest(in.at("descriptor"), ".");
}

geometry::QuadratureConfig quad_cfg(const json& in, const GlobalOptions& g) {
    geometry::QuadratureConfig cfg;
    const std::string m = opt_string(in, "method", "monte-carlo");
    if (m == "monte-carlo")
        cfg.method = geometry::QuadMethod::MonteCarlo;
    else if (m == "deterministic")
        cfg.method = geometry::QuadMethod::DeterministicAdaptive;
    else
        fail("inputs.method", "expected monte-carlo or deterministic");
    cfg.rel_tol = std::min(g.tolerance, 0.49);
    cfg.seed = g.seed;
    cfg.lane = kernels::lane_from_name(g.lane.c_str());
    if (in.contains("samples")) {
        const auto s = in.at("samples").get<long long>();
        if (s < 1000) fail("inputs.samples", "need at least 1000 evaluations");
        cfg.budget = static_cast<std::uint64_t>(s);
    }
    return cfg;
}

json inv_length_json(double v_cgs, UnitSystem u) {
    if (u == UnitSystem::CGS) return {{"value", v_cgs}, {"units", "cm^-1"}};
    return {{"value", v_cgs * 100.0}, {"units", "m^-1"}};
}

const char* psd_units_name(UnitSystem u) {
    return u == UnitSystem::CGS ? "statvolt^2 s" : "V^2/Hz";
}

double psd_display(double v_cgs, UnitSystem u) {
    static const double to_si =
        conversion_factor(Dimension::spectral_density(), UnitSystem::CGS, UnitSystem::SI);
    return u == UnitSystem::CGS ? v_cgs : v_cgs * to_si;
}

json voltage_json(double v_statvolt, UnitSystem u) {
    if (u == UnitSystem::CGS) return {{"value", v_statvolt}, {"units", "statvolt"}};
    return {{"value", v_statvolt * 299.792458}, {"units", "V"}};
}

json validity_to_json(const noise::ValidityReport& rep) {
    json entries = json::array();
    for (const auto& e : rep.entries)
        entries.push_back({{"name", e.name},
                           {"value", e.value},
                           {"threshold", e.threshold},
                           {"margin", e.margin},
                           {"status", noise::to_string(e.status)},
                           {"note", e.note}});
    return {{"entries", entries},
            {"trusted_f_lo", rep.trusted_f_lo},
            {"trusted_f_hi", rep.trusted_f_hi},
            {"trusted_window_empty", rep.trusted_window_empty},
            {"notes", rep.notes}};
}

// Geometric factor per the requested backend. "analytic" needs a box and
// ignores the leads; "numeric" integrates with the configured quadrature.
struct GPick {
    Quantity g{Quantity::cgs(0.0, Dimension::inv_length())};
    std::string backend;
    std::string lane;
    double err = 0.0;
    std::uint64_t evaluations = 0;
    bool converged = true;
};

GPick pick_g(const SampleDescriptor& d, const json& in, const GlobalOptions& gopt,
             Warnings* warn) {
    GPick out;
    const std::string sel = opt_string(in, "gfactor", "analytic");
    if (sel == "analytic") {
        const auto* box = std::get_if<geometry::Box>(&d.region);
        if (!box) fail("inputs.gfactor", "analytic needs a box geometry");
        out.g = geometry::g_factor_analytic(*box, warn);
        out.backend = "analytic";
    } else if (sel == "numeric") {
        geometry::SampleGeometry geom{d.region};
        auto r = geometry::g_factor_numeric(geom, d.leads, quad_cfg(in, gopt), warn);
        out.g = r.g;
        out.backend = r.backend;
        out.lane = r.lane;
        out.err = r.err_estimate;
        out.evaluations = r.evaluations;
        out.converged = r.converged;
    } else {
        fail("inputs.gfactor", "expected analytic or numeric");
    }
    return out;
}

std::vector<double> frequency_grid(const json& in) {
    std::vector<double> fs;
    if (in.contains("frequencies")) {
        const json& a = in.at("frequencies");
        if (!a.is_array() || a.empty())
            fail("inputs.frequencies", "expected a nonempty array of numbers");
        for (const auto& v : a) {
            if (!v.is_number()) fail("inputs.frequencies", "expected numbers");
            fs.push_back(v.get<double>());
        }
    } else if (in.contains("grid")) {
        const json& gr = in.at("grid");
        const double lo = opt_number(gr, "f_min", 0.0);
        const double hi = opt_number(gr, "f_max", 0.0);
        const int n = static_cast<int>(opt_number(gr, "points", 0.0));
        if (!(lo > 0.0 && hi >= lo) || n < 1)
            fail("inputs.grid", "need 0 < f_min <= f_max and points >= 1");
        const std::string sp = opt_string(gr, "spacing", "log");
        for (int i = 0; i < n; ++i) {
            const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            fs.push_back(sp == "linear" ? lo + (hi - lo) * t
                                        : lo * std::pow(hi / lo, t));
        }
    } else {
        fail("inputs", "need a frequencies array or a grid block");
    }
    for (double f : fs) {
        if (f == 0.0) fail("inputs.frequencies", "frequency grid contains 0");
        if (!(f > 0.0) || !std::isfinite(f))
            fail("inputs.frequencies", "frequencies must be positive and finite");
    }
    return fs;
}

struct PredictParts {
    noise::NoisePrediction pred;
    GPick g;
    double mu_cgs = 0.0;
    noise::ValidityReport validity;
};

PredictParts predict_parts(const SampleDescriptor& d, const json& in,
                           const GlobalOptions& gopt, double f_lo, double f_hi,
                           Warnings* warn) {
    const Constants& k = constants(gopt.constants);
    transport::Material mat = d.material;
    mat.charge_cgs = k.e;

    PredictParts p;
    p.g = pick_g(d, in, gopt, warn);
    const Quantity mu = transport::effective_mobility(mat, d.T_K, k, warn);
    p.mu_cgs = mu.value;
    noise::BiasCondition bias{d.bias.U0_statvolt, d.T_K};
    p.pred = noise::make_prediction(p.g.g, mu, bias, k);
    const double sep = distance(d.leads.x, d.leads.xp);
    p.validity = noise::validity_report(mat, bias, sep, f_lo, f_hi, k);
    if (warn)
        for (const auto& n : p.validity.notes) warn->push_back(n);
    return p;
}

json prediction_header(const PredictParts& p, UnitSystem u) {
    return {{"eta", p.pred.eta},
            {"g", inv_length_json(p.pred.g_cm_inv, u)},
            {"g_backend", p.g.backend},
            {"mu", {{"value", p.mu_cgs / 299.792458}, {"units", "cm^2/Vs"}}},
            {"U0", voltage_json(p.pred.U0_statvolt, u)},
            {"T_K", p.pred.T_K}};
}

CommandResult cmd_gfactor(const json& in) {
    const GlobalOptions gopt = GlobalOptions::from_inputs(in);
    const SampleDescriptor d = descriptor_from(in);
    CommandResult res;
    const std::string method = opt_string(in, "method", "monte-carlo");
    json out;
    if (method == "analytic") {
        const auto* box = std::get_if<geometry::Box>(&d.region);
        if (!box) fail("inputs.method", "analytic needs a box geometry");
        const Quantity g = geometry::g_factor_analytic(*box, &res.warnings);
        out = {{"g", inv_length_json(g.value, gopt.units)},
               {"err_estimate", inv_length_json(0.0, gopt.units)},
               {"converged", true},
               {"evaluations", 0},
               {"backend", "analytic"},
               {"lane", ""}};
    } else {
        geometry::SampleGeometry geom{d.region};
        const auto r =
            geometry::g_factor_numeric(geom, d.leads, quad_cfg(in, gopt), &res.warnings);
        res.converged = r.converged;
        out = {{"g", inv_length_json(r.g.value, gopt.units)},
               {"err_estimate", inv_length_json(r.err_estimate, gopt.units)},
               {"converged", r.converged},
               {"evaluations", r.evaluations},
               {"backend", r.backend},
               {"lane", r.lane}};
    }
    res.outputs = std::move(out);
    return res;
}

CommandResult cmd_predict(const json& in) {
    const GlobalOptions gopt = GlobalOptions::from_inputs(in);
    const SampleDescriptor d = descriptor_from(in);
    const std::vector<double> fs = frequency_grid(in);
    const double f_lo = *std::min_element(fs.begin(), fs.end());
    const double f_hi = *std::max_element(fs.begin(), fs.end());

    CommandResult res;
    const PredictParts p = predict_parts(d, in, gopt, f_lo, f_hi, &res.warnings);
    res.converged = p.g.converged;

    json rows = json::array();
    for (double f : fs) {
        const double v_cgs =
            p.pred.psd(f, UnitSystem::CGS).value;  // convert once, below
        rows.push_back(json::array({f, psd_display(v_cgs, gopt.units)}));
    }

    json out = prediction_header(p, gopt.units);
    out["spectrum"] = {{"units", psd_units_name(gopt.units)}, {"rows", rows}};
    out["validity"] = validity_to_json(p.validity);

    if (!d.experiment.empty()) {
        static const double to_si = conversion_factor(
            Dimension::spectral_density(), UnitSystem::CGS, UnitSystem::SI);
        json cmp = json::array();
        for (const auto& pt : d.experiment) {
            const double pred_si = p.pred.psd(pt.f_hz, UnitSystem::CGS).value * to_si;
            const double ratio = pred_si / pt.psd_v2_per_hz;
            const double scale = gopt.units == UnitSystem::CGS ? 1.0 / to_si : 1.0;
            cmp.push_back(json::array(
                {pt.f_hz, pred_si * scale, pt.psd_v2_per_hz * scale, ratio}));
        }
        out["comparison"] = {{"units", psd_units_name(gopt.units)}, {"rows", cmp}};
    }
    res.outputs = std::move(out);
    return res;
}

CommandResult cmd_validity(const json& in) {
    const GlobalOptions gopt = GlobalOptions::from_inputs(in);
    const SampleDescriptor d = descriptor_from(in);
    const double f_lo = opt_number(in, "f_lo", 1.0);
    const double f_hi = opt_number(in, "f_hi", f_lo);
    const Constants& k = constants(gopt.constants);
    transport::Material mat = d.material;
    mat.charge_cgs = k.e;
    noise::BiasCondition bias{d.bias.U0_statvolt, d.T_K};
    CommandResult res;
    const auto rep = noise::validity_report(mat, bias, distance(d.leads.x, d.leads.xp),
                                            f_lo, f_hi, k);
    for (const auto& n : rep.notes) res.warnings.push_back(n);
    res.outputs = validity_to_json(rep);
    return res;
}

CommandResult cmd_sweep(const json& in) {
    const GlobalOptions gopt = GlobalOptions::from_inputs(in);
    const SampleDescriptor base = descriptor_from(in);
    const std::string param = opt_string(in, "parameter", "");
    static const std::map<std::string, const char*> kParamUnits = {
        {"U0", "statvolt"}, {"T", "K"}, {"l", "cm"}, {"w", "cm"}, {"h", "cm"}};
    const auto pit = kParamUnits.find(param);
    if (pit == kParamUnits.end())
        fail("inputs.parameter", "expected one of U0, T, l, w, h");
    if (!in.contains("values") || !in.at("values").is_array() ||
        in.at("values").empty())
        fail("inputs.values", "expected a nonempty array of numbers");
    const double f = opt_number(in, "frequency", 1.0);
    if (!(f > 0.0)) fail("inputs.frequency", "must be positive");

    CommandResult res;
    json rows = json::array();
    for (const auto& vj : in.at("values")) {
        if (!vj.is_number()) fail("inputs.values", "expected numbers");
        const double v = vj.get<double>();
        SampleDescriptor d = base;
        if (param == "U0") {
            if (!(v >= 0.0)) fail("inputs.values", "U0 must be nonnegative");
            d.bias.U0_statvolt = v;
        } else if (param == "T") {
            if (!(v > 0.0)) fail("inputs.values", "T must be positive");
            d.T_K = v;
        } else {
            if (!(v > 0.0)) fail("inputs.values", "extents must be positive");
            const auto* box = std::get_if<geometry::Box>(&base.region);
            if (!box) fail("inputs.parameter", "dimension sweeps need a box geometry");
            double l = box->l, w = box->w, h = box->h;
            (param == "l" ? l : param == "w" ? w : h) = v;
            geometry::Box nb(l, w, h);
            // keep the leads at the same relative position in the new box
            auto remap = [&](const Vec3& q) {
                return Vec3{box->l > 0 ? q.x / box->l * nb.l : q.x,
                            box->w > 0 ? q.y / box->w * nb.w : q.y,
                            box->h > 0 ? q.z / box->h * nb.h : q.z};
            };
            d.leads.x = remap(base.leads.x);
            d.leads.xp = remap(base.leads.xp);
            d.region = nb;
        }
        const PredictParts p = predict_parts(d, in, gopt, f, f, &res.warnings);
        if (!p.g.converged) res.converged = false;
        const double v_cgs = p.pred.psd(f, UnitSystem::CGS).value;
        rows.push_back(json::array({v, f, p.pred.eta, psd_display(v_cgs, gopt.units)}));
    }
    res.outputs = {{"parameter", param},
                   {"parameter_units", pit->second},
                   {"psd_units", psd_units_name(gopt.units)},
                   {"rows", rows}};
    return res;
}

CommandResult cmd_compare(const json& in) {
    const GlobalOptions gopt = GlobalOptions::from_inputs(in);
    const SampleDescriptor d = descriptor_from(in);
    if (d.experiment.empty())
        fail("inputs.descriptor", "no experimental reference points to compare against");
    double f_lo = d.experiment.front().f_hz, f_hi = f_lo;
    for (const auto& p : d.experiment) {
        f_lo = std::min(f_lo, p.f_hz);
        f_hi = std::max(f_hi, p.f_hz);
    }
    CommandResult res;
    const PredictParts p = predict_parts(d, in, gopt, f_lo, f_hi, &res.warnings);
    res.converged = p.g.converged;
    static const double to_si = conversion_factor(Dimension::spectral_density(),
                                                  UnitSystem::CGS, UnitSystem::SI);
    const double scale = gopt.units == UnitSystem::CGS ? 1.0 / to_si : 1.0;
    json rows = json::array();
    for (const auto& pt : d.experiment) {
        const double pred_si = p.pred.psd(pt.f_hz, UnitSystem::CGS).value * to_si;
        rows.push_back(json::array({pt.f_hz, pred_si * scale,
                                    pt.psd_v2_per_hz * scale,
                                    pred_si / pt.psd_v2_per_hz}));
    }
    json out = prediction_header(p, gopt.units);
    out["units"] = psd_units_name(gopt.units);
    out["rows"] = rows;
    out["validity"] = validity_to_json(p.validity);
    res.outputs = std::move(out);
    return res;
}

CommandResult cmd_fourier(const json& in) {
    const std::string mode = opt_string(in, "mode", "");
    const double tol = opt_number(in, "tolerance", 1e-8);
    CommandResult res;
    if (mode == "correlation") {
        const double A = opt_number(in, "amplitude", 1.0);
        const double tau = opt_number(in, "tau", std::numeric_limits<double>::quiet_NaN());
        if (!std::isfinite(tau)) fail("inputs.tau", "missing or not a number");
        double F = std::numeric_limits<double>::infinity();
        if (in.contains("cutoff") && !(in.at("cutoff").is_string() &&
                                       in.at("cutoff").get<std::string>() == "inf"))
            F = opt_number(in, "cutoff", F);
        const auto c = spectral::correlation_from_odd_psd(A, tau, F, tol);
        res.converged = c.converged;
        res.outputs = {{"mode", mode},          {"value", c.value},
                       {"err_estimate", c.err_estimate}, {"tail_bound", c.tail_bound},
                       {"converged", c.converged},       {"exact", c.exact}};
    } else if (mode == "convergence") {
        const double gamma = opt_number(in, "gamma", 1.0);
        const double tau = opt_number(in, "tau", 1.0);
        if (!in.contains("cutoffs") || !in.at("cutoffs").is_array())
            fail("inputs.cutoffs", "expected an array of numbers");
        std::vector<double> Fs;
        for (const auto& v : in.at("cutoffs")) Fs.push_back(v.get<double>());
        const auto rep = spectral::total_power_convergence(gamma, tau, Fs, tol);
        json entries = json::array();
        for (const auto& e : rep.entries)
            entries.push_back(json::array(
                {e.F, e.value, e.tail_bound, e.even_diagnostic}));
        res.outputs = {{"mode", mode},
                       {"entries", entries},
                       {"convergent", rep.convergent},
                       {"limit_estimate", rep.limit_estimate},
                       {"even_diverges", rep.even_diverges},
                       {"even_growth", rep.even_growth}};
    } else if (mode == "parity") {
        if (!in.contains("series")) fail("inputs.series", "missing field");
        const json& s = in.at("series");
        spectral::SpectrumSeries ser;
        for (const char* key : {"omega", "re", "im"})
            if (!s.contains(key) || !s.at(key).is_array())
                fail(std::string("inputs.series.") + key, "expected an array");
        const auto& om = s.at("omega");
        const auto& re = s.at("re");
        const auto& im = s.at("im");
        if (om.size() != re.size() || om.size() != im.size())
            fail("inputs.series", "omega, re, im must have equal length");
        for (std::size_t i = 0; i < om.size(); ++i) {
            ser.omega.push_back(om[i].get<double>());
            ser.value.emplace_back(re[i].get<double>(), im[i].get<double>());
        }
        const auto parts = spectral::psd_parity_decompose(ser);
        json rows = json::array();
        for (std::size_t i = 0; i < ser.omega.size(); ++i)
            rows.push_back(json::array({ser.omega[i], parts.even_real[i],
                                        parts.odd_imag[i], parts.residual[i].real(),
                                        parts.residual[i].imag()}));
        res.outputs = {{"mode", mode},
                       {"rows", rows},
                       {"input_norm", parts.input_norm},
                       {"residual_norm", parts.residual_norm}};
    } else {
        fail("inputs.mode", "expected correlation, convergence, or parity");
    }
    return res;
}

CommandResult cmd_verify_identities(const json& in) {
    const double r = opt_number(in, "r", 1.0);
    const double scalar_tol = opt_number(in, "scalar_tolerance", 1e-6);
    const double vector_tol = opt_number(in, "vector_tolerance", 1e-4);
    std::vector<double> ratios{1e-2, 1e-3};
    if (in.contains("ratios")) {
        ratios.clear();
        for (const auto& v : in.at("ratios")) ratios.push_back(v.get<double>());
        if (ratios.empty()) fail("inputs.ratios", "expected a nonempty array");
    }
    CommandResult res;
    bool all_ok = true;
    json scalar = json::array();
    for (double ratio : ratios) {
        const auto id = geometry::fourier_identity_scalar(r, ratio * r);
        const double rel = std::abs(id.diff) / std::abs(id.exact);
        const bool ok = rel <= scalar_tol;
        all_ok = all_ok && ok;
        scalar.push_back({{"r", r},
                          {"eps_over_r", ratio},
                          {"numeric", id.numeric},
                          {"exact", id.exact},
                          {"rel_diff", rel},
                          {"ok", ok}});
    }
    Vec3 rv{0.0, 0.0, 2.0};
    if (in.contains("r_vec")) {
        const auto& a = in.at("r_vec");
        if (!a.is_array() || a.size() != 3)
            fail("inputs.r_vec", "expected an array of three numbers");
        rv = Vec3{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
    }
    const double eps = opt_number(in, "eps", 1e-3);
    const auto vid = geometry::fourier_identity_vector(rv, eps);
    const bool vok = vid.rel_diff <= vector_tol;
    all_ok = all_ok && vok;
    res.outputs = {
        {"scalar", scalar},
        {"vector",
         {{"r_vec", json::array({rv.x, rv.y, rv.z})},
          {"eps", eps},
          {"numeric", json::array({vid.numeric.x, vid.numeric.y, vid.numeric.z})},
          {"exact", json::array({vid.exact.x, vid.exact.y, vid.exact.z})},
          {"magnitude", vid.numeric.norm()},
          {"rel_diff", vid.rel_diff},
          {"ok", vok}}},
        {"all_ok", all_ok}};
    res.converged = all_ok;
    if (!all_ok)
        res.warnings.push_back("identity verification outside tolerance");
    return res;
}

CommandResult cmd_bose(const json& in) {
    const GlobalOptions gopt = GlobalOptions::from_inputs(in);
    const double omega = opt_number(in, "omega", 0.0);
    const double T = opt_number(in, "temperature", 0.0);
    const auto b = noise::bose_approx_error(omega, T, constants(gopt.constants));
    CommandResult res;
    res.outputs = {{"x", b.x},
                   {"exact", b.exact},
                   {"approx", b.approx},
                   {"rel_error", b.rel_error}};
    return res;
}

}  // namespace

CommandResult run_command(const std::string& command, const json& inputs) {
    if (command == "gfactor") return cmd_gfactor(inputs);
    if (command == "predict") return cmd_predict(inputs);
    if (command == "sweep") return cmd_sweep(inputs);
    if (command == "validity") return cmd_validity(inputs);
    if (command == "compare") return cmd_compare(inputs);
    if (command == "fourier") return cmd_fourier(inputs);
    if (command == "verify-identities") return cmd_verify_identities(inputs);
    if (command == "bose") return cmd_bose(inputs);
    throw input_error("unknown command '" + command + "'");
}

namespace {

void csv_row(std::ostringstream& os, const json& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        const auto& c = row[i];
        if (c.is_number_float())
            os << format_double(c.get<double>());
        else if (c.is_number_integer())
            os << c.get<long long>();
        else if (c.is_boolean())
            os << (c.get<bool>() ? "true" : "false");
        else
            os << c.get<std::string>();
    }
    os << '\n';
}

void validity_comments(std::ostringstream& os, const json& v) {
    for (const auto& e : v.at("entries")) {
        os << "# validity " << e.at("name").get<std::string>()
           << ": margin=" << format_double(e.at("margin").get<double>())
           << " status=" << e.at("status").get<std::string>();
        const std::string note = e.at("note").get<std::string>();
        if (!note.empty()) os << " (" << note << ")";
        os << '\n';
    }
    if (v.at("trusted_window_empty").get<bool>()) {
        os << "# validity trusted window: empty\n";
    } else {
        os << "# validity trusted window: "
           << format_double(v.at("trusted_f_lo").get<double>()) << " Hz to "
           << format_double(v.at("trusted_f_hi").get<double>()) << " Hz\n";
    }
    for (const auto& n : v.at("notes"))
        os << "# note: " << n.get<std::string>() << '\n';
}

void prediction_comments(std::ostringstream& os, const json& out) {
    os << "# eta = " << format_double(out.at("eta").get<double>()) << '\n';
    const json& g = out.at("g");
    os << "# g = " << format_double(g.at("value").get<double>()) << ' '
       << g.at("units").get<std::string>() << " (" << out.at("g_backend").get<std::string>()
       << ")\n";
    const json& mu = out.at("mu");
    os << "# mu = " << format_double(mu.at("value").get<double>()) << ' '
       << mu.at("units").get<std::string>() << '\n';
    const json& u0 = out.at("U0");
    os << "# U0 = " << format_double(u0.at("value").get<double>()) << ' '
       << u0.at("units").get<std::string>() << '\n';
    os << "# T = " << format_double(out.at("T_K").get<double>()) << " K\n";
}

std::string spectrum_column(const json& out, const char* key) {
    const std::string u = out.at(key).at("units").get<std::string>();
    return u == "V^2/Hz" ? "c_u_v2_per_hz" : "c_u_statvolt2_s";
}

}  // namespace

std::string render_csv(const std::string& command, const json& out) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    if (command == "gfactor") {
        os << "# backend = " << out.at("backend").get<std::string>() << '\n';
        const std::string lane = out.at("lane").get<std::string>();
        if (!lane.empty()) os << "# lane = " << lane << '\n';
        os << "# evaluations = " << out.at("evaluations").get<long long>() << '\n';
        os << "# converged = " << (out.at("converged").get<bool>() ? "true" : "false")
           << '\n';
        os << "g,err_estimate,units\n";
        csv_row(os, json::array({out.at("g").at("value"),
                                 out.at("err_estimate").at("value"),
                                 out.at("g").at("units")}));
    } else if (command == "predict") {
        prediction_comments(os, out);
        validity_comments(os, out.at("validity"));
        os << "f_hz," << spectrum_column(out, "spectrum") << '\n';
        for (const auto& row : out.at("spectrum").at("rows")) csv_row(os, row);
        if (out.contains("comparison")) {
            os << "# comparison columns: f_hz,predicted,measured,ratio\n";
            for (const auto& row : out.at("comparison").at("rows")) {
                os << "# comparison ";
                csv_row(os, row);
            }
        }
    } else if (command == "sweep") {
        os << "# parameter = " << out.at("parameter").get<std::string>() << " ["
           << out.at("parameter_units").get<std::string>() << "]\n";
        const std::string pc = out.at("psd_units").get<std::string>() == "V^2/Hz"
                                   ? "c_u_v2_per_hz"
                                   : "c_u_statvolt2_s";
        os << "value,f_hz,eta," << pc << '\n';
        for (const auto& row : out.at("rows")) csv_row(os, row);
    } else if (command == "validity") {
        os << "name,value,threshold,margin,status,note\n";
        for (const auto& e : out.at("entries"))
            csv_row(os, json::array({e.at("name"), e.at("value"), e.at("threshold"),
                                     e.at("margin"), e.at("status"), e.at("note")}));
        validity_comments(os, out);
    } else if (command == "compare") {
        prediction_comments(os, out);
        validity_comments(os, out.at("validity"));
        const std::string pc = out.at("units").get<std::string>() == "V^2/Hz"
                                   ? "v2_per_hz"
                                   : "statvolt2_s";
        os << "f_hz,predicted_" << pc << ",measured_" << pc << ",ratio\n";
        for (const auto& row : out.at("rows")) csv_row(os, row);
    } else if (command == "fourier") {
        const std::string mode = out.at("mode").get<std::string>();
        if (mode == "correlation") {
            os << "value,err_estimate,tail_bound,converged,exact\n";
            csv_row(os, json::array({out.at("value"), out.at("err_estimate"),
                                     out.at("tail_bound"), out.at("converged"),
                                     out.at("exact")}));
        } else if (mode == "convergence") {
            os << "# convergent = "
               << (out.at("convergent").get<bool>() ? "true" : "false") << '\n';
            os << "# limit_estimate = "
               << format_double(out.at("limit_estimate").get<double>()) << '\n';
            os << "# even continuation grows like "
               << out.at("even_growth").get<std::string>() << '\n';
            os << "F,value,tail_bound,even_diagnostic\n";
            for (const auto& row : out.at("entries")) csv_row(os, row);
        } else {
            os << "# input_norm = " << format_double(out.at("input_norm").get<double>())
               << '\n';
            os << "# residual_norm = "
               << format_double(out.at("residual_norm").get<double>()) << '\n';
            os << "omega,even_real,odd_imag,residual_re,residual_im\n";
            for (const auto& row : out.at("rows")) csv_row(os, row);
        }
    } else if (command == "verify-identities") {
        os << "# all_ok = " << (out.at("all_ok").get<bool>() ? "true" : "false") << '\n';
        os << "case,r,eps,numeric,exact,rel_diff,ok\n";
        for (const auto& e : out.at("scalar"))
            csv_row(os, json::array({"scalar", e.at("r"),
                                     e.at("eps_over_r").get<double>() * e.at("r").get<double>(),
                                     e.at("numeric"), e.at("exact"), e.at("rel_diff"),
                                     e.at("ok")}));
        const json& v = out.at("vector");
        csv_row(os, json::array({"vector-magnitude", v.at("r_vec")[2], v.at("eps"),
                                 v.at("magnitude"),
                                 json(std::abs(v.at("exact")[2].get<double>())),
                                 v.at("rel_diff"), v.at("ok")}));
    } else if (command == "bose") {
        os << "x,exact,approx,rel_error\n";
        csv_row(os, json::array({out.at("x"), out.at("exact"), out.at("approx"),
                                 out.at("rel_error")}));
    } else {
        throw input_error("unknown command '" + command + "'");
    }
    return os.str();
}

}  // namespace flicker::workbench
