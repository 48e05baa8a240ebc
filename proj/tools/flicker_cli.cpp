// Command-line front end. All computation lives in the library; this file
// only turns argv into a resolved-inputs JSON object, runs the command, and
// renders the outputs. Keeping that boundary strict is what makes recorded
// runs replayable: the record stores exactly what run_command consumed.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "flicker/workbench.hpp"

namespace wb = flicker::workbench;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;        // bad arguments, schema violations
constexpr int kExitNoConvergence = 3;

struct GlobalArgs {
    std::string units = "si";
    std::string constants = "codata";
    std::string output = "csv";
    std::string lane = "auto";
    std::uint64_t seed = 1;
    double tolerance = 1e-2;
    bool tolerance_set = false;
    std::string record_path;
};

json base_inputs(const GlobalArgs& g) {
    json in = {{"units", g.units},
               {"constants", g.constants},
               {"seed", g.seed},
               {"lane", g.lane}};
    if (g.tolerance_set) in["tolerance"] = g.tolerance;
    return in;
}

void attach_descriptor(json& in, const std::string& path) {
    in["descriptor"] = wb::emit(wb::ingest_file(path));
}

int finish(const GlobalArgs& g, const std::string& command, const json& inputs,
           const wb::CommandResult& res) {
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
    if (g.output == "json")
        std::cout << res.outputs.dump(2) << '\n';
    else
        std::cout << wb::render_csv(command, res.outputs);
    if (!g.record_path.empty()) {
        wb::RunRecord rec;
        rec.tool_version = wb::kToolVersion;
        rec.command = command;
        rec.inputs = inputs;
        rec.outputs = res.outputs;
        rec.warnings = res.warnings;
        std::ofstream out(g.record_path);
        if (!out) {
            std::cerr << "error: cannot write record file '" << g.record_path << "'\n";
            return kExitInput;
        }
        out << rec.to_json().dump(2) << '\n';
    }
    return res.converged ? kExitOk : kExitNoConvergence;
}

int run_replay(const GlobalArgs& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open record file '" << path << "'\n";
        return kExitInput;
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        std::cerr << "error: record file is not valid JSON: " << e.what() << '\n';
        return kExitInput;
    }
    const wb::RunRecord rec = wb::RunRecord::from_json(j);
    const wb::CommandResult res = wb::run_command(rec.command, rec.inputs);
    const std::string got = res.outputs.dump();
    const std::string want = rec.outputs.dump();
    if (got != want) {
        std::cerr << "replay mismatch for command '" << rec.command << "'\n";
        std::cerr << "recorded: " << want.substr(0, 400) << '\n';
        std::cerr << "replayed: " << got.substr(0, 400) << '\n';
        return 1;
    }
    std::cout << "replay ok: '" << rec.command << "' outputs reproduced exactly\n";
    if (g.output == "json") std::cout << res.outputs.dump(2) << '\n';
    return kExitOk;
}

// sweep values arrive in display units and are normalized here, so that the
// recorded inputs are unambiguous CGS like everything else
double sweep_to_cgs(const std::string& parameter, const std::string& units_in,
                    double v) {
    if (parameter == "U0") return units_in == "si" ? v / 299.792458 : v;
    if (parameter == "T") return v;
    return units_in == "si" ? v * 100.0 : v;  // box extents: m -> cm
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-flicker voltage-noise workbench"};
    app.require_subcommand(1);
    app.fallthrough();  // let the global flags appear after the subcommand

    GlobalArgs g;
    app.add_option("--units", g.units, "output unit system")
        ->check(CLI::IsMember({"si", "cgs"}));
    app.add_option("--constants", g.constants, "physical constant set")
        ->check(CLI::IsMember({"codata", "paper-rounded"}));
    app.add_option("--seed", g.seed, "Monte Carlo seed");
    auto* tol_opt = app.add_option("--tolerance", g.tolerance,
                                   "relative tolerance for numeric backends");
    app.add_option("--output", g.output, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--simd", g.lane, "kernel lane (auto, scalar, avx2)")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
    app.add_option("--record", g.record_path, "write a run record to this file");

    std::string descriptor;
    std::string method = "monte-carlo";
    std::string gfactor_sel = "analytic";
    long long samples = -1;

    auto add_quad_opts = [&](CLI::App* sub) {
        sub->add_option("--method", method, "numeric backend")
            ->check(CLI::IsMember({"analytic", "monte-carlo", "mc", "deterministic", "det"}));
        sub->add_option("--samples", samples, "integrand evaluation budget");
    };
    auto add_gfactor_sel = [&](CLI::App* sub) {
        sub->add_option("--gfactor", gfactor_sel, "geometric factor backend")
            ->check(CLI::IsMember({"analytic", "numeric"}));
    };
    auto canon_method = [&]() -> std::string {
        if (method == "mc") return "monte-carlo";
        if (method == "det") return "deterministic";
        return method;
    };

    auto* sc_gfactor = app.add_subcommand("gfactor", "geometric factor of a sample");
    sc_gfactor->add_option("--descriptor", descriptor, "sample descriptor JSON")
        ->required();
    add_quad_opts(sc_gfactor);

    std::vector<double> frequencies;
    double f_min = 0.0, f_max = 0.0;
    int points = 0;
    std::string spacing = "log";
    auto* sc_predict = app.add_subcommand("predict", "voltage-noise spectrum");
    sc_predict->add_option("--descriptor", descriptor)->required();
    sc_predict->add_option("--frequencies", frequencies, "explicit f list, Hz")
        ->delimiter(',');
    sc_predict->add_option("--f-min", f_min, "grid start, Hz");
    sc_predict->add_option("--f-max", f_max, "grid end, Hz");
    sc_predict->add_option("--points", points, "grid size");
    sc_predict->add_option("--spacing", spacing)->check(CLI::IsMember({"log", "linear"}));
    add_gfactor_sel(sc_predict);
    add_quad_opts(sc_predict);

    std::string parameter;
    std::vector<double> values;
    double sweep_from = 0.0, sweep_to = 0.0, sweep_frequency = 1.0;
    int sweep_points = 0;
    std::string sweep_units_in = "cgs", sweep_spacing = "linear";
    auto* sc_sweep = app.add_subcommand("sweep", "parameter sweep, long-format table");
    sc_sweep->add_option("--descriptor", descriptor)->required();
    sc_sweep->add_option("--parameter", parameter, "U0, T, l, w, or h")->required();
    sc_sweep->add_option("--values", values, "explicit values")->delimiter(',');
    sc_sweep->add_option("--from", sweep_from);
    sc_sweep->add_option("--to", sweep_to);
    sc_sweep->add_option("--points", sweep_points);
    sc_sweep->add_option("--spacing", sweep_spacing)
        ->check(CLI::IsMember({"linear", "log"}));
    sc_sweep->add_option("--units-in", sweep_units_in,
                         "units of the sweep values (si: V/m, cgs: statvolt/cm)")
        ->check(CLI::IsMember({"si", "cgs"}));
    sc_sweep->add_option("--frequency", sweep_frequency, "evaluation frequency, Hz");
    add_gfactor_sel(sc_sweep);
    add_quad_opts(sc_sweep);

    double f_lo = 1.0, f_hi = 1.0;
    auto* sc_validity = app.add_subcommand("validity", "applicability bounds report");
    sc_validity->add_option("--descriptor", descriptor)->required();
    sc_validity->add_option("--f-lo", f_lo, "band start, Hz");
    auto* fhi_opt = sc_validity->add_option("--f-hi", f_hi, "band end, Hz");

    auto* sc_compare = app.add_subcommand("compare",
                                          "prediction vs experimental reference");
    sc_compare->add_option("--descriptor", descriptor)->required();
    add_gfactor_sel(sc_compare);
    add_quad_opts(sc_compare);

    auto* sc_fourier = app.add_subcommand("fourier", "odd-spectrum toolkit");
    sc_fourier->require_subcommand(1);
    double amplitude = 1.0, tau = 1.0, gamma = 1.0;
    std::string cutoff = "inf";
    std::vector<double> cutoffs;
    std::string series_path;
    auto* sc_corr = sc_fourier->add_subcommand("correlation",
                                               "band-limited correlation at a lag");
    sc_corr->add_option("--amplitude", amplitude);
    sc_corr->add_option("--tau", tau)->required();
    sc_corr->add_option("--cutoff", cutoff, "band cutoff in Hz, or inf");
    auto* sc_conv = sc_fourier->add_subcommand("convergence",
                                               "band-power convergence diagnostics");
    sc_conv->add_option("--gamma", gamma)->required();
    sc_conv->add_option("--tau", tau);
    sc_conv->add_option("--cutoffs", cutoffs)->delimiter(',')->required();
    auto* sc_parity = sc_fourier->add_subcommand("parity",
                                                 "even/odd split of a sampled spectrum");
    sc_parity->add_option("--input", series_path,
                          "JSON file with omega, re, im arrays")
        ->required();

    double vid_eps = 1e-3, vid_r = 1.0;
    std::vector<double> ratios;
    std::vector<double> r_vec;
    auto* sc_verify = app.add_subcommand("verify-identities",
                                         "momentum-space identity oracles");
    sc_verify->add_option("--r", vid_r, "scalar identity radius");
    sc_verify->add_option("--ratios", ratios, "eps/r values")->delimiter(',');
    sc_verify->add_option("--eps", vid_eps, "vector identity regulator");
    sc_verify->add_option("--r-vec", r_vec, "vector identity point")->delimiter(',');

    double omega = 0.0, temperature = 0.0;
    auto* sc_bose = app.add_subcommand("bose", "occupation-number approximation check");
    sc_bose->add_option("--omega", omega, "angular frequency, 1/s")->required();
    sc_bose->add_option("--temperature", temperature, "K")->required();

    std::string record_file;
    auto* sc_replay = app.add_subcommand("replay", "re-run a recorded command");
    sc_replay->add_option("record", record_file, "run-record JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }
    g.tolerance_set = tol_opt->count() > 0;

    try {
        std::string command;
        json in = base_inputs(g);
        if (sc_gfactor->parsed()) {
            command = "gfactor";
            attach_descriptor(in, descriptor);
            in["method"] = canon_method();
            if (samples >= 0) in["samples"] = samples;
        } else if (sc_predict->parsed()) {
            command = "predict";
            attach_descriptor(in, descriptor);
            if (!frequencies.empty())
                in["frequencies"] = frequencies;
            else
                in["grid"] = {{"f_min", f_min},
                              {"f_max", f_max},
                              {"points", points},
                              {"spacing", spacing}};
            in["gfactor"] = gfactor_sel;
            in["method"] = canon_method();
            if (samples >= 0) in["samples"] = samples;
        } else if (sc_sweep->parsed()) {
            command = "sweep";
            attach_descriptor(in, descriptor);
            std::vector<double> vals = values;
            if (vals.empty()) {
                if (sweep_points < 1 || !(sweep_from > 0.0 || parameter == "U0") ||
                    !(sweep_to >= sweep_from))
                    throw flicker::input_error(
                        "sweep needs --values or --from/--to/--points");
                for (int i = 0; i < sweep_points; ++i) {
                    const double t =
                        sweep_points == 1 ? 0.0
                                          : static_cast<double>(i) / (sweep_points - 1);
                    vals.push_back(sweep_spacing == "log"
                                       ? sweep_from * std::pow(sweep_to / sweep_from, t)
                                       : sweep_from + (sweep_to - sweep_from) * t);
                }
            }
            for (double& v : vals) v = sweep_to_cgs(parameter, sweep_units_in, v);
            in["parameter"] = parameter;
            in["values"] = vals;
            in["frequency"] = sweep_frequency;
            in["gfactor"] = gfactor_sel;
            in["method"] = canon_method();
            if (samples >= 0) in["samples"] = samples;
        } else if (sc_validity->parsed()) {
            command = "validity";
            attach_descriptor(in, descriptor);
            in["f_lo"] = f_lo;
            in["f_hi"] = fhi_opt->count() > 0 ? f_hi : f_lo;
        } else if (sc_compare->parsed()) {
            command = "compare";
            attach_descriptor(in, descriptor);
            in["gfactor"] = gfactor_sel;
            in["method"] = canon_method();
            if (samples >= 0) in["samples"] = samples;
        } else if (sc_fourier->parsed()) {
            command = "fourier";
            if (sc_corr->parsed()) {
                in["mode"] = "correlation";
                in["amplitude"] = amplitude;
                in["tau"] = tau;
                if (cutoff == "inf")
                    in["cutoff"] = "inf";
                else
                    in["cutoff"] = std::stod(cutoff);
            } else if (sc_conv->parsed()) {
                in["mode"] = "convergence";
                in["gamma"] = gamma;
                in["tau"] = tau;
                in["cutoffs"] = cutoffs;
            } else {
                in["mode"] = "parity";
                std::ifstream sin(series_path);
                if (!sin)
                    throw flicker::input_error("cannot open series file '" +
                                               series_path + "'");
                in["series"] = json::parse(sin);
            }
        } else if (sc_verify->parsed()) {
            command = "verify-identities";
            in["r"] = vid_r;
            if (!ratios.empty()) in["ratios"] = ratios;
            in["eps"] = vid_eps;
            if (!r_vec.empty()) {
                if (r_vec.size() != 3)
                    throw flicker::input_error("--r-vec needs three components");
                in["r_vec"] = r_vec;
            }
        } else if (sc_bose->parsed()) {
            command = "bose";
            in["omega"] = omega;
            in["temperature"] = temperature;
        } else if (sc_replay->parsed()) {
            return run_replay(g, record_file);
        }

        const wb::CommandResult res = wb::run_command(command, in);
        return finish(g, command, in, res);
    } catch (const flicker::input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const flicker::convergence_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoConvergence;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
