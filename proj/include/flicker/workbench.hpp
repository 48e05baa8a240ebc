#pragma once
// Descriptor I/O and the command layer shared by the CLI and the tests.
//
// A command is a pure function from a resolved-inputs JSON object to a
// structured outputs JSON object. The CLI only builds inputs from argv and
// renders outputs; replaying a saved run re-executes the same function on
// the recorded inputs and must reproduce the recorded outputs bit for bit
// (Monte Carlo included: the seed is part of the inputs).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "flicker/errors.hpp"
#include "flicker/geometry.hpp"
#include "flicker/noise.hpp"
#include "flicker/transport.hpp"
#include "flicker/units.hpp"

namespace flicker::workbench {

inline constexpr const char* kToolVersion = "flicker 1.2.0";

struct ExperimentPoint {
    double f_hz = 0.0;
    double psd_v2_per_hz = 0.0;  // experimental references are quoted in SI
};

struct BiasSpec {
    double U0_statvolt = 0.0;
    std::optional<Vec3> direction;  // defaults to the lead axis downstream
};

// Everything in internal CGS after ingestion; the material's carrier charge
// stays unset here because it belongs to the constant set chosen at run
// time, not to the sample.
struct SampleDescriptor {
    int schema_version = 1;
    std::string name;
    geometry::Region region{geometry::Box{1.0, 1.0, 1.0}};
    geometry::LeadPair leads;
    transport::Material material;
    BiasSpec bias;
    double T_K = 0.0;
    std::vector<ExperimentPoint> experiment;
};

// Parses and validates a descriptor. Errors name the offending field path
// and what was expected. `base_dir` resolves relative voxel-mask file refs.
SampleDescriptor ingest(const nlohmann::json& j, const std::string& base_dir = ".");
SampleDescriptor ingest_file(const std::string& path);

// Serializes back out in CGS; emit(ingest(x)) re-ingests to the same
// descriptor.
nlohmann::json emit(const SampleDescriptor& d);

struct RunRecord {
    std::string tool_version;
    std::string command;
    nlohmann::json inputs;  // post unit-normalization, includes seed etc.
    nlohmann::json outputs;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
    static RunRecord from_json(const nlohmann::json& j);
};

struct CommandResult {
    nlohmann::json outputs;
    Warnings warnings;
    bool converged = true;  // false maps to the CLI's exit code 3
};

// command is one of: gfactor, predict, sweep, validity, compare, fourier,
// verify-identities, bose. Throws input_error for unknown commands or bad
// inputs.
CommandResult run_command(const std::string& command, const nlohmann::json& inputs);

// Renders a command's outputs as CSV (locale independent, '#' metadata
// lines, then a header row naming the columns and units).
std::string render_csv(const std::string& command, const nlohmann::json& outputs);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Common resolved-input fields with their defaults applied.
struct GlobalOptions {
    UnitSystem units = UnitSystem::SI;
    ConstantSet constants = ConstantSet::Codata;
    std::uint64_t seed = 1;
    double tolerance = 1e-2;
    std::string lane = "auto";

    static GlobalOptions from_inputs(const nlohmann::json& inputs);
    nlohmann::json to_inputs() const;
};

}  // namespace flicker::workbench
