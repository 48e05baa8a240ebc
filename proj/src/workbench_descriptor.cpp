#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "flicker/workbench.hpp"

namespace flicker::workbench {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

// Unit tokens and their factors into the stored unit of each quantity kind.
// The stored unit's own token maps to exactly 1.0 so that emitting and
// re-ingesting a descriptor reproduces every stored double bit for bit.
struct UnitTable {
    const char* kind;          // for error messages
    const char* stored_token;  // what emit() writes
    std::map<std::string, double> factor;
};

const UnitTable& length_units() {
    static const UnitTable t{"length", "cm",
                             {{"cm", 1.0},
                              {"m", 1e2},
                              {"mm", 1e-1},
                              {"um", 1e-4},
                              {"micron", 1e-4},
                              {"nm", 1e-7},
                              {"angstrom", 1e-8}}};
    return t;
}

const UnitTable& voltage_units() {
    static const UnitTable t{"voltage", "statvolt",
                             {{"statvolt", 1.0},
                              {"V", 1.0 / 299.792458},
                              {"mV", 1e-3 / 299.792458}}};
    return t;
}

const UnitTable& conductivity_units() {
    static const UnitTable t{
        "conductivity", "s^-1",
        {{"s^-1", 1.0},
         {"S/m", conversion_factor(Dimension::conductivity(), UnitSystem::SI,
                                   UnitSystem::CGS)}}};
    return t;
}

const UnitTable& density_units() {
    static const UnitTable t{"number density", "cm^-3",
                             {{"cm^-3", 1.0}, {"m^-3", 1e-6}}};
    return t;
}

const UnitTable& mobility_units() {
    // stored in the lab unit cm^2/(V s); the CGS token converts down
    static const UnitTable t{"mobility", "cm^2/Vs",
                             {{"cm^2/Vs", 1.0},
                              {"m^2/Vs", 1e4},
                              {"cm^2/statvolt s", 1.0 / 299.792458}}};
    return t;
}

const UnitTable& mass_units() {
    static const UnitTable t{"mass", "g",
                             {{"g", 1.0}, {"kg", 1e3}, {"m_e", 9.1093837015e-28}}};
    return t;
}

const UnitTable& temperature_units() {
    static const UnitTable t{"temperature", "K", {{"K", 1.0}}};
    return t;
}

const UnitTable& frequency_units() {
    static const UnitTable t{"frequency", "Hz",
                             {{"Hz", 1.0}, {"mHz", 1e-3}, {"kHz", 1e3}}};
    return t;
}

const UnitTable& psd_units() {
    // experimental reference spectra are stored in SI
    static const UnitTable t{
        "spectral density", "V^2/Hz",
        {{"V^2/Hz", 1.0},
         {"statvolt^2 s", conversion_factor(Dimension::spectral_density(),
                                            UnitSystem::CGS, UnitSystem::SI)}}};
    return t;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw input_error(path + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing field");
    return *it;
}

double need_number(const json& j, const char* key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::string need_string(const json& j, const char* key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

// {"value": x, "units": "..."} resolved through a unit table
double quantity_in(const json& block, const std::string& path, const UnitTable& t) {
    const double v = need_number(block, "value", path);
    const std::string u = need_string(block, "units", path);
    auto it = t.factor.find(u);
    if (it == t.factor.end())
        fail(path + ".units", "unknown " + std::string(t.kind) + " unit '" + u + "'");
    if (!std::isfinite(v)) fail(path + ".value", "value must be finite");
    return v * it->second;
}

Vec3 need_vec3(const json& j, const char* key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number())
        fail(path + "." + key, "expected an array of three numbers");
    return Vec3{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

geometry::Region parse_voxel_block(const json& g, const std::string& path,
                                   const std::string& base_dir) {
    json block = g;
    if (g.contains("file")) {
        const std::string ref = need_string(g, "file", path);
        const std::filesystem::path p = std::filesystem::path(base_dir) / ref;
        std::ifstream in(p);
        if (!in) fail(path + ".file", "cannot open voxel mask file '" + p.string() + "'");
        try {
            block = json::parse(in);
        } catch (const json::parse_error& e) {
            fail(path + ".file", "voxel mask file is not valid JSON: " + std::string(e.what()));
        }
    }
    const double f = [&] {
        const std::string u = need_string(block, "units", path);
        auto it = length_units().factor.find(u);
        if (it == length_units().factor.end())
            fail(path + ".units", "unknown length unit '" + u + "'");
        return it->second;
    }();
    const Vec3 origin = need_vec3(block, "origin", path) * f;
    const Vec3 spacing = need_vec3(block, "spacing", path) * f;
    const json& n = need(block, "n", path);
    if (!n.is_array() || n.size() != 3) fail(path + ".n", "expected [nx, ny, nz]");
    const int nx = n[0].get<int>(), ny = n[1].get<int>(), nz = n[2].get<int>();
    if (nx <= 0 || ny <= 0 || nz <= 0) fail(path + ".n", "voxel counts must be positive");
    const json& mask = need(block, "mask", path);
    const std::size_t expect = static_cast<std::size_t>(nx) * ny * nz;
    if (!mask.is_array() || mask.size() != expect)
        fail(path + ".mask", "expected " + std::to_string(expect) + " occupancy flags");
    std::vector<std::uint8_t> bits(expect);
    for (std::size_t i = 0; i < expect; ++i) {
        const auto& b = mask[i];
        if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1))
            fail(path + ".mask", "occupancy flags must be 0 or 1");
        bits[i] = static_cast<std::uint8_t>(b.get<int>());
    }
    return geometry::VoxelGrid(origin, spacing, nx, ny, nz, std::move(bits));
}

geometry::Region parse_geometry(const json& g, const std::string& path,
                                const std::string& base_dir) {
    const std::string kind = need_string(g, "kind", path);
    if (kind == "box") {
        const std::string u = need_string(g, "units", path);
        auto it = length_units().factor.find(u);
        if (it == length_units().factor.end())
            fail(path + ".units", "unknown length unit '" + u + "'");
        const double f = it->second;
        return geometry::Box(need_number(g, "l", path) * f,
                             need_number(g, "w", path) * f,
                             need_number(g, "h", path) * f);
    }
    if (kind == "ball") {
        const std::string u = need_string(g, "units", path);
        auto it = length_units().factor.find(u);
        if (it == length_units().factor.end())
            fail(path + ".units", "unknown length unit '" + u + "'");
        return geometry::Ball(need_number(g, "R", path) * it->second);
    }
    if (kind == "voxel") return parse_voxel_block(g, path, base_dir);
    fail(path + ".kind", "expected box, ball, or voxel");
}

transport::MobilitySpec parse_mobility(const json& m, const std::string& path,
                                       const Vec3& lead_axis) {
    const std::string kind = need_string(m, "kind", path);
    if (kind == "scalar") {
        transport::ScalarMobility s;
        s.mu = quantity_in(m, path, mobility_units());
        if (!(s.mu > 0.0)) fail(path + ".value", "mobility must be positive");
        return s;
    }
    if (kind == "tensor") {
        const std::string u = need_string(m, "units", path);
        auto it = mobility_units().factor.find(u);
        if (it == mobility_units().factor.end())
            fail(path + ".units", "unknown mobility unit '" + u + "'");
        const json& rows = need(m, "matrix", path);
        if (!rows.is_array() || rows.size() != 3)
            fail(path + ".matrix", "expected three rows of three numbers");
        transport::MobilityTensor t;
        for (int i = 0; i < 3; ++i) {
            if (!rows[i].is_array() || rows[i].size() != 3)
                fail(path + ".matrix", "expected three rows of three numbers");
            for (int j = 0; j < 3; ++j) {
                if (!rows[i][j].is_number())
                    fail(path + ".matrix", "expected three rows of three numbers");
                t.m[i][j] = rows[i][j].get<double>() * it->second;
            }
        }
        t.direction = m.contains("direction") ? need_vec3(m, "direction", path)
                                              : lead_axis;
        t.validate();
        return t;
    }
    if (kind == "from_conductivity") return transport::FromConductivity{};
    if (kind == "bulk_metal_1_over_T") {
        transport::BulkMetal1OverT law;
        law.mu_ref = quantity_in(need(m, "mu_ref", path), path + ".mu_ref",
                                 mobility_units());
        law.T_ref = quantity_in(need(m, "T_ref", path), path + ".T_ref",
                                temperature_units());
        if (!(law.mu_ref > 0.0 && law.T_ref > 0.0))
            fail(path, "1/T law needs positive mu_ref and T_ref");
        return law;
    }
    fail(path + ".kind",
         "expected scalar, tensor, from_conductivity, or bulk_metal_1_over_T");
}

json mobility_to_json(const transport::MobilitySpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, transport::ScalarMobility>) {
                return {{"kind", "scalar"}, {"value", s.mu}, {"units", "cm^2/Vs"}};
            } else if constexpr (std::is_same_v<S, transport::MobilityTensor>) {
                json rows = json::array();
                for (int i = 0; i < 3; ++i)
                    rows.push_back(json::array({s.m[i][0], s.m[i][1], s.m[i][2]}));
                return {{"kind", "tensor"},
                        {"matrix", rows},
                        {"direction", vec3_to_json(s.direction)},
                        {"units", "cm^2/Vs"}};
            } else if constexpr (std::is_same_v<S, transport::FromConductivity>) {
                return {{"kind", "from_conductivity"}};
            } else {
                return {{"kind", "bulk_metal_1_over_T"},
                        {"mu_ref", {{"value", s.mu_ref}, {"units", "cm^2/Vs"}}},
                        {"T_ref", {{"value", s.T_ref}, {"units", "K"}}}};
            }
        },
        spec);
}

}  // namespace

SampleDescriptor ingest(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw input_error("descriptor: expected a JSON object");
    const json& ver = need(j, "schema_version", "descriptor");
    if (!ver.is_number_integer() || ver.get<int>() != 1)
        fail("descriptor.schema_version", "unsupported schema version (expected 1)");

    SampleDescriptor d;
    d.schema_version = 1;
    d.name = need_string(j, "name", "descriptor");
    d.region = parse_geometry(need(j, "geometry", "descriptor"), "descriptor.geometry",
                              base_dir);

    const json& leads = need(j, "leads", "descriptor");
    const std::string lu = need_string(leads, "units", "descriptor.leads");
    auto it = length_units().factor.find(lu);
    if (it == length_units().factor.end())
        fail("descriptor.leads.units", "unknown length unit '" + lu + "'");
    d.leads.x = need_vec3(leads, "x", "descriptor.leads") * it->second;
    d.leads.xp = need_vec3(leads, "xp", "descriptor.leads") * it->second;

    const Vec3 axis = (d.leads.xp - d.leads.x).norm() > 0.0
                          ? (d.leads.xp - d.leads.x).normalized()
                          : Vec3{1.0, 0.0, 0.0};

    const json& mat = need(j, "material", "descriptor");
    d.material.n_cm3 = quantity_in(need(mat, "carrier_density", "descriptor.material"),
                                   "descriptor.material.carrier_density",
                                   density_units());
    d.material.m_g = quantity_in(need(mat, "effective_mass", "descriptor.material"),
                                 "descriptor.material.effective_mass", mass_units());
    d.material.d_cm = quantity_in(need(mat, "lattice_spacing", "descriptor.material"),
                                  "descriptor.material.lattice_spacing",
                                  length_units());
    if (mat.contains("conductivity"))
        d.material.sigma_cgs = quantity_in(mat.at("conductivity"),
                                           "descriptor.material.conductivity",
                                           conductivity_units());
    if (mat.contains("mobility"))
        d.material.mobility = parse_mobility(mat.at("mobility"),
                                             "descriptor.material.mobility", axis);
    if (!d.material.sigma_cgs && !d.material.mobility)
        fail("descriptor.material",
             "needs a conductivity or a mobility spec (or both)");
    if (!(d.material.n_cm3 > 0.0))
        fail("descriptor.material.carrier_density", "must be positive");
    if (!(d.material.m_g > 0.0))
        fail("descriptor.material.effective_mass", "must be positive");
    if (!(d.material.d_cm > 0.0))
        fail("descriptor.material.lattice_spacing", "must be positive");
    if (d.material.sigma_cgs && !(*d.material.sigma_cgs >= 0.0))
        fail("descriptor.material.conductivity", "must be nonnegative");

    const json& bias = need(j, "bias", "descriptor");
    d.bias.U0_statvolt = quantity_in(need(bias, "voltage", "descriptor.bias"),
                                     "descriptor.bias.voltage", voltage_units());
    if (!(d.bias.U0_statvolt >= 0.0))
        fail("descriptor.bias.voltage", "must be nonnegative");
    if (bias.contains("direction")) {
        Vec3 dir = need_vec3(bias, "direction", "descriptor.bias");
        if (!(dir.norm() > 0.0))
            fail("descriptor.bias.direction", "must have nonzero length");
        d.bias.direction = dir.normalized();
    }

    d.T_K = quantity_in(need(j, "temperature", "descriptor"), "descriptor.temperature",
                        temperature_units());
    if (!(d.T_K > 0.0)) fail("descriptor.temperature", "must be positive");

    if (j.contains("experiment")) {
        const json& exp = j.at("experiment");
        if (!exp.is_array()) fail("descriptor.experiment", "expected an array");
        for (std::size_t i = 0; i < exp.size(); ++i) {
            const std::string p = "descriptor.experiment[" + std::to_string(i) + "]";
            ExperimentPoint pt;
            pt.f_hz = quantity_in(need(exp[i], "frequency", p), p + ".frequency",
                                  frequency_units());
            pt.psd_v2_per_hz = quantity_in(need(exp[i], "psd", p), p + ".psd",
                                           psd_units());
            if (!(pt.f_hz > 0.0)) fail(p + ".frequency", "must be positive");
            if (!(pt.psd_v2_per_hz > 0.0)) fail(p + ".psd", "must be positive");
            d.experiment.push_back(pt);
        }
    }

    // geometry/lead consistency gets the same treatment as the library call
    geometry::SampleGeometry geom{d.region};
    geometry::validate_leads(geom, d.leads, nullptr);
    return d;
}

SampleDescriptor ingest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open descriptor file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw input_error("descriptor file is not valid JSON: " + std::string(e.what()));
    }
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return ingest(j, dir.empty() ? "." : dir);
}

json emit(const SampleDescriptor& d) {
    json g;
    if (const auto* b = std::get_if<geometry::Box>(&d.region)) {
        g = {{"kind", "box"}, {"l", b->l}, {"w", b->w}, {"h", b->h}, {"units", "cm"}};
    } else if (const auto* s = std::get_if<geometry::Ball>(&d.region)) {
        g = {{"kind", "ball"}, {"R", s->R}, {"units", "cm"}};
    } else {
        const auto& v = std::get<geometry::VoxelGrid>(d.region);
        json mask = json::array();
        for (auto b : v.mask) mask.push_back(static_cast<int>(b));
        g = {{"kind", "voxel"},         {"origin", vec3_to_json(v.origin)},
             {"spacing", vec3_to_json(v.spacing)}, {"n", json::array({v.nx, v.ny, v.nz})},
             {"mask", mask},            {"units", "cm"}};
    }

    json mat = {
        {"carrier_density", {{"value", d.material.n_cm3}, {"units", "cm^-3"}}},
        {"effective_mass", {{"value", d.material.m_g}, {"units", "g"}}},
        {"lattice_spacing", {{"value", d.material.d_cm}, {"units", "cm"}}},
    };
    if (d.material.sigma_cgs)
        mat["conductivity"] = {{"value", *d.material.sigma_cgs}, {"units", "s^-1"}};
    if (d.material.mobility) mat["mobility"] = mobility_to_json(*d.material.mobility);

    json bias = {{"voltage", {{"value", d.bias.U0_statvolt}, {"units", "statvolt"}}}};
    if (d.bias.direction) bias["direction"] = vec3_to_json(*d.bias.direction);

    json out = {
        {"schema_version", 1},
        {"name", d.name},
        {"geometry", g},
        {"leads",
         {{"x", vec3_to_json(d.leads.x)},
          {"xp", vec3_to_json(d.leads.xp)},
          {"units", "cm"}}},
        {"material", mat},
        {"bias", bias},
        {"temperature", {{"value", d.T_K}, {"units", "K"}}},
    };
    if (!d.experiment.empty()) {
        json exp = json::array();
        for (const auto& p : d.experiment)
            exp.push_back({{"frequency", {{"value", p.f_hz}, {"units", "Hz"}}},
                           {"psd", {{"value", p.psd_v2_per_hz}, {"units", "V^2/Hz"}}}});
        out["experiment"] = exp;
    }
    return out;
}

RunRecord RunRecord::from_json(const json& j) {
    RunRecord r;
    r.tool_version = need_string(j, "tool_version", "record");
    r.command = need_string(j, "command", "record");
    r.inputs = need(j, "inputs", "record");
    r.outputs = need(j, "outputs", "record");
    const json& w = need(j, "warnings", "record");
    if (!w.is_array()) fail("record.warnings", "expected an array of strings");
    for (const auto& s : w) r.warnings.push_back(s.get<std::string>());
    return r;
}

json RunRecord::to_json() const {
    return {{"tool_version", tool_version},
            {"command", command},
            {"inputs", inputs},
            {"outputs", outputs},
            {"warnings", warnings}};
}

}  // namespace flicker::workbench
