// experiment.cpp - Config parsing, experiment dispatch and report/table emission

#include "cohatlas/experiment.hpp"

#include "cohatlas/atlas.hpp"
#include "cohatlas/errors.hpp"
#include "cohatlas/phase_space.hpp"
#include "cohatlas/quantize.hpp"
#include "cohatlas/text_format.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace cohatlas {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, const char*>> kKindNames{
    {ExperimentKind::ClassifyMap, "classify-map"},   {ExperimentKind::VacuumTest, "vacuum-test"},
    {ExperimentKind::CoherenceTest, "coherence-test"}, {ExperimentKind::ResolveUnity, "resolve-unity"},
    {ExperimentKind::AtlasCheck, "atlas-check"},     {ExperimentKind::DualityFilter, "duality-filter"},
};

// strict JSON readers

void expect_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ValidationError(where + ": unknown field '" + key + "'");
        }
    }
}

double get_number(const json& obj, const char* key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number");
    return v.get<double>();
}

int get_int(const json& obj, const char* key, const std::string& where, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ValidationError(where + "." + key + ": expected an integer");
    const auto x = v.get<long long>();
    if (x < -1'000'000'000LL || x > 1'000'000'000LL) throw ValidationError(where + "." + key + ": out of range");
    return static_cast<int>(x);
}

std::string get_string(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ValidationError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

Source parse_source(const json& j, const std::string& where) {
    expect_keys(j, where, {"name", "file", "text"});
    Source s{get_string(j, "name", where, ""), get_string(j, "file", where, ""), get_string(j, "text", where, "")};
    if (s.file.empty() == s.text.empty()) throw ValidationError(where + ": give exactly one of 'file' and 'text'");
    if (s.name.empty()) s.name = s.file.empty() ? "inline" : std::filesystem::path(s.file).stem().string();
    return s;
}

json source_json(const Source& s) {
    json j{{"name", s.name}};
    if (!s.file.empty()) j["file"] = s.file;
    if (!s.text.empty()) j["text"] = s.text;
    return j;
}

std::vector<Source> parse_sources(const json& doc, const char* key) {
    std::vector<Source> out;
    if (!doc.contains(key)) return out;
    if (!doc.at(key).is_array()) throw ValidationError(std::string(key) + ": expected an array");
    for (std::size_t i = 0; i < doc.at(key).size(); ++i) {
        out.push_back(parse_source(doc.at(key)[i], std::string(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json complex_list(const std::vector<Complex>& v) {
    json out = json::array();
    for (Complex c : v) out.push_back(complex_json(c));
    return out;
}

Complex parse_complex(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ValidationError(where + ": expected [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

// input loading

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string source_text(const Source& s, const std::filesystem::path& base) {
    if (!s.text.empty()) return s.text;
    const std::filesystem::path p(s.file);
    return read_text(p.is_absolute() ? p : base / p);
}

PolyMap load_map(const Source& s, const ExperimentConfig& config) {
    PolyMap map = parse_polymap(source_text(s, config.base_dir));
    if (map.n_modes() != config.n_modes) {
        throw ValidationError("map '" + s.name + "' has " + std::to_string(map.n_modes()) + " modes, config has " +
                              std::to_string(config.n_modes));
    }
    return map;
}

// item helpers

json error_item(const std::string& name, const std::exception& e, int& exit_code) {
    json err{{"message", e.what()}};
    if (dynamic_cast<const NumericalError*>(&e) != nullptr) {
        err["type"] = "numerical";
        exit_code = kExitNumerical;
        if (const auto* q = dynamic_cast<const QuadratureError*>(&e)) err["defect"] = q->defect();
    } else {
        err["type"] = "validation";
        if (exit_code == kExitOk) exit_code = kExitValidation;
    }
    return json{{"name", name}, {"error", err}};
}

template <class F>
void run_item(json& items, const std::string& name, int& exit_code, F&& body) {
    try {
        items.push_back(body());
    } catch (const ValidationError& e) {
        items.push_back(error_item(name, e, exit_code));
    } catch (const NumericalError& e) {
        items.push_back(error_item(name, e, exit_code));
    }
}

json witness_json(const DbarClassification& c) {
    if (!c.witness) return nullptr;
    return json{{"mode", c.witness->output_mode}, {"monomial", format_monomial(c.witness->term)}};
}

bool preserves_origin(const PolyMap& map) {
    for (int l = 0; l < map.n_modes(); ++l) {
        if (map.constant_term(l) != Complex{0.0, 0.0}) return false;
    }
    return true;
}

std::vector<Complex> origin_offset(const PolyMap& map) {
    std::vector<Complex> out;
    for (int l = 0; l < map.n_modes(); ++l) out.push_back(map.constant_term(l));
    return out;
}

Atlas single_transition_atlas(const PolyMap& map) {
    Atlas atlas(map.n_modes());
    atlas.add_chart({"observer", {}});
    atlas.add_chart({"primed", {}});
    atlas.add_transition("observer", "primed", map);
    return atlas;
}

std::vector<CoherentLabel> probe_labels(const ExperimentConfig& config) {
    std::vector<CoherentLabel> out;
    for (const auto& p : config.probes) out.push_back({p});
    return out;
}

json probe_json(const ProbeResult& p) {
    json bounds = json::array(), residuals = json::array(), primed = json::array();
    for (double b : p.bound) bounds.push_back(b);
    for (double r : p.residual) residuals.push_back(r);
    for (double r : p.primed_family_residual) primed.push_back(r);
    return json{{"label", complex_list(p.probe.z)},
                {"classical_image", complex_list(p.classical_image)},
                {"residual", residuals},
                {"bound", bounds},
                {"primed_family_residual", primed},
                {"within_bounds", p.within_bounds}};
}

json transition_json(const TransitionCoherence& t) {
    json probes = json::array();
    double worst = 0.0;
    for (const auto& p : t.probes) {
        probes.push_back(probe_json(p));
        for (double r : p.residual) worst = std::max(worst, r);
    }
    return json{{"from", t.pair.first},
                {"to", t.pair.second},
                {"classification", to_string(t.classification.kind)},
                {"witness", witness_json(t.classification)},
                {"vacuum_residual", t.vacuum_residual},
                {"overlap", t.vacuum_overlap},
                {"primed_vacuum_defect", t.primed_vacuum_defect},
                {"primed_vacuum_degenerate", t.primed_vacuum_degenerate},
                {"origin_offset", complex_list(t.origin_offset)},
                {"max_probe_residual", worst},
                {"probes", probes},
                {"verdict", to_string(t.verdict)}};
}

// experiments

json classify_item(const Source& s, const ExperimentConfig& config) {
    const PolyMap map = load_map(s, config);
    const auto cls = dbar_classify(map);
    const auto omega = SymplecticForm::canonical(map.n_modes());
    const auto can = canonicity_check(map, omega, quasi_random_samples(2 * map.n_modes(), kDefaultCanonicitySamples),
                                      config.tolerances.canonicity);
    return json{{"name", s.name},
                {"degree", map.degree()},
                {"classification", to_string(cls.kind)},
                {"degenerate", cls.degenerate},
                {"witness", witness_json(cls)},
                {"canonical", can.canonical},
                {"canonicity_defect", can.max_defect},
                {"anticanonical", can.max_anti_defect <= config.tolerances.canonicity},
                {"preserves_origin", preserves_origin(map)}};
}

json vacuum_item(const Source& s, const ExperimentConfig& config, const ModeSpec& spec) {
    const PolyMap map = load_map(s, config);
    const auto g = realize(map, spec);
    const double residual = vacuum_residual(g);
    const PrimedVacuum pv = primed_vacuum(g, std::max(map.degree(), 1));
    return json{{"name", s.name},
                {"classification", to_string(dbar_classify(map).kind)},
                {"vacuum_residual", residual},
                {"overlap", pv.vacuum_overlap},
                {"primed_vacuum_defect", pv.defect},
                {"primed_vacuum_degenerate", pv.degenerate},
                {"skipped_artifacts", pv.skipped_artifacts},
                {"commutator_defect", commutator_diagnostic(map, spec)},
                {"preserves_origin", preserves_origin(map)},
                {"origin_offset", complex_list(origin_offset(map))},
                {"verdict", residual <= config.tolerances.vacuum ? "SHARED-VACUUM" : "OBSERVER-DEPENDENT"}};
}

json coherence_item(const Source& s, const ExperimentConfig& config, const ModeSpec& spec) {
    const PolyMap map = load_map(s, config);
    const auto rep = coherence_report(single_transition_atlas(map), spec, probe_labels(config), config.radius_bound);
    json item = transition_json(rep.transitions.front());
    item.erase("from");
    item.erase("to");
    item["name"] = s.name;
    return item;
}

json resolve_item(const FamilySource& f, const ExperimentConfig& config, const ModeSpec& spec,
                  const QuadratureGrid& grid) {
    StateFamily family = StateFamily::coherent();
    json map_text = nullptr;
    if (f.family == "transported") {
        PolyMap map = load_map(*f.map, config);
        map_text = serialize(map);
        family = StateFamily::transported(std::move(map));
    }
    const std::optional<double> tol = config.tolerances.resolution;
    const UnityResidual r = resolve_unity(spec, grid, family, f.family == "coherent" ? tol : std::nullopt);
    json item{{"name", f.name},
              {"family", f.family},
              {"map", map_text},
              {"max_norm", r.max_norm},
              {"reliable_level", r.reliable_level},
              {"nodes_evaluated", r.nodes_evaluated}};
    item["within_tolerance"] = tol ? json(r.max_norm <= *tol) : json(nullptr);
    return item;
}

json atlas_item(const Source& s, const ExperimentConfig& config, const ModeSpec& spec) {
    const Atlas atlas = parse_atlas(source_text(s, config.base_dir));
    if (atlas.n_modes() != config.n_modes) throw ValidationError("atlas '" + s.name + "' mode count differs from config");
    const auto cls = classify_atlas(atlas);
    const auto rep = coherence_report(atlas, spec, probe_labels(config), config.radius_bound);
    json witnesses = json::array(), observers = json::array(), transitions = json::array();
    for (const auto& w : cls.witnesses) {
        witnesses.push_back({{"from", w.pair.first},
                             {"to", w.pair.second},
                             {"classification", to_string(w.classification.kind)},
                             {"witness", witness_json(w.classification)}});
    }
    for (const auto& p : rep.disagreeing_observers) observers.push_back(json::array({p.first, p.second}));
    for (const auto& t : rep.transitions) transitions.push_back(transition_json(t));
    json charts = json::array();
    for (const auto& c : atlas.charts()) charts.push_back(c.name);
    return json{{"name", s.name},
                {"charts", charts},
                {"structure", to_string(cls.verdict)},
                {"coherence", to_string(rep.verdict)},
                {"witnesses", witnesses},
                {"disagreeing_observers", observers},
                {"transitions", transitions}};
}

void run_duality(const ExperimentConfig& config, json& items, json& summary, int& exit_code) {
    DualityCandidateSet set;
    set.composition_depth = config.composition_depth;
    for (const auto& s : config.maps) {
        try {
            set.generators.push_back({s.name, load_map(s, config)});
        } catch (const ValidationError& e) {
            items.push_back(error_item(s.name, e, exit_code));
        }
    }
    if (set.generators.empty()) return;
    try {
        const auto rep = duality_filter(set, SymplecticForm::canonical(config.n_modes), config.tolerances.canonicity);
        for (const auto& g : rep.generators) {
            items.push_back({{"name", g.name},
                             {"classification", to_string(g.classification.kind)},
                             {"category", to_string(g.category)},
                             {"canonical", g.canonicity.canonical},
                             {"canonicity_defect", g.canonicity.max_defect},
                             {"anticanonical", g.anticanonical}});
        }
        json products = json::array();
        for (const auto& p : rep.products) {
            products.push_back({{"word", p.word},
                                {"exact", p.exact},
                                {"discarded_mass", p.discarded_mass},
                                {"matches", p.matches.empty() ? json(nullptr) : json(p.matches)},
                                {"product", serialize(p.product)}});
        }
        summary["closed"] = rep.closed;
        summary["products"] = products;
        summary["leaving_products"] = std::count_if(rep.products.begin(), rep.products.end(),
                                                    [](const ProductVerdict& p) { return p.matches.empty(); });
    } catch (const ValidationError& e) {
        items.push_back(error_item("duality", e, exit_code));
    } catch (const NumericalError& e) {
        items.push_back(error_item("duality", e, exit_code));
    }
}

// CSV

std::string csv_field(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number()) return text::format_double(v.get<double>());
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n\r") != std::string::npos) {
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        return quoted + "\"";
    }
    return s;
}

std::vector<std::vector<json>> csv_rows(ExperimentKind kind, const json& items) {
    std::vector<std::vector<json>> rows;
    for (const json& item : items) {
        const json name = item.at("name");
        if (item.contains("error")) {
            const json& err = item.at("error");
            std::vector<json> row(csv_columns(kind).size(), nullptr);
            row.front() = name;
            row.back() = "ERROR: " + err.at("type").get<std::string>() + ": " + err.at("message").get<std::string>();
            if (kind == ExperimentKind::ResolveUnity && err.contains("defect")) row[2] = err.at("defect");
            rows.push_back(std::move(row));
            continue;
        }
        switch (kind) {
        case ExperimentKind::ClassifyMap: {
            const json w = item.at("witness");
            rows.push_back({name, item.at("classification"), w.is_null() ? json(nullptr) : w.at("monomial"),
                            item.at("degree"), item.at("canonical"), item.at("canonicity_defect"),
                            item.at("anticanonical")});
            break;
        }
        case ExperimentKind::VacuumTest:
            rows.push_back({name, item.at("classification"), item.at("vacuum_residual"), item.at("overlap"),
                            item.at("verdict")});
            break;
        case ExperimentKind::CoherenceTest:
            for (std::size_t p = 0; p < item.at("probes").size(); ++p) {
                const json& probe = item.at("probes")[p];
                for (std::size_t l = 0; l < probe.at("residual").size(); ++l) {
                    rows.push_back({name, p, l, probe.at("label")[l][0], probe.at("label")[l][1],
                                    probe.at("classical_image")[l][0], probe.at("classical_image")[l][1],
                                    probe.at("residual")[l], probe.at("bound")[l],
                                    probe.at("primed_family_residual")[l], probe.at("within_bounds"),
                                    item.at("verdict")});
                }
            }
            break;
        case ExperimentKind::ResolveUnity:
            rows.push_back({name, item.at("family"), item.at("max_norm"), item.at("reliable_level"),
                            item.at("nodes_evaluated"), item.at("within_tolerance"), "ok"});
            break;
        case ExperimentKind::AtlasCheck:
            for (const json& t : item.at("transitions")) {
                rows.push_back({name, t.at("from"), t.at("to"), t.at("classification"), t.at("vacuum_residual"),
                                t.at("overlap"), t.at("max_probe_residual"), t.at("verdict"), item.at("structure"),
                                item.at("coherence")});
            }
            break;
        case ExperimentKind::DualityFilter:
            rows.push_back({name, item.at("classification"), item.at("category"), item.at("canonicity_defect"),
                            item.at("anticanonical")});
            break;
        }
    }
    return rows;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw OutputError("write to '" + path.string() + "' failed");
}

} // namespace

std::string to_string(ExperimentKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (name == n) return k;
    }
    throw ValidationError("unknown experiment kind '" + std::string(name) + "'");
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
    static const std::vector<ExperimentKind> kinds = [] {
        std::vector<ExperimentKind> v;
        for (const auto& [k, n] : kKindNames) v.push_back(k);
        return v;
    }();
    return kinds;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return to_json(a) == to_json(b);
}

void ExperimentConfig::validate(std::size_t dimension_cap) const {
    ModeSpec::make(n_modes, cutoff, dimension_cap);
    if (!(radius_bound > 0.0)) throw ValidationError("config: radius_bound must be positive");
    if (!(tolerances.canonicity > 0.0) || !(tolerances.vacuum > 0.0) ||
        (tolerances.resolution && !(*tolerances.resolution > 0.0))) {
        throw ValidationError("config: tolerances must be positive");
    }
    if (output_format != "json" && output_format != "csv") {
        throw ValidationError("config: output.format must be 'json' or 'csv'");
    }
    std::set<std::string> names;
    const auto unique = [&](const std::string& n) {
        if (!names.insert(n).second) throw ValidationError("config: duplicate item name '" + n + "'");
    };
    switch (kind) {
    case ExperimentKind::ClassifyMap:
    case ExperimentKind::VacuumTest:
    case ExperimentKind::CoherenceTest:
    case ExperimentKind::DualityFilter:
        if (maps.empty()) throw ValidationError("config: '" + to_string(kind) + "' needs at least one map");
        for (const auto& m : maps) unique(m.name);
        break;
    case ExperimentKind::ResolveUnity:
        if (grid.radial_nodes < 1 || grid.angular_count < 1 || !(grid.radius_cut > 0.0)) {
            throw ValidationError("config: grid parameters must be positive");
        }
        if (families.empty()) throw ValidationError("config: 'resolve-unity' needs at least one family");
        for (const auto& f : families) {
            unique(f.name);
            if (f.family == "coherent") {
                if (f.map) throw ValidationError("config: coherent family '" + f.name + "' takes no map");
            } else if (f.family == "transported") {
                if (!f.map) throw ValidationError("config: transported family '" + f.name + "' needs a map");
            } else {
                throw ValidationError("config: family must be 'coherent' or 'transported'");
            }
        }
        break;
    case ExperimentKind::AtlasCheck:
        if (atlases.empty()) throw ValidationError("config: 'atlas-check' needs at least one atlas");
        for (const auto& a : atlases) unique(a.name);
        break;
    }
    if (composition_depth < 1) throw ValidationError("config: composition_depth must be >= 1");
    for (const auto& p : probes) {
        if (static_cast<int>(p.size()) != n_modes) throw ValidationError("config: probe mode count differs from n_modes");
        for (Complex z : p) {
            if (std::abs(z) > radius_bound) throw ValidationError("config: probe outside radius_bound");
        }
    }
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    expect_keys(doc, "config", {"schema", "kind", "mode_spec", "grid", "maps", "families", "atlases", "probes",
                                "composition_depth", "radius_bound", "tolerances", "output"});
    const std::string schema = get_string(doc, "schema", "config", "");
    if (schema != kConfigSchema) throw ValidationError("config: schema must be '" + std::string(kConfigSchema) + "'");
    ExperimentConfig c;
    c.base_dir = base_dir;
    if (!doc.contains("kind")) throw ValidationError("config: missing 'kind'");
    c.kind = parse_experiment_kind(get_string(doc, "kind", "config", ""));

    if (doc.contains("mode_spec")) {
        const json& ms = doc.at("mode_spec");
        expect_keys(ms, "mode_spec", {"n_modes", "cutoff"});
        c.n_modes = get_int(ms, "n_modes", "mode_spec", c.n_modes);
        c.cutoff = get_int(ms, "cutoff", "mode_spec", c.cutoff);
    }
    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        expect_keys(g, "grid", {"radial_nodes", "angular_count", "radius_cut"});
        c.grid.radial_nodes = get_int(g, "radial_nodes", "grid", c.grid.radial_nodes);
        c.grid.angular_count = get_int(g, "angular_count", "grid", c.grid.angular_count);
        c.grid.radius_cut = get_number(g, "radius_cut", "grid", c.grid.radius_cut);
    }
    c.maps = parse_sources(doc, "maps");
    c.atlases = parse_sources(doc, "atlases");
    if (doc.contains("families")) {
        if (!doc.at("families").is_array()) throw ValidationError("families: expected an array");
        for (std::size_t i = 0; i < doc.at("families").size(); ++i) {
            const json& f = doc.at("families")[i];
            const std::string where = "families[" + std::to_string(i) + "]";
            expect_keys(f, where, {"name", "family", "map"});
            FamilySource fs;
            fs.family = get_string(f, "family", where, "coherent");
            if (f.contains("map") && !f.at("map").is_null()) fs.map = parse_source(f.at("map"), where + ".map");
            fs.name = get_string(f, "name", where, fs.map ? fs.map->name : fs.family);
            c.families.push_back(std::move(fs));
        }
    }
    if (doc.contains("probes")) {
        if (!doc.at("probes").is_array()) throw ValidationError("probes: expected an array");
        for (std::size_t i = 0; i < doc.at("probes").size(); ++i) {
            const json& p = doc.at("probes")[i];
            const std::string where = "probes[" + std::to_string(i) + "]";
            if (!p.is_array()) throw ValidationError(where + ": expected a list of [re, im] per mode");
            std::vector<Complex> label;
            for (std::size_t m = 0; m < p.size(); ++m) label.push_back(parse_complex(p[m], where));
            c.probes.push_back(std::move(label));
        }
    } else if (c.kind == ExperimentKind::CoherenceTest || c.kind == ExperimentKind::AtlasCheck) {
        c.probes.push_back(std::vector<Complex>(static_cast<std::size_t>(std::max(c.n_modes, 0)), Complex(0.8, 0.0)));
    }
    c.composition_depth = get_int(doc, "composition_depth", "config", c.composition_depth);
    c.radius_bound = get_number(doc, "radius_bound", "config", c.radius_bound);
    if (doc.contains("tolerances")) {
        const json& t = doc.at("tolerances");
        expect_keys(t, "tolerances", {"resolution", "canonicity", "vacuum"});
        if (t.contains("resolution") && !t.at("resolution").is_null()) {
            c.tolerances.resolution = get_number(t, "resolution", "tolerances", 0.0);
        }
        c.tolerances.canonicity = get_number(t, "canonicity", "tolerances", c.tolerances.canonicity);
        c.tolerances.vacuum = get_number(t, "vacuum", "tolerances", c.tolerances.vacuum);
    }
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        expect_keys(o, "output", {"path", "format"});
        c.output_path = get_string(o, "path", "output", "");
        c.output_format = get_string(o, "format", "output", c.output_format);
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("config '" + path.string() + "': " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

json to_json(const ExperimentConfig& c) {
    json maps = json::array(), atlases = json::array(), families = json::array(), probes = json::array();
    for (const auto& m : c.maps) maps.push_back(source_json(m));
    for (const auto& a : c.atlases) atlases.push_back(source_json(a));
    for (const auto& f : c.families) {
        families.push_back({{"name", f.name}, {"family", f.family}, {"map", f.map ? source_json(*f.map) : json(nullptr)}});
    }
    for (const auto& p : c.probes) probes.push_back(complex_list(p));
    return json{{"schema", kConfigSchema},
                {"kind", to_string(c.kind)},
                {"mode_spec", {{"n_modes", c.n_modes}, {"cutoff", c.cutoff}}},
                {"grid",
                 {{"radial_nodes", c.grid.radial_nodes},
                  {"angular_count", c.grid.angular_count},
                  {"radius_cut", c.grid.radius_cut}}},
                {"maps", maps},
                {"families", families},
                {"atlases", atlases},
                {"probes", probes},
                {"composition_depth", c.composition_depth},
                {"radius_bound", c.radius_bound},
                {"tolerances",
                 {{"resolution", c.tolerances.resolution ? json(*c.tolerances.resolution) : json(nullptr)},
                  {"canonicity", c.tolerances.canonicity},
                  {"vacuum", c.tolerances.vacuum}}},
                {"output", {{"path", c.output_path}, {"format", c.output_format}}}};
}

RunResult run(const ExperimentConfig& config, std::size_t dimension_cap) {
    const auto start = std::chrono::steady_clock::now();
    config.validate(dimension_cap);
    const ModeSpec spec = ModeSpec::make(config.n_modes, config.cutoff, dimension_cap);

    int exit_code = kExitOk;
    json items = json::array();
    json summary = json::object();
    switch (config.kind) {
    case ExperimentKind::ClassifyMap:
        for (const auto& s : config.maps) run_item(items, s.name, exit_code, [&] { return classify_item(s, config); });
        break;
    case ExperimentKind::VacuumTest:
        for (const auto& s : config.maps) run_item(items, s.name, exit_code, [&] { return vacuum_item(s, config, spec); });
        break;
    case ExperimentKind::CoherenceTest:
        for (const auto& s : config.maps) {
            run_item(items, s.name, exit_code, [&] { return coherence_item(s, config, spec); });
        }
        break;
    case ExperimentKind::ResolveUnity: {
        const QuadratureGrid grid =
            QuadratureGrid::make(config.grid.radial_nodes, config.grid.angular_count, config.grid.radius_cut);
        for (const auto& f : config.families) {
            run_item(items, f.name, exit_code, [&] { return resolve_item(f, config, spec, grid); });
        }
        break;
    }
    case ExperimentKind::AtlasCheck:
        for (const auto& s : config.atlases) run_item(items, s.name, exit_code, [&] { return atlas_item(s, config, spec); });
        break;
    case ExperimentKind::DualityFilter:
        run_duality(config, items, summary, exit_code);
        break;
    }

    std::size_t failed = 0;
    for (const auto& item : items) failed += item.contains("error") ? 1 : 0;
    summary["items"] = items.size();
    summary["failed_items"] = failed;

    RunResult result;
    result.body = json{{"kind", to_string(config.kind)},
                       {"config", to_json(config)},
                       {"items", items},
                       {"summary", summary},
                       {"exit_code", exit_code}};
    result.exit_code = exit_code;
    result.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

json report_json(const RunResult& result) {
    return json{{"schema", kReportSchema}, {"body", result.body}, {"timing", {{"duration_seconds", result.duration_seconds}}}};
}

TableFormat parse_table_format(std::string_view name) {
    if (name == "json") return TableFormat::Json;
    if (name == "csv") return TableFormat::Csv;
    throw ValidationError("unknown format '" + std::string(name) + "' (expected json or csv)");
}

const std::vector<std::string>& csv_columns(ExperimentKind kind) {
    static const std::vector<std::string> classify{"name",     "classification",    "witness",      "degree",
                                                   "canonical", "canonicity_defect", "anticanonical"};
    static const std::vector<std::string> vacuum{"name", "classification", "vacuum_residual", "overlap", "verdict"};
    static const std::vector<std::string> coherence{"name",     "probe",    "mode",  "z_re",           "z_im",
                                                    "image_re", "image_im", "residual", "bound", "primed_residual",
                                                    "within_bounds", "verdict"};
    static const std::vector<std::string> unity{"name",           "family",           "max_norm", "reliable_level",
                                                "nodes_evaluated", "within_tolerance", "status"};
    static const std::vector<std::string> atlas{"atlas",    "from",    "to",
                                                "classification", "vacuum_residual", "overlap",
                                                "max_probe_residual", "transition_verdict", "structure",
                                                "coherence"};
    static const std::vector<std::string> duality{"name", "classification", "category", "canonicity_defect",
                                                  "anticanonical"};
    switch (kind) {
    case ExperimentKind::ClassifyMap: return classify;
    case ExperimentKind::VacuumTest: return vacuum;
    case ExperimentKind::CoherenceTest: return coherence;
    case ExperimentKind::ResolveUnity: return unity;
    case ExperimentKind::AtlasCheck: return atlas;
    case ExperimentKind::DualityFilter: return duality;
    }
    return vacuum;
}

std::string render_csv(const json& body) {
    const ExperimentKind kind = parse_experiment_kind(body.at("kind").get<std::string>());
    std::string out;
    const auto& cols = csv_columns(kind);
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += "\n";
    for (const auto& row : csv_rows(kind, body.at("items"))) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
        out += "\n";
    }
    return out;
}

std::string render_json(const RunResult& result, bool body_only) {
    return (body_only ? result.body : report_json(result)).dump(2) + "\n";
}

void emit_table(const RunResult& result, TableFormat format, const std::filesystem::path& path, bool body_only) {
    const std::string content = format == TableFormat::Csv ? render_csv(result.body) : render_json(result, body_only);
    if (path.empty()) {
        std::cout << content;
        std::cout.flush();
        if (!std::cout) throw OutputError("write to stdout failed");
        return;
    }
    write_file(path, content);
}

} // namespace cohatlas
