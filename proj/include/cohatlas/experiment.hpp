// experiment.hpp - Batch experiment configs, deterministic runs and report emission

#pragma once

#include "cohatlas/coherent.hpp"
#include "cohatlas/fock.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cohatlas {

inline constexpr const char* kConfigSchema = "cohatlas.config/1";
inline constexpr const char* kReportSchema = "cohatlas.report/1";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

enum class ExperimentKind { ClassifyMap, VacuumTest, CoherenceTest, ResolveUnity, AtlasCheck, DualityFilter };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);
const std::vector<ExperimentKind>& all_experiment_kinds();

// A PolyMap or atlas given either inline (`text`) or by path relative to the config file.
struct Source {
    std::string name;
    std::string file;
    std::string text;

    friend bool operator==(const Source&, const Source&) = default;
};

struct FamilySource {
    std::string name;
    std::string family = "coherent"; // "coherent" or "transported"
    std::optional<Source> map;

    friend bool operator==(const FamilySource&, const FamilySource&) = default;
};

struct GridParams {
    int radial_nodes = kDefaultRadialOrder;
    int angular_count = kDefaultAngularCount;
    double radius_cut = kDefaultRadiusCut;

    friend bool operator==(const GridParams&, const GridParams&) = default;
};

struct Tolerances {
    std::optional<double> resolution; // resolve-unity: coherent-family defect above this is a numerical failure
    double canonicity = 1e-9;
    double vacuum = 1e-12; // vacuum-test: residual at or below this counts as a shared vacuum

    friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ClassifyMap;
    int n_modes = 1;
    int cutoff = 16;
    GridParams grid;
    std::vector<Source> maps;
    std::vector<FamilySource> families;
    std::vector<Source> atlases;
    std::vector<std::vector<Complex>> probes;
    int composition_depth = 1;
    double radius_bound = kDefaultRadiusBound;
    Tolerances tolerances;
    std::string output_path;
    std::string output_format = "json";

    std::filesystem::path base_dir; // not serialized; resolves relative file entries

    // Throws ValidationError.
    void validate(std::size_t dimension_cap = kDefaultDimensionCap) const;

    friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
};

ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

struct RunResult {
    nlohmann::json body; // comparable part: config echo, items, summary, exit code
    double duration_seconds = 0.0;
    int exit_code = kExitOk;
};

// Per-item failures are recorded in the body and folded into the exit code
// (numerical beats validation); the run always completes.
RunResult run(const ExperimentConfig& config, std::size_t dimension_cap = kDefaultDimensionCap);

nlohmann::json report_json(const RunResult& result);

enum class TableFormat { Json, Csv };

TableFormat parse_table_format(std::string_view name);
const std::vector<std::string>& csv_columns(ExperimentKind kind);
std::string render_csv(const nlohmann::json& body);
std::string render_json(const RunResult& result, bool body_only);

struct OutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Empty path writes to stdout. Throws OutputError when the file cannot be written.
void emit_table(const RunResult& result, TableFormat format, const std::filesystem::path& path,
                bool body_only = false);

} // namespace cohatlas
