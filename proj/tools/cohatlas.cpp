// cohatlas - batch runner for coherent-state and phase-space atlas experiments
//
//   cohatlas <kind> --config run.json [--out report.json] [--format json|csv] [--body-only]
//
// Exit status: 0 verdict computed, 2 validation error, 3 numerical or output failure.

#include "cohatlas/errors.hpp"
#include "cohatlas/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

std::size_t dimension_cap_from_env() {
    const char* env = std::getenv("COHATLAS_DIM_CAP");
    if (env == nullptr || *env == '\0') return cohatlas::kDefaultDimensionCap;
    char* end = nullptr;
    const unsigned long long cap = std::strtoull(env, &end, 10);
    if (*end != '\0' || cap == 0 || env[0] == '-') {
        throw cohatlas::ValidationError("COHATLAS_DIM_CAP must be a positive integer, got '" + std::string(env) + "'");
    }
    return static_cast<std::size_t>(cap);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent states, observer-dependent vacua and phase-space atlases"};
    app.require_subcommand(1);

    std::string config_path, out_path, format;
    bool body_only = false;
    for (const auto kind : cohatlas::all_experiment_kinds()) {
        auto* sub = app.add_subcommand(cohatlas::to_string(kind), "run a " + cohatlas::to_string(kind) + " experiment");
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_path, "report path; stdout when omitted");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_flag("--body-only", body_only, "omit the schema wrapper and timing from JSON output");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cohatlas::kExitValidation;
    }
    const std::string kind_name = app.get_subcommands().front()->get_name();

    cohatlas::RunResult result;
    cohatlas::TableFormat table_format;
    std::string destination;
    try {
        const std::size_t cap = dimension_cap_from_env();
        const cohatlas::ExperimentConfig config = cohatlas::load_config(config_path);
        if (cohatlas::to_string(config.kind) != kind_name) {
            throw cohatlas::ValidationError("config kind '" + cohatlas::to_string(config.kind) +
                                            "' does not match subcommand '" + kind_name + "'");
        }
        table_format = cohatlas::parse_table_format(format.empty() ? config.output_format : format);
        destination = out_path.empty() ? config.output_path : out_path;
        result = cohatlas::run(config, cap);
    } catch (const cohatlas::ValidationError& e) {
        std::cerr << "cohatlas: " << e.what() << "\n";
        return cohatlas::kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "cohatlas: " << e.what() << "\n";
        return cohatlas::kExitNumerical;
    }

    try {
        cohatlas::emit_table(result, table_format, destination, body_only);
    } catch (const std::exception& e) {
        std::cerr << "cohatlas: " << e.what() << "\n";
        return cohatlas::kExitNumerical;
    }
    for (const auto& item : result.body.at("items")) {
        if (item.contains("error")) {
            std::cerr << "cohatlas: " << item.at("name").get<std::string>() << ": "
                      << item.at("error").at("message").get<std::string>() << "\n";
        }
    }
    return result.exit_code;
}
