// tests/test_cli.cpp
#include "cohatlas/errors.hpp"
#include "cohatlas/experiment.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"

using namespace cohatlas;
using nlohmann::json;

namespace {

const std::filesystem::path kConfigs{COHATLAS_CONFIG_DIR};

json base(const char* kind) { return json{{"schema", kConfigSchema}, {"kind", kind}}; }

json inline_map(const char* name, const char* text) { return json{{"name", name}, {"text", text}}; }

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::string field;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                row.push_back(field);
                field.clear();
            } else {
                field += c;
            }
        }
        row.push_back(field);
        rows.push_back(row);
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
}

} // namespace

TEST(Config, BundledConfigsRoundTrip) {
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(kConfigs)) {
        if (entry.path().extension() != ".json") continue;
        ++seen;
        const ExperimentConfig c = load_config(entry.path());
        const json once = to_json(c);
        const ExperimentConfig again = parse_config(once, c.base_dir);
        EXPECT_EQ(to_json(again), once) << entry.path();
        EXPECT_EQ(again, c);
        EXPECT_EQ(parse_config(to_json(again), c.base_dir), again);
        EXPECT_NO_THROW(c.validate());
    }
    EXPECT_GE(seen, 6);
}

TEST(Config, DefaultsAreFilledAndStable) {
    json doc = base("coherence-test");
    doc["maps"] = json::array({inline_map("id", "1 0 : 1 : 0\n")});
    const ExperimentConfig c = parse_config(doc);
    EXPECT_EQ(c.cutoff, 16);
    ASSERT_EQ(c.probes.size(), 1u);
    EXPECT_EQ(c.probes[0][0], Complex(0.8, 0.0));
    EXPECT_FALSE(c.tolerances.resolution.has_value());
    EXPECT_EQ(to_json(parse_config(to_json(c))), to_json(c));
}

TEST(Config, RejectsInvalidConfigs) {
    EXPECT_THROW(parse_config(json{{"kind", "classify-map"}}), ValidationError);
    EXPECT_THROW(parse_config(json{{"schema", kConfigSchema}}), ValidationError);
    EXPECT_THROW(parse_config(base("transmogrify")), ValidationError);
    json extra = base("classify-map");
    extra["colour"] = "red";
    EXPECT_THROW(parse_config(extra), ValidationError);
    json both = base("classify-map");
    both["maps"] = json::array({{{"name", "x"}, {"file", "a.poly"}, {"text", "1 0 : 1 : 0"}}});
    EXPECT_THROW(parse_config(both), ValidationError);
    json wrong_type = base("classify-map");
    wrong_type["mode_spec"] = {{"cutoff", "sixteen"}};
    EXPECT_THROW(parse_config(wrong_type), ValidationError);

    json no_maps = base("vacuum-test");
    EXPECT_THROW(parse_config(no_maps).validate(), ValidationError);

    json neg = base("vacuum-test");
    neg["maps"] = json::array({inline_map("id", "1 0 : 1 : 0")});
    neg["tolerances"] = {{"vacuum", -1.0}};
    EXPECT_THROW(parse_config(neg).validate(), ValidationError);

    json big = base("vacuum-test");
    big["maps"] = json::array({inline_map("id", "polymap 3 6\nmode 0\n1 0 : 1 0 0 : 0 0 0\n")});
    big["mode_spec"] = {{"n_modes", 3}, {"cutoff", 20}};
    EXPECT_THROW(parse_config(big).validate(), ValidationError);
    EXPECT_NO_THROW(parse_config(big).validate(10000));

    json transported = base("resolve-unity");
    transported["families"] = json::array({{{"name", "t"}, {"family", "transported"}}});
    EXPECT_THROW(parse_config(transported).validate(), ValidationError);

    json probes = base("coherence-test");
    probes["maps"] = json::array({inline_map("id", "1 0 : 1 : 0")});
    probes["probes"] = json::array({json::array({json::array({0.1, 0.0}), json::array({0.2, 0.0})})});
    EXPECT_THROW(parse_config(probes).validate(), ValidationError);

    json dup = base("classify-map");
    dup["maps"] = json::array({inline_map("a", "1 0 : 1 : 0"), inline_map("a", "1 0 : 0 : 1")});
    EXPECT_THROW(parse_config(dup).validate(), ValidationError);

    EXPECT_THROW(load_config(kConfigs / "does_not_exist.json"), ValidationError);
}

TEST(Run, ClassifyMixedMap) {
    json doc = base("classify-map");
    doc["maps"] = json::array({inline_map("sum", "1 0 : 1 : 0\n1 0 : 0 : 1\n")});
    const RunResult r = run(parse_config(doc));
    EXPECT_EQ(r.exit_code, kExitOk);
    const json& item = r.body.at("items")[0];
    EXPECT_EQ(item.at("classification"), "Mixed");
    EXPECT_EQ(item.at("witness").at("monomial"), "w̄");
}

TEST(Run, VacuumTestIdentity) {
    json doc = base("vacuum-test");
    doc["maps"] = json::array({inline_map("identity", "1 0 : 1 : 0\n")});
    const RunResult r = run(parse_config(doc));
    EXPECT_EQ(r.exit_code, kExitOk);
    EXPECT_EQ(r.body.at("items")[0].at("vacuum_residual").get<double>(), 0.0);
    EXPECT_EQ(r.body.at("items")[0].at("verdict"), "SHARED-VACUUM");
}

TEST(Run, ResolveUnityDefaultGridReportsDiskDefect) {
    // A disk of radius 6 misses e^{-36} sum_{m<=8} 36^m/m! of the level-8 weight.
    const RunResult r = run(load_config(kConfigs / "resolve_unity.json"));
    EXPECT_EQ(r.exit_code, kExitNumerical);
    const json& err = r.body.at("items")[0].at("error");
    EXPECT_EQ(err.at("type"), "numerical");
    const double analytic = static_cast<double>(oracle::poisson_cdf(8, 36.0L));
    EXPECT_NEAR(err.at("defect").get<double>() / analytic, 1.0, 1e-6);
}

TEST(Run, ResolveUnityWideDisk) {
    const RunResult r = run(load_config(kConfigs / "resolve_unity_wide.json"));
    EXPECT_EQ(r.exit_code, kExitOk);
    const json& items = r.body.at("items");
    EXPECT_LT(items[0].at("max_norm").get<double>(), 1e-8);
    EXPECT_GT(items[1].at("max_norm").get<double>(), 0.1);
    EXPECT_EQ(items[1].at("within_tolerance"), false);
}

TEST(Run, PartialFailuresAreRecorded) {
    json doc = base("vacuum-test");
    doc["maps"] = json::array({inline_map("first", "1 0 : 1 : 0"), {{"name", "missing"}, {"file", "nowhere.poly"}},
                               inline_map("last", "1 0 : 1 : 0\n0.5 0 : 0 : 1")});
    RunResult r = run(parse_config(doc, kConfigs));
    EXPECT_EQ(r.exit_code, kExitValidation);
    ASSERT_EQ(r.body.at("items").size(), 3u);
    EXPECT_EQ(r.body.at("items")[1].at("error").at("type"), "validation");
    EXPECT_NEAR(r.body.at("items")[2].at("vacuum_residual").get<double>(), 0.5, 1e-15);
    EXPECT_EQ(r.body.at("summary").at("failed_items"), 1);

    // Degree above the cutoff is a numerical failure and dominates.
    doc["maps"].push_back(inline_map("cube", "1 0 : 3 : 0"));
    doc["mode_spec"] = {{"n_modes", 1}, {"cutoff", 2}};
    r = run(parse_config(doc, kConfigs));
    EXPECT_EQ(r.exit_code, kExitNumerical);
    EXPECT_EQ(r.body.at("items")[3].at("error").at("type"), "numerical");
}

TEST(Run, BodiesAreDeterministic) {
    for (const char* name : {"classify.json", "vacuum.json", "duality.json"}) {
        const ExperimentConfig c = load_config(kConfigs / name);
        EXPECT_EQ(run(c).body.dump(), run(c).body.dump()) << name;
    }
}

TEST(Run, ReportCarriesSchemaAndTiming) {
    const RunResult r = run(load_config(kConfigs / "classify.json"));
    const json report = report_json(r);
    EXPECT_EQ(report.at("schema"), kReportSchema);
    EXPECT_GE(report.at("timing").at("duration_seconds").get<double>(), 0.0);
    EXPECT_EQ(report.at("body"), r.body);
    EXPECT_EQ(r.body.at("config"), to_json(load_config(kConfigs / "classify.json")));
}

TEST(Table, EmptyReportIsHeaderOnly) {
    const json body{{"kind", "vacuum-test"}, {"items", json::array()}};
    EXPECT_EQ(render_csv(body), "name,classification,vacuum_residual,overlap,verdict\n");
}

TEST(Table, SingleVacuumRow) {
    json doc = base("vacuum-test");
    doc["maps"] = json::array({inline_map("squeeze", "1 0 : 1 : 0\n0.3 0 : 0 : 1")});
    const RunResult r = run(parse_config(doc));
    const auto rows = parse_csv(render_csv(r.body));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"name", "classification", "vacuum_residual", "overlap", "verdict"}));
    EXPECT_EQ(rows[1][0], "squeeze");
    EXPECT_EQ(rows[1][1], "Mixed");
    EXPECT_EQ(std::strtod(rows[1][2].c_str(), nullptr), r.body.at("items")[0].at("vacuum_residual").get<double>());
    EXPECT_EQ(std::strtod(rows[1][3].c_str(), nullptr), r.body.at("items")[0].at("overlap").get<double>());
    EXPECT_EQ(rows[1][4], "OBSERVER-DEPENDENT");
}

TEST(Table, DualityCategoriesTakeThreeValues) {
    const RunResult r = run(load_config(kConfigs / "duality.json"));
    const auto rows = parse_csv(render_csv(r.body));
    const std::size_t col = column(rows[0], "category");
    ASSERT_LT(col, rows[0].size());
    std::set<std::string> values;
    for (std::size_t i = 1; i < rows.size(); ++i) values.insert(rows[i][col]);
    EXPECT_EQ(values, (std::set<std::string>{"holomorphic-canonical", "nonholomorphic-canonical", "non-canonical"}));
}

TEST(Table, CsvNumbersRoundTripEveryKind) {
    for (const char* name : {"classify.json", "coherence.json", "atlas_check.json", "resolve_unity.json"}) {
        const RunResult r = run(load_config(kConfigs / name));
        const auto rows = parse_csv(render_csv(r.body));
        ASSERT_GE(rows.size(), 2u) << name;
        for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i].size(), rows[0].size()) << name;
    }
    const RunResult r = run(load_config(kConfigs / "atlas_check.json"));
    const auto rows = parse_csv(render_csv(r.body));
    const std::size_t col = column(rows[0], "overlap");
    std::vector<double> from_json;
    for (const auto& item : r.body.at("items")) {
        for (const auto& t : item.at("transitions")) from_json.push_back(t.at("overlap").get<double>());
    }
    ASSERT_EQ(from_json.size(), rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::strtod(rows[i][col].c_str(), nullptr), from_json[i - 1]);
}

TEST(Table, UnwritablePathThrowsOutputError) {
    const RunResult r = run(load_config(kConfigs / "classify.json"));
    EXPECT_THROW(emit_table(r, TableFormat::Json, "/nonexistent-dir/report.json"), OutputError);
    const auto path = std::filesystem::temp_directory_path() / "cohatlas_test_report.csv";
    EXPECT_NO_THROW(emit_table(r, TableFormat::Csv, path));
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), render_csv(r.body));
    std::filesystem::remove(path);
}
