#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "run.hpp"

using namespace gbvp;
using namespace gbvp::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = fs::path(GBVP_SOURCE_DIR) / "fixtures";

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("gbvp_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

int run_cmd(const std::string& cmd, const fs::path& config, const fs::path& out, std::string* log = nullptr,
            std::optional<std::size_t> grid = std::nullopt) {
    std::ostringstream os;
    const int code = run({cmd, config.string(), out, 1, grid}, os);
    if (log) *log = os.str();
    return code;
}

fs::path write_config(const std::string& name, const json& doc) {
    const auto path = fs::temp_directory_path() / ("gbvp_cfg_" + name + ".json");
    std::ofstream(path) << doc.dump(2);
    return path;
}

json dirichlet_doc() {
    std::ifstream in(kFixtures / "dirichlet_sine.json");
    return json::parse(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Config, EveryFixtureParses) {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(kFixtures)) {
        if (entry.path().extension() != ".json") continue;
        EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
        ++count;
    }
    EXPECT_GE(count, 10);
}

TEST(Config, ErrorsCarryFieldPaths) {
    auto doc = dirichlet_doc();
    doc["boundary"]["conditions"][1]["tau"] = 2.0;
    try {
        parse_config(doc);
        FAIL() << "expected a schema error";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.path(), "$.boundary.conditions[1].tau");
    }
    doc = dirichlet_doc();
    doc["coefficients"][0] = {{"kind", "sinh"}};
    try {
        parse_config(doc);
        FAIL() << "expected a schema error";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.path(), "$.coefficients[0].kind");
    }
    doc = dirichlet_doc();
    doc["bogus"] = 1;
    EXPECT_THROW(parse_config(doc), SchemaError);
    doc = dirichlet_doc();
    doc["dimensions"]["m"] = 0;
    EXPECT_THROW(parse_config(doc), SchemaError);
}

TEST(Config, ParameterExpressions) {
    const ParamContext at{0.25, false};
    EXPECT_EQ(parse_number(json::parse(R"({"affine": [1, 4]})"), "$", at), cplx(2.0));
    EXPECT_EQ(parse_number(json::parse(R"({"reciprocal": [1, 1]})"), "$", at), cplx(5.0));
    EXPECT_EQ(parse_number(json::parse("[1, -2]"), "$", at), cplx(1.0, -2.0));
    const ParamContext limit{0.0, true};
    EXPECT_EQ(parse_number(json::parse(R"({"reciprocal": [1, 1], "at_limit": 7})"), "$", limit), cplx(7.0));
    EXPECT_THROW(parse_number(json::parse(R"({"reciprocal": [1, 1]})"), "$", limit), SchemaError);
}

TEST(Cli, SolveDirichletWritesErrorField) {
    const auto out = scratch("solve");
    ASSERT_EQ(run_cmd("solve", kFixtures / "dirichlet_sine.json", out), kExitOk);
    ASSERT_TRUE(fs::exists(out / "solution.csv"));
    const auto verdict = json::parse(slurp(out / "verdict.json"));
    EXPECT_EQ(verdict["schema_version"], kSchemaVersion);
    EXPECT_LE(verdict["exact"]["sobolev_error"].get<double>(), 1e-6);
    const auto summary = slurp(out / "solve_summary.csv");
    EXPECT_NE(summary.find("sobolev_error"), std::string::npos);
}

TEST(Cli, PeriodicCheckFails) {
    const auto out = scratch("periodic");
    ASSERT_EQ(run_cmd("check", kFixtures / "periodic.json", out), kExitVerdictFailed);
    const auto report = json::parse(slurp(out / "check.json"));
    EXPECT_FALSE(report["well_posed"].get<bool>());
}

TEST(Cli, DiscriminatorMatchesExpectation) {
    const auto out = scratch("disc");
    ASSERT_EQ(run_cmd("sweep", kFixtures / "sin_density_discriminator.json", out), kExitOk);
    const auto report = json::parse(slurp(out / "sweep.json"));
    EXPECT_TRUE(report["verdicts"]["strong"].get<bool>());
    EXPECT_FALSE(report["verdicts"]["uniform"].get<bool>());
    EXPECT_TRUE(fs::exists(out / "b_convergence.csv"));
    EXPECT_TRUE(fs::exists(out / "sweep_plot.csv"));
}

TEST(Cli, ExpectationMismatchIsVerdictFailure) {
    auto doc = json::parse(slurp(kFixtures / "sin_density_discriminator.json"));
    doc["expect"]["uniform"] = true;
    const auto out = scratch("mismatch");
    EXPECT_EQ(run_cmd("check", write_config("mismatch", doc), out), kExitVerdictFailed);
}

TEST(Cli, ExpectationsForOtherCommandsAreSkipped) {
    const auto out = scratch("skip");
    ASSERT_EQ(run_cmd("check", kFixtures / "smooth_converging.json", out, nullptr, 512), kExitOk);
    const auto report = json::parse(slurp(out / "check.json"));
    EXPECT_EQ(report["expect_skipped"], json::array({"consistent", "solution_trend"}));
    auto doc = dirichlet_doc();
    doc["expect"] = {{"well_posedness", true}};
    try {
        parse_config(doc);
        FAIL() << "expected a schema error";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.path(), "$.expect.well_posedness");
    }
}

TEST(Cli, SchemaViolationExitsTwo) {
    auto doc = dirichlet_doc();
    doc["rhs"] = json::array();
    const auto out = scratch("schema");
    std::string log;
    EXPECT_EQ(run_cmd("solve", write_config("schema", doc), out, &log), kExitSchema);
    EXPECT_NE(log.find("$.rhs"), std::string::npos);
    EXPECT_EQ(run_cmd("solve", kFixtures / "does_not_exist.json", out), kExitSchema);
    EXPECT_EQ(run_cmd("frobnicate", kFixtures / "dirichlet_sine.json", out), kExitSchema);
    EXPECT_EQ(run_cmd("sweep", kFixtures / "dirichlet_sine.json", out), kExitSchema);  // no family
    EXPECT_EQ(run_cmd("solve", kFixtures / "dirichlet_sine.json", out, nullptr, 7), kExitSchema);
}

TEST(Cli, NumericalFailureExitsThree) {
    auto doc = dirichlet_doc();
    doc["dimensions"]["r"] = 1;
    doc["coefficients"] = json::array({-1e6});
    doc["interval"] = json::array({0, 100});
    doc["grid"] = 16;
    doc["boundary"] = json::parse(R"({"type": "points", "conditions": [{"tau": 0, "coef": [[1]]}]})");
    doc["c"] = json::array({1});
    doc.erase("exact_solution");
    const auto out = scratch("numerical");
    EXPECT_EQ(run_cmd("solve", write_config("numerical", doc), out), kExitNumerical);
    EXPECT_TRUE(fs::exists(out / "error.json"));
}

TEST(Cli, OutputsAreDeterministic) {
    for (const auto& [cmd, file] : std::vector<std::pair<std::string, std::string>>{
             {"solve", "dirichlet_sine.json"}, {"sweep", "smooth_converging.json"}, {"approximate", "pipeline_smooth.json"}}) {
        const auto a = scratch("det_a");
        const auto b = scratch("det_b");
        ASSERT_EQ(run_cmd(cmd, kFixtures / file, a, nullptr, 512), run_cmd(cmd, kFixtures / file, b, nullptr, 512));
        for (const auto& entry : fs::directory_iterator(a)) {
            EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << cmd << " " << entry.path().filename();
        }
    }
}
