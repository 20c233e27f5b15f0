#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "riskloop/artifacts.hpp"
#include "riskloop/commands.hpp"
#include "riskloop/model.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace riskloop;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("riskloop_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int value = 0;
        return value;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string data(const std::string& rel) { return std::string(RISKLOOP_DATA_DIR) + "/" + rel; }

void write(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

// Single-event chain so that zero likelihood lifts every goal to 1.0.
const char* kChainModel = R"(
model "chain" {
  situation "close interaction" {
    indicator "shared space": boolean
    feature "speed of the human motion": continuous [0.0, 2.0] m/s
    feature "speed of the robot motion": continuous [0.5, 2.0] m/s
    feature "luminance of the working area": continuous [50, 1000] lux
    exposes "insufficient distance"
  }
  event "insufficient distance" {
    constraint: min_separation < safety_distance
    impacts "contact does not happen" severity 0.9
  }
  goal "contact does not happen" { refines "Successful collaboration" }
  goal "Successful collaboration" { AND }
}
)";

std::string evidence_text(double likelihood) {
    return std::string("{\"event\": \"insufficient distance\", \"violation_rate\": 0.4,"
                       "\"hdr\": {\"alpha\": 0.9, \"volume_fraction\": 0.1, \"intervals\": []},"
                       "\"sensitivity\": [], \"likelihood\": ") +
           model::format_double(likelihood) + ", \"source\": \"test-evidence\"}";
}

}  // namespace

TEST_CASE("cmd_validate: bundled model ok, broken model 1, missing file 2") {
    std::ostringstream out, err;
    CHECK(cli::cmd_validate(data("models/collab_cell.rkml"), out, err) == cli::kExitOk);

    TempDir dir;
    write(dir.file("broken.rkml"),
          "model \"m\" {\n  situation \"s\" {\n    indicator \"i\": boolean\n"
          "    exposes \"ghost\"\n  }\n}\n");
    std::ostringstream err2;
    CHECK(cli::cmd_validate(dir.file("broken.rkml"), out, err2) == cli::kExitValidation);
    CHECK(err2.str().find("ghost") != std::string::npos);

    CHECK(cli::cmd_validate(dir.file("absent.rkml"), out, err) == cli::kExitUsage);
}

TEST_CASE("cmd_falsify: violation exit code, artifacts, determinism") {
    TempDir dir;
    cli::FalsifyOptions options;
    options.model_path = data("models/collab_cell.rkml");
    options.scenario_path = data("scenarios/seeded_violation.cfg");
    options.situation = "close interaction";
    options.event = "insufficient distance";
    options.strategy = "evolutionary";
    options.budget = 60;
    options.seed = 9;
    options.workers = 2;
    options.out_dir = dir.file("a");

    std::ostringstream out, err;
    const int code = cli::cmd_falsify(options, out, err);
    CHECK(code == cli::kExitViolation);
    CHECK(fs::exists(dir.file("a") + "/falsification.json"));
    CHECK(fs::exists(dir.file("a") + "/samples.csv"));
    const std::string first = artifacts::read_file(dir.file("a") + "/falsification.json");
    CHECK(first.find("\"violated\": true") != std::string::npos);

    options.out_dir = dir.file("b");
    std::ostringstream out2, err2;
    CHECK(cli::cmd_falsify(options, out2, err2) == cli::kExitViolation);
    CHECK(artifacts::read_file(dir.file("b") + "/falsification.json") == first);
    CHECK(artifacts::read_file(dir.file("b") + "/samples.csv") ==
          artifacts::read_file(dir.file("a") + "/samples.csv"));
}

TEST_CASE("cmd_falsify: no-violation scenario exits 0 with zero violations") {
    TempDir dir;
    cli::FalsifyOptions options;
    options.model_path = data("models/collab_cell.rkml");
    options.scenario_path = data("scenarios/no_violation.cfg");
    options.situation = "close interaction";
    options.event = "insufficient distance";
    options.strategy = "random";
    options.budget = 40;
    options.seed = 3;
    options.workers = 2;
    options.out_dir = dir.file("out");

    std::ostringstream out, err;
    CHECK(cli::cmd_falsify(options, out, err) == cli::kExitOk);
    const std::string json_text = artifacts::read_file(dir.file("out") + "/falsification.json");
    CHECK(json_text.find("\"violated\": true") == std::string::npos);
}

TEST_CASE("cmd_falsify: invalid inputs exit 2") {
    TempDir dir;
    cli::FalsifyOptions options;
    options.model_path = data("models/collab_cell.rkml");
    options.scenario_path = data("scenarios/no_violation.cfg");
    options.situation = "no such situation";
    options.event = "insufficient distance";
    options.budget = 5;
    options.out_dir = dir.file("out");
    std::ostringstream out, err;
    CHECK(cli::cmd_falsify(options, out, err) == cli::kExitUsage);

    options.situation = "close interaction";
    options.scenario_path = dir.file("missing.cfg");
    CHECK(cli::cmd_falsify(options, out, err) == cli::kExitUsage);

    options.scenario_path = data("scenarios/no_violation.cfg");
    options.budget = 0;
    CHECK(cli::cmd_falsify(options, out, err) == cli::kExitUsage);
}

TEST_CASE("cmd_analyze: zero-likelihood evidence lifts the chain to 1.0") {
    TempDir dir;
    write(dir.file("chain.rkml"), kChainModel);
    write(dir.file("evidence.json"), evidence_text(0.0));

    cli::AnalyzeOptions options{dir.file("chain.rkml"), dir.file("evidence.json"),
                                dir.file("out")};
    std::ostringstream out, err;
    REQUIRE(cli::cmd_analyze(options, out, err) == cli::kExitOk);

    const auto report =
        artifacts::report_from_json(artifacts::read_file(dir.file("out") + "/report.json"));
    for (const auto& goal : report.goals) CHECK(goal.satisfaction == 1.0);

    // The updated model revalidates cleanly.
    std::ostringstream out2, err2;
    CHECK(cli::cmd_validate(dir.file("out") + "/updated_model.rkml", out2, err2) == cli::kExitOk);
    CHECK(fs::exists(dir.file("out") + "/report.txt"));
    CHECK(!fs::exists(dir.file("out") + "/report.json.tmp"));
}

TEST_CASE("cmd_analyze: reproduces the hand-computed propagation") {
    TempDir dir;
    // Bundled graph with the second event pinned at likelihood 0.2.
    std::string text = artifacts::read_file(data("models/collab_cell.rkml"));
    const std::string anchor = "constraint: detection_rate < 0.9";
    const auto pos = text.find(anchor);
    REQUIRE(pos != std::string::npos);
    text.insert(pos + anchor.size(), "\n    likelihood 0.2");
    write(dir.file("model.rkml"), text);
    write(dir.file("evidence.json"), evidence_text(0.3));

    cli::AnalyzeOptions options{dir.file("model.rkml"), dir.file("evidence.json"), dir.file("out")};
    std::ostringstream out, err;
    REQUIRE(cli::cmd_analyze(options, out, err) == cli::kExitOk);
    const auto report =
        artifacts::report_from_json(artifacts::read_file(dir.file("out") + "/report.json"));
    for (const auto& goal : report.goals) {
        if (goal.name == "contact does not happen" || goal.name == "Successful collaboration" ||
            goal.name == "Trust built") {
            CHECK(goal.satisfaction == doctest::Approx(0.73).epsilon(1e-12));
        } else {
            CHECK(goal.satisfaction == doctest::Approx(0.8).epsilon(1e-12));
        }
    }
}

TEST_CASE("cmd_analyze: schema mismatch exits 2") {
    TempDir dir;
    write(dir.file("chain.rkml"), kChainModel);
    write(dir.file("bad.json"), "{\"event\": \"insufficient distance\"}");
    cli::AnalyzeOptions options{dir.file("chain.rkml"), dir.file("bad.json"), dir.file("out")};
    std::ostringstream out, err;
    CHECK(cli::cmd_analyze(options, out, err) == cli::kExitUsage);

    write(dir.file("unknown.json"),
          "{\"event\": \"ghost\", \"violation_rate\": 0.1, \"hdr\": {\"alpha\": 0.9, "
          "\"volume_fraction\": 0.0, \"intervals\": []}, \"sensitivity\": [], "
          "\"likelihood\": 0.1, \"source\": \"x\"}");
    options.evidence_path = dir.file("unknown.json");
    CHECK(cli::cmd_analyze(options, out, err) == cli::kExitUsage);
}

TEST_CASE("cmd_run: full loop emits every artifact and is idempotent") {
    TempDir dir;
    cli::RunOptions options;
    options.falsify.model_path = data("models/collab_cell.rkml");
    options.falsify.scenario_path = data("scenarios/seeded_violation.cfg");
    options.falsify.situation = "close interaction";
    options.falsify.event = "insufficient distance";
    options.falsify.strategy = "evolutionary";
    options.falsify.budget = 80;
    options.falsify.seed = 5;
    options.falsify.workers = 2;
    options.falsify.out_dir = dir.file("run1");
    options.mc_samples = 200;
    options.grid_resolution = 20;

    std::ostringstream out, err;
    const int code = cli::cmd_run(options, out, err);
    CHECK(code == cli::kExitViolation);
    for (const char* name : {"falsification.json", "samples.csv", "evidence.json",
                             "density_grid.csv", "updated_model.rkml", "report.json",
                             "report.txt"}) {
        CHECK_MESSAGE(fs::exists(dir.file("run1") + "/" + name), name);
    }

    options.falsify.out_dir = dir.file("run2");
    std::ostringstream out2, err2;
    CHECK(cli::cmd_run(options, out2, err2) == code);
    for (const char* name :
         {"falsification.json", "evidence.json", "report.json", "updated_model.rkml"}) {
        CHECK(artifacts::read_file(dir.file("run1") + "/" + name) ==
              artifacts::read_file(dir.file("run2") + "/" + name));
    }

    const auto updated = model::parse_model(
        artifacts::read_file(dir.file("run1") + "/updated_model.rkml"));
    REQUIRE(updated.ok());
    CHECK(updated.model->find_event("insufficient distance")->likelihood != 0.5);
    CHECK(updated.model->find_event("insufficient distance")->provenance.has_value());
}
