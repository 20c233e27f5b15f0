#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "riskloop/model.hpp"
#include "riskloop/rng.hpp"
#include "riskloop/sim.hpp"

#include "model_gen.hpp"

#include <fstream>
#include <sstream>

using namespace riskloop;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const char* kFeaturesSnippet = R"(
model "example" {
  situation "close interaction" {
    indicator "human and robot in the shared space": boolean
    feature "speed of the human motion": continuous [0.0, 2.0] m/s
    feature "speed of the robot motion": continuous [0.5, 2.0] m/s
    exposes "insufficient distance"
  }
  event "insufficient distance" {
    constraint: min_separation < safety_distance
  }
}
)";

}  // namespace

TEST_CASE("parses feature declarations with continuous domains") {
    const model::ParseResult result = model::parse_model(kFeaturesSnippet);
    REQUIRE(result.ok());
    const auto& m = *result.model;
    REQUIRE(m.situations.size() == 1);
    const auto& features = m.situations.front().features;
    REQUIRE(features.size() == 2);
    const auto& human = std::get<model::ContinuousDomain>(features[0].domain);
    CHECK(features[0].name == "speed of the human motion");
    CHECK(human.lo == 0.0);
    CHECK(human.hi == 2.0);
    CHECK(human.unit == "m/s");
    const auto& robot = std::get<model::ContinuousDomain>(features[1].domain);
    CHECK(robot.lo == 0.5);
    CHECK(robot.hi == 2.0);
}

TEST_CASE("empty model parses and validates with a warning") {
    const model::ParseResult result = model::parse_model("model \"m\" {}");
    REQUIRE(result.ok());
    CHECK(result.model->situations.empty());
    CHECK(result.model->events.empty());
    CHECK(result.model->goals.empty());
    const auto diags = model::validate(*result.model, sim::metric_registry());
    CHECK(!model::has_errors(diags));
    REQUIRE(diags.size() == 1);
    CHECK(diags.front().severity == model::Severity::Warning);
    CHECK(diags.front().message.find("no events") != std::string::npos);
}

TEST_CASE("unresolved exposes reference names the line") {
    const char* text =
        "model \"m\" {\n"
        "  situation \"s\" {\n"
        "    indicator \"present\": boolean\n"
        "    exposes \"no-such-event\"\n"
        "  }\n"
        "}\n";
    const model::ParseResult result = model::parse_model(text);
    REQUIRE(!result.ok());
    REQUIRE(!result.diagnostics.empty());
    const auto& diag = result.diagnostics.front();
    CHECK(diag.message.find("no-such-event") != std::string::npos);
    CHECK(diag.line == 4);
}

TEST_CASE("syntax errors carry line and column") {
    const model::ParseResult result = model::parse_model("model \"m\" {\n  junk\n}");
    REQUIRE(!result.ok());
    CHECK(result.diagnostics.front().line == 2);
}

TEST_CASE("duplicate and cyclic declarations are parse errors") {
    const char* duplicated =
        "model \"m\" {\n"
        "  goal \"g\" {}\n"
        "  goal \"g\" {}\n"
        "}\n";
    CHECK(!model::parse_model(duplicated).ok());

    const char* cyclic =
        "model \"m\" {\n"
        "  goal \"a\" { refines \"b\" AND }\n"
        "  goal \"b\" { refines \"a\" AND }\n"
        "}\n";
    const auto result = model::parse_model(cyclic);
    REQUIRE(!result.ok());
    CHECK(result.diagnostics.front().message.find("cyclic") != std::string::npos);
}

TEST_CASE("bundled model parses, validates and round-trips") {
    const std::string text = read_file(std::string(RISKLOOP_DATA_DIR) + "/models/collab_cell.rkml");
    const model::ParseResult result = model::parse_model(text);
    REQUIRE(result.ok());
    const auto& m = *result.model;
    CHECK(m.name == "collaborative sorting cell");
    CHECK(m.situations.size() == 2);
    CHECK(m.events.size() == 2);
    CHECK(m.goals.size() == 5);
    CHECK(!model::has_errors(model::validate(m, sim::metric_registry())));

    const model::ParseResult reparsed = model::parse_model(model::serialize_model(m));
    REQUIRE(reparsed.ok());
    CHECK(*reparsed.model == m);

    // Default prior until feedback arrives.
    CHECK(m.find_event("insufficient distance")->likelihood == 0.5);
    CHECK(model::event_impact_severity(*m.find_event("insufficient distance")) == 0.9);
}

TEST_CASE("single goal serializes to one goal block") {
    model::RiskModel m;
    m.name = "tiny";
    m.goals.push_back({"only goal", std::nullopt, model::Refinement::Leaf});
    const std::string text = model::serialize_model(m);
    std::size_t count = 0;
    for (std::size_t pos = text.find("goal "); pos != std::string::npos;
         pos = text.find("goal ", pos + 1)) {
        ++count;
    }
    CHECK(count == 1);
    const auto reparsed = model::parse_model(text);
    REQUIRE(reparsed.ok());
    CHECK(*reparsed.model == m);
}

TEST_CASE("unicode names survive the round trip byte-exact") {
    model::RiskModel m;
    m.name = "m";
    model::Situation s;
    s.name = "situazione";
    s.features.push_back({"luminosit\xc3\xa0 dell'area \xe2\x84\xaa",
                          model::ContinuousDomain{0.0, 1.0, "lux"}});
    m.situations.push_back(s);
    const auto reparsed = model::parse_model(model::serialize_model(m));
    REQUIRE(reparsed.ok());
    CHECK(reparsed.model->situations.front().features.front().name ==
          "luminosit\xc3\xa0 dell'area \xe2\x84\xaa");
    CHECK(*reparsed.model == m);
}

TEST_CASE("validate flags unexposed events and goal cycles") {
    model::RiskModel m;
    m.name = "m";
    model::Event e;
    e.name = "insufficient distance";
    e.constraint = {"min_separation", model::Comparator::Less, model::SymbolicBound{"safety_distance"}};
    m.events.push_back(e);
    auto diags = model::validate(m, sim::metric_registry());
    REQUIRE(model::has_errors(diags));
    bool found = false;
    for (const auto& d : diags) found = found || d.message.find("not exposed") != std::string::npos;
    CHECK(found);

    m.goals.push_back({"a", "b", model::Refinement::And});
    m.goals.push_back({"b", "a", model::Refinement::And});
    diags = model::validate(m, sim::metric_registry());
    found = false;
    for (const auto& d : diags) found = found || d.message.find("cyclic") != std::string::npos;
    CHECK(found);
}

TEST_CASE("registered metrics produce no unknown-metric diagnostic") {
    const model::ParseResult result = model::parse_model(kFeaturesSnippet);
    REQUIRE(result.ok());
    for (const auto& diag : model::validate(*result.model, sim::metric_registry())) {
        CHECK(diag.message.find("not registered") == std::string::npos);
    }
}

TEST_CASE("round-trip property over random models") {
    Rng rng(20240901);
    for (int i = 0; i < 200; ++i) {
        const model::RiskModel m = testgen::random_model(rng);
        const std::string text = model::serialize_model(m);
        const model::ParseResult reparsed = model::parse_model(text);
        REQUIRE_MESSAGE(reparsed.ok(), "iteration ", i, " failed to reparse:\n", text);
        REQUIRE_MESSAGE(*reparsed.model == m, "iteration ", i, " not structurally equal:\n", text);
    }
}

TEST_CASE("parsing is deterministic") {
    Rng rng(7);
    const model::RiskModel m = testgen::random_model(rng);
    const std::string text = model::serialize_model(m);
    const auto a = model::parse_model(text);
    const auto b = model::parse_model(text);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(*a.model == *b.model);
    CHECK(model::serialize_model(*a.model) == model::serialize_model(*b.model));
}

TEST_CASE("defect catalog: every seeded defect yields an error") {
    Rng rng(99);
    const auto catalog = testgen::defect_catalog(rng);
    REQUIRE(catalog.size() == 10);
    for (const auto& [label, broken] : catalog) {
        const auto diags = model::validate(broken, sim::metric_registry());
        CHECK_MESSAGE(model::has_errors(diags), "defect not caught: ", label);
    }
}

TEST_CASE("format_double round-trips exactly") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-1e3, 1e3);
        CHECK(std::stod(model::format_double(x)) == x);
    }
    CHECK(model::format_double(0.5) == "0.5");
    CHECK(model::format_double(2.0) == "2");
}
