#include <filesystem>
#include <fstream>
#include <sstream>

#include "riskloop/artifacts.hpp"

#include "nlohmann/json.hpp"

namespace riskloop::artifacts {
namespace {

using nlohmann::json;

std::string unit_of(const falsification::SearchSpace& space, const std::string& feature) {
    for (const auto& dim : space.dimensions) {
        if (dim.name == feature) {
            if (const auto* cont = std::get_if<model::ContinuousDomain>(&dim.domain)) {
                return cont->unit;
            }
            return "";
        }
    }
    return "";
}

json config_to_json(const sim::EnvConfig& config, const falsification::SearchSpace& space) {
    json features = json::array();
    for (const auto& [name, value] : config.values) {
        json entry;
        entry["feature"] = name;
        if (std::holds_alternative<double>(value)) {
            entry["value"] = std::get<double>(value);
        } else {
            entry["value"] = std::get<std::string>(value);
        }
        entry["unit"] = unit_of(space, name);
        features.push_back(entry);
    }
    return json{{"features", features}, {"seed", config.seed}};
}

json sample_to_json(const falsification::Sample& sample,
                    const falsification::SearchSpace& space) {
    json j;
    j["config"] = config_to_json(sample.config, space);
    j["objective"] = sample.objective;
    j["violated"] = sample.violated;
    j["summary"] = {{"min_separation", sample.summary.min_separation},
                    {"violation_time", sample.summary.violation_time
                                           ? json(*sample.summary.violation_time)
                                           : json(nullptr)},
                    {"detection_rate", sample.summary.detection_rate}};
    return j;
}

}  // namespace

std::string falsification_json(const falsification::FalsificationResult& result,
                               const falsification::SearchSpace& space) {
    json j;
    j["strategy"] = result.strategy;
    j["seed"] = result.seed;
    j["budget_used"] = result.budget_used;
    j["samples"] = json::array();
    for (const auto& sample : result.samples) {
        j["samples"].push_back(sample_to_json(sample, space));
    }
    if (!result.samples.empty()) {
        j["best"] = sample_to_json(result.best(), space);
        j["best"]["index"] = result.best_index;
    } else {
        j["best"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::string samples_csv(const falsification::FalsificationResult& result,
                        const falsification::SearchSpace& space) {
    std::string out = "index";
    for (const auto& dim : space.dimensions) {
        std::string column = dim.name;
        std::replace(column.begin(), column.end(), ',', ';');
        out += "," + column;
    }
    out += ",objective,violated,min_separation,violation_time,detection_rate\n";
    for (std::size_t i = 0; i < result.samples.size(); ++i) {
        const auto& sample = result.samples[i];
        out += std::to_string(i);
        for (const auto& dim : space.dimensions) {
            const auto& value = sample.config.values.at(dim.name);
            out += ",";
            if (std::holds_alternative<double>(value)) {
                out += model::format_double(std::get<double>(value));
            } else {
                std::string label = std::get<std::string>(value);
                std::replace(label.begin(), label.end(), ',', ';');
                out += label;
            }
        }
        out += "," + model::format_double(sample.objective);
        out += sample.violated ? ",1" : ",0";
        out += "," + model::format_double(sample.summary.min_separation);
        out += ",";
        out += sample.summary.violation_time ? model::format_double(*sample.summary.violation_time)
                                             : std::string("");
        out += "," + model::format_double(sample.summary.detection_rate) + "\n";
    }
    return out;
}

std::string evidence_json(const infill::RiskEvidence& evidence) {
    json j;
    j["event"] = evidence.event;
    j["violation_rate"] = evidence.violation_rate;
    j["hdr"] = {{"alpha", evidence.hdr.alpha},
                {"volume_fraction", evidence.hdr.volume_fraction},
                {"intervals", json::array()}};
    for (const auto& interval : evidence.hdr.intervals) {
        j["hdr"]["intervals"].push_back({{"feature", interval.feature},
                                         {"lo", interval.lo},
                                         {"hi", interval.hi},
                                         {"unit", interval.unit}});
    }
    j["sensitivity"] = json::array();
    for (const auto& score : evidence.sensitivity) {
        j["sensitivity"].push_back({{"feature", score.feature}, {"score", score.score}});
    }
    j["likelihood"] = evidence.likelihood;
    j["source"] = evidence.source;
    return j.dump(2) + "\n";
}

infill::RiskEvidence evidence_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("evidence JSON is malformed: ") + e.what());
    }
    try {
        infill::RiskEvidence evidence;
        evidence.event = j.at("event").get<std::string>();
        evidence.violation_rate = j.at("violation_rate").get<double>();
        const auto& hdr = j.at("hdr");
        evidence.hdr.alpha = hdr.at("alpha").get<double>();
        evidence.hdr.volume_fraction = hdr.at("volume_fraction").get<double>();
        for (const auto& entry : hdr.at("intervals")) {
            infill::FeatureInterval interval;
            interval.feature = entry.at("feature").get<std::string>();
            interval.lo = entry.at("lo").get<double>();
            interval.hi = entry.at("hi").get<double>();
            interval.unit = entry.value("unit", "");
            evidence.hdr.intervals.push_back(std::move(interval));
        }
        for (const auto& entry : j.at("sensitivity")) {
            evidence.sensitivity.push_back(
                {entry.at("feature").get<std::string>(), entry.at("score").get<double>()});
        }
        evidence.likelihood = j.at("likelihood").get<double>();
        evidence.source = j.at("source").get<std::string>();
        if (!(evidence.likelihood >= 0.0 && evidence.likelihood <= 1.0)) {
            throw std::runtime_error("evidence likelihood must lie in [0, 1]");
        }
        return evidence;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("evidence JSON does not match the schema: ") +
                                 e.what());
    }
}

std::string report_json(const analysis::RiskReport& report) {
    return analysis::render_report(report, analysis::ReportFormat::Json);
}

analysis::RiskReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("report JSON is malformed: ") + e.what());
    }
    try {
        analysis::RiskReport report;
        report.model = j.at("model").get<std::string>();
        for (const auto& entry : j.at("events")) {
            report.events.push_back({entry.at("name").get<std::string>(),
                                     entry.at("likelihood").get<double>(),
                                     entry.at("severity").get<double>(),
                                     entry.at("exposure").get<double>()});
        }
        for (const auto& entry : j.at("goals")) {
            report.goals.push_back(
                {entry.at("name").get<std::string>(), entry.at("satisfaction").get<double>()});
        }
        for (const auto& id : j.at("evidence")) {
            report.evidence.push_back(id.get<std::string>());
        }
        return report;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("report JSON does not match the schema: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void atomic_write(const std::string& path, const std::string& bytes) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write \"" + tmp.string() + "\"");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("short write to \"" + tmp.string() + "\"");
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace riskloop::artifacts
