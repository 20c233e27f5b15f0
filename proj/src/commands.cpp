#include <filesystem>
#include <ostream>

#include "riskloop/commands.hpp"

#include "riskloop/analysis.hpp"
#include "riskloop/artifacts.hpp"
#include "riskloop/falsification.hpp"
#include "riskloop/infill.hpp"
#include "riskloop/model.hpp"
#include "riskloop/rng.hpp"
#include "riskloop/sim.hpp"

namespace riskloop::cli {
namespace {

// Stage indices for the documented seed fan-out (derive_seed(seed, stage)).
constexpr std::uint64_t kStageFalsify = 0;
constexpr std::uint64_t kStageViolationRate = 1;

struct Loaded {
    model::RiskModel model;
    sim::ScenarioParams scenario;
};

bool load_model(const std::string& path, model::RiskModel& out, std::ostream& err,
                bool print_warnings = false) {
    std::string text;
    try {
        text = artifacts::read_file(path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return false;
    }
    const model::ParseResult parsed = model::parse_model(text);
    for (const auto& diag : parsed.diagnostics) {
        if (diag.severity == model::Severity::Error || print_warnings) {
            err << path << ": " << model::to_string(diag) << "\n";
        }
    }
    if (!parsed.ok()) return false;
    const auto diags = model::validate(*parsed.model, sim::metric_registry());
    bool ok = true;
    for (const auto& diag : diags) {
        if (diag.severity == model::Severity::Error) ok = false;
        if (diag.severity == model::Severity::Error || print_warnings) {
            err << path << ": " << model::to_string(diag) << "\n";
        }
    }
    if (ok) out = *parsed.model;
    return ok;
}

bool ensure_out_dir(const std::string& dir, std::ostream& err) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        err << "error: cannot create output directory \"" << dir << "\": " << ec.message() << "\n";
        return false;
    }
    return true;
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

int prepare(const FalsifyOptions& options, Loaded& loaded, std::ostream& err) {
    if (options.budget == 0) {
        err << "error: budget must be at least 1\n";
        return kExitUsage;
    }
    if (!load_model(options.model_path, loaded.model, err)) return kExitUsage;
    try {
        loaded.scenario = sim::load_scenario(options.scenario_path);
        falsification::strategy_from_name(options.strategy);
        const falsification::SearchSpace space =
            falsification::build_search_space(loaded.model, options.situation);
        (void)space;
        if (!loaded.model.find_event(options.event)) {
            throw falsification::SearchError("unknown event \"" + options.event + "\"");
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!ensure_out_dir(options.out_dir, err)) return kExitUsage;
    return kExitOk;
}

}  // namespace

int cmd_validate(const std::string& model_path, std::ostream& out, std::ostream& err) {
    std::string text;
    try {
        text = artifacts::read_file(model_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    const model::ParseResult parsed = model::parse_model(text);
    for (const auto& diag : parsed.diagnostics) err << model_path << ": " << to_string(diag) << "\n";
    if (!parsed.ok()) return kExitValidation;
    const auto diags = model::validate(*parsed.model, sim::metric_registry());
    for (const auto& diag : diags) err << model_path << ": " << to_string(diag) << "\n";
    if (model::has_errors(diags)) return kExitValidation;
    out << model_path << ": ok (" << parsed.model->situations.size() << " situations, "
        << parsed.model->events.size() << " events, " << parsed.model->goals.size() << " goals)\n";
    return kExitOk;
}

int cmd_falsify(const FalsifyOptions& options, std::ostream& out, std::ostream& err) {
    Loaded loaded;
    if (const int code = prepare(options, loaded, err); code != kExitOk) return code;
    try {
        falsification::Options search;
        search.budget = options.budget;
        search.strategy = falsification::strategy_from_name(options.strategy);
        search.seed = derive_seed(options.seed, kStageFalsify);
        search.early_stop = options.early_stop;
        search.workers = options.workers;
        const falsification::FalsificationResult result = falsification::falsify(
            loaded.model, options.situation, options.event, loaded.scenario, search);
        const falsification::SearchSpace space =
            falsification::build_search_space(loaded.model, options.situation);
        artifacts::atomic_write(join(options.out_dir, "falsification.json"),
                                artifacts::falsification_json(result, space));
        artifacts::atomic_write(join(options.out_dir, "samples.csv"),
                                artifacts::samples_csv(result, space));
        const std::size_t violations = result.violation_count();
        out << "evaluated " << result.budget_used << " configurations, " << violations
            << " violations";
        if (!result.samples.empty()) {
            out << ", best objective " << model::format_double(result.best().objective);
        }
        out << "\n";
        return violations > 0 ? kExitViolation : kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
    model::RiskModel base;
    if (!load_model(options.model_path, base, err)) return kExitUsage;
    infill::RiskEvidence evidence;
    try {
        evidence = artifacts::evidence_from_json(artifacts::read_file(options.evidence_path));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!ensure_out_dir(options.out_dir, err)) return kExitUsage;
    try {
        const model::RiskModel updated = infill::apply_feedback(base, evidence.event, evidence);
        const analysis::RiskReport report = analysis::propagate(updated, {});
        artifacts::atomic_write(join(options.out_dir, "updated_model.rkml"),
                                model::serialize_model(updated));
        artifacts::atomic_write(join(options.out_dir, "report.json"),
                                analysis::render_report(report, analysis::ReportFormat::Json));
        artifacts::atomic_write(join(options.out_dir, "report.txt"),
                                analysis::render_report(report, analysis::ReportFormat::Text));
        out << "event \"" << evidence.event << "\" likelihood set to "
            << model::format_double(updated.find_event(evidence.event)->likelihood) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
        err << "error: alpha must lie in (0, 1)\n";
        return kExitUsage;
    }
    if (options.grid_resolution < 2) {
        err << "error: grid resolution must be at least 2\n";
        return kExitUsage;
    }
    const FalsifyOptions& fo = options.falsify;
    Loaded loaded;
    if (const int code = prepare(fo, loaded, err); code != kExitOk) return code;

    try {
        const falsification::SearchSpace space =
            falsification::build_search_space(loaded.model, fo.situation);

        // Stage 0: violation-directed search.
        falsification::Options search;
        search.budget = fo.budget;
        search.strategy = falsification::strategy_from_name(fo.strategy);
        search.seed = derive_seed(fo.seed, kStageFalsify);
        search.early_stop = fo.early_stop;
        search.workers = fo.workers;
        const falsification::FalsificationResult result =
            falsification::falsify(loaded.model, fo.situation, fo.event, loaded.scenario, search);
        artifacts::atomic_write(join(fo.out_dir, "falsification.json"),
                                artifacts::falsification_json(result, space));
        artifacts::atomic_write(join(fo.out_dir, "samples.csv"),
                                artifacts::samples_csv(result, space));

        // Stage 1: violation rate. Uniform strategies reuse their own samples;
        // biased search gets a fresh uniform Monte-Carlo estimate.
        double violation_rate = 0.0;
        if (search.strategy == falsification::Strategy::Random && !search.early_stop) {
            violation_rate = static_cast<double>(result.violation_count()) /
                             static_cast<double>(result.samples.size());
        } else {
            violation_rate = falsification::conditional_violation_prob(
                loaded.model, fo.situation, fo.event, loaded.scenario, options.mc_samples,
                derive_seed(fo.seed, kStageViolationRate), fo.workers);
        }

        // Evidence: density over violating configurations, credible intervals,
        // sensitivity ranking, derived likelihood.
        infill::RiskEvidence evidence;
        evidence.event = fo.event;
        evidence.violation_rate = violation_rate;
        evidence.source = result.id();
        evidence.hdr.alpha = options.alpha;
        evidence.hdr.volume_fraction = 0.0;

        std::vector<sim::EnvConfig> violating;
        for (const auto& sample : result.samples) {
            if (sample.violated) violating.push_back(sample.config);
        }
        bool have_density = false;
        if (violating.size() >= 2) {
            const infill::Density density = infill::fit_density(violating, space);
            evidence.hdr = infill::hdr(density, options.alpha, options.grid_resolution);
            artifacts::atomic_write(join(fo.out_dir, "density_grid.csv"),
                                    infill::density_grid_csv(density, options.grid_resolution));
            have_density = true;
        } else {
            out << "note: fewer than 2 violating samples; credible intervals unavailable\n";
        }
        if (!have_density) {
            std::string header;
            for (const auto& dim : space.dimensions) header += dim.name + ",";
            artifacts::atomic_write(join(fo.out_dir, "density_grid.csv"), header + "density\n");
        }
        try {
            evidence.sensitivity = infill::sensitivity(result.samples, space);
        } catch (const infill::EvidenceError& e) {
            out << "note: sensitivity unavailable (" << e.what() << ")\n";
        }
        evidence.likelihood = infill::likelihood_from_hdr(evidence.hdr, violation_rate);
        artifacts::atomic_write(join(fo.out_dir, "evidence.json"),
                                artifacts::evidence_json(evidence));

        // Close the loop: update the model and re-run the analysis.
        const model::RiskModel updated = infill::apply_feedback(loaded.model, fo.event, evidence);
        const analysis::RiskReport report = analysis::propagate(updated, {});
        artifacts::atomic_write(join(fo.out_dir, "updated_model.rkml"),
                                model::serialize_model(updated));
        artifacts::atomic_write(join(fo.out_dir, "report.json"),
                                analysis::render_report(report, analysis::ReportFormat::Json));
        artifacts::atomic_write(join(fo.out_dir, "report.txt"),
                                analysis::render_report(report, analysis::ReportFormat::Text));

        const std::size_t violations = result.violation_count();
        out << "evaluated " << result.budget_used << " configurations, " << violations
            << " violations, violation rate " << model::format_double(violation_rate)
            << ", derived likelihood " << model::format_double(evidence.likelihood) << "\n";
        return violations > 0 ? kExitViolation : kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace riskloop::cli
