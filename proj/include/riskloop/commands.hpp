#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace riskloop::cli {

// Exit codes shared by all subcommands:
//   0 success / no violation, 1 validation errors,
//   2 usage, I/O or schema errors, 3 violation found.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitViolation = 3;

int cmd_validate(const std::string& model_path, std::ostream& out, std::ostream& err);

struct FalsifyOptions {
    std::string model_path;
    std::string scenario_path;
    std::string situation;
    std::string event;
    std::string strategy = "evolutionary";
    std::size_t budget = 500;
    std::uint64_t seed = 0;
    bool early_stop = false;
    unsigned workers = 0;  // 0 = hardware concurrency
    std::string out_dir = ".";
};

int cmd_falsify(const FalsifyOptions& options, std::ostream& out, std::ostream& err);

struct AnalyzeOptions {
    std::string model_path;
    std::string evidence_path;
    std::string out_dir = ".";
};

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);

struct RunOptions {
    FalsifyOptions falsify;
    double alpha = 0.9;
    std::size_t grid_resolution = 50;
    std::size_t mc_samples = 2000;  // uniform Monte-Carlo run for the violation rate
};

// Full loop: validate, falsify, derive evidence, update the model, analyze.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace riskloop::cli
