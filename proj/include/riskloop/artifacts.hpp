#pragma once

#include <string>

#include "riskloop/analysis.hpp"
#include "riskloop/falsification.hpp"
#include "riskloop/infill.hpp"

namespace riskloop::artifacts {

// JSON wire formats; feature values echo unit annotations from the search space.
std::string falsification_json(const falsification::FalsificationResult& result,
                               const falsification::SearchSpace& space);
std::string samples_csv(const falsification::FalsificationResult& result,
                        const falsification::SearchSpace& space);

std::string evidence_json(const infill::RiskEvidence& evidence);
infill::RiskEvidence evidence_from_json(const std::string& text);  // throws on schema mismatch

std::string report_json(const analysis::RiskReport& report);
analysis::RiskReport report_from_json(const std::string& text);

std::string read_file(const std::string& path);  // throws std::runtime_error

// Temp file + rename so interrupted runs never leave truncated artifacts.
void atomic_write(const std::string& path, const std::string& bytes);

}  // namespace riskloop::artifacts
