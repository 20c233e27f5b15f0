#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskloop/falsification.hpp"
#include "riskloop/model.hpp"
#include "riskloop/sim.hpp"

namespace riskloop::infill {

using falsification::SearchSpace;

class EvidenceError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Product-kernel density over the normalized search space ([0,1] per dimension).
// Continuous dimensions: Gaussian kernels, Silverman bandwidths, reflected at
// the [0,1] boundaries. Discrete dimensions: Laplace-smoothed category
// frequencies, mapped onto equal-width sub-intervals of [0,1].
struct Density {
    SearchSpace space;
    std::vector<std::vector<double>> points;        // normalized, one row per sample
    std::vector<double> bandwidths;                 // per dimension; 0 for discrete dims
    std::vector<std::vector<double>> category_probs;  // per dimension; empty for continuous

    double evaluate(const std::vector<double>& x) const;  // x in normalized coordinates
};

// Fits the density to the violating configurations. Throws EvidenceError when
// fewer than 2 violating samples are available ("insufficient evidence").
Density fit_density(const std::vector<sim::EnvConfig>& violating_configs,
                    const SearchSpace& space);

struct FeatureInterval {
    std::string feature;
    double lo = 0.0;  // native units (category index range for discrete dims)
    double hi = 0.0;
    std::string unit;
};

struct CredibleIntervals {
    double alpha = 0.9;
    double volume_fraction = 0.0;           // joint HDR cells / total grid cells
    std::vector<FeatureInterval> intervals;  // per-feature marginal HDR, merged cells
};

// Highest-density region on an evaluation grid: cells are accumulated in
// descending density order until their mass reaches alpha. The joint selection
// yields the volume fraction; per-feature credible intervals come from the
// one-dimensional marginal masses at the same alpha.
CredibleIntervals hdr(const Density& density, double alpha = 0.9,
                      std::size_t grid_resolution = 50);

// likelihood = violation_rate^(1 - volume_fraction): anchored at the
// Monte-Carlo rate and inflated as the credible region spreads.
double likelihood_from_hdr(const CredibleIntervals& intervals, double violation_rate);

struct SensitivityScore {
    std::string feature;
    double score = 0.0;
};

// |Pearson correlation| between each normalized feature and the objective,
// normalized to sum 1 and sorted descending (declaration order breaks ties).
// Throws EvidenceError on fewer than 10 samples or a constant objective.
std::vector<SensitivityScore> sensitivity(const std::vector<falsification::Sample>& samples,
                                          const SearchSpace& space);

struct RiskEvidence {
    std::string event;
    double violation_rate = 0.0;
    CredibleIntervals hdr;
    std::vector<SensitivityScore> sensitivity;
    double likelihood = 0.0;
    std::string source;  // falsification result id
};

// New model value with the event's likelihood replaced by the evidence's
// derived likelihood and the evidence id attached as provenance.
model::RiskModel apply_feedback(const model::RiskModel& model, const std::string& event,
                                const RiskEvidence& evidence);

// Evaluation grid as CSV (cell centers in native units + density) for plotting.
std::string density_grid_csv(const Density& density, std::size_t grid_resolution = 50);

}  // namespace riskloop::infill
