#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskloop/infill.hpp"

namespace riskloop::infill {
namespace {

constexpr double kBandwidthFloor = 0.03;  // keeps point masses resolvable on the grid
constexpr double kBandwidthCap = 0.5;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double gauss(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Gaussian kernel reflected at the [0,1] boundaries.
double reflected_kernel(double x, double mu, double h) {
    return (gauss((x - mu) / h) + gauss((x + mu) / h) + gauss((2.0 - x - mu) / h)) / h;
}

double normalize_value(const model::FeatureDomain& domain, const sim::FeatureValue& value,
                       const std::string& name) {
    if (const auto* cont = std::get_if<model::ContinuousDomain>(&domain)) {
        if (!std::holds_alternative<double>(value)) {
            throw EvidenceError("feature \"" + name + "\" must be numeric");
        }
        const double span = cont->hi - cont->lo;
        const double t = (std::get<double>(value) - cont->lo) / span;
        return std::clamp(t, 0.0, 1.0);
    }
    const auto& disc = std::get<model::DiscreteDomain>(domain);
    if (!std::holds_alternative<std::string>(value)) {
        throw EvidenceError("feature \"" + name + "\" must be a category label");
    }
    const auto& label = std::get<std::string>(value);
    const auto it = std::find(disc.categories.begin(), disc.categories.end(), label);
    if (it == disc.categories.end()) {
        throw EvidenceError("unknown category \"" + label + "\" for feature \"" + name + "\"");
    }
    return static_cast<double>(it - disc.categories.begin());
}

std::vector<double> normalized_point(const SearchSpace& space, const sim::EnvConfig& config) {
    std::vector<double> point(space.size());
    for (std::size_t d = 0; d < space.size(); ++d) {
        const auto& dim = space.dimensions[d];
        const auto it = config.values.find(dim.name);
        if (it == config.values.end()) {
            throw EvidenceError("config is missing feature \"" + dim.name + "\"");
        }
        point[d] = normalize_value(dim.domain, it->second, dim.name);
    }
    return point;
}

double silverman_bandwidth(std::vector<double> xs) {
    const std::size_t n = xs.size();
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
    const double sd = std::sqrt(var);

    std::sort(xs.begin(), xs.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, n - 1);
        const double frac = pos - static_cast<double>(lo);
        return xs[lo] * (1.0 - frac) + xs[hi] * frac;
    };
    const double iqr = quantile(0.75) - quantile(0.25);

    double spread = sd;
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    const double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
    return std::clamp(h, kBandwidthFloor, kBandwidthCap);
}

struct Grid {
    std::vector<std::size_t> resolution;  // per dimension
    std::size_t total = 1;

    Grid(const SearchSpace& space, std::size_t grid_resolution) {
        for (const auto& dim : space.dimensions) {
            if (const auto* disc = std::get_if<model::DiscreteDomain>(&dim.domain)) {
                resolution.push_back(disc->categories.size());
            } else {
                resolution.push_back(grid_resolution);
            }
            total *= resolution.back();
        }
        if (total == 0 || total > 20'000'000) {
            throw EvidenceError("evaluation grid is empty or too large");
        }
    }

    void decode(std::size_t cell, std::vector<std::size_t>& index) const {
        for (std::size_t d = resolution.size(); d-- > 0;) {
            index[d] = cell % resolution[d];
            cell /= resolution[d];
        }
    }

    double cell_volume() const {
        double volume = 1.0;
        for (const std::size_t r : resolution) volume /= static_cast<double>(r);
        return volume;
    }
};

// Per-cell density values, evaluated with per-dimension kernel tables so the
// inner loop is a plain multiply-accumulate.
std::vector<double> grid_density(const Density& density, const Grid& grid) {
    const std::size_t dims = density.space.size();
    const std::size_t n = density.points.size();

    std::vector<std::vector<std::vector<double>>> tables(dims);  // [d][cell][point]
    std::vector<std::vector<double>> discrete_factor(dims);      // [d][cell]
    for (std::size_t d = 0; d < dims; ++d) {
        const std::size_t res = grid.resolution[d];
        if (!density.category_probs[d].empty()) {
            discrete_factor[d].resize(res);
            for (std::size_t c = 0; c < res; ++c) {
                discrete_factor[d][c] =
                    density.category_probs[d][c] * static_cast<double>(res);
            }
        } else {
            tables[d].resize(res, std::vector<double>(n));
            for (std::size_t c = 0; c < res; ++c) {
                const double x = (static_cast<double>(c) + 0.5) / static_cast<double>(res);
                for (std::size_t i = 0; i < n; ++i) {
                    tables[d][c][i] = reflected_kernel(x, density.points[i][d], density.bandwidths[d]);
                }
            }
        }
    }

    std::vector<double> values(grid.total);
    std::vector<std::size_t> index(dims);
    for (std::size_t cell = 0; cell < grid.total; ++cell) {
        grid.decode(cell, index);
        double discrete_part = 1.0;
        for (std::size_t d = 0; d < dims; ++d) {
            if (!discrete_factor[d].empty()) discrete_part *= discrete_factor[d][index[d]];
        }
        double mixture = 1.0;
        bool any_continuous = false;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double product = 1.0;
            for (std::size_t d = 0; d < dims; ++d) {
                if (discrete_factor[d].empty()) {
                    product *= tables[d][index[d]][i];
                    any_continuous = true;
                }
            }
            acc += product;
        }
        if (any_continuous) mixture = acc / static_cast<double>(n);
        values[cell] = discrete_part * mixture;
    }
    return values;
}

}  // namespace

double Density::evaluate(const std::vector<double>& x) const {
    if (x.size() != space.size()) {
        throw EvidenceError("point dimensionality does not match the search space");
    }
    double discrete_part = 1.0;
    for (std::size_t d = 0; d < space.size(); ++d) {
        if (!category_probs[d].empty()) {
            const auto k = static_cast<double>(category_probs[d].size());
            auto cat = static_cast<std::size_t>(std::floor(std::clamp(x[d], 0.0, 1.0) * k));
            cat = std::min(cat, category_probs[d].size() - 1);
            discrete_part *= category_probs[d][cat] * k;
        }
    }
    double acc = 0.0;
    bool any_continuous = false;
    for (const auto& point : points) {
        double product = 1.0;
        for (std::size_t d = 0; d < space.size(); ++d) {
            if (category_probs[d].empty()) {
                product *= reflected_kernel(x[d], point[d], bandwidths[d]);
                any_continuous = true;
            }
        }
        acc += product;
    }
    const double mixture = any_continuous ? acc / static_cast<double>(points.size()) : 1.0;
    return discrete_part * mixture;
}

Density fit_density(const std::vector<sim::EnvConfig>& violating_configs,
                    const SearchSpace& space) {
    if (violating_configs.size() < 2) {
        throw EvidenceError("insufficient evidence: need at least 2 violating configurations");
    }
    Density density;
    density.space = space;
    for (const auto& config : violating_configs) {
        density.points.push_back(normalized_point(space, config));
    }
    density.bandwidths.assign(space.size(), 0.0);
    density.category_probs.assign(space.size(), {});
    for (std::size_t d = 0; d < space.size(); ++d) {
        if (const auto* disc = std::get_if<model::DiscreteDomain>(&space.dimensions[d].domain)) {
            const std::size_t k = disc->categories.size();
            std::vector<double> counts(k, 1.0);  // Laplace smoothing
            for (const auto& point : density.points) {
                counts[static_cast<std::size_t>(std::lround(point[d]))] += 1.0;
            }
            const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
            for (double& c : counts) c /= total;
            density.category_probs[d] = std::move(counts);
        } else {
            std::vector<double> xs;
            xs.reserve(density.points.size());
            for (const auto& point : density.points) xs.push_back(point[d]);
            density.bandwidths[d] = silverman_bandwidth(std::move(xs));
        }
    }
    return density;
}

CredibleIntervals hdr(const Density& density, double alpha, std::size_t grid_resolution) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw EvidenceError("alpha must lie in (0, 1)");
    if (grid_resolution < 2) throw EvidenceError("grid resolution must be at least 2");
    const Grid grid(density.space, grid_resolution);
    const std::vector<double> values = grid_density(density, grid);
    const double cell_volume = grid.cell_volume();

    double total_mass = 0.0;
    for (const double v : values) total_mass += v * cell_volume;
    if (!(total_mass > 0.0)) throw EvidenceError("density has no mass on the grid");

    // Joint HDR: cells in descending density order until the mass level is hit.
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    double mass = 0.0;
    std::size_t selected = 0;
    for (const std::size_t cell : order) {
        mass += values[cell] * cell_volume / total_mass;
        ++selected;
        if (mass >= alpha) break;
    }

    CredibleIntervals result;
    result.alpha = alpha;
    result.volume_fraction = static_cast<double>(selected) / static_cast<double>(grid.total);

    // Marginal masses per dimension feed the per-feature credible intervals.
    const std::size_t dims = density.space.size();
    std::vector<std::vector<double>> marginal(dims);
    for (std::size_t d = 0; d < dims; ++d) marginal[d].assign(grid.resolution[d], 0.0);
    std::vector<std::size_t> index(dims);
    for (std::size_t cell = 0; cell < grid.total; ++cell) {
        grid.decode(cell, index);
        const double m = values[cell] * cell_volume / total_mass;
        for (std::size_t d = 0; d < dims; ++d) marginal[d][index[d]] += m;
    }

    for (std::size_t d = 0; d < dims; ++d) {
        const std::size_t res = grid.resolution[d];
        std::vector<std::size_t> cells(res);
        std::iota(cells.begin(), cells.end(), 0);
        std::stable_sort(cells.begin(), cells.end(), [&](std::size_t a, std::size_t b) {
            return marginal[d][a] > marginal[d][b];
        });
        std::vector<bool> chosen(res, false);
        double cum = 0.0;
        for (const std::size_t c : cells) {
            chosen[c] = true;
            cum += marginal[d][c];
            if (cum >= alpha) break;
        }
        const auto& dim = density.space.dimensions[d];
        const auto* cont = std::get_if<model::ContinuousDomain>(&dim.domain);
        std::size_t i = 0;
        while (i < res) {
            if (!chosen[i]) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 < res && chosen[j + 1]) ++j;
            FeatureInterval interval;
            interval.feature = dim.name;
            if (cont) {
                const double span = cont->hi - cont->lo;
                interval.lo = cont->lo + span * static_cast<double>(i) / static_cast<double>(res);
                interval.hi =
                    cont->lo + span * static_cast<double>(j + 1) / static_cast<double>(res);
                interval.unit = cont->unit;
            } else {
                interval.lo = static_cast<double>(i);  // category index range
                interval.hi = static_cast<double>(j);
            }
            result.intervals.push_back(std::move(interval));
            i = j + 1;
        }
    }
    return result;
}

double likelihood_from_hdr(const CredibleIntervals& intervals, double violation_rate) {
    if (!(violation_rate >= 0.0 && violation_rate <= 1.0)) {
        throw EvidenceError("violation rate must lie in [0, 1]");
    }
    if (violation_rate == 0.0) return 0.0;
    const double v = std::clamp(intervals.volume_fraction, 0.0, 1.0);
    return std::clamp(std::pow(violation_rate, 1.0 - v), 0.0, 1.0);
}

std::vector<SensitivityScore> sensitivity(const std::vector<falsification::Sample>& samples,
                                          const SearchSpace& space) {
    if (samples.size() < 10) {
        throw EvidenceError("sensitivity requires at least 10 samples");
    }
    const std::size_t n = samples.size();
    std::vector<double> objectives;
    objectives.reserve(n);
    for (const auto& sample : samples) objectives.push_back(sample.objective);
    const double y_mean =
        std::accumulate(objectives.begin(), objectives.end(), 0.0) / static_cast<double>(n);
    double y_var = 0.0;
    for (const double y : objectives) y_var += (y - y_mean) * (y - y_mean);
    if (y_var <= 0.0) throw EvidenceError("no signal: objective is constant across samples");

    std::vector<SensitivityScore> scores;
    double total = 0.0;
    for (std::size_t d = 0; d < space.size(); ++d) {
        const auto& dim = space.dimensions[d];
        std::vector<double> xs;
        xs.reserve(n);
        for (const auto& sample : samples) {
            double x = normalize_value(dim.domain, sample.config.values.at(dim.name), dim.name);
            if (const auto* disc = std::get_if<model::DiscreteDomain>(&dim.domain)) {
                const double k = static_cast<double>(disc->categories.size());
                if (k > 1.0) x /= (k - 1.0);
            }
            xs.push_back(x);
        }
        const double x_mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
        double x_var = 0.0;
        double cov = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x_var += (xs[i] - x_mean) * (xs[i] - x_mean);
            cov += (xs[i] - x_mean) * (objectives[i] - y_mean);
        }
        const double score =
            x_var > 0.0 ? std::abs(cov / std::sqrt(x_var * y_var)) : 0.0;
        scores.push_back({dim.name, score});
        total += score;
    }
    if (total > 0.0) {
        for (auto& s : scores) s.score /= total;
    }
    std::stable_sort(scores.begin(), scores.end(),
                     [](const SensitivityScore& a, const SensitivityScore& b) {
                         return a.score > b.score;
                     });
    return scores;
}

model::RiskModel apply_feedback(const model::RiskModel& model, const std::string& event,
                                const RiskEvidence& evidence) {
    model::RiskModel updated = model;
    for (auto& e : updated.events) {
        if (e.name == event) {
            e.likelihood = std::clamp(evidence.likelihood, 0.0, 1.0);
            e.provenance = evidence.source;
            return updated;
        }
    }
    throw EvidenceError("unknown event \"" + event + "\"");
}

std::string density_grid_csv(const Density& density, std::size_t grid_resolution) {
    const Grid grid(density.space, grid_resolution);
    const std::vector<double> values = grid_density(density, grid);

    std::string out;
    for (const auto& dim : density.space.dimensions) {
        std::string column = dim.name;
        std::replace(column.begin(), column.end(), ',', ';');
        out += column + ",";
    }
    out += "density\n";
    std::vector<std::size_t> index(density.space.size());
    for (std::size_t cell = 0; cell < grid.total; ++cell) {
        grid.decode(cell, index);
        for (std::size_t d = 0; d < density.space.size(); ++d) {
            const auto& dim = density.space.dimensions[d];
            if (const auto* cont = std::get_if<model::ContinuousDomain>(&dim.domain)) {
                const double center = (static_cast<double>(index[d]) + 0.5) /
                                      static_cast<double>(grid.resolution[d]);
                out += model::format_double(cont->lo + (cont->hi - cont->lo) * center);
            } else {
                const auto& disc = std::get<model::DiscreteDomain>(dim.domain);
                std::string label = disc.categories[index[d]];
                std::replace(label.begin(), label.end(), ',', ';');
                out += label;
            }
            out += ",";
        }
        out += model::format_double(values[cell]) + "\n";
    }
    return out;
}

}  // namespace riskloop::infill
