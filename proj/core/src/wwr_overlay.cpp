#include "tailrisk/wwr_overlay.hpp"

#include <algorithm>
#include <cmath>

#include "tailrisk/errors.hpp"

namespace tailrisk {

namespace {

double schedule_lookup(const std::vector<std::pair<double, double>>& schedule, double t) {
    if (t <= schedule.front().first) return schedule.front().second;
    if (t >= schedule.back().first) return schedule.back().second;
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (t <= schedule[i].first) {
            auto [t0, p0] = schedule[i - 1];
            auto [t1, p1] = schedule[i];
            return p0 + (t - t0) / (t1 - t0) * (p1 - p0);
        }
    }
    return schedule.back().second;
}

double effective_time(const StressScenario& scenario, double t) {
    if (scenario.mode == ProbabilityMode::at_horizon) {
        if (!(scenario.horizon > 0.0))
            throw ConfigError("scenario \"" + scenario.id + "\": at_horizon mode needs a positive horizon");
        return scenario.horizon;
    }
    return t;
}

void check_same_grid(const ExposureProfile& a, const ExposureProfile& b) {
    if (a.times != b.times)
        throw ShapeError("exposure profiles are on different grids");
}

/// Adds the correction lambda * P * (stressed - base) * IF to out (epe, ee
/// and ene blend with the same weight, keeping epe - ene == ee). Appends
/// the per-bucket weight to weights for the stderr combination.
void add_correction(ExposureProfile& out, const ExposureProfile& base,
                    const ExposureProfile& stressed, const StressScenario& scenario,
                    const MarketSnapshot& snapshot, std::vector<double>& total_weight,
                    std::vector<double>& weighted_stderr) {
    check_same_grid(base, stressed);
    if (!(scenario.coupling_lambda >= 0.0))
        throw ValidationError("scenario \"" + scenario.id + "\": coupling lambda must be non-negative");
    for (std::size_t i = 0; i < base.times.size(); ++i) {
        double t = base.times[i];
        double p = scenario_probability(scenario, snapshot, t);
        double p_th = scenario_threshold(scenario, snapshot, t);
        double lp = scenario.coupling_lambda * p;
        if (lp > 1.0 + 1e-12)
            throw ValidationError("scenario \"" + scenario.id + "\": lambda * P(t) = " +
                                  std::to_string(lp) + " exceeds 1 at t = " + std::to_string(t));
        double w = lp * interpolation_factor(p, p_th);
        out.epe[i] += w * (stressed.epe[i] - base.epe[i]);
        out.ene[i] += w * (stressed.ene[i] - base.ene[i]);
        out.ee[i] += w * (stressed.ee[i] - base.ee[i]);
        total_weight[i] += w;
        weighted_stderr[i] += w * stressed.epe_stderr[i];
    }
}

void finish_stderr(ExposureProfile& out, const ExposureProfile& base,
                   const std::vector<double>& total_weight,
                   const std::vector<double>& weighted_stderr) {
    // Conservative linear combination; the profiles share one seed, so
    // independence cannot be assumed.
    for (std::size_t i = 0; i < out.times.size(); ++i)
        out.epe_stderr[i] = (1.0 - total_weight[i]) * base.epe_stderr[i] + weighted_stderr[i];
}

} // namespace

double rating_to_lambda(WwrRating rating) {
    switch (rating) {
        case WwrRating::low: return 1.0;
        case WwrRating::medium: return 10.0;
        case WwrRating::high: return 100.0;
    }
    throw std::invalid_argument("rating_to_lambda: unknown rating");
}

ProbabilitySource ProbabilitySource::cds(std::string entity) {
    ProbabilitySource src;
    src.kind = Kind::cds_implied;
    src.entity = std::move(entity);
    if (src.entity.empty())
        throw std::invalid_argument("ProbabilitySource::cds: empty entity");
    return src;
}

ProbabilitySource ProbabilitySource::fixed(std::vector<std::pair<double, double>> schedule) {
    ProbabilitySource src;
    src.kind = Kind::fixed;
    src.schedule = std::move(schedule);
    if (src.schedule.empty())
        throw std::invalid_argument("ProbabilitySource::fixed: empty schedule");
    for (std::size_t i = 0; i < src.schedule.size(); ++i) {
        auto [t, p] = src.schedule[i];
        if (!(t >= 0.0) || !(p >= 0.0) || !(p <= 1.0))
            throw std::invalid_argument("ProbabilitySource::fixed: entries need t >= 0, p in [0, 1]");
        if (i > 0 && !(t > src.schedule[i - 1].first))
            throw std::invalid_argument("ProbabilitySource::fixed: times must be strictly increasing");
    }
    return src;
}

ProbabilitySource ProbabilitySource::fixed_constant(double p) {
    return fixed({{0.0, p}});
}

double scenario_probability(const StressScenario& scenario, const MarketSnapshot& snapshot,
                            double t) {
    if (t < 0.0) throw std::domain_error("scenario_probability: negative time");
    double t_eff = effective_time(scenario, t);
    if (scenario.probability_source.kind == ProbabilitySource::Kind::cds_implied)
        return snapshot.credit_curve(scenario.probability_source.entity).default_probability(t_eff);
    return schedule_lookup(scenario.probability_source.schedule, t_eff);
}

double scenario_threshold(const StressScenario& scenario, const MarketSnapshot& snapshot,
                          double t) {
    if (t < 0.0) throw std::domain_error("scenario_threshold: negative time");
    if (scenario.threshold.probability) {
        double p = *scenario.threshold.probability;
        if (!(p > 0.0) || !(p < 1.0))
            throw ConfigError("scenario \"" + scenario.id + "\": threshold probability must lie in (0, 1)");
        return p;
    }
    if (!scenario.threshold.spread_bps)
        throw ConfigError("scenario \"" + scenario.id + "\": no threshold configured");
    double spread = *scenario.threshold.spread_bps / 1e4;
    double recovery = scenario.threshold.recovery;
    if (!(spread > 0.0))
        throw ConfigError("scenario \"" + scenario.id + "\": threshold spread must be positive");
    if (!(recovery >= 0.0) || !(recovery < 1.0))
        throw ConfigError("scenario \"" + scenario.id + "\": threshold recovery must lie in [0, 1)");
    double hazard = spread / (1.0 - recovery);
    return -std::expm1(-hazard * effective_time(scenario, t));
}

double interpolation_factor(double p, double p_threshold) {
    if (!(p >= 0.0))
        throw std::domain_error("interpolation_factor: probability must be non-negative");
    if (!(p_threshold > 0.0))
        throw std::domain_error("interpolation_factor: threshold must be positive");
    return 1.0 - std::tanh(p / p_threshold);
}

double stressed_epe_interp(double epe, double epe_abs_stress, double p, double p_threshold) {
    if (!(epe >= 0.0) || !(epe_abs_stress >= 0.0))
        throw std::domain_error("stressed_epe_interp: exposures must be non-negative");
    double blend = std::tanh(p / p_threshold); // validates p and p_threshold
    double interp = interpolation_factor(p, p_threshold);
    return epe * blend + epe_abs_stress * interp;
}

ExposureProfile epe_wwr_single(const ExposureProfile& base, const ExposureProfile& stressed,
                               const StressScenario& scenario, const MarketSnapshot& snapshot) {
    base.validate();
    stressed.validate();
    ExposureProfile out = base;
    std::vector<double> total_weight(base.times.size(), 0.0);
    std::vector<double> weighted_stderr(base.times.size(), 0.0);
    add_correction(out, base, stressed, scenario, snapshot, total_weight, weighted_stderr);
    finish_stderr(out, base, total_weight, weighted_stderr);
    out.scenario_id = scenario.id.empty() ? "wwr" : "wwr:" + scenario.id;
    return out;
}

ExposureProfile epe_wwr_multi(const ExposureProfile& base,
                              const std::vector<ExposureProfile>& stressed,
                              const std::vector<StressScenario>& scenarios,
                              const MarketSnapshot& snapshot) {
    base.validate();
    if (stressed.size() != scenarios.size())
        throw ShapeError("epe_wwr_multi: one stressed profile per scenario required");
    TimeGrid grid{base.times};
    ScenarioValidation lint = validate_scenarios(scenarios, snapshot, grid);
    if (!lint.ok) {
        const ScenarioViolation& v = lint.hard.front();
        throw ValidationError("scenario set invalid: " + v.detail);
    }
    ExposureProfile out = base;
    std::vector<double> total_weight(base.times.size(), 0.0);
    std::vector<double> weighted_stderr(base.times.size(), 0.0);
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
        stressed[k].validate();
        add_correction(out, base, stressed[k], scenarios[k], snapshot, total_weight,
                       weighted_stderr);
    }
    finish_stderr(out, base, total_weight, weighted_stderr);
    out.scenario_id = "wwr";
    return out;
}

ExposureProfile interpolated_stressed_profile(const ExposureProfile& base,
                                              const ExposureProfile& stressed,
                                              const StressScenario& scenario,
                                              const MarketSnapshot& snapshot) {
    base.validate();
    stressed.validate();
    check_same_grid(base, stressed);
    ExposureProfile out = base;
    for (std::size_t i = 0; i < base.times.size(); ++i) {
        double t = base.times[i];
        double p = scenario_probability(scenario, snapshot, t);
        double p_th = scenario_threshold(scenario, snapshot, t);
        double interp = interpolation_factor(p, p_th);
        double blend = 1.0 - interp;
        out.epe[i] = stressed_epe_interp(base.epe[i], stressed.epe[i], p, p_th);
        out.ene[i] = base.ene[i] * blend + stressed.ene[i] * interp;
        out.ee[i] = base.ee[i] * blend + stressed.ee[i] * interp;
        out.epe_stderr[i] = base.epe_stderr[i] * blend + stressed.epe_stderr[i] * interp;
    }
    out.scenario_id = scenario.id.empty() ? "stress-interp" : "stress-interp:" + scenario.id;
    return out;
}

ScenarioValidation validate_scenarios(const std::vector<StressScenario>& scenarios,
                                      const MarketSnapshot& snapshot, const TimeGrid& grid,
                                      double soft_cap) {
    grid.validate();
    if (!(soft_cap > 0.0) || !(soft_cap <= 1.0))
        throw std::invalid_argument("validate_scenarios: soft cap must lie in (0, 1]");

    ScenarioValidation result;
    for (const StressScenario& sc : scenarios) {
        if (sc.probability_source.kind == ProbabilitySource::Kind::cds_implied &&
            !snapshot.has_credit_curve(sc.probability_source.entity))
            throw ConfigError("scenario \"" + sc.id + "\": unknown probability entity \"" +
                              sc.probability_source.entity + "\"");
        if (!(sc.coupling_lambda >= 0.0))
            throw ConfigError("scenario \"" + sc.id + "\": coupling lambda must be non-negative");
        // Force threshold resolution early so a bad spec fails here.
        scenario_threshold(sc, snapshot, grid.times.front());
    }
    for (double t : grid.times) {
        double total = 0.0;
        for (const StressScenario& sc : scenarios)
            total += sc.coupling_lambda * scenario_probability(sc, snapshot, t);
        if (total > 1.0 + 1e-12) {
            result.hard.push_back({scenarios.size() == 1 ? scenarios.front().id : "", t, total,
                                   "sum of lambda * P(t) = " + std::to_string(total) +
                                       " exceeds 1 at t = " + std::to_string(t)});
        } else if (total > soft_cap) {
            result.warnings.push_back({scenarios.size() == 1 ? scenarios.front().id : "", t, total,
                                       "sum of lambda * P(t) = " + std::to_string(total) +
                                           " exceeds the soft cap at t = " + std::to_string(t)});
        }
    }
    result.ok = result.hard.empty();
    return result;
}

} // namespace tailrisk
