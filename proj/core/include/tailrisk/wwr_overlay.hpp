#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tailrisk/exposure.hpp"
#include "tailrisk/market_data.hpp"

namespace tailrisk {

/// Coarse wrong-way-risk bucket; mapped to an order-of-magnitude coupling.
enum class WwrRating { low, medium, high };

/// low -> 1, medium -> 10, high -> 100.
double rating_to_lambda(WwrRating rating);

/// Where the tail-event probability P(t) comes from: the CDS-implied
/// default probability of a named entity, or a fixed schedule
/// (piecewise-linear in t, flat beyond the last point).
struct ProbabilitySource {
    enum class Kind { cds_implied, fixed };

    Kind kind = Kind::cds_implied;
    std::string entity;                              // cds_implied
    std::vector<std::pair<double, double>> schedule; // fixed: (t, p)

    static ProbabilitySource cds(std::string entity);
    static ProbabilitySource fixed(std::vector<std::pair<double, double>> schedule);
    static ProbabilitySource fixed_constant(double p);
};

/// Probability scale that saturates the overlay: quoted either directly as
/// a probability or as a CDS spread in bp converted through the same
/// credit-triangle mapping as a CDS-implied P(t).
struct ThresholdSpec {
    std::optional<double> spread_bps;
    std::optional<double> probability;
    /// Recovery used for the spread conversion (defaulted to the tail
    /// entity's recovery when the probability source is CDS-implied).
    double recovery = 0.40;
};

/// Whether P(t) and the threshold are evaluated cumulatively per bucket or
/// once at a fixed horizon.
enum class ProbabilityMode { cumulative, at_horizon };

/// One tail event: a deterministic market shock, its probability term
/// structure, the counterparty-sovereign coupling, and the interpolation
/// threshold.
struct StressScenario {
    std::string id;
    MarketShock shock;
    ProbabilitySource probability_source;
    double coupling_lambda = 1.0;
    ThresholdSpec threshold;
    ProbabilityMode mode = ProbabilityMode::cumulative;
    /// Horizon used by at_horizon mode; the pipeline sets it to the last
    /// grid time when not configured.
    double horizon = 0.0;
};

/// Tail-event probability at bucket time t under the snapshot.
double scenario_probability(const StressScenario& scenario, const MarketSnapshot& snapshot,
                            double t);

/// Threshold probability at bucket time t (spread quotes are converted
/// with the credit triangle at the same effective horizon as P(t)).
double scenario_threshold(const StressScenario& scenario, const MarketSnapshot& snapshot,
                          double t);

/// 1 - tanh(p / p_threshold), in (0, 1]. Suppresses the overlay once the
/// tail probability is no longer small. Requires p >= 0, p_threshold > 0.
double interpolation_factor(double p, double p_threshold);

/// Blend of the realised exposure toward the fully stressed one:
/// epe * tanh(p / p_th) + epe_abs_stress * (1 - tanh(p / p_th)).
/// For small p this approaches the stressed profile; for large p the
/// realised one. Requires epe, epe_abs_stress >= 0.
double stressed_epe_interp(double epe, double epe_abs_stress, double p, double p_threshold);

/// Per-bucket probability-weighted exposure with the interpolated stress:
/// epe + lambda * p * (epe_abs_stress - epe) * (1 - tanh(p / p_th)).
/// Identical to mixing the interpolated stressed profile with weight
/// lambda * p. Throws ValidationError when lambda * p exceeds 1.
ExposureProfile epe_wwr_single(const ExposureProfile& base, const ExposureProfile& stressed,
                               const StressScenario& scenario, const MarketSnapshot& snapshot);

/// Additive multi-scenario overlay: the single-scenario correction summed
/// over all tail events. Scenario k pairs with stressed[k]. Validates the
/// scenario set first and propagates any hard failure.
ExposureProfile epe_wwr_multi(const ExposureProfile& base,
                              const std::vector<ExposureProfile>& stressed,
                              const std::vector<StressScenario>& scenarios,
                              const MarketSnapshot& snapshot);

/// The Eq-style interpolated stressed profile itself (per-bucket
/// stressed_epe_interp over epe; ee and ene blended with the same weight).
ExposureProfile interpolated_stressed_profile(const ExposureProfile& base,
                                              const ExposureProfile& stressed,
                                              const StressScenario& scenario,
                                              const MarketSnapshot& snapshot);

struct ScenarioViolation {
    std::string scenario_id;
    double t = 0.0;
    double value = 0.0;
    std::string detail;
};

struct ScenarioValidation {
    bool ok = true;
    std::vector<ScenarioViolation> hard;     // conditional probability above 1
    std::vector<ScenarioViolation> warnings; // above the soft cap
};

/// Checks sum_k lambda_k * P_k(t) <= 1 at every grid time (hard) and
/// against the soft cap (warning). Also rejects non-positive thresholds
/// and unknown probability entities.
ScenarioValidation validate_scenarios(const std::vector<StressScenario>& scenarios,
                                      const MarketSnapshot& snapshot, const TimeGrid& grid,
                                      double soft_cap = 0.25);

} // namespace tailrisk
