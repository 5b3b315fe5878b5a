#pragma once

#include <string>
#include <vector>

#include "tailrisk/config.hpp"
#include "tailrisk/xva.hpp"

namespace tailrisk {

/// Per-scenario diagnostics echoed into the report.
struct ScenarioSummary {
    std::string id;
    double coupling_lambda = 0.0;
    double p_at_horizon = 0.0;
    double threshold_at_horizon = 0.0;
    double interpolation_at_horizon = 0.0;
    CvaResult cva;
};

/// Everything a pricing run produces, before serialisation.
struct RunOutput {
    std::string counterparty;
    double reference_notional = 0.0;
    double horizon = 0.0;

    ExposureProfile base;
    std::vector<ExposureProfile> stressed; // one per scenario
    ExposureProfile wwr;                   // overlay applied

    CvaResult cva_base;
    CvaResult cva_wwr;
    FvaResult fva_base;
    FvaResult fva_wwr;
    bool has_fva = false;

    HedgeReport hedge;
    std::vector<ScenarioSummary> scenarios;

    std::vector<std::string> warnings;
    std::vector<std::string> defaults_applied;
    std::vector<std::string> files_written;
};

/// Loads the inputs, runs the simulation, applies the overlay, prices the
/// adjustments and writes report.json / epe_profiles.csv / run_meta.json
/// into cfg.out_dir (per cfg.format; the metadata file is always written).
/// On error, partially written outputs are removed before the exception
/// escapes. Validation problems throw ConfigError / ValidationError /
/// ShapeError; numerical ones throw NumericalError.
RunOutput run(const RunConfig& cfg);

/// Lint-only entry point: loads and validates everything run() would,
/// without simulating or writing files. Returns the scenario lint plus
/// any warnings.
struct ValidateOutput {
    ScenarioValidation scenario_lint;
    std::vector<std::string> warnings;
    std::vector<std::string> defaults_applied;
};
ValidateOutput validate_run(const RunConfig& cfg);

} // namespace tailrisk
