#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tailrisk/instruments.hpp"
#include "tailrisk/market_data.hpp"
#include "tailrisk/wwr_overlay.hpp"
#include "tailrisk/xva.hpp"

namespace tailrisk {

/// Loaders append a human-readable note here for every default they fill
/// in, so the run metadata can list them.
using DefaultsLog = std::vector<std::string>;

/// Market file: discount curves by currency (pillars or flat), credit
/// curves by entity (spread_bps + recovery, or hazard_rate), FX spots by
/// pair, and an optional funding curve.
MarketSnapshot load_market(const std::string& path, DefaultsLog* defaults = nullptr);

/// Portfolio file: base_currency, counterparty, netting flag and trades.
/// An IRS fixed_rate of "par" is resolved against the snapshot here, plus
/// an optional par_offset.
InstrumentPortfolio load_portfolio(const std::string& path, const MarketSnapshot& snapshot,
                                   DefaultsLog* defaults = nullptr);

/// Scenario file: list of tail events with shock, probability source,
/// coupling (lambda or rating) and threshold (p_threshold_bps or
/// p_threshold). Spread thresholds inherit the probability entity's
/// recovery when CDS-implied.
std::vector<StressScenario> load_scenarios(const std::string& path,
                                           const MarketSnapshot& snapshot,
                                           DefaultsLog* defaults = nullptr);

/// Full run description: input files plus simulation and output settings.
struct RunConfig {
    std::string market_file;
    std::string portfolio_file;
    std::string scenarios_file; // optional; empty = no overlay

    std::size_t n_paths = 50000;
    std::uint64_t seed = 42;
    double grid_step = 0.25;
    std::optional<double> horizon; // default: last trade maturity
    unsigned n_threads = 0;
    double soft_cap = 0.25;
    RateModelParams rate_model;
    FxModelParams fx_model;

    enum class Format { json, csv, both };
    Format format = Format::both;
    std::string out_dir = ".";
    GapAggregation hedge_aggregation = GapAggregation::time_average;

    /// Reads a bundle (.cfg, JSON). Relative input paths are resolved
    /// against the bundle's directory.
    static RunConfig from_file(const std::string& path, DefaultsLog* defaults = nullptr);
};

RunConfig::Format parse_format(const std::string& text);

} // namespace tailrisk
