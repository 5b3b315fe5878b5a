#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tailrisk/instruments.hpp"
#include "tailrisk/market_data.hpp"

namespace tailrisk {

/// Strictly increasing exposure bucket times, all positive.
struct TimeGrid {
    std::vector<double> times;

    static TimeGrid regular(double step, double horizon);
    static TimeGrid quarterly(double horizon) { return regular(0.25, horizon); }

    void validate() const;

    bool operator==(const TimeGrid&) const = default;
};

/// One-factor mean-reverting Gaussian shift of all zero curves. The shift
/// starts at zero and is a martingale: E[x(t)] = 0 at every horizon.
struct RateModelParams {
    double mean_reversion = 0.03; // 1/year
    double normal_vol = 0.008;    // absolute rate vol per sqrt(year)
};

/// Driftless lognormal FX around the curve-implied forward, so
/// E[X(t)] = F(0, t) at every bucket.
struct FxModelParams {
    double lognormal_vol = 0.15; // per sqrt(year)
};

struct SimConfig {
    std::size_t n_paths = 50000;
    std::uint64_t seed = 42;
    TimeGrid grid;
    RateModelParams rate_model;
    FxModelParams fx_model;
    /// 0 = use hardware concurrency. Results are independent of this.
    unsigned n_threads = 0;

    void validate() const;
};

/// Simulated risk-factor states: one rate shift per (path, bucket) and one
/// FX level per (path, bucket, pair). Pairs are the snapshot's FX pairs in
/// sorted order. Same (seed, grid, snapshot) always yields the same cube,
/// bit for bit, regardless of thread count.
class StateCube {
public:
    StateCube(std::size_t n_paths, std::vector<double> times, std::vector<std::string> pairs);

    std::size_t n_paths() const { return n_paths_; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<std::string>& pairs() const { return pairs_; }

    double rate_shift(std::size_t path, std::size_t bucket) const {
        return rate_[path * times_.size() + bucket];
    }
    std::span<const double> fx_levels(std::size_t path, std::size_t bucket) const {
        return {fx_.data() + (path * times_.size() + bucket) * pairs_.size(), pairs_.size()};
    }

    double* rate_data() { return rate_.data(); }
    double* fx_data() { return fx_.data(); }

    bool operator==(const StateCube&) const = default;

private:
    std::size_t n_paths_;
    std::vector<double> times_;
    std::vector<std::string> pairs_;
    std::vector<double> rate_;
    std::vector<double> fx_;
};

StateCube simulate_states(const MarketSnapshot& snapshot, const SimConfig& config);

/// Discounted exposure statistics per bucket, expressed as fractions of the
/// portfolio reference notional. Parity epe - ene == ee holds per bucket by
/// construction. scenario_id is empty for the base profile.
struct ExposureProfile {
    std::vector<double> times;
    std::vector<double> ee;
    std::vector<double> epe;
    std::vector<double> ene;
    std::vector<double> epe_stderr;
    std::string scenario_id;

    void validate() const;

    bool operator==(const ExposureProfile&) const = default;
};

/// Monte Carlo exposure profile of the netting set under the snapshot.
/// Values are discounted to today with the snapshot's base-currency curve
/// and normalised by the portfolio reference notional. With netting off,
/// positive exposure is summed per trade instead of netted.
ExposureProfile exposure_profile(const InstrumentPortfolio& portfolio,
                                 const MarketSnapshot& snapshot, const SimConfig& config);

/// Exposure profile under apply_shock(snapshot, shock), same seed and grid.
ExposureProfile stressed_exposure_profile(const InstrumentPortfolio& portfolio,
                                          const MarketSnapshot& snapshot,
                                          const MarketShock& shock, const SimConfig& config);

/// Writes "t,ee,epe,ene,epe_stderr" rows with fixed formatting, so equal
/// profiles serialise to identical bytes.
void write_profile_csv(std::ostream& out, const ExposureProfile& profile);

} // namespace tailrisk
