#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tailrisk/market_data.hpp"

namespace tailrisk {

/// Point-in-time pricing context: the run snapshot plus the simulated state
/// at observation time t. rate_shift is an additive parallel shift of all
/// zero curves on top of the snapshot; fx_levels holds simulated FX rates
/// aligned with *fx_pairs (falls back to the forward implied by the
/// snapshot when a pair is not simulated).
struct MarketState {
    const MarketSnapshot* market = nullptr;
    double t = 0.0;
    double rate_shift = 0.0;
    const std::vector<std::string>* fx_pairs = nullptr;
    std::span<const double> fx_levels;

    /// Forward discount factor from t to maturity in the given currency:
    /// D(maturity) / D(t) * exp(-rate_shift * (maturity - t)).
    double discount(const std::string& currency, double maturity) const;

    /// Simulated FX level for the pair, or the snapshot-implied forward
    /// spot * D_internal(t) / D_external(t) when the pair is not simulated.
    double fx_rate(const std::string& pair) const;
};

/// Fixed-for-floating single-currency swap. The floating leg resets at the
/// observation date, so its remaining value is par: the swap is priced as
/// sign * N * [(1 - D(t, T)) - K * sum_i delta * D(t, t_i)] over the
/// remaining fixed payment dates. Maturity must be a whole number of
/// payment periods.
struct InterestRateSwap {
    enum class Direction { payer, receiver };

    double notional = 0.0;
    Direction direction = Direction::payer;
    double fixed_rate = 0.0;
    double maturity = 0.0;
    int payments_per_year = 4;
    std::string currency;

    /// Remaining fixed payment times strictly after t, up to maturity.
    std::vector<double> payment_times(double t = 0.0) const;

    void validate() const;
};

/// Cross-currency basis swap with both legs floating flat (par FRNs) and
/// a final notional exchange: we receive notional_external in the external
/// currency and pay notional_internal in the internal currency of fx_pair.
/// Each leg is worth its notional in its own currency, so the value is
/// pure FX translation of the two notionals.
struct CrossCurrencySwap {
    double notional_external = 0.0;
    double notional_internal = 0.0;
    std::string fx_pair;
    double maturity = 0.0;

    void validate() const;
};

using Trade = std::variant<InterestRateSwap, CrossCurrencySwap>;

/// One netting set facing a single counterparty.
struct InstrumentPortfolio {
    std::vector<Trade> trades;
    bool netting = true;
    std::string base_currency;
    std::string counterparty;

    /// Sum of primary notionals (IRS notional; CCS external notional
    /// translated at spot needs a snapshot, so CCS uses the external
    /// notional as-is). Used to express profiles as fractions of notional.
    double reference_notional() const;
    double max_maturity() const;

    void validate() const;
};

/// Value of one trade in the portfolio base currency at the given state,
/// per unit of the trade's own notional convention (absolute, not
/// normalised). Zero at or after maturity.
double price_trade(const Trade& trade, const MarketState& state, const std::string& base_currency);

/// Netted portfolio value in the base currency.
double price_portfolio(const InstrumentPortfolio& portfolio, const MarketState& state);

/// Par fixed rate for the swap under the snapshot:
/// K* = (1 - D(T)) / sum_i delta * D(t_i).
/// Throws NumericalError when the annuity is degenerate.
double par_rate(const InterestRateSwap& swap, const MarketSnapshot& snapshot);

} // namespace tailrisk
