#include "tailrisk/instruments.hpp"

#include <algorithm>
#include <cmath>

namespace tailrisk {

namespace {

constexpr double time_eps = 1e-9;

double cross_value(const CrossCurrencySwap& ccs, const MarketState& state,
                   const std::string& base_currency) {
    const FxSpot& spot = state.market->fx_spot(ccs.fx_pair);
    double x = state.fx_rate(ccs.fx_pair); // external units per internal unit
    if (base_currency == spot.external_currency())
        return ccs.notional_external - x * ccs.notional_internal;
    if (base_currency == spot.internal_currency())
        return ccs.notional_external / x - ccs.notional_internal;
    throw ConfigError("portfolio base currency \"" + base_currency +
                      "\" is neither leg of pair \"" + ccs.fx_pair + "\"");
}

} // namespace

double MarketState::discount(const std::string& currency, double maturity) const {
    const DiscountCurve& curve = market->discount_curve(currency);
    double base = curve.discount_factor(maturity) / curve.discount_factor(t);
    if (rate_shift == 0.0) return base;
    return base * std::exp(-rate_shift * (maturity - t));
}

double MarketState::fx_rate(const std::string& pair) const {
    if (fx_pairs) {
        for (std::size_t i = 0; i < fx_pairs->size(); ++i)
            if ((*fx_pairs)[i] == pair) return fx_levels[i];
    }
    const FxSpot& spot = market->fx_spot(pair);
    const DiscountCurve& internal = market->discount_curve(spot.internal_currency());
    const DiscountCurve& external = market->discount_curve(spot.external_currency());
    return spot.rate() * internal.discount_factor(t) / external.discount_factor(t);
}

std::vector<double> InterestRateSwap::payment_times(double t) const {
    double delta = 1.0 / payments_per_year;
    auto n = static_cast<long>(std::lround(maturity * payments_per_year));
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(std::max(0L, n)));
    for (long i = 1; i <= n; ++i) {
        double ti = static_cast<double>(i) * delta;
        if (ti > t + time_eps) times.push_back(ti);
    }
    return times;
}

void InterestRateSwap::validate() const {
    if (!(notional > 0.0) || !std::isfinite(notional))
        throw ConfigError("swap notional must be finite and positive");
    if (!std::isfinite(fixed_rate))
        throw ConfigError("swap fixed rate must be finite");
    if (!(maturity > 0.0) || !std::isfinite(maturity))
        throw ConfigError("swap maturity must be finite and positive");
    if (payments_per_year != 1 && payments_per_year != 2 && payments_per_year != 4 &&
        payments_per_year != 12)
        throw ConfigError("swap payment frequency must be 1, 2, 4 or 12 per year");
    double periods = maturity * payments_per_year;
    if (std::abs(periods - std::lround(periods)) > 1e-6)
        throw ConfigError("swap maturity must be a whole number of payment periods");
    if (currency.size() != 3)
        throw ConfigError("swap currency must be a three-letter code");
}

void CrossCurrencySwap::validate() const {
    if (!(notional_external > 0.0) || !(notional_internal > 0.0))
        throw ConfigError("cross-currency notionals must be positive");
    if (!(maturity > 0.0) || !std::isfinite(maturity))
        throw ConfigError("cross-currency maturity must be finite and positive");
    if (fx_pair.size() != 6)
        throw ConfigError("cross-currency fx_pair must be six letters");
}

double InstrumentPortfolio::reference_notional() const {
    double total = 0.0;
    for (const Trade& trade : trades)
        std::visit([&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, InterestRateSwap>)
                total += t.notional;
            else
                total += t.notional_external;
        }, trade);
    return total;
}

double InstrumentPortfolio::max_maturity() const {
    double m = 0.0;
    for (const Trade& trade : trades)
        std::visit([&](const auto& t) { m = std::max(m, t.maturity); }, trade);
    return m;
}

void InstrumentPortfolio::validate() const {
    if (base_currency.size() != 3)
        throw ConfigError("portfolio base currency must be a three-letter code");
    for (const Trade& trade : trades) {
        std::visit([&](const auto& t) { t.validate(); }, trade);
        if (const auto* irs = std::get_if<InterestRateSwap>(&trade);
            irs && irs->currency != base_currency)
            throw ConfigError("swap currency \"" + irs->currency +
                              "\" must match the portfolio base currency \"" + base_currency + "\"");
    }
}

double price_trade(const Trade& trade, const MarketState& state,
                   const std::string& base_currency) {
    return std::visit([&](const auto& t) -> double {
        if (state.t >= t.maturity - time_eps) return 0.0;
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, InterestRateSwap>) {
            double annuity = 0.0;
            double delta = 1.0 / t.payments_per_year;
            for (double ti : t.payment_times(state.t))
                annuity += delta * state.discount(t.currency, ti);
            double floating = 1.0 - state.discount(t.currency, t.maturity);
            double value = t.notional * (floating - t.fixed_rate * annuity);
            return t.direction == InterestRateSwap::Direction::payer ? value : -value;
        } else {
            return cross_value(t, state, base_currency);
        }
    }, trade);
}

double price_portfolio(const InstrumentPortfolio& portfolio, const MarketState& state) {
    double total = 0.0;
    for (const Trade& trade : portfolio.trades)
        total += price_trade(trade, state, portfolio.base_currency);
    return total;
}

double par_rate(const InterestRateSwap& swap, const MarketSnapshot& snapshot) {
    swap.validate();
    const DiscountCurve& curve = snapshot.discount_curve(swap.currency);
    double delta = 1.0 / swap.payments_per_year;
    double annuity = 0.0;
    for (double ti : swap.payment_times(0.0))
        annuity += delta * curve.discount_factor(ti);
    if (!(annuity > 1e-12) || !std::isfinite(annuity))
        throw NumericalError("par_rate: degenerate annuity");
    return (1.0 - curve.discount_factor(swap.maturity)) / annuity;
}

} // namespace tailrisk
