#include "tailrisk/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace tailrisk {

namespace {

void check_pillars(const std::vector<double>& times, const std::vector<double>& values,
                   const char* what) {
    if (times.empty() || times.size() != values.size())
        throw std::invalid_argument(std::string(what) + ": pillar and value counts must match and be non-empty");
    if (times.front() <= 0.0)
        throw std::invalid_argument(std::string(what) + ": first pillar time must be positive");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::invalid_argument(std::string(what) + ": pillar times must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(what) + ": values must be finite");
}

/// Piecewise-linear in t with flat extrapolation on both ends.
double interp_flat_ends(const std::vector<double>& xs, const std::vector<double>& ys, double t) {
    if (t <= xs.front()) return ys.front();
    if (t >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), t);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    double w = (t - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

std::vector<double> shifted_all(std::vector<double> values, double d) {
    for (double& v : values) v += d;
    return values;
}

} // namespace

DiscountCurve::DiscountCurve(std::vector<double> pillar_times, std::vector<double> zero_rates)
    : times_(std::move(pillar_times)), zeros_(std::move(zero_rates)) {
    check_pillars(times_, zeros_, "DiscountCurve");
}

DiscountCurve DiscountCurve::flat(double zero_rate) {
    return DiscountCurve({1.0}, {zero_rate});
}

double DiscountCurve::zero_rate(double t) const {
    if (t < 0.0) throw std::domain_error("DiscountCurve::zero_rate: negative time");
    return interp_flat_ends(times_, zeros_, t);
}

double DiscountCurve::discount_factor(double t) const {
    if (t < 0.0) throw std::domain_error("DiscountCurve::discount_factor: negative time");
    if (t == 0.0) return 1.0;
    return std::exp(-zero_rate(t) * t);
}

DiscountCurve DiscountCurve::shifted(double dz) const {
    return DiscountCurve(times_, shifted_all(zeros_, dz));
}

CreditCurve::CreditCurve(double hazard_rate, double recovery)
    : hazard_(hazard_rate), recovery_(recovery) {
    if (!(hazard_ >= 0.0) || !std::isfinite(hazard_))
        throw std::domain_error("CreditCurve: hazard rate must be finite and non-negative");
    if (!(recovery_ >= 0.0) || !(recovery_ < 1.0))
        throw std::domain_error("CreditCurve: recovery must lie in [0, 1)");
}

double CreditCurve::survival(double t) const {
    if (t < 0.0) throw std::domain_error("CreditCurve::survival: negative time");
    return std::exp(-hazard_ * t);
}

CreditCurve bootstrap_flat_cds(double spread, double recovery) {
    if (!(spread >= 0.0) || !std::isfinite(spread))
        throw std::domain_error("bootstrap_flat_cds: spread must be finite and non-negative");
    if (!(recovery >= 0.0) || !(recovery < 1.0))
        throw std::domain_error("bootstrap_flat_cds: recovery must lie in [0, 1)");
    return CreditCurve(spread / (1.0 - recovery), recovery);
}

FxSpot::FxSpot(std::string pair, double rate) : pair_(std::move(pair)), rate_(rate) {
    bool ok = pair_.size() == 6;
    for (char c : pair_)
        ok = ok && std::isalpha(static_cast<unsigned char>(c));
    if (!ok)
        throw std::invalid_argument("FxSpot: pair must be six letters, e.g. \"BRLUSD\"");
    if (!(rate_ > 0.0) || !std::isfinite(rate_))
        throw std::domain_error("FxSpot: rate must be finite and positive");
}

FundingSpreadCurve::FundingSpreadCurve(std::vector<double> pillar_times, std::vector<double> spreads)
    : times_(std::move(pillar_times)), spreads_(std::move(spreads)) {
    check_pillars(times_, spreads_, "FundingSpreadCurve");
}

FundingSpreadCurve FundingSpreadCurve::flat(double spread) {
    return FundingSpreadCurve({1.0}, {spread});
}

double FundingSpreadCurve::spread(double t) const {
    if (t < 0.0) throw std::domain_error("FundingSpreadCurve::spread: negative time");
    return interp_flat_ends(times_, spreads_, t);
}

FundingSpreadCurve FundingSpreadCurve::shifted(double ds) const {
    return FundingSpreadCurve(times_, shifted_all(spreads_, ds));
}

const DiscountCurve& MarketSnapshot::discount_curve(const std::string& currency) const {
    auto it = discount_curves.find(currency);
    if (it == discount_curves.end())
        throw ConfigError("no discount curve for currency \"" + currency + "\"");
    return it->second;
}

const CreditCurve& MarketSnapshot::credit_curve(const std::string& entity) const {
    auto it = credit_curves.find(entity);
    if (it == credit_curves.end())
        throw ConfigError("no credit curve for entity \"" + entity + "\"");
    return it->second;
}

const FxSpot& MarketSnapshot::fx_spot(const std::string& pair) const {
    auto it = fx_spots.find(pair);
    if (it == fx_spots.end())
        throw ConfigError("no FX spot for pair \"" + pair + "\"");
    return it->second;
}

const FundingSpreadCurve& MarketSnapshot::funding() const {
    if (!funding_curve)
        throw ConfigError("snapshot has no funding spread curve");
    return *funding_curve;
}

bool MarketSnapshot::has_discount_curve(const std::string& currency) const {
    return discount_curves.count(currency) > 0;
}

bool MarketSnapshot::has_credit_curve(const std::string& entity) const {
    return credit_curves.count(entity) > 0;
}

bool MarketSnapshot::has_fx_spot(const std::string& pair) const {
    return fx_spots.count(pair) > 0;
}

bool MarketShock::empty() const {
    return !rate_shift_all && rate_shift_by_currency.empty() && fx_devaluation.empty() &&
           !funding_spread_shift;
}

MarketSnapshot apply_shock(const MarketSnapshot& snapshot, const MarketShock& shock) {
    for (const auto& [ccy, _] : shock.rate_shift_by_currency)
        if (!snapshot.has_discount_curve(ccy))
            throw ConfigError("rate shift references unknown currency \"" + ccy + "\"");
    for (const auto& [pair, d] : shock.fx_devaluation) {
        if (!snapshot.has_fx_spot(pair))
            throw ConfigError("FX devaluation references unknown pair \"" + pair + "\"");
        if (!(d >= 0.0) || !(d < 1.0))
            throw ConfigError("FX devaluation for \"" + pair + "\" must lie in [0, 1)");
    }
    if (shock.funding_spread_shift && !snapshot.funding_curve)
        throw ConfigError("funding spread shift but snapshot has no funding curve");

    MarketSnapshot out = snapshot;
    for (auto& [ccy, curve] : out.discount_curves) {
        double dz = shock.rate_shift_all.value_or(0.0);
        auto it = shock.rate_shift_by_currency.find(ccy);
        if (it != shock.rate_shift_by_currency.end()) dz += it->second;
        if (dz != 0.0) curve = curve.shifted(dz);
    }
    for (auto& [pair, spot] : out.fx_spots) {
        auto it = shock.fx_devaluation.find(pair);
        if (it != shock.fx_devaluation.end() && it->second != 0.0)
            spot = FxSpot(pair, spot.rate() * (1.0 - it->second));
    }
    if (shock.funding_spread_shift && *shock.funding_spread_shift != 0.0)
        out.funding_curve = out.funding_curve->shifted(*shock.funding_spread_shift);
    return out;
}

} // namespace tailrisk
