#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tailrisk/errors.hpp"

namespace tailrisk {

/// Continuously compounded zero curve. Zero rates are interpolated linearly
/// between pillars and extrapolated flat on both ends, so a single pillar
/// gives a flat curve.
class DiscountCurve {
public:
    DiscountCurve(std::vector<double> pillar_times, std::vector<double> zero_rates);

    static DiscountCurve flat(double zero_rate);

    /// Interpolated zero rate at t >= 0.
    double zero_rate(double t) const;

    /// exp(-z(t) * t). discount_factor(0) == 1 exactly.
    double discount_factor(double t) const;

    /// New curve with every zero rate shifted by dz.
    DiscountCurve shifted(double dz) const;

    const std::vector<double>& pillar_times() const { return times_; }
    const std::vector<double>& zero_rates() const { return zeros_; }

    bool operator==(const DiscountCurve&) const = default;

private:
    std::vector<double> times_;
    std::vector<double> zeros_;
};

/// Flat-hazard credit curve: survival(t) = exp(-h * t).
class CreditCurve {
public:
    CreditCurve(double hazard_rate, double recovery);

    double survival(double t) const;
    double default_probability(double t) const { return 1.0 - survival(t); }

    double hazard_rate() const { return hazard_; }
    double recovery() const { return recovery_; }

    /// Flat CDS spread reproduced from the hazard: h * (1 - R).
    double implied_spread() const { return hazard_ * (1.0 - recovery_); }

    bool operator==(const CreditCurve&) const = default;

private:
    double hazard_;
    double recovery_;
};

/// Credit-triangle bootstrap of a flat hazard from a flat CDS spread
/// (spread as a decimal, e.g. 0.03 for 300 bp): h = s / (1 - R).
CreditCurve bootstrap_flat_cds(double spread, double recovery);

/// Spot FX level for a currency pair named "XXXYYY", quoted as units of
/// YYY (external) per one unit of XXX (internal).
class FxSpot {
public:
    FxSpot(std::string pair, double rate);

    const std::string& pair() const { return pair_; }
    double rate() const { return rate_; }
    std::string internal_currency() const { return pair_.substr(0, 3); }
    std::string external_currency() const { return pair_.substr(3, 3); }

    bool operator==(const FxSpot&) const = default;

private:
    std::string pair_;
    double rate_;
};

/// Term structure of the institution's funding spread over the risk-free
/// curve. Same interpolation rules as DiscountCurve.
class FundingSpreadCurve {
public:
    FundingSpreadCurve(std::vector<double> pillar_times, std::vector<double> spreads);

    static FundingSpreadCurve flat(double spread);

    double spread(double t) const;
    FundingSpreadCurve shifted(double ds) const;

    const std::vector<double>& pillar_times() const { return times_; }
    const std::vector<double>& spreads() const { return spreads_; }

    bool operator==(const FundingSpreadCurve&) const = default;

private:
    std::vector<double> times_;
    std::vector<double> spreads_;
};

/// One coherent market: discount curves by currency, credit curves by
/// entity name, FX spots by pair, and the funding spread curve.
struct MarketSnapshot {
    std::map<std::string, DiscountCurve> discount_curves;
    std::map<std::string, CreditCurve> credit_curves;
    std::map<std::string, FxSpot> fx_spots;
    std::optional<FundingSpreadCurve> funding_curve;

    const DiscountCurve& discount_curve(const std::string& currency) const;
    const CreditCurve& credit_curve(const std::string& entity) const;
    const FxSpot& fx_spot(const std::string& pair) const;
    const FundingSpreadCurve& funding() const;

    bool has_discount_curve(const std::string& currency) const;
    bool has_credit_curve(const std::string& entity) const;
    bool has_fx_spot(const std::string& pair) const;

    bool operator==(const MarketSnapshot&) const = default;
};

/// Deterministic market move applied to a snapshot. Rate shifts are
/// parallel shifts of zero curves; FX devaluations multiply the spot by
/// (1 - d); the funding shift is a parallel shift of the funding spreads.
struct MarketShock {
    /// Shift applied to every discount curve (decimal, 0.05 = +500 bp).
    std::optional<double> rate_shift_all;
    /// Per-currency shifts; keys must exist in the snapshot.
    std::map<std::string, double> rate_shift_by_currency;
    /// Pair -> devaluation fraction d in [0, 1); keys must exist.
    std::map<std::string, double> fx_devaluation;
    std::optional<double> funding_spread_shift;

    bool empty() const;

    bool operator==(const MarketShock&) const = default;
};

/// Returns a shocked copy of the snapshot; the input is never mutated.
/// Throws ConfigError when a shock references an unknown currency or pair,
/// or a devaluation is outside [0, 1).
MarketSnapshot apply_shock(const MarketSnapshot& snapshot, const MarketShock& shock);

} // namespace tailrisk
