#include "tailrisk/xva.hpp"

#include <cmath>

#include "tailrisk/errors.hpp"

namespace tailrisk {

namespace {

double bucket_dt(const std::vector<double>& times, std::size_t i) {
    return times[i] - (i == 0 ? 0.0 : times[i - 1]);
}

double risky_annuity(const std::vector<double>& times, const CreditCurve& credit,
                     const DiscountCurve& discount) {
    double annuity = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        annuity += bucket_dt(times, i) * discount.discount_factor(times[i]) *
                   credit.survival(times[i]);
    return annuity;
}

double riskless_annuity(const std::vector<double>& times, const DiscountCurve& discount) {
    double annuity = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        annuity += bucket_dt(times, i) * discount.discount_factor(times[i]);
    return annuity;
}

/// lambda * sum_i dt_i P_i (FS_s EE_s - FS EE)_i IF_i for one scenario.
double fva_correction(const ExposureProfile& mtm, const ExposureProfile& stressed_mtm,
                      const FundingSpreadCurve& funding,
                      const FundingSpreadCurve& stressed_funding,
                      const StressScenario& scenario, const MarketSnapshot& snapshot) {
    if (mtm.times != stressed_mtm.times)
        throw ShapeError("fva_wwr: profiles are on different grids");
    double correction = 0.0;
    for (std::size_t i = 0; i < mtm.times.size(); ++i) {
        double t = mtm.times[i];
        double p = scenario_probability(scenario, snapshot, t);
        double lp = scenario.coupling_lambda * p;
        if (lp > 1.0 + 1e-12)
            throw ValidationError("scenario \"" + scenario.id + "\": lambda * P(t) exceeds 1 at t = " +
                                  std::to_string(t));
        double p_th = scenario_threshold(scenario, snapshot, t);
        double gap = stressed_funding.spread(t) * stressed_mtm.ee[i] - funding.spread(t) * mtm.ee[i];
        correction += bucket_dt(mtm.times, i) * lp * gap * interpolation_factor(p, p_th);
    }
    return correction;
}

void fill_bps(FvaResult& result, const std::vector<double>& times,
              const DiscountCurve* annuity_discount) {
    result.value_bps = result.value * 1e4;
    if (annuity_discount) {
        double annuity = riskless_annuity(times, *annuity_discount);
        if (!(annuity > 1e-12))
            throw NumericalError("fva: degenerate annuity");
        result.running_bps = result.value / annuity * 1e4;
    }
}

} // namespace

CvaResult cva(const ExposureProfile& profile, const CreditCurve& counterparty,
              const DiscountCurve& discount) {
    profile.validate();
    double upfront = 0.0;
    double prev_survival = 1.0;
    for (std::size_t i = 0; i < profile.times.size(); ++i) {
        double survival = counterparty.survival(profile.times[i]);
        upfront += profile.epe[i] * (prev_survival - survival);
        prev_survival = survival;
    }
    upfront *= 1.0 - counterparty.recovery();

    double annuity = risky_annuity(profile.times, counterparty, discount);
    if (!(annuity > 1e-12) || !std::isfinite(annuity))
        throw NumericalError("cva: degenerate risky annuity");

    CvaResult result;
    result.upfront = upfront;
    result.running_bps = upfront / annuity * 1e4;
    result.profile_used = profile.scenario_id.empty() ? "base" : profile.scenario_id;
    return result;
}

CvaResult cva_wwr(const ExposureProfile& base, const ExposureProfile& stressed,
                  const StressScenario& scenario, const MarketSnapshot& snapshot,
                  const CreditCurve& counterparty, const DiscountCurve& discount) {
    return cva(epe_wwr_single(base, stressed, scenario, snapshot), counterparty, discount);
}

FvaResult fva(const ExposureProfile& mtm_profile, const FundingSpreadCurve& funding,
              const DiscountCurve* annuity_discount) {
    mtm_profile.validate();
    FvaResult result;
    for (std::size_t i = 0; i < mtm_profile.times.size(); ++i) {
        double t = mtm_profile.times[i];
        result.value += bucket_dt(mtm_profile.times, i) * (-funding.spread(t)) * mtm_profile.ee[i];
    }
    fill_bps(result, mtm_profile.times, annuity_discount);
    return result;
}

FvaResult fva_wwr(const ExposureProfile& mtm, const ExposureProfile& stressed_mtm,
                  const FundingSpreadCurve& funding, const FundingSpreadCurve& stressed_funding,
                  const StressScenario& scenario, const MarketSnapshot& snapshot,
                  const DiscountCurve* annuity_discount) {
    FvaResult result = fva(mtm, funding, annuity_discount);
    result.value -= fva_correction(mtm, stressed_mtm, funding, stressed_funding, scenario, snapshot);
    fill_bps(result, mtm.times, annuity_discount);
    result.stressed = true;
    return result;
}

FvaResult fva_wwr_multi(const ExposureProfile& mtm,
                        const std::vector<ExposureProfile>& stressed_mtm,
                        const std::vector<FundingSpreadCurve>& stressed_funding,
                        const std::vector<StressScenario>& scenarios,
                        const FundingSpreadCurve& funding, const MarketSnapshot& snapshot,
                        const DiscountCurve* annuity_discount) {
    if (stressed_mtm.size() != scenarios.size() || stressed_funding.size() != scenarios.size())
        throw ShapeError("fva_wwr_multi: one stressed profile and funding curve per scenario");
    FvaResult result = fva(mtm, funding, annuity_discount);
    for (std::size_t k = 0; k < scenarios.size(); ++k)
        result.value -= fva_correction(mtm, stressed_mtm[k], funding, stressed_funding[k],
                                       scenarios[k], snapshot);
    fill_bps(result, mtm.times, annuity_discount);
    result.stressed = true;
    return result;
}

HedgeReport hedge_notional(const std::vector<HedgeInput>& inputs, double horizon,
                           GapAggregation aggregation) {
    if (!(horizon > 0.0))
        throw std::invalid_argument("hedge_notional: horizon must be positive");

    HedgeReport report;
    report.aggregation = aggregation;
    report.horizon = horizon;
    for (const HedgeInput& input : inputs) {
        input.base.validate();
        input.rel_stressed.validate();
        if (input.base.times != input.rel_stressed.times)
            throw ShapeError("hedge_notional: profiles for \"" + input.name +
                             "\" are on different grids");
        if (!(input.coupling_lambda >= 0.0))
            throw std::domain_error("hedge_notional: coupling lambda must be non-negative");

        double gap = 0.0;
        if (aggregation == GapAggregation::time_average) {
            std::size_t n = 0;
            for (std::size_t i = 0; i < input.base.times.size(); ++i) {
                if (input.base.times[i] > horizon + 1e-12) break;
                gap += input.rel_stressed.epe[i] - input.base.epe[i];
                ++n;
            }
            if (n == 0)
                throw std::invalid_argument("hedge_notional: horizon precedes the first bucket");
            gap /= static_cast<double>(n);
        } else {
            std::size_t pick = input.base.times.size();
            for (std::size_t i = 0; i < input.base.times.size(); ++i)
                if (input.base.times[i] <= horizon + 1e-12) pick = i;
            if (pick == input.base.times.size())
                throw std::invalid_argument("hedge_notional: horizon precedes the first bucket");
            gap = input.rel_stressed.epe[pick] - input.base.epe[pick];
        }

        HedgeEntry entry;
        entry.name = input.name;
        entry.coupling_lambda = input.coupling_lambda;
        entry.p_counterparty = input.counterparty.default_probability(horizon);
        entry.exposure_gap = gap;
        entry.notional = input.coupling_lambda * entry.p_counterparty * gap;
        report.total += entry.notional;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

} // namespace tailrisk
