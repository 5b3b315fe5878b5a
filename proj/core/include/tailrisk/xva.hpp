#pragma once

#include <string>
#include <vector>

#include "tailrisk/exposure.hpp"
#include "tailrisk/market_data.hpp"
#include "tailrisk/wwr_overlay.hpp"

namespace tailrisk {

struct CvaResult {
    /// Upfront charge as a fraction of notional.
    double upfront = 0.0;
    /// Running spread equivalent, in basis points per year.
    double running_bps = 0.0;
    /// Which profile produced it ("base" or the profile's scenario id).
    std::string profile_used = "base";
};

/// Unilateral CVA over discounted EPE with the right-point default rule:
/// upfront = (1 - R) * sum_i EPE(t_i) * [S(t_{i-1}) - S(t_i)], t_0- = 0.
/// running = upfront / risky annuity, annuity = sum_i dt_i D(t_i) S(t_i).
/// The profile is already discounted, so no extra discounting of EPE.
CvaResult cva(const ExposureProfile& profile, const CreditCurve& counterparty,
              const DiscountCurve& discount);

/// CVA over the probability-weighted tail-adjusted profile.
CvaResult cva_wwr(const ExposureProfile& base, const ExposureProfile& stressed,
                  const StressScenario& scenario, const MarketSnapshot& snapshot,
                  const CreditCurve& counterparty, const DiscountCurve& discount);

struct FvaResult {
    /// Funding value adjustment as a fraction of notional (negative when
    /// funding an uncollateralised asset costs money).
    double value = 0.0;
    /// Upfront value expressed in basis points of notional.
    double value_bps = 0.0;
    /// Running spread equivalent in bp/year (0 when no discount curve is
    /// supplied for the annuity).
    double running_bps = 0.0;
    bool stressed = false;
};

/// FVA over the discounted expected MtM (the profile's ee column):
/// value = sum_i dt_i * (-FS(t_i)) * EE(t_i).
FvaResult fva(const ExposureProfile& mtm_profile, const FundingSpreadCurve& funding,
              const DiscountCurve* annuity_discount = nullptr);

/// Tail-adjusted FVA:
/// FVA_WWR = FVA - lambda * sum_i dt_i P(t_i) *
///           [FS_s(t_i) EE_s(t_i) - FS(t_i) EE(t_i)] * (1 - tanh(P/P_th)).
/// With a zero coupling or an identical stressed market this equals fva()
/// exactly.
FvaResult fva_wwr(const ExposureProfile& mtm, const ExposureProfile& stressed_mtm,
                  const FundingSpreadCurve& funding, const FundingSpreadCurve& stressed_funding,
                  const StressScenario& scenario, const MarketSnapshot& snapshot,
                  const DiscountCurve* annuity_discount = nullptr);

/// Multi-scenario form: the same correction summed over all tail events.
FvaResult fva_wwr_multi(const ExposureProfile& mtm,
                        const std::vector<ExposureProfile>& stressed_mtm,
                        const std::vector<FundingSpreadCurve>& stressed_funding,
                        const std::vector<StressScenario>& scenarios,
                        const FundingSpreadCurve& funding, const MarketSnapshot& snapshot,
                        const DiscountCurve* annuity_discount = nullptr);

/// How the exposure gap feeding the hedge is aggregated over buckets.
enum class GapAggregation { time_average, at_horizon };

/// One counterparty's inputs for the tail hedge: its coupling, credit
/// curve, and base vs interpolated-stressed profiles on a shared grid.
struct HedgeInput {
    std::string name;
    double coupling_lambda = 1.0;
    CreditCurve counterparty;
    ExposureProfile base;
    ExposureProfile rel_stressed;
};

struct HedgeEntry {
    std::string name;
    double coupling_lambda = 0.0;
    double p_counterparty = 0.0;
    double exposure_gap = 0.0;
    double notional = 0.0;
};

struct HedgeReport {
    std::vector<HedgeEntry> entries;
    double total = 0.0;
    GapAggregation aggregation = GapAggregation::time_average;
    double horizon = 0.0;
};

/// Sovereign-protection hedge notional proportional to
/// sum_i lambda_i * P_i(horizon) * gap_i, where gap_i is the (time-averaged
/// or at-horizon) difference between the interpolated-stressed and base
/// EPE, in units of notional. Entries are reported per counterparty.
HedgeReport hedge_notional(const std::vector<HedgeInput>& inputs, double horizon,
                           GapAggregation aggregation = GapAggregation::time_average);

} // namespace tailrisk
