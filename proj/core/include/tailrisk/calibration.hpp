#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "tailrisk/wwr_overlay.hpp"

namespace tailrisk {

/// Daily CDS spread history: ISO dates (strictly increasing) and spreads
/// in basis points.
struct CdsSeries {
    std::vector<std::string> dates;
    std::vector<double> spreads_bps;

    void validate() const;

    /// Parses "date,spread_bps" rows; a header row is skipped when the
    /// second field is not numeric.
    static CdsSeries from_csv(std::istream& in);
};

/// Joint-exceedance estimate of the coupling between a counterparty and
/// the tail entity over the overlapping date range.
struct LambdaEstimate {
    /// P(cpty | sov) / P(cpty), the coupling fed into the overlay.
    double lambda = 0.0;
    /// P(sov | cpty) / P(sov); equals lambda by Bayes, kept as a
    /// cross-check on the counting.
    double lambda_dual = 0.0;
    std::size_t n_days = 0;
    std::size_t n_cpty_exceed = 0;
    std::size_t n_sov_exceed = 0;
    std::size_t n_joint_exceed = 0;
    double p_cpty = 0.0;
    double p_sov = 0.0;
    double p_cpty_given_sov = 0.0;
    double p_sov_given_cpty = 0.0;
};

/// Counts days on which each series exceeds its distress threshold
/// (strictly greater, in bp) over the date intersection, and forms
/// lambda = P(cpty | sov) / P(cpty). Throws EstimationError when the
/// overlap is empty or a conditioning count is zero.
LambdaEstimate estimate_lambda(const CdsSeries& counterparty, const CdsSeries& sovereign,
                               double cpty_threshold_bps, double sov_threshold_bps);

/// Buckets a continuous coupling to the nearest order of magnitude:
/// lambda < sqrt(10) -> low, < sqrt(1000) -> medium, else high.
WwrRating classify_wwr(double lambda);

const char* to_string(WwrRating rating);

} // namespace tailrisk
