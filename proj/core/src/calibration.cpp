#include "tailrisk/calibration.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <sstream>

#include "tailrisk/errors.hpp"

namespace tailrisk {

void CdsSeries::validate() const {
    if (dates.empty() || dates.size() != spreads_bps.size())
        throw ConfigError("CdsSeries: dates and spreads must match and be non-empty");
    for (std::size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i] > dates[i - 1]))
            throw ConfigError("CdsSeries: dates must be strictly increasing (got \"" + dates[i] +
                              "\" after \"" + dates[i - 1] + "\")");
    for (double s : spreads_bps)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw ConfigError("CdsSeries: spreads must be finite and non-negative");
}

CdsSeries CdsSeries::from_csv(std::istream& in) {
    CdsSeries series;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("CdsSeries: line " + std::to_string(line_no) + " is not \"date,spread\"");
        std::string date = line.substr(0, comma);
        std::string spread_text = line.substr(comma + 1);
        try {
            std::size_t used = 0;
            double spread = std::stod(spread_text, &used);
            while (used < spread_text.size() &&
                   std::isspace(static_cast<unsigned char>(spread_text[used])))
                ++used;
            if (used != spread_text.size()) throw std::invalid_argument("trailing text");
            series.dates.push_back(std::move(date));
            series.spreads_bps.push_back(spread);
        } catch (const std::exception&) {
            if (line_no == 1) continue; // header row
            throw ConfigError("CdsSeries: bad spread on line " + std::to_string(line_no));
        }
    }
    series.validate();
    return series;
}

LambdaEstimate estimate_lambda(const CdsSeries& counterparty, const CdsSeries& sovereign,
                               double cpty_threshold_bps, double sov_threshold_bps) {
    counterparty.validate();
    sovereign.validate();
    if (!(cpty_threshold_bps > 0.0) || !(sov_threshold_bps > 0.0))
        throw std::domain_error("estimate_lambda: thresholds must be positive");

    LambdaEstimate est;
    std::size_t i = 0, j = 0;
    while (i < counterparty.dates.size() && j < sovereign.dates.size()) {
        int cmp = counterparty.dates[i].compare(sovereign.dates[j]);
        if (cmp < 0) { ++i; continue; }
        if (cmp > 0) { ++j; continue; }
        bool cpty_hit = counterparty.spreads_bps[i] > cpty_threshold_bps;
        bool sov_hit = sovereign.spreads_bps[j] > sov_threshold_bps;
        ++est.n_days;
        if (cpty_hit) ++est.n_cpty_exceed;
        if (sov_hit) ++est.n_sov_exceed;
        if (cpty_hit && sov_hit) ++est.n_joint_exceed;
        ++i;
        ++j;
    }

    if (est.n_days == 0)
        throw EstimationError("estimate_lambda: the series share no dates");
    if (est.n_sov_exceed == 0)
        throw EstimationError("estimate_lambda: sovereign never exceeds its threshold over " +
                              std::to_string(est.n_days) + " shared days; P(cpty | sov) undefined");
    if (est.n_cpty_exceed == 0)
        throw EstimationError("estimate_lambda: counterparty never exceeds its threshold over " +
                              std::to_string(est.n_days) + " shared days; lambda undefined");

    double n = static_cast<double>(est.n_days);
    est.p_cpty = static_cast<double>(est.n_cpty_exceed) / n;
    est.p_sov = static_cast<double>(est.n_sov_exceed) / n;
    est.p_cpty_given_sov =
        static_cast<double>(est.n_joint_exceed) / static_cast<double>(est.n_sov_exceed);
    est.p_sov_given_cpty =
        static_cast<double>(est.n_joint_exceed) / static_cast<double>(est.n_cpty_exceed);
    est.lambda = est.p_cpty_given_sov / est.p_cpty;
    est.lambda_dual = est.p_sov_given_cpty / est.p_sov;
    return est;
}

WwrRating classify_wwr(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::domain_error("classify_wwr: lambda must be finite and non-negative");
    if (lambda < std::sqrt(10.0)) return WwrRating::low;
    if (lambda < std::sqrt(1000.0)) return WwrRating::medium;
    return WwrRating::high;
}

const char* to_string(WwrRating rating) {
    switch (rating) {
        case WwrRating::low: return "low";
        case WwrRating::medium: return "medium";
        case WwrRating::high: return "high";
    }
    return "unknown";
}

} // namespace tailrisk
