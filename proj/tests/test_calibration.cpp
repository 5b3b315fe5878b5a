#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "tailrisk/calibration.hpp"
#include "test_support.hpp"

using namespace tailrisk;

namespace {

std::vector<std::string> make_dates(std::size_t n) {
    static const int month_len[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    std::vector<std::string> out;
    out.reserve(n);
    int y = 2024, m = 1, d = 1;
    char buf[40];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
        out.emplace_back(buf);
        if (++d > month_len[m - 1]) {
            d = 1;
            if (++m > 12) { m = 1; ++y; }
        }
    }
    return out;
}

CdsSeries series_from_hits(const std::vector<std::string>& dates, const std::set<std::size_t>& hits,
                           double calm, double distressed) {
    CdsSeries series;
    series.dates = dates;
    series.spreads_bps.reserve(dates.size());
    for (std::size_t i = 0; i < dates.size(); ++i)
        series.spreads_bps.push_back(hits.count(i) ? distressed : calm);
    return series;
}

} // namespace

TEST_CASE("joint exceedance counting reproduces the textbook eight") {
    auto dates = make_dates(100);
    std::set<std::size_t> sov_hits, cpty_hits;
    for (std::size_t i = 5; i < 100; i += 10) sov_hits.insert(i); // 10 days
    std::size_t taken = 0;
    for (std::size_t day : sov_hits) {
        if (taken++ == 8) break;
        cpty_hits.insert(day); // 8 joint days
    }
    cpty_hits.insert(96);
    cpty_hits.insert(97); // 10 counterparty days in total

    auto cpty = series_from_hits(dates, cpty_hits, 250.0, 450.0);
    auto sov = series_from_hits(dates, sov_hits, 180.0, 380.0);
    auto est = estimate_lambda(cpty, sov, 400.0, 300.0);

    CHECK(est.n_days == 100);
    CHECK(est.n_cpty_exceed == 10);
    CHECK(est.n_sov_exceed == 10);
    CHECK(est.n_joint_exceed == 8);
    CHECK(est.p_cpty == 0.1);
    CHECK(est.p_cpty_given_sov == 0.8);
    CHECK(est.lambda == 8.0);
    CHECK(est.lambda_dual == 8.0);
}

TEST_CASE("a counterparty that never distresses with the sovereign has zero coupling") {
    auto dates = make_dates(100);
    std::set<std::size_t> sov_hits{10, 20, 30, 40};
    std::set<std::size_t> cpty_hits{15, 25, 35, 45};
    auto est = estimate_lambda(series_from_hits(dates, cpty_hits, 250.0, 450.0),
                               series_from_hits(dates, sov_hits, 180.0, 380.0), 400.0, 300.0);
    CHECK(est.n_joint_exceed == 0);
    CHECK(est.lambda == 0.0);
    CHECK(est.lambda_dual == 0.0);
}

TEST_CASE("independent series calibrate to a coupling near one") {
    auto dates = make_dates(10000);
    CdsSeries cpty, sov;
    cpty.dates = dates;
    sov.dates = dates;
    std::mt19937_64 eng(9001);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < dates.size(); ++i) {
        cpty.spreads_bps.push_back(u(eng) < 0.1 ? 450.0 : 250.0);
        sov.spreads_bps.push_back(u(eng) < 0.1 ? 380.0 : 180.0);
    }
    auto est = estimate_lambda(cpty, sov, 400.0, 300.0);

    // 95 percent confidence band for the log risk ratio
    auto j = static_cast<double>(est.n_joint_exceed);
    auto s = static_cast<double>(est.n_sov_exceed);
    auto c = static_cast<double>(est.n_cpty_exceed);
    auto n = static_cast<double>(est.n_days);
    double se_log = std::sqrt(1.0 / j - 1.0 / s + 1.0 / c - 1.0 / n);
    CHECK(std::fabs(std::log(est.lambda)) <= 1.96 * se_log);
}

TEST_CASE("both conditioning directions give the same coupling") {
    auto dates = make_dates(500);
    test_support::Lcg rng;
    std::set<std::size_t> sov_hits, cpty_hits;
    for (std::size_t i = 0; i < 500; ++i) {
        if (rng.next() < 0.08) sov_hits.insert(i);
        if (rng.next() < 0.05 || (sov_hits.count(i) && rng.next() < 0.5)) cpty_hits.insert(i);
    }
    auto est = estimate_lambda(series_from_hits(dates, cpty_hits, 250.0, 450.0),
                               series_from_hits(dates, sov_hits, 180.0, 380.0), 400.0, 300.0);
    CHECK(est.lambda == doctest::Approx(est.lambda_dual).epsilon(1e-12));
}

TEST_CASE("only the date intersection matters") {
    auto dates = make_dates(120);
    std::vector<std::string> first_100(dates.begin(), dates.begin() + 100);
    std::set<std::size_t> sov_hits{5, 15, 25, 35, 45};
    std::set<std::size_t> cpty_hits{5, 15, 25, 60, 70};

    auto cpty = series_from_hits(first_100, cpty_hits, 250.0, 450.0);
    auto sov_short = series_from_hits(first_100, sov_hits, 180.0, 380.0);
    auto sov_long = series_from_hits(dates, sov_hits, 180.0, 380.0); // 20 extra trailing days

    auto a = estimate_lambda(cpty, sov_short, 400.0, 300.0);
    auto b = estimate_lambda(cpty, sov_long, 400.0, 300.0);
    CHECK(a.lambda == b.lambda);
    CHECK(a.n_days == b.n_days);
    CHECK(a.n_joint_exceed == b.n_joint_exceed);
}

TEST_CASE("relabelling dates without reordering changes nothing") {
    auto dates = make_dates(100);
    std::set<std::size_t> sov_hits{5, 15, 25};
    std::set<std::size_t> cpty_hits{5, 15, 40};
    auto cpty = series_from_hits(dates, cpty_hits, 250.0, 450.0);
    auto sov = series_from_hits(dates, sov_hits, 180.0, 380.0);
    auto before = estimate_lambda(cpty, sov, 400.0, 300.0);

    auto shifted = make_dates(160);
    std::vector<std::string> relabelled(shifted.begin() + 60, shifted.end());
    cpty.dates = relabelled;
    sov.dates = relabelled;
    auto after = estimate_lambda(cpty, sov, 400.0, 300.0);
    CHECK(before.lambda == after.lambda);
    CHECK(before.n_cpty_exceed == after.n_cpty_exceed);
}

TEST_CASE("estimation fails loudly when it cannot condition") {
    auto dates = make_dates(50);
    auto quiet = series_from_hits(dates, {}, 250.0, 450.0);
    auto noisy = series_from_hits(dates, {1, 2, 3}, 250.0, 450.0);

    // sovereign never exceeds
    CHECK_THROWS_AS(estimate_lambda(noisy, quiet, 400.0, 300.0), EstimationError);
    // counterparty never exceeds
    CHECK_THROWS_AS(estimate_lambda(quiet, noisy, 400.0, 380.0), EstimationError);

    // disjoint calendars
    auto other_dates = make_dates(120);
    std::vector<std::string> later(other_dates.begin() + 60, other_dates.end());
    auto shifted = series_from_hits(later, {1, 2, 3}, 250.0, 450.0);
    CdsSeries early = series_from_hits(std::vector<std::string>(dates.begin(), dates.begin() + 50),
                                       {1, 2, 3}, 250.0, 450.0);
    CHECK_THROWS_AS(estimate_lambda(early, shifted, 400.0, 300.0), EstimationError);

    CHECK_THROWS_AS(estimate_lambda(noisy, noisy, -1.0, 300.0), std::domain_error);
}

TEST_CASE("series validation guards shape, order and sign") {
    CdsSeries bad;
    bad.dates = {"2024-01-01", "2024-01-02"};
    bad.spreads_bps = {100.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad.spreads_bps = {100.0, -5.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad.dates = {"2024-01-02", "2024-01-01"};
    bad.spreads_bps = {100.0, 100.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("csv parsing skips headers and comments and accepts windows line ends") {
    std::istringstream in(
        "date,spread_bps\n"
        "# weekly snapshot\n"
        "2024-01-01,101.5\r\n"
        "\n"
        "2024-01-02,99.0\n");
    auto series = CdsSeries::from_csv(in);
    REQUIRE(series.dates.size() == 2);
    CHECK(series.dates[0] == "2024-01-01");
    CHECK(series.spreads_bps[0] == 101.5);
    CHECK(series.spreads_bps[1] == 99.0);

    std::istringstream headerless("2024-01-01,101.5\n2024-01-02,99.0\n");
    CHECK(CdsSeries::from_csv(headerless).dates.size() == 2);

    std::istringstream bad("2024-01-01,101.5\n2024-01-02,not_a_number\n");
    CHECK_THROWS_AS(CdsSeries::from_csv(bad), ConfigError);

    std::istringstream unsorted("2024-01-02,101.5\n2024-01-01,99.0\n");
    CHECK_THROWS_AS(CdsSeries::from_csv(unsorted), ConfigError);
}

TEST_CASE("the shipped sample histories calibrate to eight, a medium coupling") {
    auto dir = test_support::configs_dir() / "data";
    std::ifstream cpty_file(dir / "cpty_cds.csv");
    std::ifstream sov_file(dir / "sov_cds.csv");
    REQUIRE(cpty_file.good());
    REQUIRE(sov_file.good());
    auto cpty = CdsSeries::from_csv(cpty_file);
    auto sov = CdsSeries::from_csv(sov_file);
    auto est = estimate_lambda(cpty, sov, 400.0, 300.0);
    CHECK(est.n_days == 250);
    CHECK(est.lambda == 8.0);
    CHECK(classify_wwr(est.lambda) == WwrRating::medium);
}

TEST_CASE("coupling buckets split at the geometric midpoints") {
    CHECK(classify_wwr(1.0) == WwrRating::low);
    CHECK(classify_wwr(10.0) == WwrRating::medium);
    CHECK(classify_wwr(100.0) == WwrRating::high);
    CHECK(classify_wwr(3.16) == WwrRating::low);
    CHECK(classify_wwr(3.17) == WwrRating::medium);
    CHECK(classify_wwr(31.62) == WwrRating::medium);
    CHECK(classify_wwr(31.63) == WwrRating::high);
    CHECK(classify_wwr(0.0) == WwrRating::low);
    CHECK_THROWS_AS(classify_wwr(-0.5), std::domain_error);

    for (auto rating : {WwrRating::low, WwrRating::medium, WwrRating::high})
        CHECK(classify_wwr(rating_to_lambda(rating)) == rating);

    CHECK(std::string(to_string(WwrRating::medium)) == "medium");
}
