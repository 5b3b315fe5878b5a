// End-to-end acceptance checks against the shipped configuration bundles.
// Each check prints one PASS/FAIL line; the process exits non-zero when any
// check fails. Usage: tailrisk_acceptance <configs_dir> <work_dir>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tailrisk/calibration.hpp"
#include "tailrisk/pipeline.hpp"
#include "tailrisk/wwr_overlay.hpp"
#include "tailrisk/xva.hpp"

using namespace tailrisk;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, bool pass, const std::string& name, const std::string& detail) {
    std::printf("[%s] %2d. %s: %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buffer[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof buffer, format, args);
    va_end(args);
    return buffer;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

RunConfig load_bundle(const fs::path& configs, const char* bundle, const fs::path& out_dir) {
    auto cfg = RunConfig::from_file((configs / bundle).string());
    cfg.out_dir = out_dir.string();
    return cfg;
}

struct BundleRun {
    RunOutput out;
    double seconds = 0.0;
};

BundleRun run_bundle(const RunConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    BundleRun result{run(cfg), 0.0};
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

// 1. Payer book: tail overlay lifts the running CVA by the expected ratio
//    at production path counts inside the runtime budget.
void check_payer(const BundleRun& payer) {
    double base = payer.out.cva_base.running_bps;
    double ratio = payer.out.cva_wwr.running_bps / base;
    bool base_ok = base >= 4.0 && base <= 14.0;
    bool ratio_ok = ratio >= 1.63 * 0.75 && ratio <= 1.63 * 1.25;
    bool time_ok = payer.seconds < 60.0;
    report(1, base_ok && ratio_ok && time_ok, "payer tail uplift",
           fmt("base %.2f bp in [4, 14] %s; uplift %.4f in [%.4f, %.4f] %s; %.1f s < 60 s %s",
               base, base_ok ? "ok" : "BAD", ratio, 1.63 * 0.75, 1.63 * 1.25,
               ratio_ok ? "ok" : "BAD", payer.seconds, time_ok ? "ok" : "BAD"));
}

// 2. Receiver mirror: the same tail event reduces the charge, never raises it.
void check_receiver(const BundleRun& receiver) {
    double ratio = receiver.out.cva_wwr.running_bps / receiver.out.cva_base.running_bps;
    bool direction_ok = ratio < 1.0;
    bool ratio_ok = ratio >= 0.857 * 0.85 && ratio <= 0.857 * 1.15;
    report(2, direction_ok && ratio_ok, "receiver tail relief",
           fmt("ratio %.4f strictly below 1 %s and in [%.4f, %.4f] %s", ratio,
               direction_ok ? "ok" : "BAD", 0.857 * 0.85, 0.857 * 1.15,
               ratio_ok ? "ok" : "BAD"));
}

// 3. Cross-currency book with a devaluation tail event.
void check_ccs(const BundleRun& ccs) {
    double ratio = ccs.out.cva_wwr.running_bps / ccs.out.cva_base.running_bps;
    bool ok = ratio >= 1.061 - 0.05 && ratio <= 1.061 + 0.05;
    report(3, ok, "cross-currency devaluation uplift",
           fmt("ratio %.4f in [%.4f, %.4f]", ratio, 1.061 - 0.05, 1.061 + 0.05));
}

// 4. Funding adjustment under a funding squeeze tail event.
void check_fva(const BundleRun& fva_run) {
    double base = fva_run.out.fva_base.value_bps;
    double wwr = fva_run.out.fva_wwr.value_bps;
    double ratio = wwr / base;
    bool sign_ok = base < 0.0 && wwr < 0.0;
    bool ratio_ok = ratio >= 1.161 - 0.10 && ratio <= 1.161 + 0.10;
    report(4, sign_ok && ratio_ok, "funding squeeze uplift",
           fmt("base %.1f bp, adjusted %.1f bp, both negative %s; ratio %.4f in [%.3f, %.3f] %s",
               base, wwr, sign_ok ? "ok" : "BAD", ratio, 1.161 - 0.10, 1.161 + 0.10,
               ratio_ok ? "ok" : "BAD"));
}

// 5. The correction form and the probability-mix form of the overlay are the
//    same function, to floating-point accuracy, across the parameter box.
void check_composition() {
    std::uint64_t state = 12345;
    auto uniform = [&state]() {
        state = (state * 48271u) % 2147483647u;
        return static_cast<double>(state) / 2147483647.0;
    };
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        double epe = 10.0 * uniform();
        double abs_stress = 10.0 * uniform();
        double lambda = 100.0 * uniform();
        double p = uniform();
        if (lambda * p > 1.0) lambda = 1.0 / (2.0 * p);
        double p_th = 0.01 + 0.99 * uniform();

        double corrected = epe + lambda * p * (abs_stress - epe) * interpolation_factor(p, p_th);
        double mixed = lambda * p * stressed_epe_interp(epe, abs_stress, p, p_th) +
                       (1.0 - lambda * p) * epe;
        double scale = std::max({1.0, std::fabs(corrected), std::fabs(mixed)});
        worst = std::max(worst, std::fabs(corrected - mixed) / scale);
    }
    report(5, worst <= 1e-12, "overlay composition identity",
           fmt("worst relative gap %.3e over 10000 draws, budget 1e-12", worst));
}

// 6. Switched-off overlays are bit-exact no-ops: zero coupling, zero tail
//    probability, or a stress identical to the base.
void check_identity_limits(const MarketSnapshot& snap, const ExposureProfile& base,
                           const ExposureProfile& stressed) {
    StressScenario tail;
    tail.id = "tail";
    tail.probability_source = ProbabilitySource::cds("SOV");
    tail.threshold.spread_bps = 1000.0;

    StressScenario off = tail;
    off.coupling_lambda = 0.0;
    bool lambda_off = epe_wwr_single(base, stressed, off, snap).epe == base.epe;

    StressScenario never = tail;
    never.probability_source = ProbabilitySource::fixed_constant(0.0);
    never.threshold.probability = 0.25;
    bool p_zero = epe_wwr_single(base, stressed, never, snap).epe == base.epe;

    const auto& counterparty = snap.credit_curve("CPTY");
    const auto& discount = snap.discount_curve("USD");
    bool cva_fixed = cva_wwr(base, base, tail, snap, counterparty, discount).upfront ==
                     cva(base, counterparty, discount).upfront;

    auto funding = FundingSpreadCurve::flat(0.01);
    bool fva_fixed = fva_wwr(base, base, funding, funding, tail, snap).value ==
                     fva(base, funding).value;

    report(6, lambda_off && p_zero && cva_fixed && fva_fixed, "identity limits are exact",
           fmt("lambda=0 %s, P=0 %s, unstressed CVA %s, unstressed FVA %s",
               lambda_off ? "ok" : "BAD", p_zero ? "ok" : "BAD", cva_fixed ? "ok" : "BAD",
               fva_fixed ? "ok" : "BAD"));
}

// 7. Exposure parity on every bucket of every shipped bundle, and the MC
//    error halves when the path count quadruples.
void check_parity_and_convergence(const std::vector<const RunOutput*>& runs,
                                  const MarketSnapshot& snap,
                                  const InstrumentPortfolio& book) {
    bool parity_ok = true;
    double worst = 0.0;
    int buckets = 0;
    for (const RunOutput* out : runs) {
        std::vector<const ExposureProfile*> profiles{&out->base, &out->wwr};
        for (const auto& s : out->stressed) profiles.push_back(&s);
        for (const ExposureProfile* profile : profiles) {
            for (std::size_t k = 0; k < profile->times.size(); ++k) {
                double gap = std::fabs(profile->epe[k] - profile->ene[k] - profile->ee[k]);
                double budget = 3.0 * 2.0 * profile->epe_stderr[k] + 1e-15;
                worst = std::max(worst, gap);
                if (gap > budget) parity_ok = false;
                ++buckets;
            }
        }
    }

    SimConfig coarse;
    coarse.n_paths = 5000;
    coarse.grid = TimeGrid::quarterly(10.0);
    coarse.rate_model.normal_vol = 0.004;
    SimConfig fine = coarse;
    fine.n_paths = 20000;
    auto at_n = exposure_profile(book, snap, coarse);
    auto at_4n = exposure_profile(book, snap, fine);
    double ratio_sum = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < at_n.times.size(); ++k) {
        if (at_n.epe_stderr[k] <= 0.0) continue;
        ratio_sum += at_4n.epe_stderr[k] / at_n.epe_stderr[k];
        ++n;
    }
    double avg = ratio_sum / n;
    bool halving_ok = avg >= 0.5 * 0.85 && avg <= 0.5 * 1.15;

    report(7, parity_ok && halving_ok, "parity and error scaling",
           fmt("worst parity gap %.2e over %d buckets %s; stderr ratio at 4x paths %.3f in "
               "[0.425, 0.575] %s",
               worst, buckets, parity_ok ? "ok" : "BAD", avg, halving_ok ? "ok" : "BAD"));
}

// 8. The bucket-sum credit charge against two independent yardsticks: the
//    closed form for constant exposure and a weekly regridding.
void check_cva_oracles() {
    auto times_q = TimeGrid::quarterly(10.0).times;
    CreditCurve counterparty(0.05, 0.40);
    auto discount = DiscountCurve::flat(0.02);

    ExposureProfile flat;
    flat.times = std::vector<double>(times_q.begin(), times_q.begin() + 20);
    flat.epe.assign(20, 0.05);
    flat.ee = flat.epe;
    flat.ene.assign(20, 0.0);
    flat.epe_stderr.assign(20, 0.0);
    double analytic = 0.6 * 0.05 * (1.0 - std::exp(-0.05 * 5.0));
    double got = cva(flat, counterparty, discount).upfront;
    double analytic_gap = std::fabs(got - analytic) / analytic;

    auto gentle = [](double t) { return 0.02 * (1.0 + 0.5 * std::sin(t / 3.0)); };
    auto fill = [&](const std::vector<double>& times) {
        ExposureProfile p;
        p.times = times;
        for (double t : times) p.epe.push_back(gentle(t));
        p.ee = p.epe;
        p.ene.assign(times.size(), 0.0);
        p.epe_stderr.assign(times.size(), 0.0);
        return p;
    };
    double quarterly = cva(fill(times_q), counterparty, discount).upfront;
    double weekly =
        cva(fill(TimeGrid::regular(1.0 / 52.0, 10.0).times), counterparty, discount).upfront;
    double grid_gap = std::fabs(quarterly - weekly) / weekly;

    report(8, analytic_gap <= 0.001 && grid_gap <= 0.01, "credit charge oracles",
           fmt("constant-exposure gap %.2e <= 1e-3; quarterly vs weekly gap %.4f <= 0.01",
               analytic_gap, grid_gap));
}

// 9. Coupling calibration: the counting oracle is exact, and independent
//    series land inside the 95 percent band around 1.
void check_lambda_oracle() {
    auto make_dates = [](std::size_t count) {
        std::vector<std::string> dates;
        dates.reserve(count);
        int y = 2020, m = 1, d = 1;
        static const int month_len[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        char buf[40];
        for (std::size_t i = 0; i < count; ++i) {
            std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
            dates.emplace_back(buf);
            if (++d > month_len[m - 1]) {
                d = 1;
                if (++m > 12) { m = 1; ++y; }
            }
        }
        return dates;
    };

    CdsSeries cpty, sov;
    cpty.dates = make_dates(100);
    sov.dates = cpty.dates;
    cpty.spreads_bps.assign(100, 250.0);
    sov.spreads_bps.assign(100, 180.0);
    for (int k = 0; k < 10; ++k) sov.spreads_bps[5 + 10 * k] = 380.0;   // 10 sovereign days
    for (int k = 0; k < 8; ++k) cpty.spreads_bps[5 + 10 * k] = 450.0;   // 8 joint days
    cpty.spreads_bps[96] = 450.0;
    cpty.spreads_bps[97] = 450.0;                                       // 10 counterparty days
    auto est = estimate_lambda(cpty, sov, 400.0, 300.0);
    bool exact = est.lambda == 8.0 && est.n_joint_exceed == 8;

    CdsSeries icpty, isov;
    icpty.dates = make_dates(10000);
    isov.dates = icpty.dates;
    std::mt19937_64 eng(9001);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        icpty.spreads_bps.push_back(u(eng) < 0.1 ? 450.0 : 250.0);
        isov.spreads_bps.push_back(u(eng) < 0.1 ? 380.0 : 180.0);
    }
    auto ind = estimate_lambda(icpty, isov, 400.0, 300.0);
    auto j = static_cast<double>(ind.n_joint_exceed);
    auto s = static_cast<double>(ind.n_sov_exceed);
    auto c = static_cast<double>(ind.n_cpty_exceed);
    auto n = static_cast<double>(ind.n_days);
    double se_log = std::sqrt(1.0 / j - 1.0 / s + 1.0 / c - 1.0 / n);
    bool independent_ok = std::fabs(std::log(ind.lambda)) <= 1.96 * se_log;

    report(9, exact && independent_ok, "coupling calibration oracle",
           fmt("counting oracle lambda %.1f == 8.0 %s; independent series lambda %.3f, |log| "
               "%.3f <= %.3f %s",
               est.lambda, exact ? "ok" : "BAD", ind.lambda, std::fabs(std::log(ind.lambda)),
               1.96 * se_log, independent_ok ? "ok" : "BAD"));
}

// 10. Bitwise determinism across worker counts at a fixed seed.
void check_determinism(const fs::path& configs, const fs::path& work) {
    auto cfg_serial = load_bundle(configs, "paper_irs_10y.cfg", work / "det_serial");
    cfg_serial.n_paths = 10000;
    cfg_serial.n_threads = 1;
    auto cfg_parallel = load_bundle(configs, "paper_irs_10y.cfg", work / "det_parallel");
    cfg_parallel.n_paths = 10000;
    cfg_parallel.n_threads = 4;

    run(cfg_serial);
    run(cfg_parallel);
    bool profiles_equal = slurp(work / "det_serial" / "epe_profiles.csv") ==
                          slurp(work / "det_parallel" / "epe_profiles.csv");
    bool reports_equal =
        slurp(work / "det_serial" / "report.json") == slurp(work / "det_parallel" / "report.json");
    report(10, profiles_equal && reports_equal, "worker-count determinism",
           fmt("profile csv bytes %s, report bytes %s across 1 vs 4 workers",
               profiles_equal ? "identical" : "DIFFER", reports_equal ? "identical" : "DIFFER"));
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: tailrisk_acceptance <configs_dir> <work_dir>\n");
        return 2;
    }
    fs::path configs = argv[1];
    fs::path work = argv[2];
    std::error_code ec;
    fs::remove_all(work, ec);
    fs::create_directories(work);

    try {
        auto payer = run_bundle(load_bundle(configs, "paper_irs_10y.cfg", work / "payer"));
        auto receiver =
            run_bundle(load_bundle(configs, "paper_irs_10y_receiver.cfg", work / "receiver"));
        auto ccs = run_bundle(load_bundle(configs, "paper_ccs_5y.cfg", work / "ccs"));
        auto fva_run = run_bundle(load_bundle(configs, "paper_fva_10y.cfg", work / "fva"));

        check_payer(payer);
        check_receiver(receiver);
        check_ccs(ccs);
        check_fva(fva_run);
        check_composition();

        auto market = load_market((configs / "market_stylized.json").string());
        auto book =
            load_portfolio((configs / "portfolio_irs_10y_payer.json").string(), market);
        SimConfig quick;
        quick.n_paths = 800;
        quick.grid = TimeGrid::quarterly(10.0);
        quick.rate_model.normal_vol = 0.004;
        auto base = exposure_profile(book, market, quick);
        MarketShock rates_up;
        rates_up.rate_shift_all = 0.05;
        auto stressed = stressed_exposure_profile(book, market, rates_up, quick);
        check_identity_limits(market, base, stressed);

        check_parity_and_convergence(
            {&payer.out, &receiver.out, &ccs.out, &fva_run.out}, market, book);
        check_cva_oracles();
        check_lambda_oracle();
        check_determinism(configs, work);
    } catch (const std::exception& e) {
        std::printf("[FAIL] harness error: %s\n", e.what());
        return 1;
    }

    std::printf("%d/10 criteria passed\n", 10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
