// Hot-path benchmarks: state simulation, exposure aggregation, the tail
// overlay and the bucket-sum pricing of the adjustments.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "tailrisk/exposure.hpp"
#include "tailrisk/instruments.hpp"
#include "tailrisk/market_data.hpp"
#include "tailrisk/wwr_overlay.hpp"
#include "tailrisk/xva.hpp"

namespace {

using namespace tailrisk;

MarketSnapshot make_snapshot() {
    MarketSnapshot snap;
    snap.discount_curves.emplace(
        "USD", DiscountCurve({0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0},
                             {0.005, 0.0075, 0.011, 0.014, 0.019, 0.022, 0.025}));
    snap.discount_curves.emplace("BRL", DiscountCurve::flat(0.08));
    snap.credit_curves.emplace("CPTY", bootstrap_flat_cds(0.03, 0.40));
    snap.credit_curves.emplace("SOV", bootstrap_flat_cds(0.02, 0.40));
    snap.fx_spots.emplace("BRLUSD", FxSpot("BRLUSD", 0.5));
    snap.funding_curve = FundingSpreadCurve::flat(0.01);
    return snap;
}

InstrumentPortfolio make_book(const MarketSnapshot& snap) {
    InterestRateSwap swap;
    swap.notional = 100.0;
    swap.direction = InterestRateSwap::Direction::payer;
    swap.maturity = 10.0;
    swap.payments_per_year = 4;
    swap.currency = "USD";
    swap.fixed_rate = par_rate(swap, snap);

    InstrumentPortfolio book;
    book.trades.emplace_back(swap);
    book.base_currency = "USD";
    book.counterparty = "CPTY";
    return book;
}

SimConfig make_sim(std::size_t n_paths) {
    SimConfig cfg;
    cfg.n_paths = n_paths;
    cfg.grid = TimeGrid::quarterly(10.0);
    cfg.rate_model.normal_vol = 0.004;
    return cfg;
}

void bm_simulate_states(benchmark::State& state) {
    auto snap = make_snapshot();
    auto cfg = make_sim(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto cube = simulate_states(snap, cfg);
        benchmark::DoNotOptimize(cube.rate_data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) *
                            static_cast<std::int64_t>(cfg.grid.times.size()));
}

void bm_exposure_profile(benchmark::State& state) {
    auto snap = make_snapshot();
    auto book = make_book(snap);
    auto cfg = make_sim(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto profile = exposure_profile(book, snap, cfg);
        benchmark::DoNotOptimize(profile.epe.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_portfolio_pricing(benchmark::State& state) {
    auto snap = make_snapshot();
    auto book = make_book(snap);
    std::vector<std::string> pairs;
    MarketState at;
    at.market = &snap;
    at.t = 2.5;
    at.rate_shift = 0.001;
    at.fx_pairs = &pairs;
    for (auto _ : state) {
        benchmark::DoNotOptimize(price_portfolio(book, at));
    }
}

void bm_tail_overlay(benchmark::State& state) {
    auto snap = make_snapshot();
    auto book = make_book(snap);
    auto cfg = make_sim(4000);
    auto base = exposure_profile(book, snap, cfg);
    MarketShock shock;
    shock.rate_shift_all = 0.05;
    auto stressed = stressed_exposure_profile(book, snap, shock, cfg);

    StressScenario scenario;
    scenario.id = "tail";
    scenario.probability_source = ProbabilitySource::cds("SOV");
    scenario.coupling_lambda = 1.0;
    scenario.threshold.spread_bps = 1000.0;

    for (auto _ : state) {
        auto adjusted = epe_wwr_single(base, stressed, scenario, snap);
        benchmark::DoNotOptimize(adjusted.epe.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(base.times.size()));
}

void bm_cva(benchmark::State& state) {
    auto snap = make_snapshot();
    auto book = make_book(snap);
    auto profile = exposure_profile(book, snap, make_sim(4000));
    const auto& counterparty = snap.credit_curve("CPTY");
    const auto& discount = snap.discount_curve("USD");
    for (auto _ : state) {
        benchmark::DoNotOptimize(cva(profile, counterparty, discount).upfront);
    }
}

BENCHMARK(bm_simulate_states)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_exposure_profile)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_portfolio_pricing);
BENCHMARK(bm_tail_overlay);
BENCHMARK(bm_cva);

} // namespace

BENCHMARK_MAIN();
