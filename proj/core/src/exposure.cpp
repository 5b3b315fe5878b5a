#include "tailrisk/exposure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "tailrisk/errors.hpp"

namespace tailrisk {

namespace {

/// splitmix64 finaliser over (seed, stream); decorrelates per-path streams
/// seeded from consecutive indices.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// One standard normal per call (Box-Muller, cosine branch); draw order is
/// part of the determinism contract.
double draw_normal(std::mt19937_64& eng) {
    double u1 = static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53; // (0, 1]
    double u2 = static_cast<double>(eng() >> 11) * 0x1.0p-53;      // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void parallel_over_paths(std::size_t n_paths, unsigned n_threads,
                         const std::function<void(std::size_t, std::size_t)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    unsigned workers = n_threads != 0 ? n_threads : (hw != 0 ? hw : 1);
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_paths));
    if (workers <= 1) {
        body(0, n_paths);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n_paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = static_cast<std::size_t>(w) * chunk;
        std::size_t hi = std::min(lo + chunk, n_paths);
        if (lo >= hi) break;
        pool.emplace_back(body, lo, hi);
    }
    for (auto& th : pool) th.join();
}

} // namespace

TimeGrid TimeGrid::regular(double step, double horizon) {
    if (!(step > 0.0) || !(horizon > 0.0))
        throw std::invalid_argument("TimeGrid::regular: step and horizon must be positive");
    TimeGrid grid;
    auto n = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
    grid.times.reserve(n);
    for (std::size_t i = 1; i <= n; ++i)
        grid.times.push_back(std::min(static_cast<double>(i) * step, horizon));
    grid.validate();
    return grid;
}

void TimeGrid::validate() const {
    if (times.empty())
        throw std::invalid_argument("TimeGrid: empty");
    if (!(times.front() > 0.0))
        throw std::invalid_argument("TimeGrid: first bucket time must be positive");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("TimeGrid: times must be strictly increasing");
}

void SimConfig::validate() const {
    grid.validate();
    if (n_paths == 0)
        throw std::invalid_argument("SimConfig: n_paths must be at least 1");
    if (!(rate_model.mean_reversion >= 0.0) || !(rate_model.normal_vol >= 0.0))
        throw std::invalid_argument("SimConfig: rate model parameters must be non-negative");
    if (!(fx_model.lognormal_vol >= 0.0))
        throw std::invalid_argument("SimConfig: FX vol must be non-negative");
}

StateCube::StateCube(std::size_t n_paths, std::vector<double> times,
                     std::vector<std::string> pairs)
    : n_paths_(n_paths), times_(std::move(times)), pairs_(std::move(pairs)),
      rate_(n_paths_ * times_.size(), 0.0),
      fx_(n_paths_ * times_.size() * pairs_.size(), 0.0) {}

StateCube simulate_states(const MarketSnapshot& snapshot, const SimConfig& config) {
    config.validate();

    std::vector<std::string> pairs;
    pairs.reserve(snapshot.fx_spots.size());
    for (const auto& [pair, _] : snapshot.fx_spots) pairs.push_back(pair);
    // std::map iteration is already sorted; the draw order below relies on it.

    const std::vector<double>& times = config.grid.times;
    const std::size_t n_buckets = times.size();
    const std::size_t n_pairs = pairs.size();

    // Curve-implied forwards per (bucket, pair); path-independent.
    std::vector<double> forwards(n_buckets * n_pairs);
    for (std::size_t j = 0; j < n_pairs; ++j) {
        const FxSpot& spot = snapshot.fx_spot(pairs[j]);
        const DiscountCurve& internal = snapshot.discount_curve(spot.internal_currency());
        const DiscountCurve& external = snapshot.discount_curve(spot.external_currency());
        for (std::size_t k = 0; k < n_buckets; ++k)
            forwards[k * n_pairs + j] =
                spot.rate() * internal.discount_factor(times[k]) / external.discount_factor(times[k]);
    }

    const double a = config.rate_model.mean_reversion;
    const double sig_r = config.rate_model.normal_vol;
    const double sig_f = config.fx_model.lognormal_vol;

    // Per-step transition coefficients; path-independent.
    std::vector<double> decay(n_buckets), rate_std(n_buckets), fx_drift(n_buckets), fx_std(n_buckets);
    for (std::size_t k = 0; k < n_buckets; ++k) {
        double dt = times[k] - (k == 0 ? 0.0 : times[k - 1]);
        decay[k] = std::exp(-a * dt);
        double var_scale = a > 1e-14 ? -std::expm1(-2.0 * a * dt) / (2.0 * a) : dt;
        rate_std[k] = sig_r * std::sqrt(var_scale);
        fx_drift[k] = -0.5 * sig_f * sig_f * dt;
        fx_std[k] = sig_f * std::sqrt(dt);
    }

    StateCube cube(config.n_paths, times, pairs);
    double* rate = cube.rate_data();
    double* fx = cube.fx_data();

    parallel_over_paths(config.n_paths, config.n_threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> log_m(n_pairs);
        for (std::size_t p = lo; p < hi; ++p) {
            std::mt19937_64 eng(mix_seed(config.seed, p));
            double x = 0.0;
            std::fill(log_m.begin(), log_m.end(), 0.0);
            for (std::size_t k = 0; k < n_buckets; ++k) {
                x = x * decay[k] + rate_std[k] * draw_normal(eng);
                rate[p * n_buckets + k] = x;
                for (std::size_t j = 0; j < n_pairs; ++j) {
                    log_m[j] += fx_drift[k] + fx_std[k] * draw_normal(eng);
                    fx[(p * n_buckets + k) * n_pairs + j] =
                        forwards[k * n_pairs + j] * std::exp(log_m[j]);
                }
            }
        }
    });
    return cube;
}

void ExposureProfile::validate() const {
    std::size_t n = times.size();
    if (n == 0)
        throw ShapeError("ExposureProfile: empty");
    if (ee.size() != n || epe.size() != n || ene.size() != n || epe_stderr.size() != n)
        throw ShapeError("ExposureProfile: column lengths differ");
}

ExposureProfile exposure_profile(const InstrumentPortfolio& portfolio,
                                 const MarketSnapshot& snapshot, const SimConfig& config) {
    portfolio.validate();
    if (portfolio.trades.empty())
        throw ValidationError("exposure_profile: portfolio has no trades");
    config.validate();

    const double ref_notional = portfolio.reference_notional();
    if (!(ref_notional > 0.0))
        throw ValidationError("exposure_profile: reference notional must be positive");

    StateCube cube = simulate_states(snapshot, config);

    const std::vector<double>& times = config.grid.times;
    const std::size_t n_buckets = times.size();
    const std::size_t n_paths = config.n_paths;

    const DiscountCurve& numeraire = snapshot.discount_curve(portfolio.base_currency);
    std::vector<double> df(n_buckets);
    for (std::size_t k = 0; k < n_buckets; ++k)
        df[k] = numeraire.discount_factor(times[k]);

    // Per-path discounted values and positive parts; reduced in path order
    // afterwards so the result is independent of the thread count.
    std::vector<double> val(n_paths * n_buckets);
    std::vector<double> pos(n_paths * n_buckets);

    parallel_over_paths(n_paths, config.n_threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            for (std::size_t k = 0; k < n_buckets; ++k) {
                MarketState state;
                state.market = &snapshot;
                state.t = times[k];
                state.rate_shift = cube.rate_shift(p, k);
                state.fx_pairs = &cube.pairs();
                state.fx_levels = cube.fx_levels(p, k);
                double scale = df[k] / ref_notional;
                double v = 0.0, vpos = 0.0;
                if (portfolio.netting) {
                    v = price_portfolio(portfolio, state) * scale;
                    vpos = std::max(v, 0.0);
                } else {
                    for (const Trade& trade : portfolio.trades) {
                        double tv = price_trade(trade, state, portfolio.base_currency) * scale;
                        v += tv;
                        vpos += std::max(tv, 0.0);
                    }
                }
                val[p * n_buckets + k] = v;
                pos[p * n_buckets + k] = vpos;
            }
        }
    });

    ExposureProfile profile;
    profile.times = times;
    profile.ee.assign(n_buckets, 0.0);
    profile.epe.assign(n_buckets, 0.0);
    profile.ene.assign(n_buckets, 0.0);
    profile.epe_stderr.assign(n_buckets, 0.0);

    for (std::size_t k = 0; k < n_buckets; ++k) {
        double sum_v = 0.0, sum_p = 0.0, sum_p2 = 0.0;
        for (std::size_t p = 0; p < n_paths; ++p) {
            double v = val[p * n_buckets + k];
            double q = pos[p * n_buckets + k];
            sum_v += v;
            sum_p += q;
            sum_p2 += q * q;
        }
        double n = static_cast<double>(n_paths);
        profile.ee[k] = sum_v / n;
        profile.epe[k] = sum_p / n;
        profile.ene[k] = profile.epe[k] - profile.ee[k];
        if (n_paths > 1) {
            double var = std::max(0.0, (sum_p2 - sum_p * sum_p / n) / (n - 1.0));
            profile.epe_stderr[k] = std::sqrt(var / n);
        }
    }
    return profile;
}

ExposureProfile stressed_exposure_profile(const InstrumentPortfolio& portfolio,
                                          const MarketSnapshot& snapshot,
                                          const MarketShock& shock, const SimConfig& config) {
    MarketSnapshot shocked = apply_shock(snapshot, shock);
    return exposure_profile(portfolio, shocked, config);
}

void write_profile_csv(std::ostream& out, const ExposureProfile& profile) {
    profile.validate();
    out << "t,ee,epe,ene,epe_stderr\n";
    char line[256];
    for (std::size_t k = 0; k < profile.times.size(); ++k) {
        std::snprintf(line, sizeof line, "%.6f,%.12e,%.12e,%.12e,%.12e\n", profile.times[k],
                      profile.ee[k], profile.epe[k], profile.ene[k], profile.epe_stderr[k]);
        out << line;
    }
}

} // namespace tailrisk
