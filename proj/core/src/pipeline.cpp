#include "tailrisk/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "tailrisk/errors.hpp"

namespace tailrisk {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kEngineVersion = "0.1.0";

struct LoadedInputs {
    MarketSnapshot snapshot;
    InstrumentPortfolio portfolio;
    std::vector<StressScenario> scenarios;
    SimConfig sim;
    double horizon = 0.0;
    ScenarioValidation lint;
    DefaultsLog defaults;
    std::vector<std::string> warnings;
};

LoadedInputs load_inputs(const RunConfig& cfg, bool throw_on_hard) {
    LoadedInputs in;
    in.snapshot = load_market(cfg.market_file, &in.defaults);
    in.portfolio = load_portfolio(cfg.portfolio_file, in.snapshot, &in.defaults);
    if (!cfg.scenarios_file.empty())
        in.scenarios = load_scenarios(cfg.scenarios_file, in.snapshot, &in.defaults);

    if (cfg.horizon) {
        in.horizon = *cfg.horizon;
    } else {
        in.horizon = in.portfolio.max_maturity();
        in.defaults.push_back("horizon defaulted to the longest maturity (" +
                              std::to_string(in.horizon) + ")");
    }

    in.sim.n_paths = cfg.n_paths;
    in.sim.seed = cfg.seed;
    in.sim.grid = TimeGrid::regular(cfg.grid_step, in.horizon);
    in.sim.rate_model = cfg.rate_model;
    in.sim.fx_model = cfg.fx_model;
    in.sim.n_threads = cfg.n_threads;
    in.sim.validate();

    if (cfg.n_paths < 1000)
        in.warnings.push_back("n_paths = " + std::to_string(cfg.n_paths) +
                              " is low; estimates will be noisy");

    for (StressScenario& sc : in.scenarios)
        if (sc.mode == ProbabilityMode::at_horizon && !(sc.horizon > 0.0)) {
            sc.horizon = in.sim.grid.times.back();
            in.defaults.push_back("scenario \"" + sc.id + "\": horizon defaulted to " +
                                  std::to_string(sc.horizon));
        }

    in.lint = validate_scenarios(in.scenarios, in.snapshot, in.sim.grid, cfg.soft_cap);
    for (const ScenarioViolation& v : in.lint.warnings)
        in.warnings.push_back(v.detail);
    if (!in.lint.ok && throw_on_hard)
        throw ValidationError("scenario validation failed: " + in.lint.hard.front().detail);
    return in;
}

std::string fnv1a_hex(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) return "unreadable";
    std::uint64_t hash = 1469598103934665603ULL;
    char buf[4096];
    while (file.read(buf, sizeof buf) || file.gcount() > 0) {
        for (std::streamsize i = 0; i < file.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ULL;
        }
        if (!file) break;
    }
    char out[19];
    std::snprintf(out, sizeof out, "0x%016llx", static_cast<unsigned long long>(hash));
    return out;
}

/// Removes everything this run wrote if it cannot finish cleanly.
struct OutputGuard {
    std::vector<std::string> written;
    bool commit = false;
    ~OutputGuard() {
        if (commit) return;
        for (const std::string& path : written) {
            std::error_code ec;
            fs::remove(path, ec);
        }
    }
};

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write \"" + path + "\"");
    return out;
}

json hedge_json(const HedgeReport& hedge) {
    json entries = json::array();
    for (const HedgeEntry& e : hedge.entries)
        entries.push_back({{"name", e.name},
                           {"lambda", e.coupling_lambda},
                           {"p_counterparty", e.p_counterparty},
                           {"exposure_gap", e.exposure_gap},
                           {"notional", e.notional}});
    return {{"total", hedge.total},
            {"aggregation",
             hedge.aggregation == GapAggregation::time_average ? "time_average" : "at_horizon"},
            {"horizon", hedge.horizon},
            {"entries", entries}};
}

void write_report_json(const std::string& path, const RunOutput& out) {
    json doc;
    doc["counterparty"] = out.counterparty;
    doc["reference_notional"] = out.reference_notional;
    doc["horizon"] = out.horizon;
    doc["cva_upfront"] = out.cva_base.upfront;
    doc["cva_running_bps"] = out.cva_base.running_bps;
    doc["cva_wwr_upfront"] = out.cva_wwr.upfront;
    doc["cva_wwr_running_bps"] = out.cva_wwr.running_bps;
    doc["cva_uplift_ratio"] = out.cva_base.running_bps != 0.0
                                  ? json(out.cva_wwr.running_bps / out.cva_base.running_bps)
                                  : json();
    if (out.has_fva) {
        doc["fva"] = out.fva_base.value;
        doc["fva_bps"] = out.fva_base.value_bps;
        doc["fva_running_bps"] = out.fva_base.running_bps;
        doc["fva_wwr"] = out.fva_wwr.value;
        doc["fva_wwr_bps"] = out.fva_wwr.value_bps;
        doc["fva_wwr_running_bps"] = out.fva_wwr.running_bps;
    } else {
        doc["fva"] = nullptr;
        doc["fva_bps"] = nullptr;
        doc["fva_running_bps"] = nullptr;
        doc["fva_wwr"] = nullptr;
        doc["fva_wwr_bps"] = nullptr;
        doc["fva_wwr_running_bps"] = nullptr;
    }
    doc["hedge_total"] = out.hedge.total;
    doc["hedge"] = hedge_json(out.hedge);
    json scenarios = json::array();
    for (const ScenarioSummary& s : out.scenarios)
        scenarios.push_back({{"id", s.id},
                             {"lambda", s.coupling_lambda},
                             {"p_at_horizon", s.p_at_horizon},
                             {"p_threshold_at_horizon", s.threshold_at_horizon},
                             {"interpolation_factor_at_horizon", s.interpolation_at_horizon},
                             {"cva_running_bps", s.cva.running_bps}});
    doc["scenarios"] = scenarios;
    doc["warnings"] = out.warnings;

    auto file = open_output(path);
    file << doc.dump(2) << "\n";
}

void write_profiles_csv(const std::string& path, const RunOutput& out) {
    auto file = open_output(path);
    file << "t,ee,epe,ene,epe_stderr";
    for (const ExposureProfile& s : out.stressed) {
        std::string id = s.scenario_id;
        if (id.rfind("stress:", 0) == 0) id = id.substr(7);
        file << ",epe_stress_" << id;
    }
    file << ",epe_wwr\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.12e%c", v, sep);
        file << buf;
    };
    for (std::size_t k = 0; k < out.base.times.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.6f,", out.base.times[k]);
        file << buf;
        put(out.base.ee[k], ',');
        put(out.base.epe[k], ',');
        put(out.base.ene[k], ',');
        put(out.base.epe_stderr[k], ',');
        for (const ExposureProfile& s : out.stressed) put(s.epe[k], ',');
        put(out.wwr.epe[k], '\n');
    }
}

void write_buckets_csv(const std::string& path, const RunOutput& out,
                       const MarketSnapshot& snapshot, const InstrumentPortfolio& portfolio) {
    const CreditCurve& cpty = snapshot.credit_curve(portfolio.counterparty);
    const DiscountCurve& discount = snapshot.discount_curve(portfolio.base_currency);
    auto file = open_output(path);
    file << "t,dt,discount,survival,marginal_pd,epe,epe_wwr,cva_contrib,cva_wwr_contrib";
    if (out.has_fva) file << ",ee,funding_spread,fva_contrib";
    file << "\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.12e%c", v, sep);
        file << buf;
    };
    double lgd = 1.0 - cpty.recovery();
    double prev_survival = 1.0;
    for (std::size_t k = 0; k < out.base.times.size(); ++k) {
        double t = out.base.times[k];
        double dt = t - (k == 0 ? 0.0 : out.base.times[k - 1]);
        double survival = cpty.survival(t);
        double marginal = prev_survival - survival;
        std::snprintf(buf, sizeof buf, "%.6f,", t);
        file << buf;
        put(dt, ',');
        put(discount.discount_factor(t), ',');
        put(survival, ',');
        put(marginal, ',');
        put(out.base.epe[k], ',');
        put(out.wwr.epe[k], ',');
        put(lgd * out.base.epe[k] * marginal, ',');
        if (out.has_fva) {
            put(lgd * out.wwr.epe[k] * marginal, ',');
            put(out.base.ee[k], ',');
            put(snapshot.funding().spread(t), ',');
            put(dt * (-snapshot.funding().spread(t)) * out.base.ee[k], '\n');
        } else {
            put(lgd * out.wwr.epe[k] * marginal, '\n');
        }
        prev_survival = survival;
    }
}

void write_run_meta(const std::string& path, const RunConfig& cfg, const LoadedInputs& in,
                    const RunOutput& out) {
    json doc;
    doc["engine_version"] = kEngineVersion;
    doc["seed"] = cfg.seed;
    doc["n_paths"] = cfg.n_paths;
    doc["n_threads"] = cfg.n_threads;
    doc["grid_step"] = cfg.grid_step;
    doc["horizon"] = in.horizon;
    doc["n_buckets"] = in.sim.grid.times.size();
    doc["rate_mean_reversion"] = cfg.rate_model.mean_reversion;
    doc["rate_vol"] = cfg.rate_model.normal_vol;
    doc["fx_vol"] = cfg.fx_model.lognormal_vol;
    doc["soft_cap"] = cfg.soft_cap;
    json inputs;
    inputs["market"] = {{"path", cfg.market_file}, {"fnv1a", fnv1a_hex(cfg.market_file)}};
    inputs["portfolio"] = {{"path", cfg.portfolio_file}, {"fnv1a", fnv1a_hex(cfg.portfolio_file)}};
    if (!cfg.scenarios_file.empty())
        inputs["scenarios"] = {{"path", cfg.scenarios_file},
                               {"fnv1a", fnv1a_hex(cfg.scenarios_file)}};
    doc["inputs"] = inputs;
    doc["defaults_applied"] = out.defaults_applied;
    doc["warnings"] = out.warnings;

    auto file = open_output(path);
    file << doc.dump(2) << "\n";
}

} // namespace

RunOutput run(const RunConfig& cfg) {
    LoadedInputs in = load_inputs(cfg, true);

    RunOutput out;
    out.counterparty = in.portfolio.counterparty;
    out.reference_notional = in.portfolio.reference_notional();
    out.horizon = in.horizon;
    out.warnings = in.warnings;

    out.base = exposure_profile(in.portfolio, in.snapshot, in.sim);

    std::vector<MarketSnapshot> shocked;
    shocked.reserve(in.scenarios.size());
    for (const StressScenario& sc : in.scenarios) {
        shocked.push_back(apply_shock(in.snapshot, sc.shock));
        ExposureProfile stressed = exposure_profile(in.portfolio, shocked.back(), in.sim);
        stressed.scenario_id = "stress:" + sc.id;
        out.stressed.push_back(std::move(stressed));
    }

    if (in.scenarios.empty()) {
        out.wwr = out.base;
        out.wwr.scenario_id = "wwr";
    } else {
        out.wwr = epe_wwr_multi(out.base, out.stressed, in.scenarios, in.snapshot);
    }

    const CreditCurve& cpty = in.snapshot.credit_curve(in.portfolio.counterparty);
    const DiscountCurve& discount = in.snapshot.discount_curve(in.portfolio.base_currency);
    out.cva_base = cva(out.base, cpty, discount);
    out.cva_wwr = cva(out.wwr, cpty, discount);

    out.has_fva = in.snapshot.funding_curve.has_value();
    if (out.has_fva) {
        out.fva_base = fva(out.base, in.snapshot.funding(), &discount);
        std::vector<FundingSpreadCurve> stressed_funding;
        for (std::size_t k = 0; k < in.scenarios.size(); ++k)
            stressed_funding.push_back(shocked[k].funding());
        out.fva_wwr = fva_wwr_multi(out.base, out.stressed, stressed_funding, in.scenarios,
                                    in.snapshot.funding(), in.snapshot, &discount);
    }

    std::vector<HedgeInput> hedge_inputs;
    for (std::size_t k = 0; k < in.scenarios.size(); ++k) {
        HedgeInput input{in.scenarios[k].id, in.scenarios[k].coupling_lambda, cpty, out.base,
                         interpolated_stressed_profile(out.base, out.stressed[k], in.scenarios[k],
                                                       in.snapshot)};
        hedge_inputs.push_back(std::move(input));
    }
    out.hedge =
        hedge_notional(hedge_inputs, in.sim.grid.times.back(), cfg.hedge_aggregation);

    for (std::size_t k = 0; k < in.scenarios.size(); ++k) {
        const StressScenario& sc = in.scenarios[k];
        ScenarioSummary summary;
        summary.id = sc.id;
        summary.coupling_lambda = sc.coupling_lambda;
        double t_last = in.sim.grid.times.back();
        summary.p_at_horizon = scenario_probability(sc, in.snapshot, t_last);
        summary.threshold_at_horizon = scenario_threshold(sc, in.snapshot, t_last);
        summary.interpolation_at_horizon =
            interpolation_factor(summary.p_at_horizon, summary.threshold_at_horizon);
        summary.cva = cva_wwr(out.base, out.stressed[k], sc, in.snapshot, cpty, discount);
        out.scenarios.push_back(std::move(summary));
    }

    out.defaults_applied = in.defaults;

    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory \"" + cfg.out_dir + "\"");

    OutputGuard guard;
    auto target = [&](const char* name) {
        std::string p = (dir / name).string();
        guard.written.push_back(p);
        return p;
    };
    if (cfg.format != RunConfig::Format::csv) write_report_json(target("report.json"), out);
    if (cfg.format != RunConfig::Format::json) {
        write_profiles_csv(target("epe_profiles.csv"), out);
        write_buckets_csv(target("xva_buckets.csv"), out, in.snapshot, in.portfolio);
    }
    write_run_meta(target("run_meta.json"), cfg, in, out);
    guard.commit = true;
    out.files_written = guard.written;
    return out;
}

ValidateOutput validate_run(const RunConfig& cfg) {
    LoadedInputs in = load_inputs(cfg, false);
    ValidateOutput out;
    out.scenario_lint = in.lint;
    out.warnings = in.warnings;
    out.defaults_applied = in.defaults;
    return out;
}

} // namespace tailrisk
