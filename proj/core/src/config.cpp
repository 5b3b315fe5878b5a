#include "tailrisk/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "tailrisk/errors.hpp"

namespace tailrisk {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open \"" + path + "\"");
    try {
        return json::parse(in, nullptr, true, true); // allow comments
    } catch (const json::parse_error& e) {
        throw ConfigError("\"" + path + "\": " + e.what());
    }
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("\"" + path + "\": " + what);
}

double need_number(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) fail(path, std::string("missing key \"") + key + "\"");
    if (!obj[key].is_number()) fail(path, std::string("\"") + key + "\" must be a number");
    return obj[key].get<double>();
}

std::string need_string(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) fail(path, std::string("missing key \"") + key + "\"");
    if (!obj[key].is_string()) fail(path, std::string("\"") + key + "\" must be a string");
    return obj[key].get<std::string>();
}

std::vector<double> need_number_array(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key) || !obj[key].is_array())
        fail(path, std::string("\"") + key + "\" must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) fail(path, std::string("\"") + key + "\" must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& path, const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!known.count(key))
            fail(path, "unknown key \"" + key + "\" in " + where);
}

void note(DefaultsLog* defaults, const std::string& text) {
    if (defaults) defaults->push_back(text);
}

DiscountCurve parse_discount_curve(const json& spec, const std::string& path,
                                   const std::string& ccy) {
    reject_unknown_keys(spec, {"flat_rate", "pillar_times", "zero_rates"}, path,
                        "discount curve \"" + ccy + "\"");
    if (spec.contains("flat_rate"))
        return DiscountCurve::flat(need_number(spec, "flat_rate", path));
    return DiscountCurve(need_number_array(spec, "pillar_times", path),
                         need_number_array(spec, "zero_rates", path));
}

CreditCurve parse_credit_curve(const json& spec, const std::string& path,
                               const std::string& entity, DefaultsLog* defaults) {
    reject_unknown_keys(spec, {"spread_bps", "hazard_rate", "recovery"}, path,
                        "credit curve \"" + entity + "\"");
    double recovery = 0.40;
    if (spec.contains("recovery"))
        recovery = need_number(spec, "recovery", path);
    else
        note(defaults, "credit_curves." + entity + ".recovery defaulted to 0.40");
    if (spec.contains("hazard_rate"))
        return CreditCurve(need_number(spec, "hazard_rate", path), recovery);
    return bootstrap_flat_cds(need_number(spec, "spread_bps", path) / 1e4, recovery);
}

FundingSpreadCurve parse_funding_curve(const json& spec, const std::string& path) {
    reject_unknown_keys(spec, {"flat_spread_bps", "pillar_times", "spreads_bps"}, path,
                        "funding curve");
    if (spec.contains("flat_spread_bps"))
        return FundingSpreadCurve::flat(need_number(spec, "flat_spread_bps", path) / 1e4);
    std::vector<double> spreads = need_number_array(spec, "spreads_bps", path);
    for (double& s : spreads) s /= 1e4;
    return FundingSpreadCurve(need_number_array(spec, "pillar_times", path), std::move(spreads));
}

MarketShock parse_shock(const json& spec, const std::string& path, const std::string& where) {
    reject_unknown_keys(spec,
                        {"parallel_rate_shift", "fx_devaluation", "funding_spread_shift_bps"},
                        path, where);
    MarketShock shock;
    if (spec.contains("parallel_rate_shift")) {
        const json& shift = spec["parallel_rate_shift"];
        if (shift.is_number()) {
            shock.rate_shift_all = shift.get<double>();
        } else if (shift.is_object()) {
            for (const auto& [ccy, v] : shift.items()) {
                if (!v.is_number()) fail(path, "rate shift for \"" + ccy + "\" must be a number");
                shock.rate_shift_by_currency[ccy] = v.get<double>();
            }
        } else {
            fail(path, "\"parallel_rate_shift\" must be a number or {currency: shift}");
        }
    }
    if (spec.contains("fx_devaluation")) {
        if (!spec["fx_devaluation"].is_object())
            fail(path, "\"fx_devaluation\" must be {pair: fraction}");
        for (const auto& [pair, v] : spec["fx_devaluation"].items()) {
            if (!v.is_number()) fail(path, "devaluation for \"" + pair + "\" must be a number");
            shock.fx_devaluation[pair] = v.get<double>();
        }
    }
    if (spec.contains("funding_spread_shift_bps"))
        shock.funding_spread_shift = need_number(spec, "funding_spread_shift_bps", path) / 1e4;
    return shock;
}

Trade parse_trade(const json& spec, const std::string& path, std::size_t index,
                  const MarketSnapshot& snapshot, const std::string& base_currency,
                  DefaultsLog* defaults) {
    std::string label = "trades[" + std::to_string(index) + "]";
    std::string type = need_string(spec, "type", path);
    if (type == "irs") {
        reject_unknown_keys(spec,
                            {"type", "notional", "direction", "fixed_rate", "par_offset",
                             "maturity", "payments_per_year", "currency"},
                            path, label);
        InterestRateSwap swap;
        swap.notional = need_number(spec, "notional", path);
        swap.maturity = need_number(spec, "maturity", path);
        std::string direction = need_string(spec, "direction", path);
        if (direction == "payer")
            swap.direction = InterestRateSwap::Direction::payer;
        else if (direction == "receiver")
            swap.direction = InterestRateSwap::Direction::receiver;
        else
            fail(path, label + ": direction must be \"payer\" or \"receiver\"");
        if (spec.contains("payments_per_year"))
            swap.payments_per_year = static_cast<int>(need_number(spec, "payments_per_year", path));
        else
            note(defaults, label + ".payments_per_year defaulted to 4");
        if (spec.contains("currency"))
            swap.currency = need_string(spec, "currency", path);
        else
            swap.currency = base_currency;

        if (!spec.contains("fixed_rate")) fail(path, label + ": missing key \"fixed_rate\"");
        const json& rate = spec["fixed_rate"];
        if (rate.is_number()) {
            swap.fixed_rate = rate.get<double>();
            if (spec.contains("par_offset"))
                fail(path, label + ": par_offset needs fixed_rate \"par\"");
        } else if (rate.is_string() && rate.get<std::string>() == "par") {
            swap.fixed_rate = 0.0; // placeholder for validation
            swap.validate();
            swap.fixed_rate = par_rate(swap, snapshot);
            if (spec.contains("par_offset"))
                swap.fixed_rate += need_number(spec, "par_offset", path);
            note(defaults, label + ".fixed_rate resolved to " + std::to_string(swap.fixed_rate));
        } else {
            fail(path, label + ": fixed_rate must be a number or \"par\"");
        }
        swap.validate();
        return swap;
    }
    if (type == "ccs") {
        reject_unknown_keys(
            spec, {"type", "notional_external", "notional_internal", "fx_pair", "maturity"},
            path, label);
        CrossCurrencySwap ccs;
        ccs.notional_external = need_number(spec, "notional_external", path);
        ccs.notional_internal = need_number(spec, "notional_internal", path);
        ccs.fx_pair = need_string(spec, "fx_pair", path);
        ccs.maturity = need_number(spec, "maturity", path);
        ccs.validate();
        if (!snapshot.has_fx_spot(ccs.fx_pair))
            fail(path, label + ": no FX spot for pair \"" + ccs.fx_pair + "\"");
        return ccs;
    }
    fail(path, label + ": unknown trade type \"" + type + "\" (want \"irs\" or \"ccs\")");
}

ProbabilitySource parse_probability(const json& spec, const std::string& path,
                                    const std::string& label) {
    reject_unknown_keys(spec, {"source", "entity", "value", "schedule"}, path, label);
    std::string source = need_string(spec, "source", path);
    if (source == "cds")
        return ProbabilitySource::cds(need_string(spec, "entity", path));
    if (source == "fixed") {
        if (spec.contains("value"))
            return ProbabilitySource::fixed_constant(need_number(spec, "value", path));
        if (!spec.contains("schedule") || !spec["schedule"].is_array())
            fail(path, label + ": fixed probability needs \"value\" or \"schedule\"");
        std::vector<std::pair<double, double>> schedule;
        for (const auto& row : spec["schedule"]) {
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
                fail(path, label + ": schedule rows must be [t, p]");
            schedule.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
        return ProbabilitySource::fixed(std::move(schedule));
    }
    fail(path, label + ": probability source must be \"cds\" or \"fixed\"");
}

std::string resolve_relative(const std::string& base_file, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_file).parent_path() / p).string();
}

} // namespace

MarketSnapshot load_market(const std::string& path, DefaultsLog* defaults) {
    json doc = parse_file(path);
    try {
        MarketSnapshot snapshot;
        if (!doc.contains("discount_curves") || !doc["discount_curves"].is_object())
            fail(path, "missing \"discount_curves\" object");
        for (const auto& [ccy, spec] : doc["discount_curves"].items())
            snapshot.discount_curves.emplace(ccy, parse_discount_curve(spec, path, ccy));
        if (doc.contains("credit_curves"))
            for (const auto& [entity, spec] : doc["credit_curves"].items())
                snapshot.credit_curves.emplace(entity,
                                               parse_credit_curve(spec, path, entity, defaults));
        if (doc.contains("fx_spots"))
            for (const auto& [pair, v] : doc["fx_spots"].items()) {
                if (!v.is_number()) fail(path, "FX spot for \"" + pair + "\" must be a number");
                snapshot.fx_spots.emplace(pair, FxSpot(pair, v.get<double>()));
            }
        if (doc.contains("funding_curve"))
            snapshot.funding_curve = parse_funding_curve(doc["funding_curve"], path);
        for (const auto& [pair, spot] : snapshot.fx_spots) {
            if (!snapshot.has_discount_curve(spot.internal_currency()) ||
                !snapshot.has_discount_curve(spot.external_currency()))
                fail(path, "FX pair \"" + pair + "\" references a currency without a discount curve");
        }
        return snapshot;
    } catch (const std::domain_error& e) {
        throw ConfigError("\"" + path + "\": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("\"" + path + "\": " + e.what());
    }
}

InstrumentPortfolio load_portfolio(const std::string& path, const MarketSnapshot& snapshot,
                                   DefaultsLog* defaults) {
    json doc = parse_file(path);
    try {
        reject_unknown_keys(doc, {"base_currency", "counterparty", "netting", "trades", "description"},
                            path, "portfolio");
        InstrumentPortfolio portfolio;
        portfolio.base_currency = need_string(doc, "base_currency", path);
        portfolio.counterparty = need_string(doc, "counterparty", path);
        if (doc.contains("netting")) {
            if (!doc["netting"].is_boolean()) fail(path, "\"netting\" must be a boolean");
            portfolio.netting = doc["netting"].get<bool>();
        } else {
            note(defaults, "netting defaulted to true");
        }
        if (!doc.contains("trades") || !doc["trades"].is_array() || doc["trades"].empty())
            fail(path, "\"trades\" must be a non-empty array");
        std::size_t index = 0;
        for (const auto& spec : doc["trades"])
            portfolio.trades.push_back(
                parse_trade(spec, path, index++, snapshot, portfolio.base_currency, defaults));
        if (!snapshot.has_credit_curve(portfolio.counterparty))
            fail(path, "no credit curve for counterparty \"" + portfolio.counterparty + "\"");
        if (!snapshot.has_discount_curve(portfolio.base_currency))
            fail(path, "no discount curve for base currency \"" + portfolio.base_currency + "\"");
        portfolio.validate();
        return portfolio;
    } catch (const std::domain_error& e) {
        throw ConfigError("\"" + path + "\": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("\"" + path + "\": " + e.what());
    }
}

std::vector<StressScenario> load_scenarios(const std::string& path,
                                           const MarketSnapshot& snapshot,
                                           DefaultsLog* defaults) {
    json doc = parse_file(path);
    try {
        if (!doc.contains("scenarios") || !doc["scenarios"].is_array())
            fail(path, "missing \"scenarios\" array");
        std::vector<StressScenario> scenarios;
        std::set<std::string> seen_ids;
        for (const auto& spec : doc["scenarios"]) {
            StressScenario sc;
            sc.id = need_string(spec, "id", path);
            std::string label = "scenario \"" + sc.id + "\"";
            if (!seen_ids.insert(sc.id).second)
                fail(path, "duplicate scenario id \"" + sc.id + "\"");
            reject_unknown_keys(spec,
                                {"id", "shock", "probability", "lambda", "rating",
                                 "p_threshold_bps", "p_threshold", "probability_mode", "horizon",
                                 "description"},
                                path, label);
            if (!spec.contains("shock") || !spec["shock"].is_object())
                fail(path, label + ": missing \"shock\" object");
            sc.shock = parse_shock(spec["shock"], path, label + " shock");
            if (!spec.contains("probability") || !spec["probability"].is_object())
                fail(path, label + ": missing \"probability\" object");
            sc.probability_source = parse_probability(spec["probability"], path, label);

            if (spec.contains("lambda") && spec.contains("rating"))
                fail(path, label + ": give \"lambda\" or \"rating\", not both");
            if (spec.contains("lambda")) {
                sc.coupling_lambda = need_number(spec, "lambda", path);
            } else if (spec.contains("rating")) {
                std::string rating = need_string(spec, "rating", path);
                if (rating == "low") sc.coupling_lambda = rating_to_lambda(WwrRating::low);
                else if (rating == "medium") sc.coupling_lambda = rating_to_lambda(WwrRating::medium);
                else if (rating == "high") sc.coupling_lambda = rating_to_lambda(WwrRating::high);
                else fail(path, label + ": rating must be low, medium or high");
            } else {
                sc.coupling_lambda = 1.0;
                note(defaults, label + ": lambda defaulted to 1");
            }

            if (spec.contains("p_threshold_bps") && spec.contains("p_threshold"))
                fail(path, label + ": give \"p_threshold_bps\" or \"p_threshold\", not both");
            if (spec.contains("p_threshold")) {
                sc.threshold.probability = need_number(spec, "p_threshold", path);
            } else {
                sc.threshold.spread_bps = spec.contains("p_threshold_bps")
                                              ? need_number(spec, "p_threshold_bps", path)
                                              : 1000.0;
                if (!spec.contains("p_threshold_bps"))
                    note(defaults, label + ": p_threshold_bps defaulted to 1000");
                if (sc.probability_source.kind == ProbabilitySource::Kind::cds_implied) {
                    if (!snapshot.has_credit_curve(sc.probability_source.entity))
                        fail(path, label + ": unknown probability entity \"" +
                                       sc.probability_source.entity + "\"");
                    sc.threshold.recovery =
                        snapshot.credit_curve(sc.probability_source.entity).recovery();
                } else {
                    note(defaults, label + ": threshold recovery defaulted to 0.40");
                }
            }

            if (spec.contains("probability_mode")) {
                std::string mode = need_string(spec, "probability_mode", path);
                if (mode == "cumulative") sc.mode = ProbabilityMode::cumulative;
                else if (mode == "at_horizon") sc.mode = ProbabilityMode::at_horizon;
                else fail(path, label + ": probability_mode must be cumulative or at_horizon");
            }
            if (spec.contains("horizon"))
                sc.horizon = need_number(spec, "horizon", path);
            scenarios.push_back(std::move(sc));
        }
        return scenarios;
    } catch (const std::domain_error& e) {
        throw ConfigError("\"" + path + "\": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("\"" + path + "\": " + e.what());
    }
}

RunConfig::Format parse_format(const std::string& text) {
    if (text == "json") return RunConfig::Format::json;
    if (text == "csv") return RunConfig::Format::csv;
    if (text == "both") return RunConfig::Format::both;
    throw ConfigError("format must be json, csv or both (got \"" + text + "\")");
}

RunConfig RunConfig::from_file(const std::string& path, DefaultsLog* defaults) {
    json doc = parse_file(path);
    try {
        reject_unknown_keys(doc, {"market", "portfolio", "scenarios", "simulation", "output",
                                  "hedge", "description"},
                            path, "run config");
        RunConfig cfg;
        cfg.market_file = resolve_relative(path, need_string(doc, "market", path));
        cfg.portfolio_file = resolve_relative(path, need_string(doc, "portfolio", path));
        if (doc.contains("scenarios"))
            cfg.scenarios_file = resolve_relative(path, need_string(doc, "scenarios", path));
        if (doc.contains("simulation")) {
            const json& sim = doc["simulation"];
            reject_unknown_keys(sim, {"n_paths", "seed", "grid_step", "horizon", "n_threads",
                                      "soft_cap", "rate_mean_reversion", "rate_vol", "fx_vol"},
                                path, "simulation");
            if (sim.contains("n_paths"))
                cfg.n_paths = static_cast<std::size_t>(need_number(sim, "n_paths", path));
            if (sim.contains("seed"))
                cfg.seed = static_cast<std::uint64_t>(need_number(sim, "seed", path));
            if (sim.contains("grid_step")) cfg.grid_step = need_number(sim, "grid_step", path);
            if (sim.contains("horizon")) cfg.horizon = need_number(sim, "horizon", path);
            if (sim.contains("n_threads"))
                cfg.n_threads = static_cast<unsigned>(need_number(sim, "n_threads", path));
            if (sim.contains("soft_cap")) cfg.soft_cap = need_number(sim, "soft_cap", path);
            if (sim.contains("rate_mean_reversion"))
                cfg.rate_model.mean_reversion = need_number(sim, "rate_mean_reversion", path);
            if (sim.contains("rate_vol"))
                cfg.rate_model.normal_vol = need_number(sim, "rate_vol", path);
            if (sim.contains("fx_vol"))
                cfg.fx_model.lognormal_vol = need_number(sim, "fx_vol", path);
        }
        if (doc.contains("output")) {
            const json& out = doc["output"];
            reject_unknown_keys(out, {"format", "directory"}, path, "output");
            if (out.contains("format")) cfg.format = parse_format(need_string(out, "format", path));
            if (out.contains("directory"))
                cfg.out_dir = resolve_relative(path, need_string(out, "directory", path));
        }
        if (doc.contains("hedge")) {
            const json& hedge = doc["hedge"];
            reject_unknown_keys(hedge, {"aggregation"}, path, "hedge");
            if (hedge.contains("aggregation")) {
                std::string agg = need_string(hedge, "aggregation", path);
                if (agg == "time_average") cfg.hedge_aggregation = GapAggregation::time_average;
                else if (agg == "at_horizon") cfg.hedge_aggregation = GapAggregation::at_horizon;
                else fail(path, "hedge aggregation must be time_average or at_horizon");
            }
        }
        note(defaults, "run config loaded from " + path);
        return cfg;
    } catch (const std::domain_error& e) {
        throw ConfigError("\"" + path + "\": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("\"" + path + "\": " + e.what());
    }
}

} // namespace tailrisk
