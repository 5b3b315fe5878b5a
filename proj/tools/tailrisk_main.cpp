// Command line front end: price (full pipeline run), validate (lint only),
// calibrate-lambda (historical coupling from CDS series), hedge-aggregate
// (combine hedge blocks from prior reports).
//
// Exit codes: 0 success, 2 validation / input error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tailrisk/calibration.hpp"
#include "tailrisk/errors.hpp"
#include "tailrisk/pipeline.hpp"

namespace {

using json = nlohmann::json;
using namespace tailrisk;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

void print_error(const char* type, const std::string& message) {
    json doc{{"error", {{"type", type}, {"message", message}}}};
    std::cout << doc.dump(2) << "\n";
}

struct PriceFlags {
    std::string config_file;
    std::string market, portfolio, scenarios;
    std::optional<std::size_t> paths;
    std::optional<std::uint64_t> seed;
    std::optional<double> grid_step;
    std::optional<unsigned> threads;
    std::string out_dir;
    std::string format;
};

RunConfig build_run_config(const PriceFlags& flags) {
    RunConfig cfg;
    if (!flags.config_file.empty()) cfg = RunConfig::from_file(flags.config_file);
    if (!flags.market.empty()) cfg.market_file = flags.market;
    if (!flags.portfolio.empty()) cfg.portfolio_file = flags.portfolio;
    if (!flags.scenarios.empty()) cfg.scenarios_file = flags.scenarios;
    if (flags.paths) cfg.n_paths = *flags.paths;
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.grid_step) cfg.grid_step = *flags.grid_step;
    if (flags.threads) cfg.n_threads = *flags.threads;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (!flags.format.empty()) cfg.format = parse_format(flags.format);
    if (cfg.market_file.empty() || cfg.portfolio_file.empty())
        throw ConfigError("need --config, or both --market and --portfolio");
    return cfg;
}

void add_price_flags(CLI::App* cmd, PriceFlags& flags) {
    cmd->add_option("--config", flags.config_file, "Run bundle (.cfg, JSON)");
    cmd->add_option("--market", flags.market, "Market snapshot file");
    cmd->add_option("--portfolio", flags.portfolio, "Portfolio file");
    cmd->add_option("--scenarios", flags.scenarios, "Stress scenario file");
    cmd->add_option("--paths", flags.paths, "Monte Carlo paths");
    cmd->add_option("--seed", flags.seed, "Simulation seed");
    cmd->add_option("--grid-step", flags.grid_step, "Bucket size in years");
    cmd->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
}

int run_price(const PriceFlags& flags) {
    RunConfig cfg = build_run_config(flags);
    RunOutput out = run(cfg);
    for (const std::string& w : out.warnings) std::cerr << "warning: " << w << "\n";

    json doc;
    doc["counterparty"] = out.counterparty;
    doc["cva_running_bps"] = out.cva_base.running_bps;
    doc["cva_wwr_running_bps"] = out.cva_wwr.running_bps;
    if (out.has_fva) {
        doc["fva_bps"] = out.fva_base.value_bps;
        doc["fva_wwr_bps"] = out.fva_wwr.value_bps;
    }
    doc["hedge_total"] = out.hedge.total;
    doc["files"] = out.files_written;
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

int run_validate(const PriceFlags& flags) {
    RunConfig cfg = build_run_config(flags);
    ValidateOutput out = validate_run(cfg);
    json hard = json::array();
    for (const ScenarioViolation& v : out.scenario_lint.hard)
        hard.push_back({{"scenario", v.scenario_id}, {"t", v.t}, {"value", v.value},
                        {"detail", v.detail}});
    json warnings = json::array();
    for (const ScenarioViolation& v : out.scenario_lint.warnings)
        warnings.push_back({{"scenario", v.scenario_id}, {"t", v.t}, {"value", v.value},
                            {"detail", v.detail}});
    json doc;
    doc["ok"] = out.scenario_lint.ok;
    doc["hard_violations"] = hard;
    doc["soft_warnings"] = warnings;
    doc["run_warnings"] = out.warnings;
    doc["defaults_applied"] = out.defaults_applied;
    std::cout << doc.dump(2) << "\n";
    return out.scenario_lint.ok ? kExitOk : kExitValidation;
}

int run_calibrate(const std::string& cpty_file, const std::string& sov_file,
                  double cpty_threshold, double sov_threshold, const std::string& out_file) {
    std::ifstream cpty_in(cpty_file);
    if (!cpty_in) throw ConfigError("cannot open \"" + cpty_file + "\"");
    std::ifstream sov_in(sov_file);
    if (!sov_in) throw ConfigError("cannot open \"" + sov_file + "\"");

    CdsSeries cpty = CdsSeries::from_csv(cpty_in);
    CdsSeries sov = CdsSeries::from_csv(sov_in);
    LambdaEstimate est = estimate_lambda(cpty, sov, cpty_threshold, sov_threshold);

    json doc;
    doc["lambda"] = est.lambda;
    doc["lambda_dual"] = est.lambda_dual;
    doc["rating"] = to_string(classify_wwr(est.lambda));
    doc["rating_lambda"] = rating_to_lambda(classify_wwr(est.lambda));
    doc["n_days"] = est.n_days;
    doc["n_cpty_exceed"] = est.n_cpty_exceed;
    doc["n_sov_exceed"] = est.n_sov_exceed;
    doc["n_joint_exceed"] = est.n_joint_exceed;
    doc["p_cpty"] = est.p_cpty;
    doc["p_sov"] = est.p_sov;
    doc["p_cpty_given_sov"] = est.p_cpty_given_sov;
    doc["p_sov_given_cpty"] = est.p_sov_given_cpty;
    std::string text = doc.dump(2) + "\n";
    std::cout << text;
    if (!out_file.empty()) {
        std::ofstream out(out_file, std::ios::trunc);
        if (!out) throw ConfigError("cannot write \"" + out_file + "\"");
        out << text;
    }
    return kExitOk;
}

int run_hedge_aggregate(const std::vector<std::string>& reports) {
    double total = 0.0;
    json by_report = json::array();
    json entries = json::array();
    for (const std::string& path : reports) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open \"" + path + "\"");
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("\"" + path + "\": " + e.what());
        }
        if (!doc.contains("hedge") || !doc["hedge"].contains("total"))
            throw ConfigError("\"" + path + "\" has no hedge block");
        double t = doc["hedge"]["total"].get<double>();
        total += t;
        by_report.push_back({{"report", path}, {"total", t}});
        for (const auto& e : doc["hedge"]["entries"]) {
            json tagged = e;
            tagged["report"] = path;
            entries.push_back(tagged);
        }
    }
    json doc{{"total", total}, {"by_report", by_report}, {"entries", entries}};
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo exposure and tail-risk XVA engine"};
    app.require_subcommand(1);

    PriceFlags price_flags;
    CLI::App* price = app.add_subcommand("price", "Run the pricing pipeline");
    add_price_flags(price, price_flags);
    price->add_option("--out", price_flags.out_dir, "Output directory");
    price->add_option("--format", price_flags.format, "json, csv or both");

    PriceFlags validate_flags;
    CLI::App* validate = app.add_subcommand("validate", "Lint inputs without pricing");
    add_price_flags(validate, validate_flags);

    std::string cpty_file, sov_file, calib_out;
    double cpty_threshold = 0.0, sov_threshold = 0.0;
    CLI::App* calibrate =
        app.add_subcommand("calibrate-lambda", "Estimate the coupling from CDS history");
    calibrate->add_option("--cpty", cpty_file, "Counterparty CDS series CSV")->required();
    calibrate->add_option("--sov", sov_file, "Tail entity CDS series CSV")->required();
    calibrate->add_option("--cpty-threshold-bps", cpty_threshold, "Counterparty distress level")
        ->required();
    calibrate->add_option("--sov-threshold-bps", sov_threshold, "Tail entity distress level")
        ->required();
    calibrate->add_option("--out", calib_out, "Also write the result JSON here");

    std::vector<std::string> reports;
    CLI::App* hedge = app.add_subcommand("hedge-aggregate", "Sum hedge blocks across reports");
    hedge->add_option("--report", reports, "report.json files")->required()->expected(-1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (price->parsed()) return run_price(price_flags);
        if (validate->parsed()) return run_validate(validate_flags);
        if (calibrate->parsed())
            return run_calibrate(cpty_file, sov_file, cpty_threshold, sov_threshold, calib_out);
        if (hedge->parsed()) return run_hedge_aggregate(reports);
        print_error("usage", "no subcommand given");
        return kExitValidation;
    } catch (const NumericalError& e) {
        print_error("numerical_error", e.what());
        return kExitNumerical;
    } catch (const ConfigError& e) {
        print_error("config_error", e.what());
        return kExitValidation;
    } catch (const ValidationError& e) {
        print_error("validation_error", e.what());
        return kExitValidation;
    } catch (const ShapeError& e) {
        print_error("shape_error", e.what());
        return kExitValidation;
    } catch (const EstimationError& e) {
        print_error("estimation_error", e.what());
        return kExitValidation;
    } catch (const std::domain_error& e) {
        print_error("domain_error", e.what());
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        print_error("invalid_argument", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        print_error("internal_error", e.what());
        return kExitNumerical;
    }
}
