// geophase: command-line runner for the scenario catalogue.
//
//   geophase run <scenario> [--config file.json] [--seed N] [--out path]
//                [--format csv|json] [--set key=value]...
//   geophase list
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "geophase_cli/runner.hpp"

#include "geophase/errors.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

using geophase::cli::ConfigError;
using geophase::cli::Json;

Json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

// key=value; the value is parsed as JSON when possible, else taken as a string.
void apply_override(Json& params, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    const Json parsed = Json::parse(value, nullptr, false);
    params[key] = parsed.is_discarded() ? Json(value) : parsed;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << text;
    out.close();
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

int run(const std::string& scenario, const std::string& config_path, std::optional<std::uint64_t> seed,
        const std::string& out_path, std::optional<std::string> format_flag, const std::vector<std::string>& sets) {
    const auto start = std::chrono::steady_clock::now();
    Json config = config_path.empty() ? Json::object() : read_config(config_path);
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    const Json echo = config;

    // Optional envelope keys next to the scenario parameters.
    if (config.contains("scenario")) {
        if (config["scenario"] != scenario) {
            throw ConfigError("config is for scenario '" + config["scenario"].dump() + "', not '" + scenario + "'");
        }
        config.erase("scenario");
    }
    std::string format = "csv";
    if (config.contains("format")) {
        if (!config["format"].is_string()) throw ConfigError("config key 'format' must be a string");
        format = config["format"].get<std::string>();
        config.erase("format");
    }
    std::string out = out_path;
    if (config.contains("out")) {
        if (!config["out"].is_string()) throw ConfigError("config key 'out' must be a string");
        if (out.empty()) out = config["out"].get<std::string>();
        config.erase("out");
    }
    if (format_flag) format = *format_flag;
    Json params = config.contains("parameters") ? config["parameters"] : config;
    if (config.contains("parameters")) {
        if (config.contains("seed") && !params.contains("seed")) params["seed"] = config["seed"];
    }
    for (const auto& kv : sets) apply_override(params, kv);

    const auto fmt = geophase::cli::output_format_from_string(format);
    const auto result = geophase::cli::run_scenario(scenario, params, seed);
    const std::string text = geophase::cli::render(result, fmt);

    if (out.empty()) {
        std::cout << text;
        return 0;
    }
    write_file(out, text);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Json m = geophase::cli::manifest(result, echo, seed, fmt, out, wall);
    write_file(out + ".manifest.json", m.dump(2) + "\n");
    std::cerr << scenario << ": wrote " << result.table.rows.size() << " row(s) to " << out << "\n";
    if (result.document && result.document->contains("details") &&
        (*result.document)["details"].contains("theta_eff_minus_theta0")) {
        const double rad = (*result.document)["details"]["theta_eff_minus_theta0"].get<double>();
        std::cerr << "  effective polar angle shift: " << rad * 180.0 / 3.14159265358979323846 << " deg\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geophase: geometric phases of a spin-1/2 in noisy classical and quantum fields"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List available scenarios");
    auto* run_cmd = app.add_subcommand("run", "Run one scenario");
    std::string scenario, config_path, out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    std::vector<std::string> sets;
    run_cmd->add_option("scenario", scenario, "Scenario name (see `geophase list`)")->required();
    run_cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", seed, "Master seed for stochastic scenarios");
    run_cmd->add_option("--out", out_path, "Output data file; a <out>.manifest.json is written next to it");
    run_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_option("--set", sets, "Parameter override key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (*list) {
        for (const auto& name : geophase::cli::scenario_names()) std::cout << name << "\n";
        return 0;
    }
    try {
        return run(scenario, config_path, seed, out_path, format, sets);
    } catch (const ConfigError& e) {
        std::cerr << "geophase: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const geophase::DomainError& e) {
        std::cerr << "geophase: invalid parameters: " << e.what() << "\n";
        return kExitConfig;
    } catch (const geophase::NumericalError& e) {
        std::cerr << "geophase: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "geophase: config error: " << e.what() << "\n";
        return kExitConfig;
    }
}
