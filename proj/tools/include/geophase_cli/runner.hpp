// runner.hpp: scenario catalogue behind the `geophase run` command.

#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace geophase::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kResultSchema = "geophase.result/1";
inline constexpr const char* kQuantumSchema = "geophase.quantum/1";
inline constexpr const char* kDynamicsSchema = "geophase.dynamics/1";
inline constexpr const char* kManifestSchema = "geophase.manifest/1";

// Unknown scenario, missing or malformed keys, unwritable output.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

OutputFormat output_format_from_string(const std::string& s);  // throws ConfigError
const char* to_string(OutputFormat f) noexcept;

// Empty cells are written as nothing in CSV and null in JSON.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);  // throws std::logic_error on width mismatch
};

struct ScenarioResult {
    std::string scenario;
    Json parameters;  // fully resolved, defaults included
    Table table;
    // Scenario-level summary values, emitted next to the rows in JSON.
    Json summary = Json::object();
    // When set, the JSON output is this object instead of the generic
    // {schema, scenario, parameters, summary, rows} layout.
    std::optional<Json> document;
};

const std::vector<std::string>& scenario_names();

// Runs `scenario` with the given parameter object. A seed passed here
// overrides params["seed"]. workers == 0 uses GEOPHASE_WORKERS or the
// hardware count. Throws ConfigError, geophase::DomainError and
// geophase::NumericalError.
ScenarioResult run_scenario(const std::string& scenario, const Json& params, std::optional<std::uint64_t> seed,
                            unsigned workers = 0);

// RFC 4180 with a header row; doubles as %.17g.
std::string to_csv(const Table& table);
std::string to_json_text(const ScenarioResult& result);
std::string render(const ScenarioResult& result, OutputFormat format);

Json manifest(const ScenarioResult& result, const Json& config_echo, std::optional<std::uint64_t> seed,
              OutputFormat format, const std::string& data_path, double wall_seconds);

// Ensemble comparison of two ways to average a noisy polar angle: the mean
// of cos(theta) (which the geometric phase depends on) and cos of the mean
// theta. Shifts are phi_+ minus the averaged phase; the fitted noise
// strength scales as sqrt(shift), hence p_ratio = sqrt(ratio).
struct AveragingDiagnostic {
    double delta_correct{0.0};
    double delta_correct_std_error{0.0};
    double delta_incorrect{0.0};
    double delta_incorrect_std_error{0.0};
    double ratio{0.0};  // delta_correct / delta_incorrect; NaN when both vanish
    double ratio_std_error{0.0};
    double p_ratio{0.0};
    double p_ratio_std_error{0.0};
    std::size_t n_realizations{0};
};

struct AveragingInputs {
    double theta0{0.0};
    double epsilon{0.0};
    double sigma{1.0};
    int k_max{4};
    std::string mode{"z_only"};
    std::size_t n_realizations{1000};
    std::size_t n_grid{256};
    std::uint64_t seed{0};
    unsigned workers{0};
};

AveragingDiagnostic diagnose_averaging_conventions(const AveragingInputs& in);

}  // namespace geophase::cli
