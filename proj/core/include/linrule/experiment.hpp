#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "linrule/csv.hpp"

namespace linrule {

// One JSON document. Every list in `grid` is a factor of a full Cartesian
// product; an empty list yields an empty experiment. When `spectra` is
// non-empty it replaces the (d, alpha) capacity factors with explicit base
// spectra.
struct ExperimentConfig {
    struct Grid {
        std::vector<std::size_t> d{200};
        std::vector<std::size_t> n{50};
        std::vector<double> alpha{1.0};
        std::vector<std::vector<double>> spectra;
        std::vector<double> r{0.5};
        std::vector<double> rho2{1.0};
        std::vector<double> sigma2{0.5};
        std::vector<double> kappa{3.0};

        friend bool operator==(const Grid&, const Grid&) = default;
    };

    Grid grid;
    std::vector<std::string> theorems{"thm2", "thm3", "thm4", "thm5", "cor1", "thm6", "ex4", "lowdim"};
    std::vector<std::string> estimators{"matrix_form", "variational_form", "noiseless_projection", "variance_like"};
    // Rule texts (RuleSpec::parse), evaluated against the source prior.
    std::vector<std::string> rules;
    // Transformed ridge at lambda = factor * sigma2 / n, evaluated against the
    // source prior; factor 1 is always added.
    std::vector<double> lambda_factors;
    // Named fixed targets ("inverse_eigen": theta_j^2 = 1 / lambda_j) for the
    // rules in `rules`.
    std::vector<std::string> fixed_targets;
    std::string law = "gaussian";
    std::size_t reps = 400;
    std::size_t test_points = 64;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::string output = "out";

    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// Unknown keys and wrong types raise ConfigError.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

[[nodiscard]] ExperimentConfig parse_config(std::string_view json_text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);
[[nodiscard]] std::string dump_config(const ExperimentConfig& c);
// FNV-1a 64 of the canonical dump with `workers` and `output` cleared (neither
// affects results), as 16 hex digits.
[[nodiscard]] std::string config_hash(const ExperimentConfig& c);

struct VerificationVerdict {
    std::string point;
    std::string inequality;
    double estimate = 0.0;
    double bound = 0.0;
    double std_error = 0.0;
    double margin = 0.0;  // in std errors; +/-inf when std_error == 0
    bool pass = true;     // margin >= -3
};

inline constexpr double kPassMargin = -3.0;

// Tables are returned in deterministic grid order.
[[nodiscard]] CsvTable bounds_table(const ExperimentConfig& c);
[[nodiscard]] CsvTable optimal_risk_table(const ExperimentConfig& c);
[[nodiscard]] CsvTable rule_risk_table(const ExperimentConfig& c);

// Reads bounds and risk rows (risk rows from all given tables concatenated).
// Throws ConfigError when a grid point appears in one table but not the other.
[[nodiscard]] std::vector<VerificationVerdict> verify(const CsvTable& bounds, const CsvTable& risk);
[[nodiscard]] CsvTable verdict_table(const std::vector<VerificationVerdict>& verdicts);

[[nodiscard]] std::string manifest_json(const ExperimentConfig& c);

// Column layouts.
[[nodiscard]] const std::vector<std::string>& bounds_header();
[[nodiscard]] const std::vector<std::string>& risk_header();
[[nodiscard]] const std::vector<std::string>& verdict_header();

[[nodiscard]] std::string library_version();

}  // namespace linrule
