#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include <Eigen/Core>

#include "linrule/rules.hpp"
#include "linrule/sampler.hpp"
#include "linrule/spectra.hpp"

namespace linrule {

enum class Estimator { matrix_form, variational_form, noiseless_projection, variance_like, rule_mc };

[[nodiscard]] std::string_view estimator_tag(Estimator e) noexcept;
[[nodiscard]] std::optional<Estimator> estimator_from_tag(std::string_view tag) noexcept;

// One risk evaluation. For the optimal-risk estimators law.spectrum is the
// effective spectrum and rows are draws of the transformed covariates. For
// rule_excess_risk law.spectrum is the population covariance of the raw
// covariates, which is what the rule sees.
struct ProblemInstance {
    Spectrum effective_spectrum;
    std::size_t n = 0;
    double sigma2 = 0.0;
    CovariateLaw law;

    // Gaussian rows with covariance `s`.
    ProblemInstance(Spectrum s, std::size_t n, double sigma2);
    ProblemInstance(Spectrum s, std::size_t n, double sigma2, CovariateLaw law);
};

struct RiskEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t reps = 0;
    Estimator tag = Estimator::matrix_form;
};

// Replicate k draws its n training rows and then its test rows from stream
// (seed, k), so every estimator run with the same options sees the same
// training matrices.
struct McOptions {
    std::size_t reps = 400;
    std::size_t test_points = 64;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

// Per-draw values. Z is n x d in the eigenbasis of s.
//   matrix form:   sigma2 Tr(S (Z'Z + sigma2 I)^{-1})
//                = Tr S - Tr(Z S Z' (ZZ' + sigma2 I)^{-1})
//   projection:    Tr S - Tr(S P), P the projector onto the row space of Z
//   variational:   mean over test rows x of min_l |Z'l - x|^2 + sigma2 |l|^2
[[nodiscard]] double matrix_form_primal(const Spectrum& s, const Eigen::MatrixXd& Z, double sigma2);
[[nodiscard]] double matrix_form_dual(const Spectrum& s, const Eigen::MatrixXd& Z, double sigma2);
// Dual when d > n.
[[nodiscard]] double matrix_form_value(const Spectrum& s, const Eigen::MatrixXd& Z, double sigma2);
[[nodiscard]] double projection_value(const Spectrum& s, const Eigen::MatrixXd& Z);
[[nodiscard]] double variational_value(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& test, double sigma2);

// Throws InvalidArgument when sigma2 == 0 (use optimal_risk_noiseless).
[[nodiscard]] RiskEstimate optimal_risk_matrix_form(const ProblemInstance& p, const McOptions& opts);
[[nodiscard]] RiskEstimate optimal_risk_variational_form(const ProblemInstance& p, const McOptions& opts);
// p.sigma2 is ignored.
[[nodiscard]] RiskEstimate optimal_risk_noiseless(const ProblemInstance& p, const McOptions& opts);
// Matrix form minus projection on the same draw; exactly 0 when sigma2 == 0.
[[nodiscard]] RiskEstimate variance_like_term(const ProblemInstance& p, const McOptions& opts);

using RiskTarget = std::variant<SourcePrior, FixedTarget>;

// Excess risk of `rule` with the noise integrated out:
//   prior target: |H^{1/2}(x - X'l)|^2 + sigma2 |l|^2
//   fixed target: ((x - X'l)' theta)^2 + sigma2 |l|^2
// averaged over test rows and training draws. Throws InvalidArgument on a
// dimension mismatch.
[[nodiscard]] RiskEstimate rule_excess_risk(const ProblemInstance& p, const RuleSpec& rule, const RiskTarget& target,
                                            const McOptions& opts);

}  // namespace linrule
