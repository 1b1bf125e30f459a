#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace linrule {

enum class RuleKind { optimal, ridge, min_norm, gradient_flow, gradient_descent, nadaraya_watson };

// A linear prediction rule f(x) = sum_i l_i(x) Y_i, identified by kind and its
// tuning parameter. Textual form (CLI and configs):
//   optimal | minnorm | ridge:lambda=0.1 | gf:t=100 | gd:eta=0.5,steps=20 | nw:h=1.0
// Any rule accepts `transformed=1` to act on H^{1/2}-transformed covariates.
struct RuleSpec {
    RuleKind kind = RuleKind::ridge;
    double lambda = 0.0;
    double t = 0.0;
    double eta = 1.0;
    std::size_t steps = 0;
    double h = 1.0;
    bool transformed = false;

    [[nodiscard]] static RuleSpec parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;
    void validate() const;

    friend bool operator==(const RuleSpec&, const RuleSpec&) = default;
};

// What the optimal rule (and `transformed` rules) need beyond the covariates:
// the diagonal of the prior second moment H in the covariate eigenbasis and
// the noise level.
struct RuleContext {
    std::vector<double> prior_moment;
    double sigma2 = 0.0;
};

// Fitted once per training set; weights() reuses the factorisation and is safe
// to call concurrently.
class FittedRule {
public:
    [[nodiscard]] const RuleSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::size_t samples() const noexcept { return static_cast<std::size_t>(train_.rows()); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(train_.cols()); }
    // Numerical rank of the training matrix (spectral rules only; otherwise min(n, d)).
    [[nodiscard]] std::size_t rank() const noexcept { return rank_; }

    // l(x) in R^n.
    [[nodiscard]] Eigen::VectorXd weights(const Eigen::VectorXd& x) const;
    // Column k holds l(points.row(k)); points is m x d.
    [[nodiscard]] Eigen::MatrixXd weights_batch(const Eigen::MatrixXd& points) const;

private:
    friend FittedRule fit(const RuleSpec&, const Eigen::MatrixXd&, const RuleContext&);

    enum class Path { ridge_dual, ridge_primal, spectral, kernel };

    RuleSpec spec_;
    Path path_ = Path::spectral;
    Eigen::MatrixXd train_;       // rows after the optional H^{1/2} transform
    Eigen::VectorXd scale_;       // sqrt(H) per coordinate; empty = identity
    Eigen::LLT<Eigen::MatrixXd> llt_;  // ridge: XX' + n lambda I (dual) or X'X + n lambda I (primal)
    Eigen::MatrixXd factor_;           // spectral: U * diag(psi(s^2) s), n x r
    Eigen::MatrixXd right_;            // spectral: V, d x r
    std::size_t rank_ = 0;

    [[nodiscard]] Eigen::MatrixXd transform_points(const Eigen::MatrixXd& points) const;
};

// Throws InvalidArgument on an invalid spec, empty X, or a missing context for
// optimal / transformed rules.
[[nodiscard]] FittedRule fit(const RuleSpec& rule, const Eigen::MatrixXd& X, const RuleContext& context = {});

// Ridge on H^{1/2}-transformed covariates with penalty sigma2 / n, min-norm when
// sigma2 == 0: the rule minimising the prior-averaged excess risk.
[[nodiscard]] Eigen::VectorXd optimal_rule_weights(const Eigen::MatrixXd& X, std::span<const double> prior_moment,
                                                   double sigma2, const Eigen::VectorXd& x);

}  // namespace linrule
