#include "linrule/risk.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "linrule/errors.hpp"
#include "linrule/parallel.hpp"

namespace linrule {

std::string_view estimator_tag(Estimator e) noexcept {
    switch (e) {
    case Estimator::matrix_form: return "matrix_form";
    case Estimator::variational_form: return "variational_form";
    case Estimator::noiseless_projection: return "noiseless_projection";
    case Estimator::variance_like: return "variance_like";
    case Estimator::rule_mc: return "rule_mc";
    }
    return "unknown";
}

std::optional<Estimator> estimator_from_tag(std::string_view tag) noexcept {
    for (Estimator e : {Estimator::matrix_form, Estimator::variational_form, Estimator::noiseless_projection,
                        Estimator::variance_like, Estimator::rule_mc})
        if (estimator_tag(e) == tag) return e;
    return std::nullopt;
}

ProblemInstance::ProblemInstance(Spectrum s, std::size_t n_, double sigma2_)
    : ProblemInstance(s, n_, sigma2_, CovariateLaw::gaussian(s)) {}

ProblemInstance::ProblemInstance(Spectrum s, std::size_t n_, double sigma2_, CovariateLaw law_)
    : effective_spectrum(std::move(s)), n(n_), sigma2(sigma2_), law(std::move(law_)) {
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("problem: sigma2 must be finite and >= 0");
    if (law.dim() != effective_spectrum.dim()) throw InvalidArgument("problem: law dimension does not match spectrum");
}

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(const Spectrum& s) {
    return {s.values().data(), static_cast<Eigen::Index>(s.dim())};
}

void check_draw(const Spectrum& s, const Eigen::MatrixXd& Z) {
    if (static_cast<std::size_t>(Z.cols()) != s.dim())
        throw InvalidArgument("risk: draw has " + std::to_string(Z.cols()) + " columns, spectrum has dimension " +
                              std::to_string(s.dim()));
}

struct Draw {
    Eigen::MatrixXd train;
    Eigen::MatrixXd test;
};

Draw draw_replicate(const CovariateLaw& law, std::size_t n, std::size_t test_points, std::uint64_t seed,
                    std::size_t k) {
    StreamEngine engine(SeedSpec{seed, k});
    Draw d;
    d.train = sample_covariates(law, n, engine);
    if (test_points > 0) d.test = sample_covariates(law, test_points, engine);
    return d;
}

void check_options(const McOptions& opts, bool needs_test_points) {
    if (opts.reps < 1) throw InvalidArgument("monte carlo: reps must be >= 1");
    if (needs_test_points && opts.test_points < 1) throw InvalidArgument("monte carlo: test_points must be >= 1");
}

template <class PerDraw>
RiskEstimate run(const ProblemInstance& p, const McOptions& opts, Estimator tag, std::size_t test_points,
                 PerDraw&& per_draw) {
    const auto values = map_indices(opts.reps, opts.workers, [&](std::size_t k) {
        const Draw d = draw_replicate(p.law, p.n, test_points, opts.seed, k);
        return per_draw(d);
    });
    const SampleSummary summary = summarize(values);
    return {summary.mean, summary.std_error, opts.reps, tag};
}

}  // namespace

double matrix_form_primal(const Spectrum& s, const Eigen::MatrixXd& Z, double sigma2) {
    check_draw(s, Z);
    if (!(sigma2 > 0.0)) throw InvalidArgument("matrix form: sigma2 must be > 0");
    Eigen::MatrixXd A = Z.transpose() * Z;
    A.diagonal().array() += sigma2;
    const Eigen::LLT<Eigen::MatrixXd> llt(A);
    // sigma2 Tr(S A^{-1}) = sigma2 |L^{-1} S^{1/2}|_F^2
    Eigen::MatrixXd B = as_vector(s).cwiseSqrt().asDiagonal();
    llt.matrixL().solveInPlace(B);
    return sigma2 * B.squaredNorm();
}

double matrix_form_dual(const Spectrum& s, const Eigen::MatrixXd& Z, double sigma2) {
    check_draw(s, Z);
    if (!(sigma2 > 0.0)) throw InvalidArgument("matrix form: sigma2 must be > 0");
    if (Z.rows() == 0) return s.trace();
    Eigen::MatrixXd G = Z * Z.transpose();
    G.diagonal().array() += sigma2;
    const Eigen::LLT<Eigen::MatrixXd> llt(G);
    // Tr(Z S Z' G^{-1}) = |L^{-1} Z S^{1/2}|_F^2
    Eigen::MatrixXd W = Z * as_vector(s).cwiseSqrt().asDiagonal();
    llt.matrixL().solveInPlace(W);
    return s.trace() - W.squaredNorm();
}

double matrix_form_value(const Spectrum& s, const Eigen::MatrixXd& Z, double sigma2) {
    return Z.cols() > Z.rows() ? matrix_form_dual(s, Z, sigma2) : matrix_form_primal(s, Z, sigma2);
}

double projection_value(const Spectrum& s, const Eigen::MatrixXd& Z) {
    check_draw(s, Z);
    const auto d = static_cast<Eigen::Index>(s.dim());
    if (Z.rows() == 0) return s.trace();
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z.transpose());
    const Eigen::Index rank = qr.rank();
    // An isotropic S gives mu * (d - rank) exactly.
    if (s.isotropic()) return s[0] * static_cast<double>(d - rank);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, rank);
    const Eigen::VectorXd captured = Q.rowwise().squaredNorm();
    return s.trace() - as_vector(s).dot(captured);
}

double variational_value(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& test, double sigma2) {
    if (test.rows() == 0) throw InvalidArgument("variational form: no test points");
    if (Z.rows() > 0 && Z.cols() != test.cols()) throw InvalidArgument("variational form: dimension mismatch");
    if (!(sigma2 >= 0.0)) throw InvalidArgument("variational form: sigma2 must be >= 0");
    if (Z.rows() == 0) return test.rowwise().squaredNorm().mean();

    RuleSpec spec;
    if (sigma2 > 0.0) {
        spec.kind = RuleKind::ridge;
        spec.lambda = sigma2 / static_cast<double>(Z.rows());
    } else {
        spec.kind = RuleKind::min_norm;
    }
    const FittedRule rule = fit(spec, Z);
    const Eigen::MatrixXd L = rule.weights_batch(test);  // n x m
    const Eigen::MatrixXd residual = Z.transpose() * L - test.transpose();
    const Eigen::VectorXd objective =
        residual.colwise().squaredNorm().transpose() + sigma2 * L.colwise().squaredNorm().transpose();
    return objective.mean();
}

RiskEstimate optimal_risk_matrix_form(const ProblemInstance& p, const McOptions& opts) {
    check_options(opts, false);
    if (!(p.sigma2 > 0.0)) throw InvalidArgument("matrix form needs sigma2 > 0; use optimal_risk_noiseless");
    return run(p, opts, Estimator::matrix_form, 0,
               [&](const Draw& d) { return matrix_form_value(p.effective_spectrum, d.train, p.sigma2); });
}

RiskEstimate optimal_risk_variational_form(const ProblemInstance& p, const McOptions& opts) {
    check_options(opts, true);
    return run(p, opts, Estimator::variational_form, opts.test_points,
               [&](const Draw& d) { return variational_value(d.train, d.test, p.sigma2); });
}

RiskEstimate optimal_risk_noiseless(const ProblemInstance& p, const McOptions& opts) {
    check_options(opts, false);
    return run(p, opts, Estimator::noiseless_projection, 0,
               [&](const Draw& d) { return projection_value(p.effective_spectrum, d.train); });
}

RiskEstimate variance_like_term(const ProblemInstance& p, const McOptions& opts) {
    check_options(opts, false);
    if (p.sigma2 == 0.0) return {0.0, 0.0, opts.reps, Estimator::variance_like};
    return run(p, opts, Estimator::variance_like, 0, [&](const Draw& d) {
        return matrix_form_value(p.effective_spectrum, d.train, p.sigma2) - projection_value(p.effective_spectrum, d.train);
    });
}

RiskEstimate rule_excess_risk(const ProblemInstance& p, const RuleSpec& rule, const RiskTarget& target,
                              const McOptions& opts) {
    check_options(opts, true);
    rule.validate();
    if (p.n < 1) throw InvalidArgument("rule risk: n must be >= 1");
    const Spectrum& base = p.law.spectrum;
    const auto d = static_cast<Eigen::Index>(base.dim());

    RuleContext context;
    context.sigma2 = p.sigma2;
    Eigen::VectorXd weight;  // prior target: diag(H)
    Eigen::VectorXd theta;   // fixed target
    const bool prior_target = std::holds_alternative<SourcePrior>(target);
    if (prior_target) {
        const auto& prior = std::get<SourcePrior>(target);
        prior.validate();
        context.prior_moment = prior_second_moment(base, prior);
        weight = Eigen::Map<const Eigen::VectorXd>(context.prior_moment.data(), d);
    } else {
        const auto& coords = std::get<FixedTarget>(target).coords;
        if (static_cast<Eigen::Index>(coords.size()) != d)
            throw InvalidArgument("rule risk: fixed target has " + std::to_string(coords.size()) +
                                  " coordinates, covariates have dimension " + std::to_string(d));
        if (rule.kind == RuleKind::optimal || rule.transformed)
            throw InvalidArgument("rule risk: optimal and transformed rules need a prior target");
        theta = Eigen::Map<const Eigen::VectorXd>(coords.data(), d);
    }

    return run(p, opts, Estimator::rule_mc, opts.test_points, [&](const Draw& draw) {
        const FittedRule fitted = fit(rule, draw.train, context);
        const Eigen::MatrixXd L = fitted.weights_batch(draw.test);                         // n x m
        const Eigen::MatrixXd residual = draw.test.transpose() - draw.train.transpose() * L;  // d x m
        Eigen::VectorXd bias;
        if (prior_target)
            bias = (weight.asDiagonal() * residual.cwiseAbs2()).colwise().sum().transpose();
        else
            bias = (theta.transpose() * residual).cwiseAbs2().transpose();
        const Eigen::VectorXd risk = bias + p.sigma2 * L.colwise().squaredNorm().transpose();
        return risk.mean();
    });
}

}  // namespace linrule
