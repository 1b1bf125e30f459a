#include <cmath>

#include <gtest/gtest.h>

#include "linrule/errors.hpp"
#include "linrule/risk.hpp"

using namespace linrule;

namespace {

McOptions options(std::size_t reps, std::size_t test_points = 32, std::uint64_t seed = 1, std::size_t workers = 1) {
    return {reps, test_points, seed, workers};
}

Eigen::MatrixXd draw(const Spectrum& s, std::size_t n, std::uint64_t stream) {
    return sample_covariates(CovariateLaw::gaussian(s), n, SeedSpec{77, stream});
}

}  // namespace

TEST(MatrixForm, ScalarPerDrawValue) {
    const Spectrum one({1.0});
    for (double z : {-2.0, -0.3, 0.0, 0.8, 5.0}) {
        Eigen::MatrixXd Z(1, 1);
        Z(0, 0) = z;
        EXPECT_NEAR(matrix_form_value(one, Z, 1.0), 1.0 / (1.0 + z * z), 1e-15);
        EXPECT_NEAR(matrix_form_dual(one, Z, 1.0), 1.0 / (1.0 + z * z), 1e-15);
    }
}

TEST(MatrixForm, ScalarMonteCarloMatchesQuadrature) {
    // E[1/(1+z^2)], z ~ N(0,1): sqrt(pi/2) e^{1/2} erfc(1/sqrt 2), mpmath
    const ProblemInstance p(Spectrum({1.0}), 1, 1.0);
    const RiskEstimate e = optimal_risk_matrix_form(p, options(40000));
    EXPECT_EQ(e.tag, Estimator::matrix_form);
    EXPECT_NEAR(e.mean, 0.6556795424187985, 4.0 * e.std_error);
    EXPECT_LT(e.std_error, 0.002);
}

TEST(MatrixForm, LargeNoiseApproachesTrace) {
    const Spectrum s = capacity_spectrum(20, 1.0);
    const RiskEstimate e = optimal_risk_matrix_form(ProblemInstance(s, 1, 1e6), options(200));
    EXPECT_LE(e.mean, s.trace());
    EXPECT_GE(e.mean, s.trace() * (1.0 - 1e-4));
}

TEST(MatrixForm, RequiresNoise) {
    EXPECT_THROW((void)optimal_risk_matrix_form(ProblemInstance(Spectrum({1.0}), 1, 0.0), options(5)), InvalidArgument);
}

TEST(MatrixForm, WoodburyPrimalDualAgree) {
    const Spectrum s = effective_spectrum(capacity_spectrum(50, 1.0), {0.5, 1.0});
    for (std::uint64_t k = 0; k < 20; ++k) {
        const Eigen::MatrixXd Z = draw(s, 20, k);
        for (double sigma2 : {0.01, 0.5, 3.0})
            EXPECT_NEAR(matrix_form_primal(s, Z, sigma2), matrix_form_dual(s, Z, sigma2), 1e-8);
    }
}

TEST(MatrixForm, MonotoneInNoisePerDraw) {
    const Spectrum s = capacity_spectrum(30, 1.5);
    for (std::uint64_t k = 0; k < 10; ++k) {
        const Eigen::MatrixXd Z = draw(s, 12, k);
        double prev = 0.0;
        for (double sigma2 = 1e-3; sigma2 < 100.0; sigma2 *= 2.0) {
            const double v = matrix_form_value(s, Z, sigma2);
            EXPECT_GE(v, prev);
            prev = v;
        }
        EXPECT_LE(prev, s.trace());
    }
}

TEST(Variational, AgreesWithMatrixForm) {
    const Spectrum s = effective_spectrum(capacity_spectrum(60, 1.0), {0.5, 1.0});
    const ProblemInstance p(s, 15, 0.5);
    const RiskEstimate m = optimal_risk_matrix_form(p, options(300));
    const RiskEstimate v = optimal_risk_variational_form(p, options(300));
    EXPECT_LT(std::abs(m.mean - v.mean), 3.0 * std::hypot(m.std_error, v.std_error));
}

TEST(Variational, NoDataGivesTrace) {
    const Spectrum s = capacity_spectrum(8, 1.0);
    const RiskEstimate e = optimal_risk_variational_form(ProblemInstance(s, 0, 1.0), options(400, 16));
    EXPECT_NEAR(e.mean, s.trace(), 3.0 * e.std_error);
}

TEST(Variational, NoiselessFullRankInterpolates) {
    const Spectrum s = capacity_spectrum(5, 1.0);
    const RiskEstimate e = optimal_risk_variational_form(ProblemInstance(s, 12, 0.0), options(20, 8));
    EXPECT_LT(std::abs(e.mean), 1e-20);
}

TEST(Noiseless, IdentityIsExactlyDMinusN) {
    const Spectrum s(std::vector<double>(30, 1.0));
    const RiskEstimate e = optimal_risk_noiseless(ProblemInstance(s, 12, 0.0), options(25));
    EXPECT_EQ(e.mean, 18.0);
    EXPECT_EQ(e.std_error, 0.0);
}

TEST(Noiseless, ScaledIdentityInsideSandwich) {
    const double rho2 = 2.0, d = 40.0, n = 10.0;
    const Spectrum s(std::vector<double>(40, rho2 / d));
    const RiskEstimate e = optimal_risk_noiseless(ProblemInstance(s, 10, 0.0), options(10));
    EXPECT_NEAR(e.mean, rho2 * (1.0 - n / d), 1e-15);
    EXPECT_GT(e.mean, rho2 * (1.0 - (n + 2.0) / d));
    EXPECT_LT(e.mean, rho2);
}

TEST(Noiseless, LowRankIsZero) {
    const Spectrum s = capacity_spectrum(5, 2.0);
    const RiskEstimate e = optimal_risk_noiseless(ProblemInstance(s, 9, 0.0), options(10));
    EXPECT_LT(std::abs(e.mean), 1e-14);
}

TEST(Noiseless, InvariantToRowScaling) {
    const Spectrum s = capacity_spectrum(25, 1.0);
    const Eigen::MatrixXd Z = draw(s, 8, 3);
    Eigen::VectorXd scales = Eigen::VectorXd::LinSpaced(8, 0.1, 30.0);
    EXPECT_NEAR(projection_value(s, Z), projection_value(s, scales.asDiagonal() * Z), 1e-12);
}

TEST(VarianceLike, ZeroWithoutNoiseAndDecomposes) {
    const Spectrum s = effective_spectrum(capacity_spectrum(40, 1.0), {1.0, 1.0});
    const RiskEstimate zero = variance_like_term(ProblemInstance(s, 10, 0.0), options(10));
    EXPECT_EQ(zero.mean, 0.0);
    EXPECT_EQ(zero.std_error, 0.0);

    const ProblemInstance p(s, 10, 0.3);
    const auto o = options(50);
    const double total = optimal_risk_matrix_form(p, o).mean;
    const double split = optimal_risk_noiseless(p, o).mean + variance_like_term(p, o).mean;
    EXPECT_NEAR(total, split, 1e-12);
    for (std::uint64_t k = 0; k < 5; ++k) {
        const Eigen::MatrixXd Z = draw(s, 10, k);
        EXPECT_GE(matrix_form_value(s, Z, 0.3) - projection_value(s, Z), -1e-12);
    }
}

TEST(Estimates, IndependentOfWorkerCount) {
    const Spectrum s = capacity_spectrum(50, 1.0);
    const ProblemInstance p(s, 10, 0.4);
    const RiskEstimate a = optimal_risk_variational_form(p, options(37, 8, 5, 1));
    const RiskEstimate b = optimal_risk_variational_form(p, options(37, 8, 5, 4));
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(RuleRisk, OptimalRuleMatchesVariationalForm) {
    const Spectrum base = capacity_spectrum(40, 1.0);
    const SourcePrior prior{1.0, 1.0};
    const Spectrum mu = effective_spectrum(base, prior);
    const auto o = options(40, 16);
    const RiskEstimate v = optimal_risk_variational_form(ProblemInstance(mu, 10, 0.2), o);
    const RiskEstimate r = rule_excess_risk(ProblemInstance(base, 10, 0.2), RuleSpec::parse("optimal"), prior, o);
    EXPECT_EQ(r.tag, Estimator::rule_mc);
    EXPECT_NEAR(r.mean, v.mean, 1e-10 * v.mean);
}

TEST(RuleRisk, OptimalBeatsMistunedRidge) {
    const Spectrum base = capacity_spectrum(40, 1.0);
    const SourcePrior prior{1.0, 1.0};
    const ProblemInstance p(base, 12, 1.0);
    const auto o = options(200, 16);
    const double best = rule_excess_risk(p, RuleSpec::parse("optimal"), prior, o).mean;
    for (const char* text : {"ridge:lambda=0.001,transformed=1", "ridge:lambda=1,transformed=1", "minnorm", "gf:t=5"})
        EXPECT_LE(best, rule_excess_risk(p, RuleSpec::parse(text), prior, o).mean) << text;
}

TEST(RuleRisk, FixedTargetChecks) {
    const Spectrum base = capacity_spectrum(10, 1.0);
    const ProblemInstance p(base, 5, 0.0);
    EXPECT_THROW((void)rule_excess_risk(p, RuleSpec::parse("minnorm"), FixedTarget{{1.0, 2.0}}, options(3)),
                 InvalidArgument);
    EXPECT_THROW((void)rule_excess_risk(p, RuleSpec::parse("optimal"), FixedTarget{std::vector<double>(10, 1.0)}, options(3)),
                 InvalidArgument);
}

TEST(RuleRisk, FixedTargetAboveSigmaThetaOptimum) {
    const Spectrum base = capacity_spectrum(60, 1.0);
    FixedTarget t;
    for (double l : base.values()) t.coords.push_back(1.0 / std::sqrt(l));
    const auto o = options(150, 16);
    const ProblemInstance p(base, 20, 0.0);
    const RiskEstimate rule = rule_excess_risk(p, RuleSpec::parse("ridge:lambda=0.01"), t, o);
    const Spectrum st = sigma_theta_spectrum(base, t);
    const RiskEstimate opt = optimal_risk_noiseless(ProblemInstance(st, 20, 0.0), o);
    EXPECT_GE(rule.mean, opt.mean - 3.0 * std::hypot(rule.std_error, opt.std_error));
}

TEST(RuleRisk, OlsMatchesUnderparamFormula) {
    // sigma2 d / (n - d - 1) is exact for least squares under Gaussian rows.
    const Spectrum base = capacity_spectrum(5, 1.0);
    const ProblemInstance p(base, 20, 1.0);
    const RiskEstimate e = rule_excess_risk(p, RuleSpec::parse("minnorm"), FixedTarget{std::vector<double>(5, 1.0)},
                                            options(3000, 8));
    EXPECT_NEAR(e.mean, 5.0 / 14.0, 4.0 * e.std_error);
}

TEST(EstimatorTags, RoundTrip) {
    for (Estimator e : {Estimator::matrix_form, Estimator::variational_form, Estimator::noiseless_projection,
                        Estimator::variance_like, Estimator::rule_mc})
        EXPECT_EQ(estimator_from_tag(estimator_tag(e)), e);
    EXPECT_FALSE(estimator_from_tag("bogus").has_value());
}
