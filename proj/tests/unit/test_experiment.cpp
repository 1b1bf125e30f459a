#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "linrule/csv.hpp"
#include "linrule/errors.hpp"
#include "linrule/experiment.hpp"

using namespace linrule;

namespace {

ExperimentConfig single_point() {
    ExperimentConfig c;
    c.grid.d = {200};
    c.grid.n = {50};
    c.grid.alpha = {1.0};
    c.grid.r = {0.5};
    c.grid.rho2 = {1.0};
    c.grid.sigma2 = {0.5};
    c.grid.kappa = {3.0};
    c.reps = 30;
    c.test_points = 8;
    c.seed = 42;
    return c;
}

std::vector<std::string> column(const CsvTable& t, std::string_view name) {
    std::vector<std::string> out;
    for (const auto& row : t.rows) out.push_back(row[t.column(name)]);
    return out;
}

}  // namespace

TEST(Csv, NumberFormatRoundTrips) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::exp(u(gen)) * (i % 2 ? -1.0 : 1.0);
        EXPECT_EQ(parse_number(format_number(x)), x);
    }
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_TRUE(std::isinf(parse_number("-inf")));
    EXPECT_THROW((void)parse_number("1.0x"), ConfigError);
}

TEST(Csv, QuotesFieldsWithCommas) {
    const CsvTable t{{"rule", "mean"}, {{"gd:eta=0.5,steps=20", "1"}, {"say \"hi\"", "2"}}};
    const std::string text = to_csv(t);
    EXPECT_EQ(text, "rule,mean\n\"gd:eta=0.5,steps=20\",1\n\"say \"\"hi\"\"\",2\n");
    const CsvTable back = parse_csv(text);
    EXPECT_EQ(back.header, t.header);
    EXPECT_EQ(back.rows, t.rows);
    EXPECT_THROW((void)parse_csv("a,b\n1\n"), ConfigError);
}

TEST(Config, RoundTripsLosslessly) {
    ExperimentConfig c = single_point();
    c.grid.spectra = {{1.0, 0.3, 0.1}, {2.0, 2.0}};
    c.grid.sigma2 = {0.0, 0.1, 1.0 / 3.0};
    c.rules = {"optimal", "gd:eta=0.5,steps=20"};
    c.lambda_factors = {0.1, 10.0};
    c.fixed_targets = {"inverse_eigen"};
    c.law = "latent";
    c.seed = 18446744073709551615ULL;
    c.workers = 3;
    EXPECT_EQ(parse_config(dump_config(c)), c);
    EXPECT_EQ(dump_config(parse_config(dump_config(c))), dump_config(c));
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW((void)parse_config("{"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"bogus": 1})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"grid": {"m": [1]}})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"grid": {"d": [-5]}})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"grid": {"d": "200"}})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"reps": 0})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"rules": ["lasso"]})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"law": "cauchy"})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"theorems": ["thm9"]})"), ConfigError);
    EXPECT_THROW((void)parse_config(R"({"grid": {"spectra": [[1, 2]]}})"), ConfigError);
    EXPECT_NO_THROW((void)parse_config("{}"));
}

TEST(Config, HashIgnoresWorkersAndOutput) {
    ExperimentConfig a = single_point(), b = single_point();
    b.workers = 8;
    b.output = "elsewhere";
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    b.seed = 43;
    EXPECT_NE(config_hash(a), config_hash(b));
    const auto manifest = nlohmann::json::parse(manifest_json(a));
    EXPECT_EQ(manifest.at("config_hash"), config_hash(a));
    EXPECT_EQ(manifest.at("seed"), 42u);
    EXPECT_TRUE(manifest.at("versions").contains("eigen"));
}

TEST(Experiment, EmptyGridGivesHeadersOnly) {
    ExperimentConfig c = single_point();
    c.grid.n.clear();
    const CsvTable b = bounds_table(c), r = optimal_risk_table(c);
    EXPECT_TRUE(b.rows.empty());
    EXPECT_TRUE(r.rows.empty());
    EXPECT_EQ(to_csv(b), "theorem,d,n,alpha,r,rho2,sigma2,kappa,lower,upper,lambda_lower,lambda_upper,k_star\n");
    EXPECT_EQ(to_csv(r), "estimator,d,n,alpha,r,rho2,sigma2,rule,mean,std_error,reps\n");
    EXPECT_TRUE(verify(b, r).empty());
}

TEST(Experiment, SinglePointRowsAndVerdicts) {
    const ExperimentConfig c = single_point();
    const CsvTable b = bounds_table(c);
    EXPECT_EQ(column(b, "theorem"), (std::vector<std::string>{"thm2", "thm3", "thm4", "thm5", "cor1", "thm6", "ex4", "lowdim"}));
    const CsvTable r = optimal_risk_table(c);
    EXPECT_EQ(column(r, "estimator"),
              (std::vector<std::string>{"matrix_form", "variational_form", "noiseless_projection", "variance_like"}));
    const auto verdicts = verify(b, r);
    std::set<std::string> ids;
    for (const auto& v : verdicts) {
        ids.insert(v.inequality);
        EXPECT_TRUE(v.pass) << v.inequality << " " << v.margin;
    }
    EXPECT_EQ(ids, (std::set<std::string>{"thm2_lower", "thm2_upper", "thm5_lower", "thm5_upper", "thm6_lower",
                                          "thm6_upper", "prop1_equality"}));
}

TEST(Experiment, ByteIdenticalAcrossRunsAndWorkers) {
    ExperimentConfig c = single_point();
    c.rules = {"ridge:lambda=0.01", "nw:h=3"};
    c.lambda_factors = {0.5, 2.0};
    c.fixed_targets = {"inverse_eigen"};
    const std::string a = to_csv(optimal_risk_table(c)) + to_csv(rule_risk_table(c));
    c.workers = 3;
    const std::string b = to_csv(optimal_risk_table(c)) + to_csv(rule_risk_table(c));
    EXPECT_EQ(a, b);
    EXPECT_EQ(to_csv(bounds_table(c)), to_csv(bounds_table(c)));
}

TEST(Verify, IsotropicNoiselessPassesWithInfiniteMargin) {
    ExperimentConfig c;
    c.grid.spectra = {std::vector<double>(10, 1.0)};
    c.grid.n = {2};
    c.grid.r = {0.5};
    c.grid.rho2 = {10.0};
    c.grid.sigma2 = {0.0};
    c.theorems = {"thm5"};
    c.estimators = {"noiseless_projection"};
    c.reps = 20;
    const auto verdicts = verify(bounds_table(c), optimal_risk_table(c));
    ASSERT_EQ(verdicts.size(), 2u);
    EXPECT_EQ(verdicts[0].inequality, "thm5_lower");
    EXPECT_DOUBLE_EQ(verdicts[0].estimate, 8.0);
    EXPECT_NEAR(verdicts[0].bound, 7.5, 1e-12);
    EXPECT_TRUE(std::isinf(verdicts[0].margin) && verdicts[0].margin > 0);
    EXPECT_TRUE(verdicts[0].pass && verdicts[1].pass);
}

TEST(Verify, FabricatedViolationFails) {
    const CsvTable bounds{bounds_header(),
                          {{"thm2", "10", "5", "1", "0.5", "1", "0.5", "3", "0.4", "0.6", "0.1", "0.7", ""},
                           {"thm5", "10", "5", "1", "0.5", "1", "0.5", "3", "not_applicable", "not_applicable", "", "", ""}}};
    const CsvTable risk{risk_header(), {{"matrix_form", "10", "5", "1", "0.5", "1", "0.5", "optimal", "0.3", "0.01", "100"}}};
    const auto verdicts = verify(bounds, risk);
    ASSERT_EQ(verdicts.size(), 2u);
    EXPECT_EQ(verdicts[0].inequality, "thm2_lower");
    EXPECT_NEAR(verdicts[0].margin, -10.0, 1e-9);
    EXPECT_FALSE(verdicts[0].pass);
    EXPECT_TRUE(verdicts[1].pass);
}

TEST(Verify, KeyMismatchIsConfigError) {
    const CsvTable bounds{bounds_header(), {{"thm2", "10", "5", "1", "0.5", "1", "0.5", "3", "0.4", "0.6", "0.1", "0.7", ""}}};
    const CsvTable risk{risk_header(), {{"matrix_form", "10", "6", "1", "0.5", "1", "0.5", "optimal", "0.5", "0.01", "100"}}};
    EXPECT_THROW((void)verify(bounds, risk), ConfigError);
}

TEST(Verify, OptimalLambdaAndFixedTargetVerdicts) {
    const CsvTable bounds{bounds_header(), {{"thm4", "10", "5", "1", "0.5", "1", "0.5", "3", "0.1", "inf", "", "", ""}}};
    const CsvTable risk{risk_header(),
                        {{"rule_mc", "10", "5", "1", "0.5", "1", "0.5", "ridge:lambda=0.1,transformed=1", "1.0", "0.01", "10"},
                         {"rule_mc", "10", "5", "1", "0.5", "1", "0.5", "ridge:lambda=1,transformed=1", "0.9", "0.01", "10"},
                         {"rule_mc", "10", "5", "1", "0.5", "1", "0.5", "minnorm|target=ones", "2.0", "0.1", "10"},
                         {"matrix_form", "10", "5", "1", "0.5", "1", "0.5", "optimal|target=ones", "1.5", "0.1", "10"}}};
    const auto verdicts = verify(bounds, risk);
    ASSERT_EQ(verdicts.size(), 2u);
    EXPECT_EQ(verdicts[0].inequality, "optimal_lambda");
    EXPECT_FALSE(verdicts[0].pass);
    EXPECT_EQ(verdicts[1].inequality, "prop8");
    EXPECT_TRUE(verdicts[1].pass);
}

TEST(Experiment, DefaultConfigCoversEveryVerdict) {
    ExperimentConfig c = load_config(std::string(LINRULE_CONFIG_DIR) + "/default.json");
    c.reps = 8;
    c.test_points = 4;
    CsvTable risk = optimal_risk_table(c);
    const CsvTable rules = rule_risk_table(c);
    risk.rows.insert(risk.rows.end(), rules.rows.begin(), rules.rows.end());
    std::set<std::string> ids;
    for (const auto& v : verify(bounds_table(c), risk)) ids.insert(v.inequality);
    for (const char* id : {"thm2_lower", "thm2_upper", "thm3", "thm5_lower", "thm5_upper", "thm6_lower", "thm6_upper",
                           "prop8", "prop1_equality", "optimal_lambda", "cor1"})
        EXPECT_TRUE(ids.count(id)) << id;
}
