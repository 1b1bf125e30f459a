#include "linrule/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "linrule/bounds.hpp"
#include "linrule/errors.hpp"
#include "linrule/risk.hpp"
#include "linrule/rules.hpp"
#include "linrule/sampler.hpp"
#include "linrule/spectra.hpp"

namespace linrule {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::string_view kNotApplicable = "not_applicable";
constexpr std::string_view kTargetSuffix = "|target=";

const std::vector<std::string> kAllTheorems{"thm2", "thm3", "thm4", "thm5", "cor1", "thm6", "ex4", "lowdim"};
const std::vector<std::string> kOptimalEstimators{"matrix_form", "variational_form", "noiseless_projection",
                                                  "variance_like"};
const std::vector<std::string> kFixedTargets{"inverse_eigen", "ones"};

// ---- config JSON -----------------------------------------------------------

template <class T>
T read_value(const json& j, std::string_view key) {
    try {
        if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
            if (!j.is_number_unsigned()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, double>) {
            if (!j.is_number()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!j.is_string()) throw ConfigError("");
        }
        return j.get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config: field \"" + std::string(key) + "\" has the wrong type: " + j.dump());
    }
}

template <class T>
std::vector<T> read_list(const json& j, std::string_view key) {
    if (!j.is_array()) throw ConfigError("config: field \"" + std::string(key) + "\" must be a list");
    std::vector<T> out;
    out.reserve(j.size());
    for (const auto& item : j) out.push_back(read_value<T>(item, key));
    return out;
}

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw ConfigError("config: " + std::string(where) + " must be an object");
    for (const auto& [key, value] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("config: unknown key \"" + key + "\" in " + std::string(where));
}

bool contains(const std::vector<std::string>& list, std::string_view item) {
    return std::find(list.begin(), list.end(), item) != list.end();
}

// ---- grid ------------------------------------------------------------------

struct BasePoint {
    Spectrum spectrum;
    std::optional<double> alpha;  // empty for explicit spectra
};

struct GridPoint {
    const BasePoint* base;
    std::size_t n;
    double r;
    double rho2;
    double sigma2;

    [[nodiscard]] std::size_t d() const { return base->spectrum.dim(); }
    [[nodiscard]] SourcePrior prior() const { return {r, rho2}; }
    [[nodiscard]] std::string alpha_text() const {
        return base->alpha ? format_number(*base->alpha) : std::string("explicit");
    }
    [[nodiscard]] std::vector<std::string> key_fields() const {
        return {std::to_string(d()), std::to_string(n), alpha_text(), format_number(r), format_number(rho2),
                format_number(sigma2)};
    }
};

std::vector<BasePoint> base_points(const ExperimentConfig& c) {
    std::vector<BasePoint> out;
    if (!c.grid.spectra.empty()) {
        for (const auto& values : c.grid.spectra) out.push_back({Spectrum(values), std::nullopt});
        return out;
    }
    for (std::size_t d : c.grid.d)
        for (double alpha : c.grid.alpha) out.push_back({capacity_spectrum(d, alpha), alpha});
    return out;
}

template <class Visit>
void for_each_point(const ExperimentConfig& c, const std::vector<BasePoint>& bases, Visit&& visit) {
    for (const auto& base : bases)
        for (std::size_t n : c.grid.n)
            for (double r : c.grid.r)
                for (double rho2 : c.grid.rho2)
                    for (double sigma2 : c.grid.sigma2) visit(GridPoint{&base, n, r, rho2, sigma2});
}

CovariateLaw make_law(std::string_view name, const Spectrum& s) {
    switch (parse_law(name)) {
    case LawKind::gaussian: return CovariateLaw::gaussian(s);
    case LawKind::isotropic_latent: return CovariateLaw::latent(s);
    case LawKind::adversarial_discrete: return CovariateLaw::adversarial_matched(s);
    }
    throw ConfigError("config: unknown law");
}

NoiseModel noise_model(const ExperimentConfig& c, const Spectrum& effective, double sigma2, double kappa) {
    // Under the matched discrete law |X|^2 = Tr(S) on every draw.
    if (parse_law(c.law) == LawKind::adversarial_discrete) return NoiseModel::bounded_support(sigma2, effective.trace());
    return NoiseModel::from_kurtosis(sigma2, effective, kappa);
}

FixedTarget named_target(std::string_view name, const Spectrum& base) {
    FixedTarget t;
    t.coords.resize(base.dim());
    for (std::size_t j = 0; j < base.dim(); ++j) {
        if (name == "inverse_eigen") t.coords[j] = 1.0 / std::sqrt(base[j]);
        else if (name == "ones") t.coords[j] = 1.0;
        else throw ConfigError("config: unknown fixed target \"" + std::string(name) + "\"");
    }
    return t;
}

McOptions mc_options(const ExperimentConfig& c) { return {c.reps, c.test_points, c.seed, c.workers}; }

std::vector<std::string> bound_row(const GridPoint& p, double kappa, std::string_view theorem,
                                   const std::optional<BoundReport>& report, bool with_lambdas = true) {
    auto row = p.key_fields();
    row.insert(row.begin(), std::string(theorem));
    row.push_back(format_number(kappa));
    if (!report) {
        row.insert(row.end(), {std::string(kNotApplicable), std::string(kNotApplicable), "", "", ""});
        return row;
    }
    row.push_back(format_number(report->lower));
    row.push_back(format_number(report->upper));
    row.push_back(with_lambdas ? format_number(report->lambda_lower) : std::string());
    row.push_back(with_lambdas ? format_number(report->lambda_upper) : std::string());
    row.push_back(report->k_star ? std::to_string(*report->k_star) : std::string());
    return row;
}

std::optional<BoundReport> evaluate_bound(std::string_view tag, const GridPoint& p, const Spectrum& effective,
                                          const NoiseModel& noise, double kappa) {
    const std::size_t n = p.n;
    const double lambda = p.sigma2 / static_cast<double>(n);
    const double lambda0 = noise.lh2 / static_cast<double>(n);
    auto one_sided = [&](std::optional<double> lower, Theorem th) -> std::optional<BoundReport> {
        if (!lower) return std::nullopt;
        BoundReport r;
        r.theorem = th;
        r.lower = *lower;
        r.upper = kInf;
        r.lambda_lower = lambda;
        r.lambda_upper = lambda0;
        return r;
    };
    switch (*theorem_from_tag(tag)) {
    case Theorem::noisy_sandwich: return noisy_sandwich(effective, n, noise);
    case Theorem::variance_lower:
        return one_sided(variance_lower_bound(effective, n, noise), Theorem::variance_lower);
    case Theorem::sup_variance_lower:
        return one_sided(sup_variance_lower_bound(effective, n, noise), Theorem::sup_variance_lower);
    case Theorem::noiseless_sandwich: return noiseless_sandwich(effective, n);
    case Theorem::capacity_noiseless:
        if (!p.base->alpha) return std::nullopt;
        return capacity_noiseless(effective, n, 2.0 * *p.base->alpha * p.r);
    case Theorem::fast_decay_sandwich:
        if (n < 2 || effective.dim() < n) return std::nullopt;
        return fast_decay_sandwich(effective, n);
    case Theorem::capacity_rate: {
        if (!p.base->alpha) return std::nullopt;
        const auto rate = capacity_rate(*p.base->alpha, p.r, p.rho2, p.sigma2, kappa, n);
        if (!rate) return std::nullopt;
        BoundReport r;
        r.theorem = Theorem::capacity_rate;
        r.lower = *rate;
        r.upper = *rate;
        return r;
    }
    case Theorem::underparam_upper: {
        const auto upper = underparam_upper_bound(effective, n, p.sigma2);
        if (!upper) return std::nullopt;
        BoundReport r;
        r.theorem = Theorem::underparam_upper;
        r.lower = 0.0;
        r.upper = *upper;
        r.lambda_lower = lambda;
        r.lambda_upper = lambda;
        return r;
    }
    }
    return std::nullopt;
}

std::vector<std::string> risk_row(const GridPoint& p, std::string_view estimator, const std::string& rule,
                                  const RiskEstimate& e) {
    auto key = p.key_fields();
    std::vector<std::string> row{std::string(estimator)};
    row.insert(row.end(), key.begin(), key.end());
    row.push_back(rule);
    row.push_back(format_number(e.mean));
    row.push_back(format_number(e.std_error));
    row.push_back(std::to_string(e.reps));
    return row;
}

// ---- verification ----------------------------------------------------------

struct RiskRow {
    std::string estimator;
    std::string rule;
    double mean;
    double se;
};

std::string point_label(const std::vector<std::string>& key, const std::optional<std::string>& kappa) {
    static const std::array<std::string_view, 6> names{"d", "n", "alpha", "r", "rho2", "sigma2"};
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) out += fmt::format("{}{}={}", i ? ";" : "", names[i], key[i]);
    if (kappa) out += ";kappa=" + *kappa;
    return out;
}

double margin_of(double slack, double se, double estimate, double bound) {
    if (se > 0.0 && std::isfinite(se)) return slack / se;
    if (!std::isfinite(se)) return slack >= 0.0 ? 0.0 : -kInf;
    // Zero std error: the estimate is exact; compare with a relative round-off allowance.
    const double scale = std::max(std::abs(estimate), std::isfinite(bound) ? std::abs(bound) : 0.0);
    return slack >= -1e-12 * scale ? kInf : -kInf;
}

VerificationVerdict make_verdict(std::string point, std::string inequality, double estimate, double bound, double se,
                                 double slack) {
    VerificationVerdict v;
    v.point = std::move(point);
    v.inequality = std::move(inequality);
    v.estimate = estimate;
    v.bound = bound;
    v.std_error = se;
    v.margin = margin_of(slack, se, estimate, bound);
    v.pass = v.margin >= kPassMargin;
    return v;
}

const RiskRow* find_row(const std::vector<RiskRow>& rows, std::string_view estimator, std::string_view rule) {
    for (const auto& r : rows)
        if (r.estimator == estimator && r.rule == rule) return &r;
    return nullptr;
}

std::optional<RuleSpec> try_parse_rule(std::string_view text) {
    try {
        return RuleSpec::parse(text);
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
}

}  // namespace

// ---- config ------------------------------------------------------------------

void ExperimentConfig::validate() const {
    for (std::size_t d : grid.d)
        if (d < 1) throw ConfigError("config: d must be >= 1");
    for (std::size_t n : grid.n)
        if (n < 1) throw ConfigError("config: n must be >= 1");
    for (double a : grid.alpha)
        if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("config: alpha must be finite and >= 0");
    for (double r : grid.r)
        for (double rho2 : grid.rho2) {
            try {
                SourcePrior{r, rho2}.validate();
            } catch (const InvalidArgument& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
        }
    for (double s : grid.sigma2)
        if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("config: sigma2 must be finite and >= 0");
    for (double k : grid.kappa)
        if (!(k >= 1.0) || !std::isfinite(k)) throw ConfigError("config: kappa must be finite and >= 1");
    for (const auto& values : grid.spectra) {
        try {
            (void)Spectrum(values);
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("config: explicit spectrum: ") + e.what());
        }
    }
    for (const auto& t : theorems)
        if (!theorem_from_tag(t)) throw ConfigError("config: unknown theorem \"" + t + "\"");
    for (const auto& e : estimators)
        if (!contains(kOptimalEstimators, e)) throw ConfigError("config: unknown estimator \"" + e + "\"");
    for (const auto& r : rules) {
        try {
            (void)RuleSpec::parse(r);
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("config: rule: ") + e.what());
        }
    }
    for (double f : lambda_factors)
        if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("config: lambda_factors must be finite and > 0");
    for (const auto& t : fixed_targets)
        if (!contains(kFixedTargets, t)) throw ConfigError("config: unknown fixed target \"" + t + "\"");
    try {
        (void)parse_law(law);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (reps < 1) throw ConfigError("config: reps must be >= 1");
    if (test_points < 1) throw ConfigError("config: test_points must be >= 1");
}

void to_json(json& j, const ExperimentConfig& c) {
    json grid{{"d", c.grid.d},         {"n", c.grid.n},         {"alpha", c.grid.alpha},
              {"spectra", c.grid.spectra}, {"r", c.grid.r},       {"rho2", c.grid.rho2},
              {"sigma2", c.grid.sigma2}, {"kappa", c.grid.kappa}};
    j = json{{"grid", std::move(grid)},
             {"theorems", c.theorems},
             {"estimators", c.estimators},
             {"rules", c.rules},
             {"lambda_factors", c.lambda_factors},
             {"fixed_targets", c.fixed_targets},
             {"law", c.law},
             {"reps", c.reps},
             {"test_points", c.test_points},
             {"seed", c.seed},
             {"workers", c.workers},
             {"output", c.output}};
}

void from_json(const json& j, ExperimentConfig& c) {
    check_keys(j, "config", {"grid", "theorems", "estimators", "rules", "lambda_factors", "fixed_targets", "law",
                             "reps", "test_points", "seed", "workers", "output"});
    ExperimentConfig out;
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, "grid", {"d", "n", "alpha", "spectra", "r", "rho2", "sigma2", "kappa"});
        if (g.contains("d")) out.grid.d = read_list<std::size_t>(g.at("d"), "d");
        if (g.contains("n")) out.grid.n = read_list<std::size_t>(g.at("n"), "n");
        if (g.contains("alpha")) out.grid.alpha = read_list<double>(g.at("alpha"), "alpha");
        if (g.contains("spectra")) {
            const json& s = g.at("spectra");
            if (!s.is_array()) throw ConfigError("config: field \"spectra\" must be a list of lists");
            for (const auto& item : s) out.grid.spectra.push_back(read_list<double>(item, "spectra"));
        }
        if (g.contains("r")) out.grid.r = read_list<double>(g.at("r"), "r");
        if (g.contains("rho2")) out.grid.rho2 = read_list<double>(g.at("rho2"), "rho2");
        if (g.contains("sigma2")) out.grid.sigma2 = read_list<double>(g.at("sigma2"), "sigma2");
        if (g.contains("kappa")) out.grid.kappa = read_list<double>(g.at("kappa"), "kappa");
    }
    if (j.contains("theorems")) out.theorems = read_list<std::string>(j.at("theorems"), "theorems");
    if (j.contains("estimators")) out.estimators = read_list<std::string>(j.at("estimators"), "estimators");
    if (j.contains("rules")) out.rules = read_list<std::string>(j.at("rules"), "rules");
    if (j.contains("lambda_factors")) out.lambda_factors = read_list<double>(j.at("lambda_factors"), "lambda_factors");
    if (j.contains("fixed_targets")) out.fixed_targets = read_list<std::string>(j.at("fixed_targets"), "fixed_targets");
    if (j.contains("law")) out.law = read_value<std::string>(j.at("law"), "law");
    if (j.contains("reps")) out.reps = read_value<std::size_t>(j.at("reps"), "reps");
    if (j.contains("test_points")) out.test_points = read_value<std::size_t>(j.at("test_points"), "test_points");
    if (j.contains("seed")) out.seed = read_value<std::uint64_t>(j.at("seed"), "seed");
    if (j.contains("workers")) out.workers = read_value<std::size_t>(j.at("workers"), "workers");
    if (j.contains("output")) out.output = read_value<std::string>(j.at("output"), "output");
    out.validate();
    c = std::move(out);
}

ExperimentConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return j.get<ExperimentConfig>();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_config(text);
}

std::string dump_config(const ExperimentConfig& c) { return json(c).dump(2) + "\n"; }

std::string config_hash(const ExperimentConfig& c) {
    ExperimentConfig canonical = c;
    canonical.workers = 0;
    canonical.output.clear();
    const std::string text = json(canonical).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

// ---- tables ------------------------------------------------------------------

const std::vector<std::string>& bounds_header() {
    static const std::vector<std::string> h{"theorem", "d",     "n",     "alpha",        "r",
                                            "rho2",    "sigma2", "kappa", "lower",        "upper",
                                            "lambda_lower", "lambda_upper", "k_star"};
    return h;
}

const std::vector<std::string>& risk_header() {
    static const std::vector<std::string> h{"estimator", "d",    "n",         "alpha", "r",   "rho2",
                                            "sigma2",    "rule", "mean",      "std_error", "reps"};
    return h;
}

const std::vector<std::string>& verdict_header() {
    static const std::vector<std::string> h{"point", "inequality", "estimate", "bound", "std_error", "margin", "pass"};
    return h;
}

CsvTable bounds_table(const ExperimentConfig& c) {
    c.validate();
    CsvTable table{bounds_header(), {}};
    const auto bases = base_points(c);
    for_each_point(c, bases, [&](const GridPoint& p) {
        const Spectrum effective = effective_spectrum(p.base->spectrum, p.prior());
        for (double kappa : c.grid.kappa) {
            const NoiseModel noise = noise_model(c, effective, p.sigma2, kappa);
            for (const auto& tag : kAllTheorems) {
                if (!contains(c.theorems, tag)) continue;
                const auto report = evaluate_bound(tag, p, effective, noise, kappa);
                table.rows.push_back(bound_row(p, kappa, tag, report, tag != "ex4"));
            }
        }
    });
    return table;
}

CsvTable optimal_risk_table(const ExperimentConfig& c) {
    c.validate();
    CsvTable table{risk_header(), {}};
    const auto bases = base_points(c);
    const McOptions opts = mc_options(c);
    for_each_point(c, bases, [&](const GridPoint& p) {
        const Spectrum effective = effective_spectrum(p.base->spectrum, p.prior());
        const ProblemInstance problem(effective, p.n, p.sigma2, make_law(c.law, effective));
        for (const auto& name : kOptimalEstimators) {
            if (!contains(c.estimators, name)) continue;
            if (name == "matrix_form") {
                if (p.sigma2 > 0.0) table.rows.push_back(risk_row(p, name, "optimal", optimal_risk_matrix_form(problem, opts)));
            } else if (name == "variational_form") {
                table.rows.push_back(risk_row(p, name, "optimal", optimal_risk_variational_form(problem, opts)));
            } else if (name == "noiseless_projection") {
                table.rows.push_back(risk_row(p, name, "optimal", optimal_risk_noiseless(problem, opts)));
            } else {
                table.rows.push_back(risk_row(p, name, "optimal", variance_like_term(problem, opts)));
            }
        }
    });
    return table;
}

CsvTable rule_risk_table(const ExperimentConfig& c) {
    c.validate();
    CsvTable table{risk_header(), {}};
    const auto bases = base_points(c);
    const McOptions opts = mc_options(c);
    const std::string tag(estimator_tag(Estimator::rule_mc));

    std::vector<RuleSpec> rules;
    for (const auto& text : c.rules) rules.push_back(RuleSpec::parse(text));

    for_each_point(c, bases, [&](const GridPoint& p) {
        const Spectrum& base = p.base->spectrum;
        const ProblemInstance problem(base, p.n, p.sigma2, make_law(c.law, base));
        for (const auto& rule : rules)
            table.rows.push_back(risk_row(p, tag, rule.to_string(), rule_excess_risk(problem, rule, p.prior(), opts)));

        if (!c.lambda_factors.empty() && p.sigma2 > 0.0) {
            std::vector<double> factors = c.lambda_factors;
            factors.push_back(1.0);
            std::sort(factors.begin(), factors.end());
            factors.erase(std::unique(factors.begin(), factors.end()), factors.end());
            const double lambda_star = p.sigma2 / static_cast<double>(p.n);
            for (double f : factors) {
                RuleSpec ridge;
                ridge.kind = RuleKind::ridge;
                ridge.lambda = f == 1.0 ? lambda_star : f * lambda_star;
                ridge.transformed = true;
                table.rows.push_back(
                    risk_row(p, tag, ridge.to_string(), rule_excess_risk(problem, ridge, p.prior(), opts)));
            }
        }

        for (const auto& name : c.fixed_targets) {
            const FixedTarget target = named_target(name, base);
            const std::string suffix = std::string(kTargetSuffix) + name;
            for (const auto& rule : rules) {
                if (rule.kind == RuleKind::optimal || rule.transformed) continue;
                table.rows.push_back(
                    risk_row(p, tag, rule.to_string() + suffix, rule_excess_risk(problem, rule, target, opts)));
            }
            const Spectrum sigma_theta = sigma_theta_spectrum(base, target);
            const ProblemInstance reference(sigma_theta, p.n, p.sigma2, make_law(c.law, sigma_theta));
            if (p.sigma2 > 0.0)
                table.rows.push_back(risk_row(p, "matrix_form", "optimal" + suffix,
                                              optimal_risk_matrix_form(reference, opts)));
            else
                table.rows.push_back(risk_row(p, "noiseless_projection", "optimal" + suffix,
                                              optimal_risk_noiseless(reference, opts)));
        }
    });
    return table;
}

// ---- verification ------------------------------------------------------------

std::vector<VerificationVerdict> verify(const CsvTable& bounds, const CsvTable& risk) {
    static const std::array<std::string_view, 6> key_columns{"d", "n", "alpha", "r", "rho2", "sigma2"};
    auto key_of = [](const CsvTable& t, const std::vector<std::string>& row) {
        std::vector<std::string> key;
        for (auto name : key_columns) key.push_back(row[t.column(name)]);
        return key;
    };

    std::map<std::vector<std::string>, std::vector<RiskRow>> by_point;
    std::vector<std::vector<std::string>> risk_order;
    for (const auto& row : risk.rows) {
        auto key = key_of(risk, row);
        auto [it, inserted] = by_point.try_emplace(key);
        if (inserted) risk_order.push_back(key);
        it->second.push_back({row[risk.column("estimator")], row[risk.column("rule")],
                              parse_number(row[risk.column("mean")]), parse_number(row[risk.column("std_error")])});
    }
    std::set<std::vector<std::string>> bound_keys;
    for (const auto& row : bounds.rows) bound_keys.insert(key_of(bounds, row));
    for (const auto& key : bound_keys)
        if (!by_point.count(key)) throw ConfigError("verify: no risk rows for grid point " + point_label(key, {}));
    for (const auto& key : risk_order)
        if (!bound_keys.count(key)) throw ConfigError("verify: no bounds rows for grid point " + point_label(key, {}));

    std::vector<VerificationVerdict> out;
    const auto lower_col = bounds.column("lower");
    const auto upper_col = bounds.column("upper");
    const auto theorem_col = bounds.column("theorem");
    const auto kappa_col = bounds.column("kappa");
    for (const auto& row : bounds.rows) {
        if (row[lower_col] == kNotApplicable) continue;
        const auto key = key_of(bounds, row);
        const auto& rows = by_point.at(key);
        const std::string label = point_label(key, row[kappa_col]);
        const std::string& theorem = row[theorem_col];
        const double lower = parse_number(row[lower_col]);
        const double upper = parse_number(row[upper_col]);

        const RiskRow* est = nullptr;
        std::string id = theorem;
        bool two_sided = false;
        if (theorem == "thm2") {
            est = find_row(rows, "matrix_form", "optimal");
            if (!est) est = find_row(rows, "variational_form", "optimal");
            two_sided = true;
        } else if (theorem == "thm3") {
            est = find_row(rows, "variance_like", "optimal");
        } else if (theorem == "thm5" || theorem == "thm6") {
            est = find_row(rows, "noiseless_projection", "optimal");
            two_sided = true;
        } else if (theorem == "cor1") {
            est = find_row(rows, "noiseless_projection", "optimal");
        } else {
            continue;
        }
        if (!est) continue;
        if (two_sided) {
            out.push_back(make_verdict(label, id + "_lower", est->mean, lower, est->se, est->mean - lower));
            out.push_back(make_verdict(label, id + "_upper", est->mean, upper, est->se, upper - est->mean));
        } else {
            out.push_back(make_verdict(label, id, est->mean, lower, est->se, est->mean - lower));
        }
    }

    for (const auto& key : risk_order) {
        const auto& rows = by_point.at(key);
        const std::string label = point_label(key, {});
        const double n = parse_number(key[1]);
        const double sigma2 = parse_number(key[5]);

        const RiskRow* matrix = find_row(rows, "matrix_form", "optimal");
        const RiskRow* variational = find_row(rows, "variational_form", "optimal");
        if (matrix && variational) {
            const double se = std::hypot(matrix->se, variational->se);
            const double gap = std::abs(matrix->mean - variational->mean);
            out.push_back(make_verdict(label, "prop1_equality", matrix->mean, variational->mean, se, -gap));
        }

        const RiskRow* star = nullptr;
        std::vector<const RiskRow*> others;
        for (const auto& r : rows) {
            if (r.estimator != "rule_mc" || r.rule.find(kTargetSuffix) != std::string::npos) continue;
            const auto spec = try_parse_rule(r.rule);
            if (!spec || spec->kind != RuleKind::ridge || !spec->transformed) continue;
            if (sigma2 > 0.0 && spec->lambda == sigma2 / n) star = &r;
            else others.push_back(&r);
        }
        if (star)
            for (const RiskRow* other : others)
                out.push_back(make_verdict(label, "optimal_lambda", star->mean, other->mean,
                                           std::hypot(star->se, other->se), other->mean - star->mean));

        for (const auto& r : rows) {
            if (r.estimator != "rule_mc") continue;
            const auto at = r.rule.find(kTargetSuffix);
            if (at == std::string::npos) continue;
            const std::string reference_rule = "optimal" + r.rule.substr(at);
            const RiskRow* ref = find_row(rows, "matrix_form", reference_rule);
            if (!ref) ref = find_row(rows, "noiseless_projection", reference_rule);
            if (!ref) continue;
            out.push_back(make_verdict(label, "prop8", r.mean, ref->mean, std::hypot(r.se, ref->se), r.mean - ref->mean));
        }
    }
    return out;
}

CsvTable verdict_table(const std::vector<VerificationVerdict>& verdicts) {
    CsvTable table{verdict_header(), {}};
    for (const auto& v : verdicts)
        table.rows.push_back({v.point, v.inequality, format_number(v.estimate), format_number(v.bound),
                              format_number(v.std_error), format_number(v.margin), v.pass ? "true" : "false"});
    return table;
}

std::string library_version() { return LINRULE_VERSION; }

std::string manifest_json(const ExperimentConfig& c) {
    json versions{
        {"linrule", LINRULE_VERSION},
        {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
        {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                      NLOHMANN_JSON_VERSION_PATCH)},
        {"fmt", fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100)},
        {"boost", fmt::format("{}.{}.{}", BOOST_VERSION / 100000, BOOST_VERSION / 100 % 1000, BOOST_VERSION % 100)},
    };
    // Worker count and output path do not affect results and stay out of the manifest.
    json config = c;
    config.erase("workers");
    config.erase("output");
    json m{{"config_hash", config_hash(c)}, {"seed", c.seed}, {"versions", std::move(versions)}, {"config", std::move(config)}};
    return m.dump(2) + "\n";
}

}  // namespace linrule
