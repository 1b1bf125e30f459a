#include "linrule/rules.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "linrule/errors.hpp"

namespace linrule {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view key, std::string_view text) {
    try {
        std::size_t used = 0;
        const std::string owned(text);
        const double v = std::stod(owned, &used);
        if (used != owned.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("rule parameter " + std::string(key) + ": cannot parse \"" + std::string(text) + "\"");
    }
}

RuleKind parse_kind(std::string_view name) {
    if (name == "optimal") return RuleKind::optimal;
    if (name == "ridge") return RuleKind::ridge;
    if (name == "minnorm" || name == "min_norm") return RuleKind::min_norm;
    if (name == "gf" || name == "gradient_flow") return RuleKind::gradient_flow;
    if (name == "gd" || name == "gradient_descent") return RuleKind::gradient_descent;
    if (name == "nw" || name == "nadaraya_watson") return RuleKind::nadaraya_watson;
    throw InvalidArgument("unknown rule kind \"" + std::string(name) + "\"");
}

// (1 - e^{-t s}) / s, with the s -> 0 limit t.
double flow_filter(double s, double t) {
    if (s == 0.0) return t;
    return -std::expm1(-t * s) / s;
}

// eta * sum_{m < K} (1 - eta s)^m = (1 - (1 - eta s)^K) / s.
double descent_filter(double s, double eta, std::size_t steps) {
    const double k = static_cast<double>(steps);
    if (s == 0.0) return eta * k;
    const double q = eta * s;
    if (q < 1.0) return -std::expm1(k * std::log1p(-q)) / s;
    return (1.0 - std::pow(1.0 - q, k)) / s;
}

}  // namespace

RuleSpec RuleSpec::parse(std::string_view text) {
    text = trim(text);
    RuleSpec spec;
    const auto colon = text.find(':');
    spec.kind = parse_kind(trim(text.substr(0, colon)));
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view item = trim(rest.substr(0, comma));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string_view::npos) throw InvalidArgument("rule parameter without value: \"" + std::string(item) + "\"");
            const std::string_view key = trim(item.substr(0, eq));
            const std::string_view value = trim(item.substr(eq + 1));
            if (key == "lambda") spec.lambda = parse_number(key, value);
            else if (key == "t") spec.t = parse_number(key, value);
            else if (key == "eta") spec.eta = parse_number(key, value);
            else if (key == "h") spec.h = parse_number(key, value);
            else if (key == "steps") {
                const double steps = parse_number(key, value);
                if (steps < 0 || steps != std::floor(steps)) throw InvalidArgument("rule parameter steps must be a nonnegative integer");
                spec.steps = static_cast<std::size_t>(steps);
            } else if (key == "transformed") {
                spec.transformed = value == "1" || value == "true";
                if (!spec.transformed && value != "0" && value != "false")
                    throw InvalidArgument("rule parameter transformed must be 0/1/true/false");
            } else {
                throw InvalidArgument("unknown rule parameter \"" + std::string(key) + "\"");
            }
        }
    }
    spec.validate();
    return spec;
}

std::string RuleSpec::to_string() const {
    std::string out;
    switch (kind) {
    case RuleKind::optimal: out = "optimal"; break;
    case RuleKind::min_norm: out = "minnorm"; break;
    case RuleKind::ridge: out = fmt::format("ridge:lambda={}", lambda); break;
    case RuleKind::gradient_flow: out = fmt::format("gf:t={}", t); break;
    case RuleKind::gradient_descent: out = fmt::format("gd:eta={},steps={}", eta, steps); break;
    case RuleKind::nadaraya_watson: out = fmt::format("nw:h={}", h); break;
    }
    if (transformed && kind != RuleKind::optimal) out += out.find(':') == std::string::npos ? ":transformed=1" : ",transformed=1";
    return out;
}

void RuleSpec::validate() const {
    switch (kind) {
    case RuleKind::ridge:
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("ridge: lambda must be finite and >= 0");
        break;
    case RuleKind::gradient_flow:
        if (!(t >= 0.0)) throw InvalidArgument("gradient flow: t must be >= 0");
        break;
    case RuleKind::gradient_descent:
        if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("gradient descent: eta must be > 0");
        break;
    case RuleKind::nadaraya_watson:
        if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("nadaraya_watson: bandwidth h must be > 0");
        break;
    case RuleKind::optimal:
    case RuleKind::min_norm: break;
    }
}

FittedRule fit(const RuleSpec& rule, const Eigen::MatrixXd& X, const RuleContext& context) {
    rule.validate();
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (n < 1 || d < 1) throw InvalidArgument("fit: training matrix must be at least 1 x 1");

    FittedRule out;
    out.spec_ = rule;
    const bool needs_prior = rule.kind == RuleKind::optimal || rule.transformed;
    if (needs_prior) {
        if (context.prior_moment.size() != static_cast<std::size_t>(d))
            throw InvalidArgument("fit: optimal/transformed rules need a prior second moment of dimension d");
        out.scale_.resize(d);
        for (Eigen::Index j = 0; j < d; ++j) {
            const double hj = context.prior_moment[static_cast<std::size_t>(j)];
            if (!(hj >= 0.0)) throw InvalidArgument("fit: prior second moment must be nonnegative");
            out.scale_[j] = std::sqrt(hj);
        }
        out.train_ = X * out.scale_.asDiagonal();
    } else {
        out.train_ = X;
    }

    RuleKind kind = rule.kind;
    double lambda = rule.lambda;
    if (kind == RuleKind::optimal) {
        if (!(context.sigma2 >= 0.0)) throw InvalidArgument("fit: optimal rule needs sigma2 >= 0");
        lambda = context.sigma2 / static_cast<double>(n);
        kind = lambda > 0.0 ? RuleKind::ridge : RuleKind::min_norm;
    }
    if (kind == RuleKind::ridge && lambda == 0.0) kind = RuleKind::min_norm;

    const double dn = static_cast<double>(n);
    switch (kind) {
    case RuleKind::ridge: {
        const double penalty = dn * lambda;
        out.rank_ = static_cast<std::size_t>(std::min(n, d));
        if (n <= 2 * d) {
            out.path_ = FittedRule::Path::ridge_dual;
            Eigen::MatrixXd gram = out.train_ * out.train_.transpose();
            gram.diagonal().array() += penalty;
            out.llt_.compute(gram);
        } else {
            out.path_ = FittedRule::Path::ridge_primal;
            Eigen::MatrixXd cov = out.train_.transpose() * out.train_;
            cov.diagonal().array() += penalty;
            out.llt_.compute(cov);
        }
        if (out.llt_.info() != Eigen::Success) throw InvalidArgument("fit: ridge system is not positive definite");
        break;
    }
    case RuleKind::min_norm:
    case RuleKind::gradient_flow:
    case RuleKind::gradient_descent: {
        out.path_ = FittedRule::Path::spectral;
        Eigen::BDCSVD<Eigen::MatrixXd> svd(out.train_, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& s = svd.singularValues();
        const double cutoff = static_cast<double>(d) * std::numeric_limits<double>::epsilon() * (s.size() ? s[0] : 0.0);
        Eigen::Index r = 0;
        while (r < s.size() && s[r] > cutoff) ++r;
        out.rank_ = static_cast<std::size_t>(r);
        Eigen::VectorXd gain(r);
        for (Eigen::Index k = 0; k < r; ++k) {
            const double g = s[k] * s[k];
            double psi = 0.0;
            if (kind == RuleKind::min_norm) psi = 1.0 / g;
            else if (kind == RuleKind::gradient_flow) psi = flow_filter(g / dn, rule.t) / dn;
            else psi = descent_filter(g / dn, rule.eta, rule.steps) / dn;
            gain[k] = psi * s[k];
        }
        out.factor_ = svd.matrixU().leftCols(r) * gain.asDiagonal();
        out.right_ = svd.matrixV().leftCols(r);
        break;
    }
    case RuleKind::nadaraya_watson:
        out.path_ = FittedRule::Path::kernel;
        out.rank_ = static_cast<std::size_t>(std::min(n, d));
        break;
    case RuleKind::optimal: break;  // resolved above
    }
    return out;
}

Eigen::MatrixXd FittedRule::transform_points(const Eigen::MatrixXd& points) const {
    if (points.cols() != train_.cols())
        throw InvalidArgument("weights: test point dimension " + std::to_string(points.cols()) +
                              " does not match training dimension " + std::to_string(train_.cols()));
    if (scale_.size() == 0) return points;
    return points * scale_.asDiagonal();
}

Eigen::MatrixXd FittedRule::weights_batch(const Eigen::MatrixXd& points) const {
    const Eigen::MatrixXd T = transform_points(points);
    switch (path_) {
    case Path::ridge_dual: return llt_.solve(train_ * T.transpose());
    case Path::ridge_primal: return train_ * llt_.solve(T.transpose());
    case Path::spectral: return factor_ * (right_.transpose() * T.transpose());
    case Path::kernel: {
        const Eigen::Index n = train_.rows();
        Eigen::MatrixXd L(n, T.rows());
        const double inv_two_h2 = 1.0 / (2.0 * spec_.h * spec_.h);
        for (Eigen::Index k = 0; k < T.rows(); ++k) {
            for (Eigen::Index i = 0; i < n; ++i) L(i, k) = std::exp(-(train_.row(i) - T.row(k)).squaredNorm() * inv_two_h2);
            const double mass = L.col(k).sum();
            if (!(mass > 0.0) || !std::isfinite(mass))
                throw DegenerateKernel("nadaraya_watson: kernel mass underflowed at a test point (bandwidth too small)");
            L.col(k) /= mass;
        }
        return L;
    }
    }
    return {};
}

Eigen::VectorXd FittedRule::weights(const Eigen::VectorXd& x) const {
    return weights_batch(x.transpose());
}

Eigen::VectorXd optimal_rule_weights(const Eigen::MatrixXd& X, std::span<const double> prior_moment, double sigma2,
                                     const Eigen::VectorXd& x) {
    RuleContext ctx{std::vector<double>(prior_moment.begin(), prior_moment.end()), sigma2};
    RuleSpec spec;
    spec.kind = RuleKind::optimal;
    return fit(spec, X, ctx).weights(x);
}

}  // namespace linrule
