#include "linrule/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "linrule/errors.hpp"

namespace linrule {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_samples(std::size_t n, const char* who) {
    if (n < 1) throw InvalidArgument(std::string(who) + ": n must be >= 1");
}

double dn(std::size_t n) { return static_cast<double>(n); }

// lambda * df1(S; lambda), the shape shared by every df-based bound.
double scaled_df1(const Spectrum& s, double lambda) {
    return lambda == 0.0 ? 0.0 : lambda * df(s, 1, lambda);
}

constexpr std::array<std::pair<Theorem, std::string_view>, 8> kTags{{
    {Theorem::noisy_sandwich, "thm2"},
    {Theorem::variance_lower, "thm3"},
    {Theorem::sup_variance_lower, "thm4"},
    {Theorem::noiseless_sandwich, "thm5"},
    {Theorem::capacity_noiseless, "cor1"},
    {Theorem::fast_decay_sandwich, "thm6"},
    {Theorem::capacity_rate, "ex4"},
    {Theorem::underparam_upper, "lowdim"},
}};

}  // namespace

std::string_view theorem_tag(Theorem t) noexcept {
    for (const auto& [th, tag] : kTags)
        if (th == t) return tag;
    return "unknown";
}

std::optional<Theorem> theorem_from_tag(std::string_view tag) noexcept {
    for (const auto& [th, name] : kTags)
        if (name == tag) return th;
    return std::nullopt;
}

NoiseModel NoiseModel::from_kurtosis(double sigma2, const Spectrum& effective, double kappa) {
    NoiseModel m;
    m.sigma2 = sigma2;
    m.kappa = kappa;
    m.lh2 = kappa * effective.trace();
    m.bounded = false;
    m.validate();
    return m;
}

NoiseModel NoiseModel::bounded_support(double sigma2, double lh2) {
    NoiseModel m;
    m.sigma2 = sigma2;
    m.lh2 = lh2;
    m.bounded = true;
    m.kappa = 1.0;
    m.validate();
    return m;
}

void NoiseModel::validate() const {
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("noise model: sigma2 must be finite and >= 0");
    if (!(lh2 > 0.0) || !std::isfinite(lh2)) throw InvalidArgument("noise model: L_H^2 must be finite and > 0");
    if (!(kappa >= 1.0)) throw InvalidArgument("noise model: kappa must be >= 1");
}

BoundReport noisy_sandwich(const Spectrum& s, std::size_t n, const NoiseModel& noise) {
    require_samples(n, "noisy_sandwich");
    noise.validate();
    const double lambda = noise.sigma2 / dn(n);
    const double lambda0 = noise.lh2 / dn(n);
    BoundReport r;
    r.theorem = Theorem::noisy_sandwich;
    r.lambda_lower = lambda;
    r.lambda_upper = lambda + lambda0;
    r.lower = scaled_df1(s, lambda);
    r.upper = scaled_df1(s, lambda + lambda0);
    return r;
}

std::optional<double> variance_lower_bound(const Spectrum& s, std::size_t n, const NoiseModel& noise) {
    require_samples(n, "variance_lower_bound");
    noise.validate();
    if (noise.sigma2 == 0.0) return std::nullopt;
    const double ratio = noise.lh2 / noise.sigma2;
    if (noise.lh2 < noise.sigma2) {
        const double lambda = (noise.sigma2 + noise.lh2) / dn(n);
        return (1.0 - ratio) * (noise.sigma2 / dn(n)) * df(s, 2, lambda);
    }
    if (noise.bounded) {
        const double lambda = noise.sigma2 / dn(n);
        return lambda * df(s, 2, lambda) / ((1.0 + ratio) * (1.0 + ratio));
    }
    return std::nullopt;
}

double sup_variance_lower_bound(const Spectrum& s, std::size_t n, const NoiseModel& noise) {
    require_samples(n, "sup_variance_lower_bound");
    noise.validate();
    if (noise.sigma2 == 0.0) return 0.0;
    const double lambda = noise.sigma2 / dn(n);
    const double lambda0 = noise.lh2 / dn(n);
    return std::max(0.0, scaled_df1(s, lambda + lambda0) - scaled_df1(s, lambda0));
}

std::optional<double> implicit_noise_variance(const Spectrum& s, std::size_t n) {
    const std::size_t d = s.dim();
    if (d <= n + 2) return std::nullopt;
    // prefix = sum_{j=2}^k 1/mu_j, with 1-based j.
    double prefix = 0.0;
    double best = 0.0;
    for (std::size_t k = 2; k <= d; ++k) {
        prefix += 1.0 / s[k - 1];
        if (k >= n + 3) {
            const double value = (dn(k) - 1.0) * (dn(k) - dn(n) - 2.0) / prefix;
            best = std::max(best, value);
        }
    }
    return best;
}

std::optional<BoundReport> noiseless_sandwich(const Spectrum& s, std::size_t n) {
    require_samples(n, "noiseless_sandwich");
    const auto sigma0 = implicit_noise_variance(s, n);
    if (!sigma0) return std::nullopt;
    BoundReport r;
    r.theorem = Theorem::noiseless_sandwich;
    r.lambda_lower = *sigma0 / dn(n);
    r.lambda_upper = 3.0 * s.trace() / dn(n);
    r.lower = scaled_df1(s, r.lambda_lower);
    r.upper = scaled_df1(s, r.lambda_upper);
    return r;
}

double capacity_noiseless_constant(std::size_t d, std::size_t n, double decay) {
    return (1.0 - (dn(n) + 2.0) / dn(d)) * (1.0 + decay) * (1.0 - decay) / 12.0;
}

std::optional<BoundReport> capacity_noiseless(const Spectrum& s, std::size_t n, double decay) {
    if (!(decay > 0.0 && decay < 1.0)) return std::nullopt;
    auto base = noiseless_sandwich(s, n);
    if (!base) return std::nullopt;
    BoundReport r = *base;
    r.theorem = Theorem::capacity_noiseless;
    r.lambda_lower = r.lambda_upper;
    r.lower = capacity_noiseless_constant(s.dim(), n, decay) * r.upper;
    return r;
}

double fast_decay_upper_at(const Spectrum& s, std::size_t n, std::size_t k) {
    if (n < 2) throw InvalidArgument("fast_decay_sandwich: n must be >= 2");
    if (k + 2 > n) throw InvalidArgument("fast_decay_sandwich: k must satisfy k <= n - 2");
    return (dn(n) - 1.0) / (dn(n) - dn(k) - 1.0) * tail_sum(s, k);
}

BoundReport fast_decay_sandwich(const Spectrum& s, std::size_t n) {
    if (n < 2) throw InvalidArgument("fast_decay_sandwich: n must be >= 2");
    if (s.dim() < n) throw InvalidArgument("fast_decay_sandwich: requires d >= n");
    BoundReport r;
    r.theorem = Theorem::fast_decay_sandwich;
    r.lower = tail_sum(s, n);
    r.upper = kInf;
    for (std::size_t k = 0; k + 2 <= n; ++k) {
        const double candidate = fast_decay_upper_at(s, n, k);
        if (candidate < r.upper) {
            r.upper = candidate;
            r.k_star = k;
        }
    }
    return r;
}

double capacity_integral(double a) {
    if (!(a > 1.0) || !std::isfinite(a)) throw InvalidArgument("capacity_integral: exponent must be > 1");
    using boost::math::quadrature::gauss_kronrod;
    constexpr unsigned max_depth = 30;
    constexpr double tol = 1e-12;
    // [0, 1] directly; [1, inf) through y = 1/u then u = t^{1/(a-1)}, which
    // turns u^{a-2} / (1 + u^a) du into dt / ((a-1)(1 + t^{a/(a-1)})).
    const double head = gauss_kronrod<double, 15>::integrate(
        [a](double y) { return 1.0 / (1.0 + std::pow(y, a)); }, 0.0, 1.0, max_depth, tol);
    const double q = a / (a - 1.0);
    const double tail = gauss_kronrod<double, 15>::integrate(
        [q](double t) { return 1.0 / (1.0 + std::pow(t, q)); }, 0.0, 1.0, max_depth, tol);
    return head + tail / (a - 1.0);
}

std::optional<double> capacity_rate(double alpha, double r, double rho2, double sigma2, double kappa, std::size_t n) {
    require_samples(n, "capacity_rate");
    if (!(rho2 > 0.0)) throw InvalidArgument("capacity_rate: rho2 must be > 0");
    if (!(sigma2 >= 0.0)) throw InvalidArgument("capacity_rate: sigma2 must be >= 0");
    const double a = 2.0 * alpha * r;
    if (!(a > 1.0)) return std::nullopt;
    const double base = sigma2 / (dn(n) * rho2) + kappa / dn(n);
    return capacity_integral(a) * rho2 * std::pow(base, 1.0 - 1.0 / a);
}

std::optional<double> underparam_upper_bound(const Spectrum& s, std::size_t n, double sigma2) {
    if (!(sigma2 >= 0.0)) throw InvalidArgument("underparam_upper_bound: sigma2 must be >= 0");
    const std::size_t d = s.dim();
    if (n <= d + 1) return std::nullopt;
    return sigma2 * dn(d) / (dn(n) - dn(d) - 1.0);
}

}  // namespace linrule
