#include "linrule/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "linrule/errors.hpp"

namespace linrule {

Spectrum::Spectrum(std::vector<double> eigenvalues) : values_(std::move(eigenvalues)) {
    if (values_.empty()) throw InvalidArgument("spectrum: dimension must be >= 1");
    for (std::size_t j = 0; j < values_.size(); ++j) {
        const double v = values_[j];
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidArgument("spectrum: eigenvalue " + std::to_string(j) + " is not a finite positive number");
        if (j > 0 && v > values_[j - 1])
            throw InvalidArgument("spectrum: eigenvalues must be nonincreasing (index " + std::to_string(j) + ")");
    }
}

double Spectrum::trace() const noexcept {
    // smallest-first
    return std::accumulate(values_.rbegin(), values_.rend(), 0.0);
}

void SourcePrior::validate() const {
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("source prior: r must be finite and >= 0");
    if (!(rho2 > 0.0) || !std::isfinite(rho2)) throw InvalidArgument("source prior: rho2 must be finite and > 0");
}

Spectrum capacity_spectrum(std::size_t d, double alpha) {
    if (d == 0) throw InvalidArgument("capacity_spectrum: d must be >= 1");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("capacity_spectrum: alpha must be finite and >= 0");
    std::vector<double> v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = std::pow(static_cast<double>(j + 1), -alpha);
    return Spectrum(std::move(v));
}

namespace {

// exp(2r (log lambda_j - log lambda_1)); lambda_1 is the largest so every
// exponent is <= 0 and only underflow is possible.
std::vector<double> relative_powers(const Spectrum& base, double two_r) {
    const double log_top = std::log(base.max());
    std::vector<double> w(base.dim());
    for (std::size_t j = 0; j < base.dim(); ++j) {
        const double e = two_r * (std::log(base[j]) - log_top);
        if (std::isnan(e) || e == std::numeric_limits<double>::infinity())
            throw NumericOverflow("effective_spectrum: lambda^{2r} not representable (r too large)");
        w[j] = std::exp(e);
    }
    return w;
}

double sum_smallest_first(const std::vector<double>& v) {
    return std::accumulate(v.rbegin(), v.rend(), 0.0);
}

}  // namespace

Spectrum effective_spectrum(const Spectrum& base, const SourcePrior& prior) {
    prior.validate();
    std::vector<double> w = relative_powers(base, 2.0 * prior.r);
    const double total = sum_smallest_first(w);
    std::vector<double> mu;
    mu.reserve(w.size());
    std::size_t dropped = 0;
    for (double wj : w) {
        const double m = prior.rho2 * (wj / total);
        if (m < kSpectrumFloor || !std::isfinite(m)) {
            ++dropped;
            continue;
        }
        mu.push_back(m);
    }
    if (mu.empty()) throw NumericOverflow("effective_spectrum: every eigenvalue underflowed");
    if (dropped > 0) {
        std::cerr << "linrule: warning: effective_spectrum dropped " << dropped
                  << " eigenvalue(s) below " << kSpectrumFloor << "\n";
        // Renormalise so the trace stays rho2 after clamping.
        const double kept = sum_smallest_first(mu);
        for (double& m : mu) m *= prior.rho2 / kept;
    }
    return Spectrum(std::move(mu));
}

std::vector<double> prior_second_moment(const Spectrum& base, const SourcePrior& prior) {
    prior.validate();
    // H_j = rho2 lambda_j^{2r-1} / sum_k lambda_k^{2r}
    //     = (rho2 / lambda_j) * w_j / sum_k w_k  with w as in relative_powers.
    std::vector<double> w = relative_powers(base, 2.0 * prior.r);
    const double total = sum_smallest_first(w);
    std::vector<double> h(base.dim());
    for (std::size_t j = 0; j < base.dim(); ++j) h[j] = prior.rho2 * (w[j] / total) / base[j];
    return h;
}

Spectrum sigma_theta_spectrum(const Spectrum& base, const FixedTarget& target) {
    if (target.coords.size() != base.dim())
        throw InvalidArgument("sigma_theta_spectrum: target has " + std::to_string(target.coords.size()) +
                              " coordinates, spectrum has dimension " + std::to_string(base.dim()));
    std::vector<double> v;
    v.reserve(base.dim());
    for (std::size_t j = 0; j < base.dim(); ++j) {
        const double c = target.coords[j];
        if (!std::isfinite(c)) throw InvalidArgument("sigma_theta_spectrum: non-finite target coordinate");
        const double value = base[j] * c * c;
        if (value > 0.0) v.push_back(value);
    }
    if (v.empty()) throw InvalidArgument("sigma_theta_spectrum: target is identically zero");
    std::sort(v.begin(), v.end(), std::greater<>());
    return Spectrum(std::move(v));
}

double df(const Spectrum& s, int k, double lambda) {
    if (k != 1 && k != 2) throw InvalidArgument("df: k must be 1 or 2");
    if (!(lambda >= 0.0)) throw InvalidArgument("df: lambda must be >= 0");
    if (lambda == 0.0) return static_cast<double>(s.dim());
    double acc = 0.0;
    const auto v = s.values();
    for (auto it = v.rbegin(); it != v.rend(); ++it) {
        const double ratio = *it / (*it + lambda);
        acc += (k == 1) ? ratio : ratio * ratio;
    }
    return acc;
}

double tail_sum(const Spectrum& s, std::size_t k) {
    if (k > s.dim())
        throw InvalidArgument("tail_sum: k = " + std::to_string(k) + " exceeds dimension " + std::to_string(s.dim()));
    const auto v = s.values();
    double acc = 0.0;
    for (std::size_t j = s.dim(); j > k; --j) acc += v[j - 1];
    return acc;
}

void to_json(nlohmann::json& j, const Spectrum& s) {
    j = nlohmann::json::array();
    for (double v : s.values()) j.push_back(v);
}

Spectrum spectrum_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw InvalidArgument("spectrum JSON must be an array of numbers");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) throw InvalidArgument("spectrum JSON must be an array of numbers");
        v.push_back(e.get<double>());
    }
    return Spectrum(std::move(v));
}

Spectrum SpectrumGenerator::build() const {
    switch (kind) {
    case Kind::capacity: return capacity_spectrum(d, alpha);
    case Kind::explicit_values: return Spectrum(values);
    }
    throw InvalidArgument("unknown spectrum generator kind");
}

void to_json(nlohmann::json& j, const SpectrumGenerator& g) {
    if (g.kind == SpectrumGenerator::Kind::capacity)
        j = nlohmann::json{{"kind", "capacity"}, {"d", g.d}, {"alpha", g.alpha}};
    else
        j = nlohmann::json{{"kind", "explicit"}, {"values", g.values}};
}

void from_json(const nlohmann::json& j, SpectrumGenerator& g) {
    if (!j.is_object() || !j.contains("kind")) throw InvalidArgument("spectrum generator needs a \"kind\" field");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "capacity") {
        g.kind = SpectrumGenerator::Kind::capacity;
        const auto d = j.at("d").get<long long>();
        if (d < 1) throw InvalidArgument("spectrum generator: d must be >= 1");
        g.d = static_cast<std::size_t>(d);
        g.alpha = j.at("alpha").get<double>();
        g.values.clear();
    } else if (kind == "explicit") {
        g.kind = SpectrumGenerator::Kind::explicit_values;
        g.values = j.at("values").get<std::vector<double>>();
        g.d = g.values.size();
    } else {
        throw InvalidArgument("spectrum generator: unknown kind \"" + kind + "\"");
    }
}

}  // namespace linrule
