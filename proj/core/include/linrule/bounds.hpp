#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "linrule/spectra.hpp"

namespace linrule {

// Noise level and the fourth-moment constant L_H^2 with
// E[|X|^2 X X'] <= L_H^2 Sigma_H for the transformed covariates.
struct NoiseModel {
    double sigma2 = 0.0;
    double lh2 = 1.0;
    // |X|^2 <= lh2 almost surely (enables the second variance lower bound).
    bool bounded = false;
    double kappa = 3.0;

    // L_H^2 = kappa * Tr(Sigma_H); kappa = 3 for Gaussian covariates.
    [[nodiscard]] static NoiseModel from_kurtosis(double sigma2, const Spectrum& effective, double kappa = 3.0);
    // Covariates with |X|^2 <= lh2 almost surely.
    [[nodiscard]] static NoiseModel bounded_support(double sigma2, double lh2);

    void validate() const;
};

// Comments give the stable CSV tag of each bound.
enum class Theorem {
    noisy_sandwich,        // thm2
    variance_lower,        // thm3
    sup_variance_lower,    // thm4
    noiseless_sandwich,    // thm5
    capacity_noiseless,    // cor1
    fast_decay_sandwich,   // thm6
    capacity_rate,         // ex4
    underparam_upper,      // lowdim
};

[[nodiscard]] std::string_view theorem_tag(Theorem t) noexcept;
[[nodiscard]] std::optional<Theorem> theorem_from_tag(std::string_view tag) noexcept;

// lower <= upper always; one-sided bounds use 0 or +infinity for the missing side.
struct BoundReport {
    double lower = 0.0;
    double upper = 0.0;
    double lambda_lower = 0.0;
    double lambda_upper = 0.0;
    std::optional<std::size_t> k_star;
    Theorem theorem = Theorem::noisy_sandwich;
};

// lambda df1(S; lambda) <= E <= (lambda + lambda0) df1(S; lambda + lambda0),
// lambda = sigma2 / n, lambda0 = L_H^2 / n.
[[nodiscard]] BoundReport noisy_sandwich(const Spectrum& s, std::size_t n, const NoiseModel& noise);

// Lower bound on the variance-like term via df2. Empty when neither
// regime applies (L_H^2 >= sigma2 and unbounded support) or sigma2 == 0.
[[nodiscard]] std::optional<double> variance_lower_bound(const Spectrum& s, std::size_t n, const NoiseModel& noise);

// (lambda + lambda0) df1(lambda + lambda0) - lambda0 df1(lambda0), clamped at 0.
[[nodiscard]] double sup_variance_lower_bound(const Spectrum& s, std::size_t n, const NoiseModel& noise);

// Best implicit-noise constant:
//   sigma0^2 = max_{n+3 <= k <= d} (k-1)(k-n-2) / sum_{j=2}^k mu_j^{-1}.
// Empty when d <= n + 2.
[[nodiscard]] std::optional<double> implicit_noise_variance(const Spectrum& s, std::size_t n);

// (sigma0^2/n) df1(S; sigma0^2/n) <= E[noiseless] <= (3 Tr S / n) df1(S; 3 Tr S / n).
[[nodiscard]] std::optional<BoundReport> noiseless_sandwich(const Spectrum& s, std::size_t n);

// Capacity-condition constant c = (1 - (n+2)/d)(1 + a)(1 - a)/12,
// meaningful for decay exponent a in (0, 1).
[[nodiscard]] double capacity_noiseless_constant(std::size_t d, std::size_t n, double decay);

// c * upper <= E[noiseless] <= upper with upper the noiseless_sandwich upper
// bound. Empty unless decay is in (0, 1) and d > n + 2.
[[nodiscard]] std::optional<BoundReport> capacity_noiseless(const Spectrum& s, std::size_t n, double decay);

// R_n <= E[noiseless] <= min_{0 <= k <= n-2} (n-1)/(n-k-1) R_k.
// Throws InvalidArgument for n < 2 or d < n.
[[nodiscard]] BoundReport fast_decay_sandwich(const Spectrum& s, std::size_t n);
// The upper bound at a single k in [0, n-2].
[[nodiscard]] double fast_decay_upper_at(const Spectrum& s, std::size_t n, std::size_t k);

// C_a = int_0^inf dy / (1 + y^a), a > 1, by adaptive Gauss-Kronrod.
[[nodiscard]] double capacity_integral(double a);

// C_{2 alpha r} rho2 (sigma2/(n rho2) + kappa/n)^{1 - 1/(2 alpha r)}; empty when 2 alpha r <= 1.
[[nodiscard]] std::optional<double> capacity_rate(double alpha, double r, double rho2, double sigma2, double kappa,
                                                  std::size_t n);

// sigma2 d / (n - d - 1) for Gaussian covariates; empty unless n > d + 1.
[[nodiscard]] std::optional<double> underparam_upper_bound(const Spectrum& s, std::size_t n, double sigma2);

}  // namespace linrule
