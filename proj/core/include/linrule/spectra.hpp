#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace linrule {

// Eigenvalues of a covariance in its own eigenbasis: strictly positive,
// nonincreasing, at least one entry. Every covariance in the library
// (population, effective, fixed-target) is carried this way.
class Spectrum {
public:
    // Validates and copies; throws InvalidArgument on an empty, unsorted or
    // non-positive list.
    explicit Spectrum(std::vector<double> eigenvalues);

    [[nodiscard]] std::size_t dim() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t j) const { return values_[j]; }
    [[nodiscard]] double trace() const noexcept;
    [[nodiscard]] double min() const noexcept { return values_.back(); }
    [[nodiscard]] double max() const noexcept { return values_.front(); }

    [[nodiscard]] bool isotropic() const noexcept { return values_.front() == values_.back(); }

    friend bool operator==(const Spectrum&, const Spectrum&) = default;

private:
    std::vector<double> values_;
};

// Source-condition prior: Sigma^{1/2-r} theta uniform on a sphere, scaled so
// that the average explained variance is rho2 for every r.
struct SourcePrior {
    double r = 0.5;
    double rho2 = 1.0;

    void validate() const;
};

// Coordinates of a fixed Bayes predictor in the eigenbasis of the base spectrum.
struct FixedTarget {
    std::vector<double> coords;
};

// Eigenvalues below this are dropped from effective spectra.
inline constexpr double kSpectrumFloor = 1e-300;

// lambda_j = j^{-alpha}, j = 1..d. alpha = 0 is the isotropic spectrum.
[[nodiscard]] Spectrum capacity_spectrum(std::size_t d, double alpha);

// Eigenvalues of Sigma_H = H_r^{1/2} Sigma H_r^{1/2}:
// mu_j = rho2 * lambda_j^{2r} / sum_k lambda_k^{2r}. Trace is rho2.
[[nodiscard]] Spectrum effective_spectrum(const Spectrum& base, const SourcePrior& prior);

// Diagonal of the prior second moment H_r = rho2 Sigma^{2r-1} / Tr(Sigma^{2r}),
// aligned with `base` (same length, same order).
[[nodiscard]] std::vector<double> prior_second_moment(const Spectrum& base, const SourcePrior& prior);

// Sigma_theta = sum_j lambda_j (v_j' theta)^2 v_j v_j', sorted nonincreasing with
// zero entries removed (dim() of the result is the effective dimension).
[[nodiscard]] Spectrum sigma_theta_spectrum(const Spectrum& base, const FixedTarget& target);

// df_k(S; lambda) = sum_j (mu_j / (mu_j + lambda))^k for k in {1, 2}.
[[nodiscard]] double df(const Spectrum& s, int k, double lambda);

// R_k = sum_{j > k} mu_j (1-based j), accumulated smallest-first.
[[nodiscard]] double tail_sum(const Spectrum& s, std::size_t k);

// JSON: a spectrum is a plain array of numbers.
void to_json(nlohmann::json& j, const Spectrum& s);
[[nodiscard]] Spectrum spectrum_from_json(const nlohmann::json& j);

// Generator description accepted in configs:
//   {"kind": "capacity", "d": 200, "alpha": 1.0}
//   {"kind": "explicit", "values": [1.0, 0.5]}
struct SpectrumGenerator {
    enum class Kind { capacity, explicit_values };
    Kind kind = Kind::capacity;
    std::size_t d = 1;
    double alpha = 1.0;
    std::vector<double> values;

    [[nodiscard]] Spectrum build() const;
};

void to_json(nlohmann::json& j, const SpectrumGenerator& g);
void from_json(const nlohmann::json& j, SpectrumGenerator& g);

}  // namespace linrule
