#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "linrule/spectra.hpp"

namespace linrule {

// (master_seed, stream_id) identifies one reproducible random stream. Monte
// Carlo replicate k always uses stream_id = k, whatever the worker layout.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

// xoshiro256** keyed by a SeedSpec. The state starts from (mix(master),
// mix(stream), f(master, stream), g(master, stream)) with mix the splitmix64
// finaliser, a bijection on 64-bit words, so distinct seeds give distinct
// states; 16 warm-up steps follow.
class StreamEngine {
public:
    using result_type = std::uint64_t;

    explicit StreamEngine(SeedSpec seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept;

    [[nodiscard]] const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }

private:
    std::array<std::uint64_t, 4> s_{};
};

enum class LawKind { gaussian, isotropic_latent, adversarial_discrete };
enum class RadialLaw { chi, unit };

[[nodiscard]] std::string_view law_name(LawKind k) noexcept;
// Accepts "gaussian", "latent" / "isotropic_latent", "adversarial" / "adversarial_discrete".
[[nodiscard]] LawKind parse_law(std::string_view name);

// Distribution of one covariate row, expressed in the eigenbasis of `spectrum`.
//   gaussian:      independent N(0, mu_j) coordinates
//   latent:        X = S^{1/2} Z, Z = R * g/|g|, R ~ chi_d (or R = 1)
//   adversarial:   X = scale * e_j with probability mu_j / Tr(S)
struct CovariateLaw {
    LawKind kind = LawKind::gaussian;
    Spectrum spectrum;
    double scale = 1.0;
    RadialLaw radius = RadialLaw::chi;

    [[nodiscard]] static CovariateLaw gaussian(Spectrum s);
    [[nodiscard]] static CovariateLaw latent(Spectrum s, RadialLaw radius = RadialLaw::chi);
    [[nodiscard]] static CovariateLaw adversarial(Spectrum s, double scale);
    // Adversarial law whose covariance is exactly diag(S): scale^2 = Tr(S).
    [[nodiscard]] static CovariateLaw adversarial_matched(Spectrum s);

    [[nodiscard]] std::size_t dim() const noexcept { return spectrum.dim(); }
};

// n x d matrix, one draw per row.
[[nodiscard]] Eigen::MatrixXd sample_covariates(const CovariateLaw& law, std::size_t n, SeedSpec seed);
[[nodiscard]] Eigen::MatrixXd sample_covariates(const CovariateLaw& law, std::size_t n, StreamEngine& engine);

// theta = rho_r Sigma^{r - 1/2} u, u uniform on the unit sphere,
// rho_r^2 = d rho2 / Tr(Sigma^{2r}); E[theta theta'] = H_r.
[[nodiscard]] Eigen::VectorXd sample_target(const SourcePrior& prior, const Spectrum& base, SeedSpec seed);

// i.i.d. N(0, sigma2); exact zeros when sigma2 == 0.
[[nodiscard]] Eigen::VectorXd sample_noise(double sigma2, std::size_t n, SeedSpec seed);

}  // namespace linrule
