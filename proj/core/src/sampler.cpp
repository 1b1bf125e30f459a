#include "linrule/sampler.hpp"

#include <cmath>
#include <random>
#include <string>

#include "linrule/errors.hpp"

namespace linrule {

namespace {

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

Eigen::VectorXd unit_direction(std::size_t d, StreamEngine& engine) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd g(static_cast<Eigen::Index>(d));
    double norm2 = 0.0;
    // Resample the (probability zero) all-zero draw.
    do {
        for (Eigen::Index j = 0; j < g.size(); ++j) g[j] = normal(engine);
        norm2 = g.squaredNorm();
    } while (norm2 == 0.0);
    return g / std::sqrt(norm2);
}

}  // namespace

StreamEngine::StreamEngine(SeedSpec seed) noexcept {
    const std::uint64_t a = splitmix_finalize(seed.master_seed);
    const std::uint64_t b = splitmix_finalize(seed.stream_id);
    // (s0, s1) = (a, b) keeps the map injective; s2 and s3 depend on both words so
    // that no output is a function of the stream id alone.
    s_ = {a, b, splitmix_finalize(a + splitmix_finalize(b ^ 0x9E3779B97F4A7C15ULL)),
          splitmix_finalize(b + splitmix_finalize(a ^ 0xD1B54A32D192ED03ULL))};
    // The transition is a bijection, so the warm-up preserves injectivity.
    for (int i = 0; i < 16; ++i) (void)(*this)();
}

StreamEngine::result_type StreamEngine::operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

std::string_view law_name(LawKind k) noexcept {
    switch (k) {
    case LawKind::gaussian: return "gaussian";
    case LawKind::isotropic_latent: return "latent";
    case LawKind::adversarial_discrete: return "adversarial";
    }
    return "unknown";
}

LawKind parse_law(std::string_view name) {
    if (name == "gaussian") return LawKind::gaussian;
    if (name == "latent" || name == "isotropic_latent") return LawKind::isotropic_latent;
    if (name == "adversarial" || name == "adversarial_discrete") return LawKind::adversarial_discrete;
    throw InvalidArgument("unknown covariate law \"" + std::string(name) + "\"");
}

CovariateLaw CovariateLaw::gaussian(Spectrum s) { return CovariateLaw{LawKind::gaussian, std::move(s), 1.0, RadialLaw::chi}; }

CovariateLaw CovariateLaw::latent(Spectrum s, RadialLaw radius) {
    return CovariateLaw{LawKind::isotropic_latent, std::move(s), 1.0, radius};
}

CovariateLaw CovariateLaw::adversarial(Spectrum s, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("adversarial law: scale must be > 0");
    return CovariateLaw{LawKind::adversarial_discrete, std::move(s), scale, RadialLaw::chi};
}

CovariateLaw CovariateLaw::adversarial_matched(Spectrum s) {
    const double scale = std::sqrt(s.trace());
    return adversarial(std::move(s), scale);
}

Eigen::MatrixXd sample_covariates(const CovariateLaw& law, std::size_t n, SeedSpec seed) {
    StreamEngine engine(seed);
    return sample_covariates(law, n, engine);
}

Eigen::MatrixXd sample_covariates(const CovariateLaw& law, std::size_t n, StreamEngine& engine) {
    const auto d = static_cast<Eigen::Index>(law.dim());
    const auto rows = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd X(rows, d);
    Eigen::VectorXd root(d);
    for (Eigen::Index j = 0; j < d; ++j) root[j] = std::sqrt(law.spectrum[static_cast<std::size_t>(j)]);

    switch (law.kind) {
    case LawKind::gaussian: {
        std::normal_distribution<double> normal;
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < d; ++j) X(i, j) = root[j] * normal(engine);
        break;
    }
    case LawKind::isotropic_latent: {
        std::chi_squared_distribution<double> chi2(static_cast<double>(d));
        for (Eigen::Index i = 0; i < rows; ++i) {
            const Eigen::VectorXd u = unit_direction(law.dim(), engine);
            const double radius = law.radius == RadialLaw::chi ? std::sqrt(chi2(engine)) : 1.0;
            X.row(i) = (radius * root.cwiseProduct(u)).transpose();
        }
        break;
    }
    case LawKind::adversarial_discrete: {
        const auto v = law.spectrum.values();
        std::discrete_distribution<Eigen::Index> pick(v.begin(), v.end());
        X.setZero();
        for (Eigen::Index i = 0; i < rows; ++i) X(i, pick(engine)) = law.scale;
        break;
    }
    }
    return X;
}

Eigen::VectorXd sample_target(const SourcePrior& prior, const Spectrum& base, SeedSpec seed) {
    const std::vector<double> h = prior_second_moment(base, prior);
    StreamEngine engine(seed);
    const Eigen::VectorXd u = unit_direction(base.dim(), engine);
    const double d = static_cast<double>(base.dim());
    Eigen::VectorXd theta(u.size());
    // sqrt(d H_j) = rho_r lambda_j^{r - 1/2}
    for (Eigen::Index j = 0; j < u.size(); ++j) theta[j] = std::sqrt(d * h[static_cast<std::size_t>(j)]) * u[j];
    return theta;
}

Eigen::VectorXd sample_noise(double sigma2, std::size_t n, SeedSpec seed) {
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("sample_noise: sigma2 must be >= 0");
    Eigen::VectorXd eps = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    if (sigma2 == 0.0) return eps;
    StreamEngine engine(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = normal(engine);
    return eps;
}

}  // namespace linrule
