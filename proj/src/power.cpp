#include "expaudit/power.hpp"

#include <cmath>

#include "expaudit/rng.hpp"

namespace expaudit::power {

namespace {

// Acklam's rational approximation of the inverse normal CDF (~1e-9 already),
// tightened by one Halley step against the erfc-based CDF.
double acklam(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;

    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("quantile argument must lie in (0,1)");
    double x = acklam(p);
    // One Halley refinement step.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x -= u / (1.0 + x * u / 2.0);
    return x;
}

double mde(double se_beta3, const PowerConfig& cfg) {
    cfg.validate();
    if (!(se_beta3 > 0.0)) throw ValidationError("standard error must be positive");
    return (cfg.z_alpha() + cfg.z_power()) * se_beta3;
}

long required_sample_size(double target_mde, double residual_sq_sum, double gram_inverse_33,
                          const PowerConfig& cfg, int n_params) {
    cfg.validate();
    if (!(target_mde > 0.0)) throw ValidationError("target MDE must be positive");
    if (!(residual_sq_sum > 0.0)) throw ValidationError("residual sum of squares must be positive");
    if (!(gram_inverse_33 > 0.0)) throw ValidationError("gram inverse entry must be positive");
    if (n_params < 1) throw ValidationError("parameter count must be positive");
    const double zsum = cfg.z_alpha() + cfg.z_power();
    return static_cast<long>(std::ceil(
        n_params + residual_sq_sum * zsum * zsum * gram_inverse_33 / (target_mde * target_mde)));
}

double did_beta3(double e_t1_s1, double e_t0_s1, double e_t1_s0, double e_t0_s0) {
    for (double v : {e_t1_s1, e_t0_s1, e_t1_s0, e_t0_s0})
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("cell means must lie in [0,1]");
    return (e_t1_s1 - e_t0_s1) - (e_t1_s0 - e_t0_s0);
}

OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) throw ValidationError("design rows do not match outcome length");
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (n <= p) throw RankDeficient("need more rows than parameters");
    const Eigen::MatrixXd gram = X.transpose() * X;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible()) throw RankDeficient("X'X is singular");

    OlsFit fit;
    fit.gram_inverse = lu.inverse();
    fit.beta = fit.gram_inverse * (X.transpose() * y);
    const Eigen::VectorXd resid = y - X * fit.beta;
    fit.residual_sq_sum = resid.squaredNorm();
    fit.sigma2 = fit.residual_sq_sum / static_cast<double>(n - p);
    fit.se = (fit.sigma2 * fit.gram_inverse.diagonal().array()).sqrt();
    return fit;
}

ScenarioResult simulated_mde(const MdeScenario& scenario, const PowerConfig& cfg) {
    cfg.validate();
    if (scenario.n < 8) throw ValidationError("scenario sample size is too small");
    if (scenario.replicates < 1) throw ValidationError("need at least one replicate");

    const auto n = static_cast<Eigen::Index>(scenario.n);
    const long n_treated = std::lround(scenario.treated_share * static_cast<double>(n));
    const long n_subgroup = std::lround(scenario.subgroup_share * static_cast<double>(n));

    // Deterministic cell layout: subgroup membership striped across the
    // treated and control blocks proportionally.
    Eigen::MatrixXd X(n, 4);
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool treated = i < n_treated;
        const long block_start = treated ? 0 : n_treated;
        const long block_size = treated ? n_treated : (n - n_treated);
        const long offset = i - block_start;
        const long in_subgroup_count =
            std::lround(scenario.subgroup_share == 0.0
                            ? 0.0
                            : static_cast<double>(n_subgroup) * static_cast<double>(block_size) /
                                  static_cast<double>(n));
        const bool subgroup = offset < in_subgroup_count;
        X(i, 0) = 1.0;
        X(i, 1) = treated ? 1.0 : 0.0;
        X(i, 2) = subgroup ? 1.0 : 0.0;
        X(i, 3) = X(i, 1) * X(i, 2);
    }

    double se_sq_sum = 0.0;
    double rss_sum = 0.0;
    OlsFit last;
    for (int rep = 0; rep < scenario.replicates; ++rep) {
        CounterRng rng(scenario.seed, "power-scenario", static_cast<std::uint64_t>(rep));
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i)
            y[i] = rng.next_unit() < scenario.baseline_rate ? 1.0 : 0.0;
        last = fit_ols(X, y);
        se_sq_sum += last.se[3] * last.se[3];
        rss_sum += last.residual_sq_sum;
    }

    ScenarioResult res;
    res.se_beta3 = std::sqrt(se_sq_sum / scenario.replicates);
    res.residual_sq_sum = rss_sum / scenario.replicates;
    res.gram_inverse_33 = last.gram_inverse(3, 3);
    res.n_params = 4;
    res.mde = mde(res.se_beta3, cfg);
    return res;
}

}  // namespace expaudit::power
