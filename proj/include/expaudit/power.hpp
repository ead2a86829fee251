#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "expaudit/errors.hpp"

namespace expaudit::power {

// Standard normal quantile, accurate to better than 1e-9 over (0,1).
double normal_quantile(double p);

struct PowerConfig {
    double alpha = 0.05;
    double power = 0.80;

    // 1.96 at the default significance level.
    double z_alpha() const { return normal_quantile(1.0 - alpha / 2.0); }
    // 0.84 at the default power level.
    double z_power() const { return normal_quantile(power); }

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0,1)");
        if (!(power > 0.0 && power < 1.0)) throw ValidationError("power must lie in (0,1)");
    }
};

// Minimum detectable effect for the interaction coefficient:
// (z_{1-alpha/2} + z_{1-power}) * SE.
double mde(double se_beta3, const PowerConfig& cfg);

// Minimum sample size achieving `target_mde` for the interaction coefficient:
// ceil(p + RSS * (z_{1-alpha/2} + z_{1-power})^2 * (X'X)^{-1}_{33} / MDE^2).
// `residual_sq_sum` is the total squared residual of the fitted linear
// probability model.
long required_sample_size(double target_mde, double residual_sq_sum, double gram_inverse_33,
                          const PowerConfig& cfg, int n_params);

// Four-cell interaction contrast:
// (E[Z|T=1,S=1] - E[Z|T=0,S=1]) - (E[Z|T=1,S=0] - E[Z|T=0,S=0]).
double did_beta3(double e_t1_s1, double e_t0_s1, double e_t1_s0, double e_t0_s0);

// ---------------------------------------------------------------------------
// Linear probability models for power scenarios
// ---------------------------------------------------------------------------

struct OlsFit {
    Eigen::VectorXd beta;
    Eigen::MatrixXd gram_inverse;  // (X'X)^{-1}
    double residual_sq_sum = 0.0;
    double sigma2 = 0.0;           // RSS / (n - p)
    Eigen::VectorXd se;            // sqrt(sigma2 * diag gram_inverse)
};

OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct MdeScenario {
    long n = 745;
    double treated_share = 0.526;
    double subgroup_share = 0.47;
    double baseline_rate = 0.27;   // outcome rate under the null
    std::uint64_t seed = 0;
    int replicates = 1;            // simulation repeats averaged together
};

struct ScenarioResult {
    double mde = 0.0;
    double se_beta3 = 0.0;
    double residual_sq_sum = 0.0;
    double gram_inverse_33 = 0.0;
    int n_params = 4;
};

// Builds the saturated (1, T, S, T*S) design with deterministic cell counts,
// simulates null outcomes, and reads off SE of the interaction coefficient.
ScenarioResult simulated_mde(const MdeScenario& scenario, const PowerConfig& cfg);

}  // namespace expaudit::power
