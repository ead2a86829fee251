#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "expaudit/dataset.hpp"
#include "expaudit/matching.hpp"

namespace expaudit::expert_test {

using matching::PairSet;

enum class Direction { positive, negative, two_tailed };

const char* direction_name(Direction d);

struct TestConfig {
    int k = 1000;                       // number of synthetic datasets
    Direction direction = Direction::positive;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    // Stable stream label; distinct hypotheses must use distinct labels so
    // their randomness is independent.
    std::string label = "test";

    void validate() const {
        if (k < 1) throw ValidationError("iteration count K must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0,1)");
    }
};

struct TestResult {
    long j = 0;              // count of synthetic datasets the original beats
    int k = 0;
    double tau = 0.0;        // j / k
    double raw_p = 1.0;      // one-tailed: (j+1)/(k+1); two-tailed: folded and doubled
    Direction direction = Direction::positive;
    double mse_original = 0.0;
    double mse_synth_min = 0.0;
    double mse_synth_median = 0.0;
    double mse_synth_max = 0.0;
    double min_attainable_p = 0.0;  // 1/(k+1); the p-value lattice granularity
};

// Sum of squared action/outcome mismatches; for binary data this counts the
// records where a != y.
double mse(const Eigen::VectorXi& actions, const Eigen::VectorXi& outcomes);

// Mismatch statistic on complemented actions; detects negative association.
// For binary data, mse + mse_neg = n identically.
double mse_neg(const Eigen::VectorXi& actions, const Eigen::VectorXi& outcomes);

// The matched-pair swap randomization test. Synthetic datasets swap the two
// actions within each pair independently with probability 1/2; all coin flips
// for synthetic dataset k (swaps, then the tie-break draw) come from the
// counter stream keyed by (seed, label, k), so parallel evaluation of the K
// datasets reproduces the sequential result bit for bit.
TestResult run_expert_test(const Eigen::VectorXi& actions, const Eigen::VectorXi& outcomes,
                           const PairSet& pairs, const TestConfig& config);

// Convenience overload on a dataset's named action column.
TestResult run_expert_test(const AuditDataset& dataset, const PairSet& pairs,
                           const TestConfig& config, int action_col = 0);

// Two-tailed variant: both tails of the order statistic, p = 2*(J'+1)/(K+1)
// with J' the smaller tail count, capped at 1.
TestResult run_two_tailed(const Eigen::VectorXi& actions, const Eigen::VectorXi& outcomes,
                          const PairSet& pairs, const TestConfig& config);

TestResult run_two_tailed(const AuditDataset& dataset, const PairSet& pairs,
                          const TestConfig& config, int action_col = 0);

// Step-up false-discovery-rate adjustment; order-preserving with the input.
std::vector<double> benjamini_hochberg(const std::vector<double>& raw_p);

struct SwapDiagnostics {
    long could_increase = 0;  // pairs whose swap raises the mismatch count
    long could_decrease = 0;
    long neutral = 0;         // swap leaves the pair's cells unchanged
    long action_count = 0;    // total times the action was taken
};

// Classifies each pair by the sign of the mismatch-count change its swap
// would cause, computed on the pair's cells only.
SwapDiagnostics swap_diagnostics(const Eigen::VectorXi& actions,
                                 const Eigen::VectorXi& outcomes, const PairSet& pairs);

struct HypothesisOutcome {
    std::string label;
    Direction direction = Direction::positive;
    TestResult result;
    double adjusted_p = 1.0;
    bool significant = false;  // adjusted p < alpha
};

struct FamilyResult {
    std::vector<HypothesisOutcome> hypotheses;
    std::vector<SwapDiagnostics> diagnostics;  // one per action column
    double alpha = 0.05;
    bool bh_applied = true;
};

// Runs the positive and negative one-tailed tests for every action column
// and adjusts the whole family together (the 2m-hypothesis protocol).
FamilyResult run_family(const AuditDataset& dataset, const PairSet& pairs,
                        const TestConfig& base_config, bool apply_bh = true);

}  // namespace expaudit::expert_test
