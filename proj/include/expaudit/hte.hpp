#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expaudit/errors.hpp"

namespace expaudit::hte {

// ---------------------------------------------------------------------------
// Design matrices and maximum-likelihood logistic regression
// ---------------------------------------------------------------------------

struct DesignMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXd X;           // includes the intercept column of ones exactly once
    Eigen::VectorXi y;           // binary outcomes
    int treatment_col = -1;
    std::vector<int> subgroup_cols;
    std::vector<int> interaction_cols;

    void validate() const;
    int column(const std::string& label) const;  // throws MissingColumn
};

struct RegressionFit {
    std::vector<std::string> labels;
    Eigen::VectorXd beta;
    Eigen::MatrixXd covariance;   // inverse observed information at the optimum
    Eigen::VectorXd se;
    Eigen::VectorXd z;
    Eigen::VectorXd p;            // two-sided normal p-values
    Eigen::VectorXd ci_low;       // beta -/+ 1.96 * se
    Eigen::VectorXd ci_high;
    double log_lik = 0.0;
    double null_log_lik = 0.0;
    double pseudo_r2 = 0.0;       // 1 - log_lik / null_log_lik
    int iterations = 0;
};

// Newton iterations with step-halving; the log-likelihood never decreases
// across accepted steps. Converged when the score's sup-norm drops below
// 1e-8. Throws RankDeficient, SeparationDetected, or NoConvergence.
RegressionFit fit_logistic(const DesignMatrix& design);

double log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                      const Eigen::VectorXd& beta);

// ---------------------------------------------------------------------------
// Student-level records and the two graduation-outcome designs
// ---------------------------------------------------------------------------

struct StudentRecord {
    std::string id;
    int treatment = 0;
    int graduated = 0;
    int gender = 0;
    double act = 0.0;         // composite score (converted from SAT at ingestion)
    double efc = 0.0;         // expected family contribution
    double hours_other = 0.0; // other credit hours applied toward the degree
    std::string race;         // normalized lowercase label
    std::vector<int> advisor_meetings;  // interaction counts, advisor 1 first
};

// Most-interactions advisor, 1-based; ties go to the lowest index; zero
// everywhere (or control students) yields 0, the no-advisor reference.
int modal_advisor(const StudentRecord& record);

// Intercept, treatment indicator, one indicator per advisor except the
// highest-numbered one observed (the reference), then standardized numeric
// controls and the gender indicator. Layout: Constant, Assigned Group,
// Advisor j..., Gender, ACT Composite, EFC, Hours Other.
DesignMatrix build_advisor_design(const std::vector<StudentRecord>& records);

// Intercept, treatment, race indicators (hispanic, asian, black; white is the
// reference) with treatment interactions, then the shared controls. Records
// with races outside the four modeled groups (e.g. multiracial, nonresident
// alien) are excluded before the matrix is built.
DesignMatrix build_race_design(const std::vector<StudentRecord>& records);

struct CombinedEffect {
    std::string race;
    double coef = 0.0;   // treatment + interaction
    double se = 0.0;
    double z = 0.0;
    double p = 0.0;
};

// Combined treatment effect per race, with the delta-method standard error
// from the fit covariance.
std::vector<CombinedEffect> combined_treatment_effects(const RegressionFit& fit,
                                                       const DesignMatrix& design);

// ---------------------------------------------------------------------------
// Ranking AUC and per-stratum action-prediction models
// ---------------------------------------------------------------------------

// Probability a random positive outranks a random negative, ties counted at
// half weight (midranks). Throws SingleClass when labels are all equal.
double auc(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels);

struct MeetingRecord {
    std::string stratum;       // academic semester
    int treatment = 0;
    int gender = 0;
    double act = 0.0;
    double efc = 0.0;
    double hours_other = 0.0;
    std::string race;
    std::map<std::string, int> actions;  // intervention label -> applied bit
};

struct ActionModelComparison {
    double auc_with_race = 0.0;
    double auc_without_race = 0.0;
    int observations = 0;
};

// Fits the action-prediction logistic model twice on the same stratum rows —
// once with one-hot race columns, once without — and scores both in sample.
// Constant columns are dropped so degenerate strata stay full rank. Throws
// SingleClass when the stratum has only one action class.
ActionModelComparison compare_action_models(const std::vector<MeetingRecord>& records,
                                            const std::string& intervention_label,
                                            const std::string& stratum);

}  // namespace expaudit::hte
