#include "expaudit/hte.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace expaudit::hte {

namespace {

constexpr double kGradientTol = 1e-8;
constexpr int kMaxIterations = 100;
constexpr double kSeparationCoefBound = 30.0;
constexpr double kWaldQuantile = 1.96;

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace

void DesignMatrix::validate() const {
    if (X.rows() != y.size()) throw ValidationError("design rows do not match outcome length");
    if (static_cast<Eigen::Index>(labels.size()) != X.cols())
        throw ValidationError("design labels do not match columns");
    std::set<std::string> seen;
    for (const auto& l : labels)
        if (!seen.insert(l).second) throw ValidationError("duplicate design column '" + l + "'");
    int ones = 0;
    for (Eigen::Index c = 0; c < X.cols(); ++c)
        if ((X.col(c).array() == 1.0).all()) ++ones;
    if (ones != 1)
        throw ValidationError("design must contain exactly one intercept column of ones, found " +
                              std::to_string(ones));
    if (((y.array() != 0) && (y.array() != 1)).any())
        throw ValidationError("outcomes must be 0/1");
}

int DesignMatrix::column(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    throw MissingColumn("no design column named '" + label + "'");
}

double log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                      const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = X * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        // y*eta - log(1 + exp(eta)), computed without overflow.
        const double e = eta[i];
        const double log1pexp = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
        ll += y[i] * e - log1pexp;
    }
    return ll;
}

RegressionFit fit_logistic(const DesignMatrix& design) {
    design.validate();
    const Eigen::MatrixXd& X = design.X;
    const Eigen::VectorXi& y = design.y;
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();

    if (n < p) throw RankDeficient("fewer rows than design columns");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < p)
        throw RankDeficient("design matrix has rank " + std::to_string(qr.rank()) +
                            " < " + std::to_string(p));

    const long successes = y.sum();
    if (successes == 0 || successes == n)
        throw SeparationDetected("outcome has a single class; likelihood is unbounded");

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    double ll = log_likelihood(X, y, beta);
    const Eigen::VectorXd yd = y.cast<double>();

    int iter = 0;
    Eigen::MatrixXd hessian;  // negative Hessian: X' W X
    bool converged = false;
    for (; iter < kMaxIterations; ++iter) {
        const Eigen::VectorXd eta = X * beta;
        const Eigen::VectorXd mu = (1.0 / (1.0 + (-eta.array()).exp())).matrix();
        const Eigen::VectorXd grad = X.transpose() * (yd - mu);
        const Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
        hessian = X.transpose() * w.asDiagonal() * X;

        if (grad.lpNorm<Eigen::Infinity>() < kGradientTol) {
            converged = true;
            break;
        }

        const Eigen::VectorXd step = hessian.ldlt().solve(grad);
        double scale = 1.0;
        double new_ll = log_likelihood(X, y, beta + scale * step);
        int halvings = 0;
        while (new_ll < ll && halvings < 40) {
            scale *= 0.5;
            new_ll = log_likelihood(X, y, beta + scale * step);
            ++halvings;
        }
        if (halvings == 40) {
            // Step-halving stalled. With coefficients running away this is
            // quasi-separation rather than a numerical hiccup.
            if (beta.lpNorm<Eigen::Infinity>() > kSeparationCoefBound)
                throw SeparationDetected("coefficients diverged past " +
                                         std::to_string(kSeparationCoefBound));
            throw NoConvergence("step-halving stalled at iteration " + std::to_string(iter));
        }
        beta += scale * step;
        ll = new_ll;
    }
    if (!converged) {
        if (beta.lpNorm<Eigen::Infinity>() > kSeparationCoefBound)
            throw SeparationDetected("coefficients diverged past " +
                                     std::to_string(kSeparationCoefBound));
        throw NoConvergence("no convergence after " + std::to_string(kMaxIterations) +
                            " iterations");
    }

    RegressionFit fit;
    fit.labels = design.labels;
    fit.beta = beta;
    fit.covariance = hessian.inverse();
    fit.se = fit.covariance.diagonal().array().sqrt();
    fit.z = beta.array() / fit.se.array();
    fit.p.resize(p);
    for (Eigen::Index i = 0; i < p; ++i) fit.p[i] = two_sided_normal_p(fit.z[i]);
    fit.ci_low = beta - kWaldQuantile * fit.se;
    fit.ci_high = beta + kWaldQuantile * fit.se;
    fit.log_lik = ll;
    fit.iterations = iter;

    // Intercept-only log-likelihood in closed form.
    const double pi = static_cast<double>(successes) / static_cast<double>(n);
    fit.null_log_lik = successes * std::log(pi) +
                       (static_cast<double>(n) - successes) * std::log(1.0 - pi);
    fit.pseudo_r2 = 1.0 - fit.log_lik / fit.null_log_lik;
    return fit;
}

// ---------------------------------------------------------------------------
// Graduation-outcome designs
// ---------------------------------------------------------------------------

int modal_advisor(const StudentRecord& record) {
    int best = 0, best_count = 0;
    for (std::size_t j = 0; j < record.advisor_meetings.size(); ++j) {
        if (record.advisor_meetings[j] > best_count) {
            best_count = record.advisor_meetings[j];
            best = static_cast<int>(j) + 1;
        }
    }
    return best;
}

namespace {

void standardize_column(Eigen::MatrixXd& X, Eigen::Index c) {
    const double mean = X.col(c).mean();
    const double var = (X.col(c).array() - mean).square().sum() /
                       static_cast<double>(X.rows());
    const double sd = std::sqrt(var);
    if (sd > 0)
        X.col(c) = (X.col(c).array() - mean) / sd;
    else
        X.col(c).setZero();
}

void append_controls(DesignMatrix& d, const std::vector<const StudentRecord*>& rows,
                     Eigen::Index first_col) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    d.labels.insert(d.labels.end(), {"Gender", "ACT Composite", "EFC", "Hours Other"});
    for (Eigen::Index i = 0; i < n; ++i) {
        d.X(i, first_col + 0) = rows[static_cast<std::size_t>(i)]->gender;
        d.X(i, first_col + 1) = rows[static_cast<std::size_t>(i)]->act;
        d.X(i, first_col + 2) = rows[static_cast<std::size_t>(i)]->efc;
        d.X(i, first_col + 3) = rows[static_cast<std::size_t>(i)]->hours_other;
    }
    // Numeric controls are standardized; indicator columns are not.
    standardize_column(d.X, first_col + 1);
    standardize_column(d.X, first_col + 2);
    standardize_column(d.X, first_col + 3);
}

}  // namespace

DesignMatrix build_advisor_design(const std::vector<StudentRecord>& records) {
    if (records.empty()) throw ValidationError("no records");
    std::vector<const StudentRecord*> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back(&r);

    // Advisors present anywhere in the data; the highest-numbered one is the
    // dropped reference.
    int max_advisor = 0;
    for (const auto* r : rows) max_advisor = std::max(max_advisor, modal_advisor(*r));
    const int indicator_count = std::max(0, max_advisor - 1);

    const auto n = static_cast<Eigen::Index>(rows.size());
    DesignMatrix d;
    d.X.resize(n, 2 + indicator_count + 4);
    d.y.resize(n);
    d.labels = {"Constant", "Assigned Group"};
    d.treatment_col = 1;
    for (int a = 1; a <= indicator_count; ++a) {
        d.labels.push_back("Advisor " + std::to_string(a));
        d.subgroup_cols.push_back(1 + a);
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        const StudentRecord& r = *rows[static_cast<std::size_t>(i)];
        d.X(i, 0) = 1.0;
        d.X(i, 1) = r.treatment;
        const int advisor = modal_advisor(r);
        for (int a = 1; a <= indicator_count; ++a) d.X(i, 1 + a) = (advisor == a) ? 1.0 : 0.0;
        d.y[i] = r.graduated;
    }
    append_controls(d, rows, 2 + indicator_count);
    return d;
}

namespace {

const std::vector<std::string> kModeledRaces = {"hispanic", "asian", "black"};

bool modeled_race(const std::string& race) {
    if (race == "white") return true;
    return std::find(kModeledRaces.begin(), kModeledRaces.end(), race) != kModeledRaces.end();
}

std::string title_case(const std::string& s) {
    std::string out = s;
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(out[0]));
    return out;
}

}  // namespace

DesignMatrix build_race_design(const std::vector<StudentRecord>& records) {
    std::vector<const StudentRecord*> rows;
    for (const auto& r : records)
        if (modeled_race(r.race)) rows.push_back(&r);
    if (rows.empty()) throw ValidationError("no records in the modeled race groups");

    const auto n = static_cast<Eigen::Index>(rows.size());
    DesignMatrix d;
    d.X.resize(n, 2 + 2 * static_cast<Eigen::Index>(kModeledRaces.size()) + 4);
    d.y.resize(n);
    d.labels = {"Constant", "Assigned Group"};
    d.treatment_col = 1;
    for (std::size_t g = 0; g < kModeledRaces.size(); ++g) {
        d.labels.push_back("Is_" + title_case(kModeledRaces[g]));
        d.labels.push_back("T x " + title_case(kModeledRaces[g]));
        d.subgroup_cols.push_back(2 + static_cast<int>(2 * g));
        d.interaction_cols.push_back(3 + static_cast<int>(2 * g));
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        const StudentRecord& r = *rows[static_cast<std::size_t>(i)];
        d.X(i, 0) = 1.0;
        d.X(i, 1) = r.treatment;
        for (std::size_t g = 0; g < kModeledRaces.size(); ++g) {
            const double is_g = (r.race == kModeledRaces[g]) ? 1.0 : 0.0;
            d.X(i, 2 + static_cast<Eigen::Index>(2 * g)) = is_g;
            d.X(i, 3 + static_cast<Eigen::Index>(2 * g)) = is_g * r.treatment;
        }
        d.y[i] = r.graduated;
    }
    append_controls(d, rows, 2 + 2 * static_cast<Eigen::Index>(kModeledRaces.size()));
    return d;
}

std::vector<CombinedEffect> combined_treatment_effects(const RegressionFit& fit,
                                                       const DesignMatrix& design) {
    std::vector<CombinedEffect> out;
    const int t = design.treatment_col;
    if (t < 0) throw ValidationError("design has no treatment column");
    for (int ic : design.interaction_cols) {
        CombinedEffect ce;
        const std::string& label = design.labels[static_cast<std::size_t>(ic)];
        ce.race = label.rfind("T x ", 0) == 0 ? label.substr(4) : label;
        ce.coef = fit.beta[t] + fit.beta[ic];
        const double var = fit.covariance(t, t) + fit.covariance(ic, ic) +
                           2.0 * fit.covariance(t, ic);
        ce.se = std::sqrt(var);
        ce.z = ce.coef / ce.se;
        ce.p = two_sided_normal_p(ce.z);
        out.push_back(ce);
    }
    return out;
}

// ---------------------------------------------------------------------------
// AUC and action-prediction comparisons
// ---------------------------------------------------------------------------

double auc(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels) {
    const Eigen::Index n = scores.size();
    if (n != labels.size()) throw ValidationError("score and label lengths differ");
    const long positives = labels.sum();
    const long negatives = n - positives;
    if (positives == 0 || negatives == 0)
        throw SingleClass("AUC undefined with a single outcome class");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

    // Midranks over tied scores, then the rank-sum formula.
    std::vector<double> rank(static_cast<std::size_t>(n));
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) rank[static_cast<std::size_t>(order[k])] = mid;
        i = j + 1;
    }
    double positive_rank_sum = 0.0;
    for (Eigen::Index r = 0; r < n; ++r)
        if (labels[r] == 1) positive_rank_sum += rank[static_cast<std::size_t>(r)];
    const double np = static_cast<double>(positives);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(negatives));
}

namespace {

// One-hot races over the rows at hand, reference group dropped.
std::vector<std::string> observed_races(const std::vector<const MeetingRecord*>& rows) {
    std::set<std::string> races;
    for (const auto* r : rows) races.insert(r->race);
    std::vector<std::string> out(races.begin(), races.end());
    if (out.size() > 1) out.pop_back();  // drop the last as reference
    else out.clear();                    // a single race carries no information
    return out;
}

DesignMatrix build_action_design(const std::vector<const MeetingRecord*>& rows,
                                 const std::string& intervention_label, bool with_race) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const std::vector<std::string> races =
        with_race ? observed_races(rows) : std::vector<std::string>{};

    DesignMatrix d;
    d.labels = {"Constant", "Assigned Group", "Gender", "ACT Composite", "EFC", "Hours Other"};
    d.treatment_col = 1;
    for (const auto& g : races) d.labels.push_back("Is_" + title_case(g));
    d.X.resize(n, static_cast<Eigen::Index>(d.labels.size()));
    d.y.resize(n);

    for (Eigen::Index i = 0; i < n; ++i) {
        const MeetingRecord& r = *rows[static_cast<std::size_t>(i)];
        d.X(i, 0) = 1.0;
        d.X(i, 1) = r.treatment;
        d.X(i, 2) = r.gender;
        d.X(i, 3) = r.act;
        d.X(i, 4) = r.efc;
        d.X(i, 5) = r.hours_other;
        for (std::size_t g = 0; g < races.size(); ++g)
            d.X(i, 6 + static_cast<Eigen::Index>(g)) = (r.race == races[g]) ? 1.0 : 0.0;
        const auto it = r.actions.find(intervention_label);
        if (it == r.actions.end())
            throw MissingColumn("meeting record lacks action '" + intervention_label + "'");
        d.y[i] = it->second;
    }
    standardize_column(d.X, 3);
    standardize_column(d.X, 4);
    standardize_column(d.X, 5);

    // Drop constant non-intercept columns so degenerate strata stay full rank.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index c = 0; c < d.X.cols(); ++c) {
        if (c == 0 || d.X.col(c).minCoeff() != d.X.col(c).maxCoeff()) keep.push_back(c);
    }
    if (static_cast<Eigen::Index>(keep.size()) != d.X.cols()) {
        DesignMatrix slim;
        slim.X.resize(n, static_cast<Eigen::Index>(keep.size()));
        slim.y = d.y;
        slim.treatment_col = -1;
        for (std::size_t k = 0; k < keep.size(); ++k) {
            slim.X.col(static_cast<Eigen::Index>(k)) = d.X.col(keep[k]);
            slim.labels.push_back(d.labels[static_cast<std::size_t>(keep[k])]);
            if (keep[k] == d.treatment_col) slim.treatment_col = static_cast<int>(k);
        }
        return slim;
    }
    return d;
}

}  // namespace

ActionModelComparison compare_action_models(const std::vector<MeetingRecord>& records,
                                            const std::string& intervention_label,
                                            const std::string& stratum) {
    std::vector<const MeetingRecord*> rows;
    for (const auto& r : records)
        if (r.stratum == stratum) rows.push_back(&r);
    if (rows.empty()) throw ValidationError("no meetings in stratum '" + stratum + "'");

    ActionModelComparison cmp;
    cmp.observations = static_cast<int>(rows.size());

    int first = -1;
    bool mixed = false;
    for (const auto* r : rows) {
        const auto it = r->actions.find(intervention_label);
        if (it == r->actions.end())
            throw MissingColumn("meeting record lacks action '" + intervention_label + "'");
        if (first == -1) first = it->second;
        else if (it->second != first) mixed = true;
    }
    if (!mixed)
        throw SingleClass("intervention '" + intervention_label + "' has one class in stratum '" +
                          stratum + "'");

    const DesignMatrix with_race = build_action_design(rows, intervention_label, true);
    const DesignMatrix without_race = build_action_design(rows, intervention_label, false);

    const RegressionFit fit_with = fit_logistic(with_race);
    const RegressionFit fit_without = fit_logistic(without_race);

    cmp.auc_with_race = auc(with_race.X * fit_with.beta, with_race.y);
    cmp.auc_without_race = auc(without_race.X * fit_without.beta, without_race.y);
    return cmp;
}

}  // namespace expaudit::hte
