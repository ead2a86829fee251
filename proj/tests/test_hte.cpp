#include <doctest.h>

#include <cmath>

#include "expaudit/hte.hpp"
#include "expaudit/rng.hpp"

using namespace expaudit;
using namespace expaudit::hte;

namespace {

DesignMatrix saturated_2x2() {
    // Group x=0: 10 successes / 10 failures; group x=1: 15 / 5.
    const int n = 40;
    DesignMatrix d;
    d.labels = {"Constant", "x"};
    d.X.resize(n, 2);
    d.y.resize(n);
    int row = 0;
    const auto fill = [&](double x, int successes, int failures) {
        for (int s = 0; s < successes; ++s, ++row) {
            d.X(row, 0) = 1.0;
            d.X(row, 1) = x;
            d.y(row) = 1;
        }
        for (int f = 0; f < failures; ++f, ++row) {
            d.X(row, 0) = 1.0;
            d.X(row, 1) = x;
            d.y(row) = 0;
        }
    };
    fill(0.0, 10, 10);
    fill(1.0, 15, 5);
    return d;
}

DesignMatrix random_design(std::uint64_t index, Eigen::Index n, Eigen::Index extra_cols) {
    CounterRng rng(2718, "design", index);
    DesignMatrix d;
    d.labels = {"Constant"};
    for (Eigen::Index c = 0; c < extra_cols; ++c) d.labels.push_back("x" + std::to_string(c));
    d.X.resize(n, 1 + extra_cols);
    d.y.resize(n);
    Eigen::VectorXd truth(1 + extra_cols);
    for (Eigen::Index c = 0; c <= extra_cols; ++c) truth[c] = 2.0 * rng.next_unit() - 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        d.X(i, 0) = 1.0;
        for (Eigen::Index c = 1; c <= extra_cols; ++c) d.X(i, c) = 2.0 * rng.next_unit() - 1.0;
        const double eta = d.X.row(i) * truth;
        d.y[i] = rng.next_unit() < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
    }
    return d;
}

std::vector<StudentRecord> synthetic_students(int n, std::uint64_t seed) {
    CounterRng rng(seed, "students", 0);
    const char* races[] = {"white", "black", "hispanic", "asian"};
    std::vector<StudentRecord> out;
    for (int i = 0; i < n; ++i) {
        StudentRecord r;
        r.id = "s" + std::to_string(i);
        r.treatment = rng.next_bit();
        r.gender = rng.next_bit();
        r.race = races[rng.next_below(4)];
        r.act = 15.0 + 15.0 * rng.next_unit();
        r.efc = 10000.0 * rng.next_unit();
        r.hours_other = 30.0 * rng.next_unit();
        if (r.treatment) {
            r.advisor_meetings = {0, 0, 0, 0};
            r.advisor_meetings[rng.next_below(4)] = 1 + static_cast<int>(rng.next_below(9));
        }
        const double eta = -0.5 + 0.4 * r.treatment + 0.05 * (r.act - 22.0);
        r.graduated = rng.next_unit() < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

TEST_SUITE("hte") {

TEST_CASE("saturated 2x2 recovers the closed-form log-odds") {
    const RegressionFit fit = fit_logistic(saturated_2x2());
    CHECK(std::abs(fit.beta[0] - 0.0) < 1e-6);
    CHECK(std::abs(fit.beta[1] - std::log(3.0)) < 1e-6);
    CHECK(fit.pseudo_r2 > 0.0);
    CHECK(fit.pseudo_r2 < 1.0);
}

TEST_CASE("single-class outcome is flagged as separation") {
    DesignMatrix d = saturated_2x2();
    d.y.setZero();
    CHECK_THROWS_AS(fit_logistic(d), SeparationDetected);
}

TEST_CASE("a perfectly separating column is flagged") {
    DesignMatrix d;
    d.labels = {"Constant", "s"};
    const int n = 30;
    d.X.resize(n, 2);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        d.X(i, 0) = 1.0;
        d.y[i] = i < n / 2 ? 1 : 0;
        d.X(i, 1) = d.y[i] ? 1.0 : -1.0;
    }
    CHECK_THROWS_AS(fit_logistic(d), SeparationDetected);
}

TEST_CASE("duplicated column is rank deficient") {
    DesignMatrix d = saturated_2x2();
    DesignMatrix dup;
    dup.labels = {"Constant", "x", "x2"};
    dup.X.resize(d.X.rows(), 3);
    dup.X.leftCols(2) = d.X;
    dup.X.col(2) = d.X.col(1);
    dup.y = d.y;
    CHECK_THROWS_AS(fit_logistic(dup), RankDeficient);
}

TEST_CASE("design validation catches duplicate labels and missing intercept") {
    DesignMatrix d = saturated_2x2();
    d.labels = {"x", "x"};
    CHECK_THROWS_AS(d.validate(), ValidationError);

    DesignMatrix no_ones = saturated_2x2();
    no_ones.X.col(0).setConstant(2.0);
    CHECK_THROWS_AS(no_ones.validate(), ValidationError);
}

TEST_CASE("score vanishes and matches finite differences at the optimum") {
    for (std::uint64_t i = 0; i < 10; ++i) {
        const DesignMatrix d = random_design(i, 250, 3);
        const RegressionFit fit = fit_logistic(d);

        const Eigen::VectorXd yd = d.y.cast<double>();
        const Eigen::VectorXd mu =
            (1.0 / (1.0 + (-(d.X * fit.beta).array()).exp())).matrix();
        const Eigen::VectorXd analytic = d.X.transpose() * (yd - mu);
        CHECK(analytic.lpNorm<Eigen::Infinity>() < 1e-8);

        const double h = 1e-5;
        for (Eigen::Index c = 0; c < fit.beta.size(); ++c) {
            Eigen::VectorXd up = fit.beta, down = fit.beta;
            up[c] += h;
            down[c] -= h;
            const double fd =
                (log_likelihood(d.X, d.y, up) - log_likelihood(d.X, d.y, down)) / (2 * h);
            CHECK(std::abs(fd - analytic[c]) <=
                  1e-5 * std::max({1.0, std::abs(fd), std::abs(analytic[c])}));
        }
    }
}

TEST_CASE("gradient matches finite differences away from the optimum too") {
    const DesignMatrix d = random_design(100, 200, 3);
    CounterRng rng(9, "beta", 0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd beta(d.X.cols());
        for (Eigen::Index c = 0; c < beta.size(); ++c) beta[c] = 2.0 * rng.next_unit() - 1.0;
        const Eigen::VectorXd yd = d.y.cast<double>();
        const Eigen::VectorXd mu = (1.0 / (1.0 + (-(d.X * beta).array()).exp())).matrix();
        const Eigen::VectorXd analytic = d.X.transpose() * (yd - mu);
        const double h = 1e-6;
        for (Eigen::Index c = 0; c < beta.size(); ++c) {
            Eigen::VectorXd up = beta, down = beta;
            up[c] += h;
            down[c] -= h;
            const double fd =
                (log_likelihood(d.X, d.y, up) - log_likelihood(d.X, d.y, down)) / (2 * h);
            CHECK(std::abs(fd - analytic[c]) <= 1e-5 * std::max(1.0, std::abs(analytic[c])));
        }
    }
}

TEST_CASE("fit never lowers the likelihood and the covariance is sane") {
    for (std::uint64_t i = 20; i < 35; ++i) {
        const DesignMatrix d = random_design(i, 180, 2);
        const RegressionFit fit = fit_logistic(d);
        const double ll_start =
            log_likelihood(d.X, d.y, Eigen::VectorXd::Zero(d.X.cols()));
        CHECK(fit.log_lik >= ll_start - 1e-12);
        CHECK(fit.log_lik >= fit.null_log_lik - 1e-9);

        // Symmetric positive-definite covariance, Wald interval layout.
        const Eigen::MatrixXd& cov = fit.covariance;
        CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-10);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        for (Eigen::Index c = 0; c < fit.beta.size(); ++c) {
            CHECK(fit.se[c] == doctest::Approx(std::sqrt(cov(c, c))));
            CHECK(fit.ci_low[c] == doctest::Approx(fit.beta[c] - 1.96 * fit.se[c]));
            CHECK(fit.ci_high[c] == doctest::Approx(fit.beta[c] + 1.96 * fit.se[c]));
            CHECK(fit.p[c] >= 0.0);
            CHECK(fit.p[c] <= 1.0);
        }
    }
}

TEST_CASE("advisor design layout") {
    auto records = synthetic_students(300, 52);
    // Force advisors 1..4 present so advisor 4 becomes the reference.
    const DesignMatrix d = build_advisor_design(records);
    REQUIRE(d.labels.size() == 9);
    CHECK(d.labels[0] == "Constant");
    CHECK(d.labels[1] == "Assigned Group");
    CHECK(d.labels[2] == "Advisor 1");
    CHECK(d.labels[3] == "Advisor 2");
    CHECK(d.labels[4] == "Advisor 3");
    CHECK(d.labels[5] == "Gender");
    CHECK(d.labels[6] == "ACT Composite");
    CHECK(d.labels[7] == "EFC");
    CHECK(d.labels[8] == "Hours Other");

    // Standardized controls: mean 0, unit variance; indicators untouched.
    for (int c : {6, 7, 8}) {
        CHECK(std::abs(d.X.col(c).mean()) < 1e-9);
        CHECK(std::abs(d.X.col(c).squaredNorm() / d.X.rows() - 1.0) < 1e-9);
    }
    CHECK(d.X.col(1).minCoeff() >= 0.0);
    CHECK(d.X.col(1).maxCoeff() <= 1.0);

    const RegressionFit fit = fit_logistic(d);
    CHECK(fit.iterations < 30);
}

TEST_CASE("modal advisor rule") {
    StudentRecord r;
    r.advisor_meetings = {2, 3};
    CHECK(modal_advisor(r) == 2);  // split 3/2 goes to the busier advisor
    r.advisor_meetings = {3, 3};
    CHECK(modal_advisor(r) == 1);  // ties to the lowest index
    r.advisor_meetings = {0, 0};
    CHECK(modal_advisor(r) == 0);  // no interactions: reference level
}

TEST_CASE("race design layout and exclusions") {
    auto records = synthetic_students(400, 99);
    records[0].race = "multiracial";
    records[1].race = "nonresident_alien";
    const DesignMatrix d = build_race_design(records);
    REQUIRE(d.labels.size() == 12);
    CHECK(d.labels[0] == "Constant");
    CHECK(d.labels[1] == "Assigned Group");
    CHECK(d.labels[2] == "Is_Hispanic");
    CHECK(d.labels[3] == "T x Hispanic");
    CHECK(d.labels[4] == "Is_Asian");
    CHECK(d.labels[5] == "T x Asian");
    CHECK(d.labels[6] == "Is_Black");
    CHECK(d.labels[7] == "T x Black");
    CHECK(d.labels[8] == "Gender");
    CHECK(d.X.rows() == 398);  // the two unmodeled races are excluded

    const RegressionFit fit = fit_logistic(d);
    const auto combined = combined_treatment_effects(fit, d);
    REQUIRE(combined.size() == 3);
    CHECK(combined[0].race == "Hispanic");
    CHECK(combined[0].coef ==
          doctest::Approx(fit.beta[1] + fit.beta[3]).epsilon(1e-12));
    CHECK(combined[0].se > 0.0);
}

TEST_CASE("race design with only white students is rank deficient") {
    auto records = synthetic_students(100, 3);
    for (auto& r : records) r.race = "white";
    CHECK_THROWS_AS(fit_logistic(build_race_design(records)), RankDeficient);
}

TEST_CASE("auc basics") {
    Eigen::VectorXd perfect(4);
    perfect << 0.1, 0.2, 0.8, 0.9;
    Eigen::VectorXi labels(4);
    labels << 0, 0, 1, 1;
    CHECK(auc(perfect, labels) == doctest::Approx(1.0));

    const Eigen::VectorXd constant = Eigen::VectorXd::Constant(4, 0.5);
    CHECK(auc(constant, labels) == doctest::Approx(0.5));

    Eigen::VectorXd mixed(4);
    mixed << 0.1, 0.4, 0.35, 0.8;
    CHECK(auc(mixed, labels) == doctest::Approx(0.75));

    const Eigen::VectorXi ones = Eigen::VectorXi::Ones(4);
    CHECK_THROWS_AS(auc(perfect, ones), SingleClass);
}

TEST_CASE("auc is invariant under strictly monotone score transforms") {
    CounterRng rng(8, "auc", 0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 30;
        Eigen::VectorXd s(n);
        Eigen::VectorXi l(n);
        for (int i = 0; i < n; ++i) {
            s[i] = rng.next_unit() * 4 - 2;
            l[i] = rng.next_bit();
        }
        if (l.sum() == 0 || l.sum() == n) continue;
        const double base = auc(s, l);
        Eigen::VectorXd expd = s.array().exp();
        Eigen::VectorXd affine = 2.0 * s.array() + 1.0;
        Eigen::VectorXd cubed = s.array().cube();
        CHECK(auc(expd, l) == doctest::Approx(base).epsilon(1e-12));
        CHECK(auc(affine, l) == doctest::Approx(base).epsilon(1e-12));
        CHECK(auc(cubed, l) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("action models with and without race") {
    CounterRng rng(64, "meetings", 0);
    const char* races[] = {"white", "black", "hispanic"};
    std::vector<MeetingRecord> records;
    for (int i = 0; i < 400; ++i) {
        MeetingRecord m;
        m.stratum = i % 2 == 0 ? "2017-Fa" : "2018-Sp";
        m.treatment = rng.next_bit();
        m.gender = rng.next_bit();
        m.race = races[rng.next_below(3)];
        m.act = 15 + 15 * rng.next_unit();
        m.efc = 8000 * rng.next_unit();
        m.hours_other = 20 * rng.next_unit();
        // Action independent of race given the other features.
        const double eta = -0.3 + 0.5 * m.treatment + 0.04 * (m.act - 22.0);
        m.actions["visit"] = rng.next_unit() < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
        m.actions["rare"] = 0;
        records.push_back(std::move(m));
    }
    const ActionModelComparison cmp = compare_action_models(records, "visit", "2017-Fa");
    CHECK(cmp.auc_with_race > 0.5);
    CHECK(std::abs(cmp.auc_with_race - cmp.auc_without_race) < 0.05);

    // Single-class interventions are undefined.
    CHECK_THROWS_AS(compare_action_models(records, "rare", "2017-Fa"), SingleClass);

    // When race is constant across the stratum the two models coincide.
    std::vector<MeetingRecord> mono = records;
    for (auto& m : mono) m.race = "white";
    const ActionModelComparison same = compare_action_models(mono, "visit", "2018-Sp");
    CHECK(same.auc_with_race == same.auc_without_race);
}

}  // TEST_SUITE
