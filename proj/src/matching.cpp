#include "expaudit/matching.hpp"

#include <algorithm>
#include <cmath>

namespace expaudit::matching {

AuditDataset scale_features(const AuditDataset& dataset) {
    AuditDataset out = dataset;
    for (Eigen::Index c = 0; c < out.features.cols(); ++c) {
        const double lo = out.features.col(c).minCoeff();
        const double hi = out.features.col(c).maxCoeff();
        if (hi > lo) {
            out.features.col(c) = (out.features.col(c).array() - lo) / (hi - lo);
        } else {
            // A constant column carries no matching information.
            out.features.col(c).setZero();
        }
    }
    return out;
}

PairSet greedy_pair(const AuditDataset& dataset, int pair_count, bool stratum_constraint) {
    dataset.validate();
    const int n = static_cast<int>(dataset.rows());
    if (pair_count < 1) throw ValidationError("pair count must be positive");
    if (n < 2 * pair_count)
        throw InsufficientRecords("need at least " + std::to_string(2 * pair_count) +
                                  " records for " + std::to_string(pair_count) + " pairs, have " +
                                  std::to_string(n));

    const bool use_strata = stratum_constraint && !dataset.strata.empty();

    struct Candidate {
        double d;
        int i, j;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (use_strata && dataset.strata[static_cast<std::size_t>(i)] !=
                                  dataset.strata[static_cast<std::size_t>(j)])
                continue;
            const double d = (dataset.features.row(i) - dataset.features.row(j)).norm();
            candidates.push_back({d, i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    PairSet out;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (const Candidate& c : candidates) {
        if (used[static_cast<std::size_t>(c.i)] || used[static_cast<std::size_t>(c.j)]) continue;
        used[static_cast<std::size_t>(c.i)] = used[static_cast<std::size_t>(c.j)] = true;
        out.pairs.push_back({c.i, c.j, c.d});
        if (static_cast<int>(out.pairs.size()) == pair_count) return out;
    }
    throw InsufficientRecords("only " + std::to_string(out.pairs.size()) +
                              " disjoint pairs available under the stratum constraint, need " +
                              std::to_string(pair_count));
}

MatchQualityReport match_quality_report(const PairSet& pairs, const AuditDataset& dataset,
                                        double warn_ceiling) {
    MatchQualityReport report;
    report.warn_ceiling = warn_ceiling;
    report.max_distance = pairs.max_distance();
    report.ceiling_exceeded = report.max_distance > warn_ceiling;

    const std::size_t num_pairs = pairs.pairs.size();
    std::vector<double> deltas(num_pairs);
    for (Eigen::Index c = 0; c < dataset.features.cols(); ++c) {
        for (std::size_t k = 0; k < num_pairs; ++k) {
            const auto& p = pairs.pairs[k];
            deltas[k] = std::abs(dataset.features(p.i, c) - dataset.features(p.j, c));
        }
        MatchQualityReport::FeatureDelta fd;
        fd.name = dataset.feature_names[static_cast<std::size_t>(c)];
        if (!deltas.empty()) {
            std::vector<double> sorted = deltas;
            std::sort(sorted.begin(), sorted.end());
            fd.min = sorted.front();
            fd.max = sorted.back();
            const std::size_t mid = sorted.size() / 2;
            fd.median = (sorted.size() % 2 == 1) ? sorted[mid]
                                                 : 0.5 * (sorted[mid - 1] + sorted[mid]);
        }
        report.per_feature.push_back(std::move(fd));
    }
    return report;
}

}  // namespace expaudit::matching
