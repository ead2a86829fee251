#pragma once

#include <string>
#include <vector>

#include "expaudit/dataset.hpp"

namespace expaudit::matching {

// Disjoint matched pairs, sorted by nondecreasing distance.
struct PairSet {
    struct Pair {
        int i = 0;
        int j = 0;          // i < j
        double distance = 0.0;
    };
    std::vector<Pair> pairs;

    double max_distance() const {
        return pairs.empty() ? 0.0 : pairs.back().distance;
    }
};

// Min-max scales every feature column to [0,1]; constant columns map to 0.
// Idempotent. Actions, outcomes, and strata pass through unchanged.
AuditDataset scale_features(const AuditDataset& dataset);

// Global greedy pairing: all within-stratum candidate pairs sorted by
// Euclidean feature distance (ties broken by lexicographic index pair),
// accepted while disjoint, until `pair_count` pairs. Deterministic given
// input order. Throws InsufficientRecords when the dataset cannot supply
// `pair_count` disjoint pairs.
PairSet greedy_pair(const AuditDataset& dataset, int pair_count, bool stratum_constraint);

struct MatchQualityReport {
    struct FeatureDelta {
        std::string name;
        double min = 0.0;
        double median = 0.0;
        double max = 0.0;
    };
    std::vector<FeatureDelta> per_feature;  // |difference| within pairs
    double max_distance = 0.0;
    double warn_ceiling = 0.5;
    bool ceiling_exceeded = false;
};

// Per-feature absolute-difference summary plus the largest pair distance;
// flags when it exceeds `warn_ceiling`.
MatchQualityReport match_quality_report(const PairSet& pairs, const AuditDataset& dataset,
                                        double warn_ceiling = 0.5);

}  // namespace expaudit::matching
