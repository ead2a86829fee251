#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "expaudit/errors.hpp"

namespace expaudit {

// ---------------------------------------------------------------------------
// AuditDataset — records of (features x, binary action a, binary outcome y)
//
// Stored column-wise: one Eigen matrix of features, one binary action column
// per audited intervention, one outcome column, and optional stratum labels
// (e.g. the semester). All audited hypotheses over one dataset share the
// features, outcome, and strata.
// ---------------------------------------------------------------------------
struct AuditDataset {
    std::vector<std::string> ids;
    std::vector<std::string> feature_names;
    Eigen::MatrixXd features;              // n x d
    std::vector<std::string> action_names; // one per audited intervention
    Eigen::MatrixXi actions;               // n x m, entries in {0,1}
    Eigen::VectorXi outcomes;              // entries in {0,1}
    std::vector<std::string> strata;       // empty, or one label per record

    Eigen::Index rows() const { return features.rows(); }

    int action_column(const std::string& name) const {
        for (std::size_t i = 0; i < action_names.size(); ++i)
            if (action_names[i] == name) return static_cast<int>(i);
        throw MissingColumn("no action column named '" + name + "'");
    }

    void validate() const {
        const Eigen::Index n = features.rows();
        if (actions.rows() != n || outcomes.size() != n)
            throw ValidationError("dataset columns have inconsistent lengths");
        if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != n)
            throw ValidationError("dataset ids have inconsistent length");
        if (!strata.empty() && static_cast<Eigen::Index>(strata.size()) != n)
            throw ValidationError("dataset strata have inconsistent length");
        if (static_cast<Eigen::Index>(feature_names.size()) != features.cols())
            throw ValidationError("feature names do not match feature columns");
        if (static_cast<Eigen::Index>(action_names.size()) != actions.cols())
            throw ValidationError("action names do not match action columns");
        if (((actions.array() != 0) && (actions.array() != 1)).any())
            throw ValidationError("actions must be 0/1");
        if (((outcomes.array() != 0) && (outcomes.array() != 1)).any())
            throw ValidationError("outcomes must be 0/1");
    }
};

}  // namespace expaudit
