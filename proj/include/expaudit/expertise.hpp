#pragma once

#include <optional>
#include <string>
#include <vector>

#include "expaudit/scm.hpp"

namespace expaudit::expertise {

using scm::Assignment;
using scm::ScmSpec;

// Margins are left-hand side minus right-hand side of the corresponding
// inequality; a condition holds when its margin exceeds this tolerance.
inline constexpr double kMarginTol = 1e-9;

struct ConditionResult {
    bool holds = false;
    double margin = 0.0;
    // Set when a condition is decided without computation, e.g. the model has
    // no non-algorithmic-context variable.
    std::optional<std::string> reason;
};

struct ExpertiseVerdict {
    bool effective = false;
    bool targeted = false;
    bool heterogeneous = false;
    bool expertly_targeted = false;
    Assignment evaluated_x;
    int evaluated_u = 0;
    double margin_effective = 0.0;
    double margin_targeted = 0.0;
    double margin_heterogeneous = 0.0;
    std::optional<std::string> targeted_reason;
    std::optional<std::string> heterogeneous_reason;
};

// Does intervening on the action raise the chance of a good outcome for the
// individual identified by (x, u)?
ConditionResult check_effective_action(const ScmSpec& model, const Assignment& x, int u);

// Does the non-algorithmic context drive the decision to act at x?
ConditionResult check_targeted_action(const ScmSpec& model, const Assignment& x, int u);

// Is the action's effect larger under u than under 1-u (difference of
// interventional differences)?
ConditionResult check_heterogeneous_action(const ScmSpec& model, const Assignment& x, int u);

// Conjunction of the three conditions with all margins.
ExpertiseVerdict check_expertly_targeted(const ScmSpec& model, const Assignment& x, int u);

struct ExistentialResult {
    bool holds = false;
    std::optional<Assignment> witness_x;
    std::optional<int> witness_u;
};

// Exists (x, u) where intervening on the action changes the outcome
// distribution. Searches u = 1 first, then x in increasing bit order.
ExistentialResult check_impactful_action(const ScmSpec& model);

// Exists x where intervening on the context changes the action distribution.
ExistentialResult check_non_algorithmic_action(const ScmSpec& model);

// First (x, u) where all three expertise conditions hold, if any; combinations
// whose conditioning events have zero probability are skipped.
std::optional<ExpertiseVerdict> find_expertly_targeted(const ScmSpec& model);

// Numeric conditional dependence of action and outcome given the feature
// variables, on the observational joint.
bool action_outcome_dependent(const ScmSpec& model);

struct DisjunctionVerdict {
    bool dependent = false;        // action and outcome conditionally dependent
    bool impactful = false;
    bool non_algorithmic = false;
    bool vacuous = false;          // antecedent failed; implication holds trivially
    bool pass = false;
};

// Conditional dependence must be witnessed by an action effect, a context
// effect on the action, or both.
DisjunctionVerdict verify_proposition3(const ScmSpec& model);

// Feature variables: everything outside the action/outcome/context roles.
std::vector<std::string> feature_variables(const ScmSpec& model);

}  // namespace expaudit::expertise
