#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "expaudit/errors.hpp"

namespace expaudit::scm {

// ---------------------------------------------------------------------------
// Structural expressions
//
// Each endogenous variable is a deterministic function of its parents and one
// private Bernoulli noise bit. Structural equations are either expression
// trees over {parent references, own noise, constants 0/1, min, max, 1-x}, or
// explicit truth tables keyed by the (parents, noise) assignment.
// ---------------------------------------------------------------------------
class Expr {
public:
    enum class Kind { kConst, kParent, kNoise, kMin, kMax, kComplement };

    static Expr constant(int v);
    static Expr parent(std::string name);
    static Expr noise();
    static Expr min_of(Expr a, Expr b);
    static Expr max_of(Expr a, Expr b);
    static Expr complement(Expr a);

    Kind kind() const { return kind_; }
    int const_value() const { return const_value_; }
    const std::string& parent_name() const { return parent_name_; }
    const std::vector<Expr>& children() const { return children_; }

    bool uses_noise() const;
    void collect_parents(std::vector<std::string>& out) const;

    // Evaluate against parent values (indexed into `parent_order`) and the
    // variable's own noise bit.
    int eval(const std::vector<std::string>& parent_order,
             const std::vector<int>& parent_values, int noise_bit) const;

    // Renders the equation in the model-file notation, e.g. "min(A, max(U, N))".
    std::string to_string(const std::string& noise_name) const;

private:
    Kind kind_ = Kind::kConst;
    int const_value_ = 0;
    std::string parent_name_;
    std::vector<Expr> children_;
};

// Truth-table equation: out[idx] with idx formed from the declared parent
// values (first parent = most significant bit) followed by the noise bit.
struct TruthTable {
    std::vector<std::uint8_t> out;  // size == 1 << (parent_count + 1)
};

using Equation = std::variant<Expr, TruthTable>;

// Optional designation of which variables play the action / outcome /
// non-algorithmic-context roles in audit computations. Variables outside
// these roles are the algorithmically visible features.
struct VariableRoles {
    std::string action = "A";
    std::string outcome = "Y";
    std::optional<std::string> context;  // absent when the model has no such variable
};

// ---------------------------------------------------------------------------
// ScmSpec — a small discrete structural causal model over binary variables
// ---------------------------------------------------------------------------
class ScmSpec {
public:
    struct Variable {
        std::string name;
        double noise_p = 0.5;               // Bernoulli parameter, in (0,1)
        std::vector<std::string> parents;   // ordered
        Equation equation;
    };

    const std::vector<Variable>& variables() const { return vars_; }
    std::size_t size() const { return vars_.size(); }

    int index_of(const std::string& name) const;          // throws UnknownVariable
    std::optional<int> find(const std::string& name) const;
    const Variable& variable(const std::string& name) const;

    // Evaluation order consistent with the parent relation.
    const std::vector<int>& topological_order() const { return topo_; }

    // Children lists in variable-index space (derived from parents).
    const std::vector<std::vector<int>>& children() const { return children_; }
    std::vector<int> parent_indices(int var) const;

    bool noise_used(int var) const { return noise_used_[var]; }

    const std::optional<VariableRoles>& declared_roles() const { return roles_; }

    // Declared roles if present, else the A/Y/U naming convention.
    VariableRoles roles() const;

    // Evaluate every variable for one noise configuration (bit i of
    // `noise_bits` is variable i's noise). Values returned in variable order.
    std::vector<int> evaluate(std::uint32_t noise_bits) const;

    friend class ScmBuilder;

private:
    std::vector<Variable> vars_;
    std::vector<int> topo_;
    std::vector<std::vector<int>> children_;
    std::vector<bool> noise_used_;
    std::optional<VariableRoles> roles_;
};

// Incremental construction + validation. `build()` checks acyclicity, parent
// references, noise ranges, and truth-table sizes.
class ScmBuilder {
public:
    // Parents are inferred from the expression tree.
    ScmBuilder& variable(const std::string& name, double noise_p, Expr equation);
    // Truth-table form requires the parent order to be explicit.
    ScmBuilder& variable(const std::string& name, double noise_p,
                         std::vector<std::string> parents, TruthTable table);
    ScmBuilder& roles(const std::string& action, const std::string& outcome,
                      std::optional<std::string> context = std::nullopt);
    ScmSpec build() const;

private:
    std::vector<ScmSpec::Variable> vars_;
    std::optional<VariableRoles> roles_;
};

// ---------------------------------------------------------------------------
// Distributions and interventions
// ---------------------------------------------------------------------------

// One (partial) assignment of binary values to named variables.
using Assignment = std::vector<std::pair<std::string, int>>;

// Exact probability table over an ordered set of binary variables.
// probs(idx) is the mass of the assignment where variable j has bit j of idx.
struct JointDistribution {
    std::vector<std::string> variables;
    Eigen::VectorXd probs;

    int index_of(const std::string& name) const;  // throws UnknownVariable

    // Sum of probabilities of all full assignments consistent with `partial`.
    double prob(const Assignment& partial) const;

    // Checks nonnegativity and that the table sums to 1 within 1e-12.
    void validate() const;
};

struct DoAssignment {
    Assignment assignments;
};

inline constexpr int kMaxEnumerationBits = 20;
inline constexpr double kIndependenceTol = 1e-9;
inline constexpr double kNullEventTol = 1e-15;

// Exact joint over all endogenous variables, obtained by enumerating the
// noise configurations actually referenced by equations.
JointDistribution enumerate_joint(const ScmSpec& model);

// Graph mutilation: intervened variables become constants with no parents.
ScmSpec intervene(const ScmSpec& model, const DoAssignment& doing);

// P(event | given) on an exact table. Throws ConditioningOnNullEvent when
// P(given) < 1e-15.
double conditional_probability(const JointDistribution& dist, const Assignment& event,
                               const Assignment& given);

// Marginal table over `keep` (in the order given).
JointDistribution marginalize(const JointDistribution& dist,
                              const std::vector<std::string>& keep);

// Classic reachability d-separation over the induced DAG. Sets must be
// disjoint and nonempty for x and y.
bool d_separated(const ScmSpec& model, const std::vector<std::string>& x,
                 const std::vector<std::string>& y, const std::vector<std::string>& z);

// Numeric conditional independence of two variable sets given a third,
// evaluated on an exact joint at tolerance `tol`. Conditioning assignments
// with zero probability are vacuous.
bool numerically_independent(const JointDistribution& dist,
                             const std::vector<std::string>& x,
                             const std::vector<std::string>& y,
                             const std::vector<std::string>& z,
                             double tol = kIndependenceTol);

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

struct MinimalityEntry {
    std::string variable;
    std::string parent;
    bool dependent = false;   // parent carries dependence given the other parents
    double max_gap = 0.0;     // largest |P(x,v|rest) - P(x|rest)P(v|rest)| observed
};

struct MinimalityReport {
    std::vector<MinimalityEntry> entries;
    bool minimal = true;      // every declared parent is dependent
};

// For each declared parent X of V, tests X against V given the remaining
// parents on the exact joint.
MinimalityReport check_causal_minimality(const ScmSpec& model);

struct FaithfulnessViolation {
    std::vector<std::string> x;
    std::vector<std::string> y;
    std::vector<std::string> z;
};

struct FaithfulnessReport {
    std::vector<FaithfulnessViolation> violations;
    bool faithful() const { return violations.empty(); }
};

// Enumerates every disjoint-subset CI statement (at most 5 endogenous
// variables) and reports numeric independences that d-separation misses.
FaithfulnessReport check_faithfulness(const ScmSpec& model);

}  // namespace expaudit::scm
