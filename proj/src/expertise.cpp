#include "expaudit/expertise.hpp"

#include <cmath>

namespace expaudit::expertise {

using scm::DoAssignment;
using scm::JointDistribution;
using scm::VariableRoles;

namespace {

Assignment with_context(const Assignment& x, const VariableRoles& roles, int u) {
    Assignment given = x;
    if (roles.context) given.emplace_back(*roles.context, u);
    return given;
}

// P(outcome=1 | given) in the model mutilated by do(action=a).
double outcome_under_do(const ScmSpec& model, const VariableRoles& roles, int a,
                        const Assignment& given) {
    const ScmSpec cut = scm::intervene(model, DoAssignment{{{roles.action, a}}});
    return scm::conditional_probability(scm::enumerate_joint(cut), {{roles.outcome, 1}}, given);
}

bool context_present(const ScmSpec& model, const VariableRoles& roles) {
    return roles.context && model.find(*roles.context).has_value();
}

}  // namespace

std::vector<std::string> feature_variables(const ScmSpec& model) {
    const VariableRoles roles = model.roles();
    std::vector<std::string> out;
    for (const auto& v : model.variables()) {
        if (v.name == roles.action || v.name == roles.outcome) continue;
        if (roles.context && v.name == *roles.context) continue;
        out.push_back(v.name);
    }
    return out;
}

ConditionResult check_effective_action(const ScmSpec& model, const Assignment& x, int u) {
    const VariableRoles roles = model.roles();
    const Assignment given =
        context_present(model, roles) ? with_context(x, roles, u) : x;
    const double left = outcome_under_do(model, roles, 1, given);
    const double right = outcome_under_do(model, roles, 0, given);
    ConditionResult r;
    r.margin = left - right;
    r.holds = r.margin > kMarginTol;
    return r;
}

ConditionResult check_targeted_action(const ScmSpec& model, const Assignment& x, int u) {
    const VariableRoles roles = model.roles();
    ConditionResult r;
    if (!context_present(model, roles)) {
        r.reason = "context absent";
        return r;
    }
    const auto action_given_do_u = [&](int uv) {
        const ScmSpec cut = scm::intervene(model, DoAssignment{{{*roles.context, uv}}});
        return scm::conditional_probability(scm::enumerate_joint(cut), {{roles.action, 1}}, x);
    };
    r.margin = action_given_do_u(u) - action_given_do_u(1 - u);
    r.holds = r.margin > kMarginTol;
    return r;
}

ConditionResult check_heterogeneous_action(const ScmSpec& model, const Assignment& x, int u) {
    const VariableRoles roles = model.roles();
    ConditionResult r;
    if (!context_present(model, roles)) {
        r.reason = "context absent";
        return r;
    }
    // Interventional lift of the action at a fixed context value.
    const auto lift = [&](int uv) {
        const auto term = [&](int a) {
            const ScmSpec cut = scm::intervene(
                model, DoAssignment{{{*roles.context, uv}, {roles.action, a}}});
            return scm::conditional_probability(scm::enumerate_joint(cut),
                                                {{roles.outcome, 1}}, x);
        };
        return term(1) - term(0);
    };
    r.margin = lift(u) - lift(1 - u);
    r.holds = r.margin > kMarginTol;
    return r;
}

ExpertiseVerdict check_expertly_targeted(const ScmSpec& model, const Assignment& x, int u) {
    const ConditionResult eff = check_effective_action(model, x, u);
    const ConditionResult tar = check_targeted_action(model, x, u);
    const ConditionResult het = check_heterogeneous_action(model, x, u);

    ExpertiseVerdict v;
    v.effective = eff.holds;
    v.targeted = tar.holds;
    v.heterogeneous = het.holds;
    v.expertly_targeted = eff.holds && tar.holds && het.holds;
    v.evaluated_x = x;
    v.evaluated_u = u;
    v.margin_effective = eff.margin;
    v.margin_targeted = tar.margin;
    v.margin_heterogeneous = het.margin;
    v.targeted_reason = tar.reason;
    v.heterogeneous_reason = het.reason;
    return v;
}

namespace {

std::vector<Assignment> feature_assignments(const ScmSpec& model) {
    const std::vector<std::string> feats = feature_variables(model);
    std::vector<Assignment> out;
    const std::uint32_t total = 1u << feats.size();
    for (std::uint32_t bits = 0; bits < total; ++bits) {
        Assignment a;
        for (std::size_t j = 0; j < feats.size(); ++j)
            a.emplace_back(feats[j], static_cast<int>((bits >> j) & 1u));
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace

ExistentialResult check_impactful_action(const ScmSpec& model) {
    const VariableRoles roles = model.roles();
    const bool has_u = context_present(model, roles);
    const ScmSpec cut1 = scm::intervene(model, DoAssignment{{{roles.action, 1}}});
    const ScmSpec cut0 = scm::intervene(model, DoAssignment{{{roles.action, 0}}});
    const JointDistribution j1 = scm::enumerate_joint(cut1);
    const JointDistribution j0 = scm::enumerate_joint(cut0);

    ExistentialResult res;
    // u = 1 is the branch where context-driven effects appear, so search it
    // first; the returned witness is the first found in this order.
    const std::vector<int> u_values = has_u ? std::vector<int>{1, 0} : std::vector<int>{0};
    for (int u : u_values) {
        for (const Assignment& x : feature_assignments(model)) {
            Assignment given = x;
            if (has_u) given.emplace_back(*roles.context, u);
            if (j1.prob(given) < scm::kNullEventTol || j0.prob(given) < scm::kNullEventTol)
                continue;
            const double left = scm::conditional_probability(j1, {{roles.outcome, 1}}, given);
            const double right = scm::conditional_probability(j0, {{roles.outcome, 1}}, given);
            if (std::abs(left - right) > kMarginTol) {
                res.holds = true;
                res.witness_x = x;
                if (has_u) res.witness_u = u;
                return res;
            }
        }
    }
    return res;
}

ExistentialResult check_non_algorithmic_action(const ScmSpec& model) {
    const VariableRoles roles = model.roles();
    ExistentialResult res;
    if (!context_present(model, roles)) return res;

    const ScmSpec cut1 = scm::intervene(model, DoAssignment{{{*roles.context, 1}}});
    const ScmSpec cut0 = scm::intervene(model, DoAssignment{{{*roles.context, 0}}});
    const JointDistribution j1 = scm::enumerate_joint(cut1);
    const JointDistribution j0 = scm::enumerate_joint(cut0);

    for (const Assignment& x : feature_assignments(model)) {
        if (j1.prob(x) < scm::kNullEventTol || j0.prob(x) < scm::kNullEventTol) continue;
        const double left = scm::conditional_probability(j1, {{roles.action, 1}}, x);
        const double right = scm::conditional_probability(j0, {{roles.action, 1}}, x);
        if (std::abs(left - right) > kMarginTol) {
            res.holds = true;
            res.witness_x = x;
            return res;
        }
    }
    return res;
}

std::optional<ExpertiseVerdict> find_expertly_targeted(const ScmSpec& model) {
    const VariableRoles roles = model.roles();
    const bool has_u = context_present(model, roles);
    const std::vector<int> u_values = has_u ? std::vector<int>{1, 0} : std::vector<int>{0};
    for (int u : u_values) {
        for (const Assignment& x : feature_assignments(model)) {
            try {
                const ExpertiseVerdict v = check_expertly_targeted(model, x, u);
                if (v.expertly_targeted) return v;
            } catch (const ConditioningOnNullEvent&) {
                // (x, u) not realizable in some mutilated model; not a witness.
            }
        }
    }
    return std::nullopt;
}

bool action_outcome_dependent(const ScmSpec& model) {
    const VariableRoles roles = model.roles();
    const JointDistribution joint = scm::enumerate_joint(model);
    return !scm::numerically_independent(joint, {roles.action}, {roles.outcome},
                                         feature_variables(model));
}

DisjunctionVerdict verify_proposition3(const ScmSpec& model) {
    DisjunctionVerdict v;
    v.dependent = action_outcome_dependent(model);
    if (!v.dependent) {
        v.vacuous = true;
        v.pass = true;
        return v;
    }
    v.impactful = check_impactful_action(model).holds;
    v.non_algorithmic = check_non_algorithmic_action(model).holds;
    v.pass = v.impactful || v.non_algorithmic;
    return v;
}

}  // namespace expaudit::expertise
