#include "expaudit/scm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace expaudit::scm {

// ---------------------------------------------------------------------------
// Expr
// ---------------------------------------------------------------------------

Expr Expr::constant(int v) {
    Expr e;
    e.kind_ = Kind::kConst;
    e.const_value_ = v ? 1 : 0;
    return e;
}

Expr Expr::parent(std::string name) {
    Expr e;
    e.kind_ = Kind::kParent;
    e.parent_name_ = std::move(name);
    return e;
}

Expr Expr::noise() {
    Expr e;
    e.kind_ = Kind::kNoise;
    return e;
}

Expr Expr::min_of(Expr a, Expr b) {
    Expr e;
    e.kind_ = Kind::kMin;
    e.children_.push_back(std::move(a));
    e.children_.push_back(std::move(b));
    return e;
}

Expr Expr::max_of(Expr a, Expr b) {
    Expr e;
    e.kind_ = Kind::kMax;
    e.children_.push_back(std::move(a));
    e.children_.push_back(std::move(b));
    return e;
}

Expr Expr::complement(Expr a) {
    Expr e;
    e.kind_ = Kind::kComplement;
    e.children_.push_back(std::move(a));
    return e;
}

bool Expr::uses_noise() const {
    if (kind_ == Kind::kNoise) return true;
    for (const auto& c : children_)
        if (c.uses_noise()) return true;
    return false;
}

void Expr::collect_parents(std::vector<std::string>& out) const {
    if (kind_ == Kind::kParent) {
        if (std::find(out.begin(), out.end(), parent_name_) == out.end())
            out.push_back(parent_name_);
    }
    for (const auto& c : children_) c.collect_parents(out);
}

int Expr::eval(const std::vector<std::string>& parent_order,
               const std::vector<int>& parent_values, int noise_bit) const {
    switch (kind_) {
        case Kind::kConst:
            return const_value_;
        case Kind::kNoise:
            return noise_bit;
        case Kind::kParent: {
            for (std::size_t i = 0; i < parent_order.size(); ++i)
                if (parent_order[i] == parent_name_) return parent_values[i];
            throw UnknownVariable("equation references undeclared parent '" + parent_name_ + "'");
        }
        case Kind::kMin:
            return std::min(children_[0].eval(parent_order, parent_values, noise_bit),
                            children_[1].eval(parent_order, parent_values, noise_bit));
        case Kind::kMax:
            return std::max(children_[0].eval(parent_order, parent_values, noise_bit),
                            children_[1].eval(parent_order, parent_values, noise_bit));
        case Kind::kComplement:
            return 1 - children_[0].eval(parent_order, parent_values, noise_bit);
    }
    return 0;
}

std::string Expr::to_string(const std::string& noise_name) const {
    switch (kind_) {
        case Kind::kConst:
            return const_value_ ? "1" : "0";
        case Kind::kNoise:
            return noise_name;
        case Kind::kParent:
            return parent_name_;
        case Kind::kMin:
            return "min(" + children_[0].to_string(noise_name) + ", " +
                   children_[1].to_string(noise_name) + ")";
        case Kind::kMax:
            return "max(" + children_[0].to_string(noise_name) + ", " +
                   children_[1].to_string(noise_name) + ")";
        case Kind::kComplement:
            return "not(" + children_[0].to_string(noise_name) + ")";
    }
    return "";
}

// ---------------------------------------------------------------------------
// ScmSpec / ScmBuilder
// ---------------------------------------------------------------------------

int ScmSpec::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return static_cast<int>(i);
    throw UnknownVariable("unknown variable '" + name + "'");
}

std::optional<int> ScmSpec::find(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return static_cast<int>(i);
    return std::nullopt;
}

const ScmSpec::Variable& ScmSpec::variable(const std::string& name) const {
    return vars_[static_cast<std::size_t>(index_of(name))];
}

std::vector<int> ScmSpec::parent_indices(int var) const {
    std::vector<int> out;
    out.reserve(vars_[static_cast<std::size_t>(var)].parents.size());
    for (const auto& p : vars_[static_cast<std::size_t>(var)].parents) out.push_back(index_of(p));
    return out;
}

VariableRoles ScmSpec::roles() const {
    if (roles_) return *roles_;
    VariableRoles r;
    r.action = "A";
    r.outcome = "Y";
    if (find("U")) r.context = "U";
    return r;
}

std::vector<int> ScmSpec::evaluate(std::uint32_t noise_bits) const {
    std::vector<int> values(vars_.size(), 0);
    std::vector<int> pvals;
    for (int vi : topo_) {
        const Variable& v = vars_[static_cast<std::size_t>(vi)];
        const int noise_bit = (noise_bits >> vi) & 1u;
        pvals.clear();
        for (const auto& pname : v.parents) {
            // index_of is safe: validated at build time
            pvals.push_back(values[static_cast<std::size_t>(index_of(pname))]);
        }
        int out;
        if (std::holds_alternative<Expr>(v.equation)) {
            out = std::get<Expr>(v.equation).eval(v.parents, pvals, noise_bit);
        } else {
            const TruthTable& t = std::get<TruthTable>(v.equation);
            std::size_t idx = 0;
            for (int pv : pvals) idx = (idx << 1) | static_cast<std::size_t>(pv);
            idx = (idx << 1) | static_cast<std::size_t>(noise_bit);
            out = t.out[idx];
        }
        values[static_cast<std::size_t>(vi)] = out;
    }
    return values;
}

ScmBuilder& ScmBuilder::variable(const std::string& name, double noise_p, Expr equation) {
    ScmSpec::Variable v;
    v.name = name;
    v.noise_p = noise_p;
    equation.collect_parents(v.parents);
    v.equation = std::move(equation);
    vars_.push_back(std::move(v));
    return *this;
}

ScmBuilder& ScmBuilder::variable(const std::string& name, double noise_p,
                                 std::vector<std::string> parents, TruthTable table) {
    ScmSpec::Variable v;
    v.name = name;
    v.noise_p = noise_p;
    v.parents = std::move(parents);
    v.equation = std::move(table);
    vars_.push_back(std::move(v));
    return *this;
}

ScmBuilder& ScmBuilder::roles(const std::string& action, const std::string& outcome,
                              std::optional<std::string> context) {
    VariableRoles r;
    r.action = action;
    r.outcome = outcome;
    r.context = std::move(context);
    roles_ = std::move(r);
    return *this;
}

namespace {

bool table_uses_noise(const TruthTable& t) {
    for (std::size_t i = 0; i + 1 < t.out.size(); i += 2)
        if (t.out[i] != t.out[i + 1]) return true;
    return false;
}

}  // namespace

ScmSpec ScmBuilder::build() const {
    ScmSpec m;
    m.vars_ = vars_;
    m.roles_ = roles_;

    const std::size_t n = m.vars_.size();
    if (n > 32) throw TooManyVariables("model has more than 32 variables");

    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < n; ++i) {
        if (index.count(m.vars_[i].name))
            throw ValidationError("variable '" + m.vars_[i].name + "' declared twice");
        index[m.vars_[i].name] = static_cast<int>(i);
    }

    for (const auto& v : m.vars_) {
        if (!(v.noise_p > 0.0 && v.noise_p < 1.0))
            throw ValidationError("noise parameter for '" + v.name + "' must lie in (0,1)");
        std::unordered_set<std::string> seen;
        for (const auto& p : v.parents) {
            if (!index.count(p))
                throw UnknownVariable("parent '" + p + "' of '" + v.name + "' is not declared");
            if (p == v.name) throw ValidationError("variable '" + v.name + "' lists itself as parent");
            if (!seen.insert(p).second)
                throw ValidationError("duplicate parent '" + p + "' of '" + v.name + "'");
        }
        if (std::holds_alternative<Expr>(v.equation)) {
            std::vector<std::string> refs;
            std::get<Expr>(v.equation).collect_parents(refs);
            for (const auto& r : refs)
                if (std::find(v.parents.begin(), v.parents.end(), r) == v.parents.end())
                    throw ValidationError("equation of '" + v.name + "' references '" + r +
                                          "' outside its parent list");
        } else {
            const auto& t = std::get<TruthTable>(v.equation);
            const std::size_t want = std::size_t{1} << (v.parents.size() + 1);
            if (t.out.size() != want)
                throw ValidationError("truth table of '" + v.name + "' has " +
                                      std::to_string(t.out.size()) + " entries, expected " +
                                      std::to_string(want));
            for (auto b : t.out)
                if (b > 1) throw ValidationError("truth table of '" + v.name + "' has non-binary output");
        }
    }

    // Kahn topological sort; leftover nodes mean a cycle.
    std::vector<int> indeg(n, 0);
    m.children_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& p : m.vars_[i].parents) {
            m.children_[static_cast<std::size_t>(index[p])].push_back(static_cast<int>(i));
            ++indeg[i];
        }
    }
    std::deque<int> q;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) q.push_back(static_cast<int>(i));
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        m.topo_.push_back(u);
        for (int c : m.children_[static_cast<std::size_t>(u)])
            if (--indeg[static_cast<std::size_t>(c)] == 0) q.push_back(c);
    }
    if (m.topo_.size() != n) throw ValidationError("parent relation contains a cycle");

    m.noise_used_.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& eq = m.vars_[i].equation;
        m.noise_used_[i] = std::holds_alternative<Expr>(eq)
                               ? std::get<Expr>(eq).uses_noise()
                               : table_uses_noise(std::get<TruthTable>(eq));
    }

    if (m.roles_) {
        m.index_of(m.roles_->action);
        m.index_of(m.roles_->outcome);
        if (m.roles_->context) m.index_of(*m.roles_->context);
    }
    return m;
}

// ---------------------------------------------------------------------------
// JointDistribution
// ---------------------------------------------------------------------------

int JointDistribution::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
        if (variables[i] == name) return static_cast<int>(i);
    throw UnknownVariable("unknown variable '" + name + "' in distribution");
}

namespace {

// Compiles a partial assignment into (mask, bits) over the table's indexing.
std::pair<std::uint32_t, std::uint32_t> compile_assignment(const JointDistribution& dist,
                                                           const Assignment& a) {
    std::uint32_t mask = 0, bits = 0;
    for (const auto& [name, value] : a) {
        const int j = dist.index_of(name);
        const std::uint32_t b = 1u << j;
        if (mask & b) throw ValidationError("variable '" + name + "' assigned twice");
        mask |= b;
        if (value) bits |= b;
    }
    return {mask, bits};
}

}  // namespace

double JointDistribution::prob(const Assignment& partial) const {
    const auto [mask, bits] = compile_assignment(*this, partial);
    double total = 0.0;
    const auto size = static_cast<std::uint32_t>(probs.size());
    for (std::uint32_t idx = 0; idx < size; ++idx)
        if ((idx & mask) == bits) total += probs(idx);
    return total;
}

void JointDistribution::validate() const {
    if (probs.size() != (1L << variables.size()))
        throw ValidationError("probability table size does not match variable count");
    if ((probs.array() < 0).any()) throw ValidationError("negative probability in table");
    if (std::abs(probs.sum() - 1.0) > 1e-12)
        throw ValidationError("probability table does not sum to 1");
}

// ---------------------------------------------------------------------------
// Enumeration and interventions
// ---------------------------------------------------------------------------

JointDistribution enumerate_joint(const ScmSpec& model) {
    const std::size_t n = model.size();
    if (n > static_cast<std::size_t>(kMaxEnumerationBits))
        throw TooManyNoiseVariables("model has " + std::to_string(n) +
                                    " variables; enumeration is capped at 2^" +
                                    std::to_string(kMaxEnumerationBits));

    // Only noise bits that some equation reads need enumerating; the rest
    // marginalize out exactly.
    std::vector<int> active;
    for (std::size_t i = 0; i < n; ++i)
        if (model.noise_used(static_cast<int>(i))) active.push_back(static_cast<int>(i));
    if (active.size() > static_cast<std::size_t>(kMaxEnumerationBits))
        throw TooManyNoiseVariables("model uses " + std::to_string(active.size()) +
                                    " noise variables; enumeration is capped at 2^" +
                                    std::to_string(kMaxEnumerationBits));

    JointDistribution dist;
    for (const auto& v : model.variables()) dist.variables.push_back(v.name);
    dist.probs = Eigen::VectorXd::Zero(1L << n);

    const std::uint32_t configs = 1u << active.size();
    for (std::uint32_t c = 0; c < configs; ++c) {
        std::uint32_t noise_bits = 0;
        double mass = 1.0;
        for (std::size_t k = 0; k < active.size(); ++k) {
            const int vi = active[k];
            const double p = model.variables()[static_cast<std::size_t>(vi)].noise_p;
            if ((c >> k) & 1u) {
                noise_bits |= 1u << vi;
                mass *= p;
            } else {
                mass *= 1.0 - p;
            }
        }
        const std::vector<int> values = model.evaluate(noise_bits);
        std::uint32_t idx = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (values[j]) idx |= 1u << j;
        dist.probs(idx) += mass;
    }
    return dist;
}

ScmSpec intervene(const ScmSpec& model, const DoAssignment& doing) {
    std::set<std::string> seen;
    for (const auto& [name, value] : doing.assignments) {
        model.index_of(name);  // UnknownVariable on bad names
        if (!seen.insert(name).second)
            throw ValidationError("variable '" + name + "' intervened twice");
        if (value != 0 && value != 1)
            throw ValidationError("intervention value for '" + name + "' must be 0 or 1");
    }

    ScmBuilder b;
    for (const auto& v : model.variables()) {
        const auto it = std::find_if(doing.assignments.begin(), doing.assignments.end(),
                                     [&](const auto& kv) { return kv.first == v.name; });
        if (it != doing.assignments.end()) {
            b.variable(v.name, v.noise_p, Expr::constant(it->second));
        } else if (std::holds_alternative<Expr>(v.equation)) {
            b.variable(v.name, v.noise_p, std::get<Expr>(v.equation));
        } else {
            b.variable(v.name, v.noise_p, v.parents, std::get<TruthTable>(v.equation));
        }
    }
    if (model.declared_roles())
        b.roles(model.declared_roles()->action, model.declared_roles()->outcome,
                model.declared_roles()->context);
    return b.build();
}

double conditional_probability(const JointDistribution& dist, const Assignment& event,
                               const Assignment& given) {
    const double pg = dist.prob(given);
    if (pg < kNullEventTol)
        throw ConditioningOnNullEvent("conditioning event has probability " + std::to_string(pg));
    Assignment both = event;
    for (const auto& kv : given) {
        const auto it = std::find_if(event.begin(), event.end(),
                                     [&](const auto& e) { return e.first == kv.first; });
        if (it != event.end()) {
            if (it->second != kv.second) return 0.0;  // contradictory overlap
        } else {
            both.push_back(kv);
        }
    }
    return dist.prob(both) / pg;
}

JointDistribution marginalize(const JointDistribution& dist,
                              const std::vector<std::string>& keep) {
    JointDistribution out;
    out.variables = keep;
    std::vector<int> src;
    src.reserve(keep.size());
    for (const auto& name : keep) src.push_back(dist.index_of(name));

    out.probs = Eigen::VectorXd::Zero(1L << keep.size());
    const auto size = static_cast<std::uint32_t>(dist.probs.size());
    for (std::uint32_t idx = 0; idx < size; ++idx) {
        std::uint32_t sub = 0;
        for (std::size_t j = 0; j < src.size(); ++j)
            if ((idx >> src[j]) & 1u) sub |= 1u << j;
        out.probs(sub) += dist.probs(idx);
    }
    return out;
}

// ---------------------------------------------------------------------------
// d-separation (reachability formulation)
// ---------------------------------------------------------------------------

bool d_separated(const ScmSpec& model, const std::vector<std::string>& x,
                 const std::vector<std::string>& y, const std::vector<std::string>& z) {
    const std::size_t n = model.size();
    std::vector<bool> in_x(n, false), in_y(n, false), in_z(n, false);
    for (const auto& s : x) in_x[static_cast<std::size_t>(model.index_of(s))] = true;
    for (const auto& s : y) in_y[static_cast<std::size_t>(model.index_of(s))] = true;
    for (const auto& s : z) in_z[static_cast<std::size_t>(model.index_of(s))] = true;
    for (std::size_t i = 0; i < n; ++i) {
        const int overlaps = (in_x[i] ? 1 : 0) + (in_y[i] ? 1 : 0) + (in_z[i] ? 1 : 0);
        if (overlaps > 1) throw ValidationError("d-separation sets must be disjoint");
    }

    // Ancestors of Z (inclusive).
    std::vector<bool> anc(n, false);
    std::deque<int> q;
    for (std::size_t i = 0; i < n; ++i)
        if (in_z[i]) {
            anc[i] = true;
            q.push_back(static_cast<int>(i));
        }
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (int p : model.parent_indices(u))
            if (!anc[static_cast<std::size_t>(p)]) {
                anc[static_cast<std::size_t>(p)] = true;
                q.push_back(p);
            }
    }

    // State (node, entered-from): 0 = entered via an edge from a child
    // (moving up), 1 = entered via an edge from a parent (moving down).
    std::vector<std::array<bool, 2>> visited(n, {false, false});
    std::deque<std::pair<int, int>> frontier;
    for (std::size_t i = 0; i < n; ++i)
        if (in_x[i]) frontier.emplace_back(static_cast<int>(i), 0);

    while (!frontier.empty()) {
        const auto [u, dir] = frontier.front();
        frontier.pop_front();
        const auto ui = static_cast<std::size_t>(u);
        if (visited[ui][static_cast<std::size_t>(dir)]) continue;
        visited[ui][static_cast<std::size_t>(dir)] = true;
        if (in_y[ui]) return false;  // active trail reached Y

        if (dir == 0) {
            // Came up from a child: pass through unless conditioned on.
            if (!in_z[ui]) {
                for (int p : model.parent_indices(u)) frontier.emplace_back(p, 0);
                for (int c : model.children()[ui]) frontier.emplace_back(c, 1);
            }
        } else {
            // Came down from a parent: chains need u not in Z; colliders
            // open only when u is an ancestor of (or in) Z.
            if (!in_z[ui])
                for (int c : model.children()[ui]) frontier.emplace_back(c, 1);
            if (anc[ui])
                for (int p : model.parent_indices(u)) frontier.emplace_back(p, 0);
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Numeric independence + structural checks
// ---------------------------------------------------------------------------

namespace {

// All assignments over `vars`, as Assignment values, in increasing bit order.
std::vector<Assignment> all_assignments(const std::vector<std::string>& vars) {
    std::vector<Assignment> out;
    const std::uint32_t total = 1u << vars.size();
    out.reserve(total);
    for (std::uint32_t bits = 0; bits < total; ++bits) {
        Assignment a;
        for (std::size_t j = 0; j < vars.size(); ++j)
            a.emplace_back(vars[j], static_cast<int>((bits >> j) & 1u));
        out.push_back(std::move(a));
    }
    return out;
}

Assignment concat(const Assignment& a, const Assignment& b) {
    Assignment out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

bool numerically_independent(const JointDistribution& dist,
                             const std::vector<std::string>& x,
                             const std::vector<std::string>& y,
                             const std::vector<std::string>& z, double tol) {
    const auto xs = all_assignments(x);
    const auto ys = all_assignments(y);
    const auto zs = all_assignments(z);
    for (const auto& za : zs) {
        const double pz = dist.prob(za);
        if (pz < kNullEventTol) continue;
        for (const auto& xa : xs) {
            const double px = dist.prob(concat(xa, za)) / pz;
            for (const auto& ya : ys) {
                const double py = dist.prob(concat(ya, za)) / pz;
                const double pxy = dist.prob(concat(concat(xa, ya), za)) / pz;
                if (std::abs(pxy - px * py) > tol) return false;
            }
        }
    }
    return true;
}

MinimalityReport check_causal_minimality(const ScmSpec& model) {
    const JointDistribution joint = enumerate_joint(model);
    MinimalityReport report;
    for (const auto& v : model.variables()) {
        for (const auto& parent : v.parents) {
            std::vector<std::string> rest;
            for (const auto& other : v.parents)
                if (other != parent) rest.push_back(other);

            MinimalityEntry entry;
            entry.variable = v.name;
            entry.parent = parent;

            // Largest deviation from factorization across assignments.
            double max_gap = 0.0;
            const auto xs = all_assignments({parent});
            const auto ys = all_assignments({v.name});
            for (const auto& za : all_assignments(rest)) {
                const double pz = joint.prob(za);
                if (pz < kNullEventTol) continue;
                for (const auto& xa : xs)
                    for (const auto& ya : ys) {
                        const double px = joint.prob(concat(xa, za)) / pz;
                        const double py = joint.prob(concat(ya, za)) / pz;
                        const double pxy = joint.prob(concat(concat(xa, ya), za)) / pz;
                        max_gap = std::max(max_gap, std::abs(pxy - px * py));
                    }
            }
            entry.max_gap = max_gap;
            entry.dependent = max_gap > kIndependenceTol;
            if (!entry.dependent) report.minimal = false;
            report.entries.push_back(std::move(entry));
        }
    }
    return report;
}

FaithfulnessReport check_faithfulness(const ScmSpec& model) {
    const std::size_t n = model.size();
    if (n > 5)
        throw TooManyVariables("faithfulness enumeration is limited to 5 variables, model has " +
                               std::to_string(n));
    const JointDistribution joint = enumerate_joint(model);

    FaithfulnessReport report;
    std::vector<std::string> names;
    for (const auto& v : model.variables()) names.push_back(v.name);

    // Assign each variable to one of {X, Y, Z, out}; 4^n statements.
    std::vector<int> slot(n, 0);
    const std::uint64_t total = [&] {
        std::uint64_t t = 1;
        for (std::size_t i = 0; i < n; ++i) t *= 4;
        return t;
    }();
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        std::vector<std::string> x, y, z;
        for (std::size_t i = 0; i < n; ++i) {
            switch (c & 3u) {
                case 0: break;
                case 1: x.push_back(names[i]); break;
                case 2: y.push_back(names[i]); break;
                case 3: z.push_back(names[i]); break;
            }
            c >>= 2;
        }
        if (x.empty() || y.empty()) continue;
        // (X,Y) is symmetric; keep the orientation where X holds the
        // earliest-declared variable.
        if (model.index_of(x.front()) > model.index_of(y.front())) continue;

        if (numerically_independent(joint, x, y, z) && !d_separated(model, x, y, z))
            report.violations.push_back({x, y, z});
    }
    return report;
}

}  // namespace expaudit::scm
