#pragma once

// Model builders and generators shared by the unit and acceptance suites.

#include <cmath>
#include <optional>
#include <vector>

#include "expaudit/rng.hpp"
#include "expaudit/scm.hpp"

namespace testutil {

using expaudit::CounterRng;
using expaudit::scm::Expr;
using expaudit::scm::ScmBuilder;
using expaudit::scm::ScmSpec;
using expaudit::scm::TruthTable;

// First counterexample model: context-driven action with a genuine effect.
//   U := N_U;  A := max(U, N_A);  Y := min(A, max(U, N_Y));  all noise Ber(p).
inline ScmSpec build_m1(double p) {
    ScmBuilder b;
    b.variable("U", p, Expr::noise());
    b.variable("A", p, Expr::max_of(Expr::parent("U"), Expr::noise()));
    b.variable("Y", p,
               Expr::min_of(Expr::parent("A"),
                            Expr::max_of(Expr::parent("U"), Expr::noise())));
    b.roles("A", "Y", "U");
    return b.build();
}

// Second member of the pair: identical (A, Y) law, no context variable.
//   A := N_A with Ber(2p - p^2);  Y := min(N_Y, A) with Ber((p^2-p-1)/(p-2)).
inline ScmSpec build_m2(double p) {
    ScmBuilder b;
    b.variable("A", 2 * p - p * p, Expr::noise());
    b.variable("Y", (p * p - p - 1) / (p - 2), Expr::min_of(Expr::noise(), Expr::parent("A")));
    b.roles("A", "Y");
    return b.build();
}

// m1 gated by a visible feature X, so matching has something to match on.
inline ScmSpec build_m1x(double p) {
    ScmBuilder b;
    b.variable("X", 0.5, Expr::noise());
    b.variable("U", p, Expr::noise());
    b.variable("A", p,
               Expr::min_of(Expr::parent("X"),
                            Expr::max_of(Expr::parent("U"), Expr::noise())));
    b.variable("Y", p,
               Expr::min_of(Expr::parent("X"),
                            Expr::min_of(Expr::parent("A"),
                                         Expr::max_of(Expr::parent("U"), Expr::noise()))));
    b.roles("A", "Y", "U");
    return b.build();
}

// Null model: A and Y conditionally independent given X, with both varying
// inside each X stratum. A = X ? N_A : 1-N_A, Y likewise with its own noise.
inline ScmSpec build_null_xay() {
    ScmBuilder b;
    b.variable("X", 0.5, Expr::noise());
    b.variable("A", 0.3, {"X"}, TruthTable{{1, 0, 0, 1}});
    b.variable("Y", 0.4, {"X"}, TruthTable{{1, 0, 0, 1}});
    b.roles("A", "Y");
    return b.build();
}

// Random four-variable model over {X, U, A, Y} with the decision-setting
// shape: X and U are roots, A may depend on X and U, Y on X, U, and A.
// Equations are random truth tables constrained to actually respond to every
// declared input (flipping any single input changes the output somewhere),
// so declared edges are never dead.
inline ScmSpec random_decision_scm(std::uint64_t seed, std::uint64_t index) {
    CounterRng rng(seed, "random-scm", index);

    const auto noise_p = [&] { return 0.2 + 0.6 * rng.next_unit(); };

    const bool edge_xa = rng.next_bit();
    const bool edge_ua = rng.next_bit();
    const bool edge_xy = rng.next_bit();
    const bool edge_uy = rng.next_bit();
    const bool edge_ay = rng.next_bit();

    const auto random_table = [&](std::size_t inputs) {
        // inputs counts the parents; the noise bit is appended last.
        const std::size_t size = std::size_t{1} << (inputs + 1);
        TruthTable t;
        while (true) {
            t.out.clear();
            for (std::size_t i = 0; i < size; ++i)
                t.out.push_back(rng.next_bit() ? 1 : 0);
            // Every input (and the noise) must matter somewhere.
            bool all_active = true;
            for (std::size_t bit = 0; bit <= inputs; ++bit) {
                bool active = false;
                for (std::size_t i = 0; i < size; ++i)
                    if (t.out[i] != t.out[i ^ (std::size_t{1} << bit)]) {
                        active = true;
                        break;
                    }
                if (!active) {
                    all_active = false;
                    break;
                }
            }
            if (all_active) return t;
        }
    };

    ScmBuilder b;
    b.variable("X", noise_p(), Expr::noise());
    b.variable("U", noise_p(), Expr::noise());

    std::vector<std::string> a_parents;
    if (edge_xa) a_parents.push_back("X");
    if (edge_ua) a_parents.push_back("U");
    b.variable("A", noise_p(), a_parents, random_table(a_parents.size()));

    std::vector<std::string> y_parents;
    if (edge_xy) y_parents.push_back("X");
    if (edge_uy) y_parents.push_back("U");
    if (edge_ay) y_parents.push_back("A");
    b.variable("Y", noise_p(), y_parents, random_table(y_parents.size()));

    b.roles("A", "Y", "U");
    return b.build();
}

// Draws random decision models until `count` faithful ones are collected.
inline std::vector<ScmSpec> random_faithful_scms(std::uint64_t seed, int count) {
    std::vector<ScmSpec> out;
    for (std::uint64_t index = 0; static_cast<int>(out.size()) < count; ++index) {
        ScmSpec m = random_decision_scm(seed, index);
        if (expaudit::scm::check_faithfulness(m).faithful()) out.push_back(std::move(m));
    }
    return out;
}

}  // namespace testutil
