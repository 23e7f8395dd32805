// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reference implementations and generators shared by the test binaries.
// The oracles work on id-keyed maps straight from the model's association
// list and share no code with the library's index-based algorithms.

#include "mlproc/catalog.hpp"
#include "mlproc/conformance.hpp"
#include "mlproc/dsl.hpp"
#include "mlproc/ltl.hpp"
#include "mlproc/model.hpp"
#include "mlproc/search.hpp"
#include "mlproc/semantics.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using mlproc::AssociationKind;
using mlproc::Element;
using mlproc::ElementId;
using mlproc::ElementKind;
using mlproc::ElementState;
using mlproc::InstanceState;
using mlproc::Phase;
using mlproc::ProcessModel;
using mlproc::Trace;

constexpr ElementState I = ElementState::inactive;
constexpr ElementState A = ElementState::active;
constexpr ElementState D = ElementState::done;
constexpr ElementState kValues[] = {I, A, D};

// ---------------------------------------------------------------------------
// Small models

inline ProcessModel two_element_model() {
    ProcessModel m;
    m.name = "pair";
    m.elements = {{"a", ElementKind::human_task, Phase::planning, "", false, ""},
                  {"b", ElementKind::data, Phase::planning, "", false, ""}};
    m.associations = {{AssociationKind::produce, "a", "b"}};
    return m;
}

/// act_a -> art_a -> act_b -> art_b. Index order (act_a, act_b, art_a, art_b)
/// differs from the dependency order on purpose.
inline ProcessModel chain_model() {
    ProcessModel m;
    m.name = "chain";
    m.elements = {{"act_a", ElementKind::human_task, Phase::planning, "", false, ""},
                  {"art_a", ElementKind::data, Phase::planning, "", false, ""},
                  {"act_b", ElementKind::automated_procedure, Phase::development, "", false, ""},
                  {"art_b", ElementKind::logical_statement, Phase::development, "", false, ""}};
    m.associations = {{AssociationKind::produce, "act_a", "art_a"},
                      {AssociationKind::require, "art_a", "act_b"},
                      {AssociationKind::produce, "act_b", "art_b"}};
    return m;
}

// ---------------------------------------------------------------------------
// Generators

class Rng {
public:
    explicit Rng(std::uint64_t seed) : _engine(seed) {}

    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(_engine); }
    bool chance(double p) { return std::bernoulli_distribution(p)(_engine); }
    template <class T> const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

private:
    std::mt19937_64 _engine;
};

inline std::string random_text(Rng& rng) {
    static const std::vector<std::string> pieces = {"Data", " ", "\"q\"", "\\", "\n", "x", "ML", "-", "#", "=", "é"};
    std::string s;
    const auto n = rng.below(5);
    for (std::size_t i = 0; i < n; ++i) {
        s += rng.pick(pieces);
    }
    return s;
}

/// Well-formed model: activities in dependency order, each requiring some
/// earlier artifacts and producing one or two new ones; optional external
/// inputs; feedback from artifacts to strict ancestors.
inline ProcessModel random_model(Rng& rng, std::size_t activities, std::size_t externals = 1,
                                 bool decorate = false) {
    ProcessModel m;
    m.name = "gen" + std::to_string(rng.below(1000));
    const std::vector<Phase> phases = {Phase::planning, Phase::development, Phase::deployment, Phase::operations};
    const std::vector<ElementKind> artifact_kinds = {ElementKind::data, ElementKind::logical_statement,
                                                     ElementKind::functional_description};
    auto decorate_element = [&](Element& e) {
        e.phase = rng.pick(phases);
        if (decorate) {
            e.lane = random_text(rng);
            e.display_name = random_text(rng);
        }
    };
    std::vector<ElementId> pool;
    for (std::size_t k = 0; k < externals; ++k) {
        Element e{"ext" + std::to_string(k), rng.pick(artifact_kinds), Phase::planning, "", true, ""};
        decorate_element(e);
        m.elements.push_back(e);
        pool.push_back(e.id);
    }
    std::size_t next_artifact = 0;
    for (std::size_t k = 0; k < activities; ++k) {
        Element act{"act" + std::to_string(k),
                    rng.chance(0.5) ? ElementKind::human_task : ElementKind::automated_procedure, Phase::planning,
                    "", false, ""};
        decorate_element(act);
        m.elements.push_back(act);
        for (const auto& p : pool) {
            if (rng.chance(0.4)) {
                m.associations.push_back({AssociationKind::require, p, act.id});
            }
        }
        const auto produced = 1 + rng.below(2);
        for (std::size_t j = 0; j < produced; ++j) {
            Element art{"art" + std::to_string(next_artifact++), rng.pick(artifact_kinds), Phase::planning, "", false,
                        ""};
            decorate_element(art);
            m.elements.push_back(art);
            m.associations.push_back({AssociationKind::produce, act.id, art.id});
            pool.push_back(art.id);
        }
    }
    // feedback to strict ancestors
    for (const auto& e : m.elements) {
        if (mlproc::is_activity(e.kind) || !rng.chance(0.3)) {
            continue;
        }
        std::vector<ElementId> roots{e.id};
        auto closure = mlproc::ancestor_closure(m, roots);
        std::vector<ElementId> ancestors;
        for (const auto& c : closure.elements) {
            if (c.id != e.id) {
                ancestors.push_back(c.id);
            }
        }
        if (!ancestors.empty()) {
            m.feedback.push_back({e.id, rng.pick(ancestors), decorate ? random_text(rng) : ""});
        }
    }
    std::sort(m.feedback.begin(), m.feedback.end());
    m.feedback.erase(std::unique(m.feedback.begin(), m.feedback.end(),
                                 [](const auto& a, const auto& b) { return a.source == b.source && a.target == b.target; }),
                     m.feedback.end());
    // declaration order should not matter
    for (std::size_t i = m.elements.size(); i > 1; --i) {
        std::swap(m.elements[i - 1], m.elements[rng.below(i)]);
    }
    return m;
}

inline std::vector<ElementId> sorted_ids(const ProcessModel& m) {
    std::vector<ElementId> ids;
    for (const auto& e : m.elements) {
        ids.push_back(e.id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

inline InstanceState random_state(Rng& rng, std::size_t n) {
    InstanceState s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = kValues[rng.below(3)];
    }
    return s;
}

/// Arbitrary (not necessarily conforming) trace over the given ids.
inline Trace random_trace(Rng& rng, const std::vector<ElementId>& ids, std::size_t length) {
    Trace t;
    t.model_name = "gen";
    t.elements = ids;
    for (std::size_t i = 0; i < length; ++i) {
        t.times.push_back(i);
        t.states.push_back(random_state(rng, ids.size()));
    }
    return t;
}

/// Formula with nesting depth at most `depth` (an atom has depth 1).
inline mlproc::ltl::Formula random_formula(Rng& rng, const std::vector<ElementId>& ids, std::size_t depth,
                                           bool temporal = true) {
    using namespace mlproc::ltl;
    const std::vector<Predicate> predicates = {Predicate::inactive, Predicate::active, Predicate::done,
                                               Predicate::started};
    if (depth <= 1 || rng.chance(0.2)) {
        if (rng.chance(0.1)) {
            return rng.chance(0.5) ? truth() : falsity();
        }
        return atom(rng.pick(predicates), rng.pick(ids));
    }
    const auto sub = [&] { return random_formula(rng, ids, depth - 1, temporal); };
    const auto choice = rng.below(temporal ? 12 : 4);
    switch (choice) {
    case 0: return negation(sub());
    case 1: return conjunction(sub(), sub());
    case 2: return disjunction(sub(), sub());
    case 3: return implication(sub(), sub());
    case 4: return next(sub());
    case 5: return eventually(sub());
    case 6: return always(sub());
    case 7: return until(sub(), sub());
    case 8: return eventually_within(rng.below(5), sub());
    case 9: return always_within(rng.below(5), sub());
    case 10: return until(sub(), sub());
    default: return negation(sub());
    }
}

// ---------------------------------------------------------------------------
// Oracles

using Assignment = std::map<ElementId, ElementState>;

inline bool started(ElementState s) { return s != I; }

inline std::set<ElementId> pre_of(const ProcessModel& m, const ElementId& e) {
    std::set<ElementId> out;
    for (const auto& a : m.associations) {
        if (a.to == e) {
            out.insert(a.from);
        }
    }
    return out;
}

inline std::set<ElementId> post_of(const ProcessModel& m, const ElementId& e) {
    std::set<ElementId> out;
    for (const auto& a : m.associations) {
        if (a.from == e) {
            out.insert(a.to);
        }
    }
    return out;
}

inline Assignment to_assignment(const std::vector<ElementId>& ids, const InstanceState& s) {
    Assignment out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out[ids[i]] = s[i];
    }
    return out;
}

/// Step legality straight from the rule statements.
inline bool legal_step(const ProcessModel& m, const Assignment& s, const Assignment& n) {
    for (const auto& e : m.elements) {
        const auto from = s.at(e.id);
        const auto to = n.at(e.id);
        const auto pre = pre_of(m, e.id);
        if (from == I && to == A) {
            for (const auto& p : pre) {
                if (!started(s.at(p))) {
                    return false;
                }
            }
        }
        if (to == D && from == I) {
            return false;
        }
        if (static_cast<int>(to) < static_cast<int>(from)) {
            for (const auto& q : post_of(m, e.id)) {
                if (n.at(q) == D) {
                    return false;
                }
            }
        }
        if (to == A) {
            for (const auto& p : pre) {
                if (!started(n.at(p))) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// All 3^n states in lexicographic order (index 0 most significant).
inline std::vector<InstanceState> all_states(std::size_t n) {
    std::vector<InstanceState> out;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total *= 3;
    }
    for (std::size_t code = 0; code < total; ++code) {
        InstanceState s(n);
        auto c = code;
        for (std::size_t i = n; i-- > 0;) {
            s[i] = kValues[c % 3];
            c /= 3;
        }
        out.push_back(s);
    }
    return out;
}

inline std::vector<InstanceState> brute_successors(const ProcessModel& m, const InstanceState& s) {
    const auto ids = sorted_ids(m);
    const auto from = to_assignment(ids, s);
    std::vector<InstanceState> out;
    for (const auto& candidate : all_states(ids.size())) {
        if (legal_step(m, from, to_assignment(ids, candidate))) {
            out.push_back(candidate);
        }
    }
    return out;
}

inline Trace make_trace(const ProcessModel& m, const std::vector<InstanceState>& states) {
    Trace t;
    t.model_name = m.name;
    t.elements = sorted_ids(m);
    for (std::size_t i = 0; i < states.size(); ++i) {
        t.times.push_back(i);
    }
    t.states = states;
    return t;
}

/// Every sequence of depth + 1 states that check_trace() accepts, by
/// exhaustive product over all states at every position after the first
/// (position 0 must be the all-inactive state for any conforming trace).
inline std::vector<Trace> brute_traces(const ProcessModel& m, std::size_t depth) {
    const auto states = all_states(m.elements.size());
    std::vector<Trace> out;
    std::vector<std::size_t> digits(depth, 0);
    const InstanceState initial(m.elements.size());
    while (true) {
        std::vector<InstanceState> seq{initial};
        for (auto d : digits) {
            seq.push_back(states[d]);
        }
        auto trace = make_trace(m, seq);
        if (mlproc::check_trace(m, trace).conforming()) {
            out.push_back(std::move(trace));
        }
        std::size_t k = depth;
        while (k > 0 && ++digits[k - 1] == states.size()) {
            digits[k - 1] = 0;
            --k;
        }
        if (k == 0) {
            break;
        }
    }
    return out;
}

/// Direct recursive reading of the finite-trace semantics.
inline bool eval(const mlproc::ltl::Formula& f, const Trace& t, std::size_t i) {
    using mlproc::ltl::Op;
    using mlproc::ltl::Predicate;
    const auto n = t.length();
    switch (f.op()) {
    case Op::truth: return true;
    case Op::falsity: return false;
    case Op::atom: {
        const auto s = t.state_of(i, f.element());
        switch (f.predicate()) {
        case Predicate::inactive: return s == I;
        case Predicate::active: return s == A;
        case Predicate::done: return s == D;
        case Predicate::started: return s != I;
        }
        return false;
    }
    case Op::negation: return !eval(f.lhs(), t, i);
    case Op::conjunction: return eval(f.lhs(), t, i) && eval(f.rhs(), t, i);
    case Op::disjunction: return eval(f.lhs(), t, i) || eval(f.rhs(), t, i);
    case Op::implication: return !eval(f.lhs(), t, i) || eval(f.rhs(), t, i);
    case Op::next: return i + 1 < n && eval(f.lhs(), t, i + 1);
    case Op::eventually:
        for (auto j = i; j < n; ++j) {
            if (eval(f.lhs(), t, j)) {
                return true;
            }
        }
        return false;
    case Op::always:
        for (auto j = i; j < n; ++j) {
            if (!eval(f.lhs(), t, j)) {
                return false;
            }
        }
        return true;
    case Op::until:
        for (auto j = i; j < n; ++j) {
            if (eval(f.rhs(), t, j)) {
                return true;
            }
            if (!eval(f.lhs(), t, j)) {
                return false;
            }
        }
        return false;
    case Op::eventually_within:
        for (auto j = i; j < n && j - i <= f.bound(); ++j) {
            if (eval(f.lhs(), t, j)) {
                return true;
            }
        }
        return false;
    case Op::always_within:
        for (auto j = i; j < n && j - i <= f.bound(); ++j) {
            if (!eval(f.lhs(), t, j)) {
                return false;
            }
        }
        return true;
    }
    return false;
}

/// Truth of a state predicate on one assignment.
inline bool holds(const mlproc::ltl::Formula& f, const std::vector<ElementId>& ids, const InstanceState& s) {
    Trace t;
    t.elements = ids;
    t.times = {0};
    t.states = {s};
    return eval(f, t, 0);
}

/// Fewest steps from the initial state to a state satisfying `goal`, by
/// breadth-first search over the brute-force transition relation.
inline std::optional<std::size_t> shortest_distance(const ProcessModel& m, const mlproc::ltl::Formula& goal,
                                                    std::size_t depth) {
    const auto ids = sorted_ids(m);
    const InstanceState initial(ids.size());
    std::map<InstanceState, std::size_t> dist{{initial, 0}};
    std::deque<InstanceState> queue{initial};
    while (!queue.empty()) {
        auto s = queue.front();
        queue.pop_front();
        const auto d = dist.at(s);
        if (holds(goal, ids, s)) {
            return d;
        }
        if (d == depth) {
            continue;
        }
        for (const auto& succ : brute_successors(m, s)) {
            if (dist.emplace(succ, d + 1).second) {
                queue.push_back(succ);
            }
        }
    }
    return std::nullopt;
}

} // namespace oracle
