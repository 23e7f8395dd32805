// SPDX-License-Identifier: Apache-2.0
#include "mlproc/semantics.hpp"

#include "mlproc/conformance.hpp"

#include <random>
#include <sstream>

namespace mlproc {

std::string_view to_string(ElementState state) {
    switch (state) {
    case ElementState::inactive: return "inactive";
    case ElementState::active: return "active";
    case ElementState::done: return "done";
    }
    return "?";
}

std::optional<ElementState> state_from_string(std::string_view text) {
    for (auto s : {ElementState::inactive, ElementState::active, ElementState::done}) {
        if (to_string(s) == text) {
            return s;
        }
    }
    return std::nullopt;
}

std::string_view to_string(LegalityRule rule) {
    switch (rule) {
    case LegalityRule::r1_init: return "R1_INIT";
    case LegalityRule::r2_act: return "R2_ACT";
    case LegalityRule::r3_done: return "R3_DONE";
    case LegalityRule::r4_reset: return "R4_RESET";
    case LegalityRule::r5_inv: return "R5_INV";
    case LegalityRule::r6_time: return "R6_TIME";
    }
    return "R?";
}

std::size_t InstanceStateHash::operator()(const InstanceState& s) const noexcept {
    // FNV-1a
    std::uint64_t h = 1469598103934665603ULL;
    for (auto v : s.values) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

InstanceState initial_state(const ProcessGraph& graph) { return InstanceState(graph.size()); }

bool satisfies_support(const ProcessGraph& graph, const InstanceState& s) {
    for (std::size_t i = 0; i < graph.size(); ++i) {
        if (s[i] != ElementState::active) {
            continue;
        }
        for (auto p : graph.pre(i)) {
            if (!is_started(s[p])) {
                return false;
            }
        }
    }
    return true;
}

namespace {

void require_size(const ProcessGraph& graph, const InstanceState& s) {
    if (s.size() != graph.size()) {
        throw Error("state has " + std::to_string(s.size()) + " elements, process '" + graph.name() + "' has " +
                    std::to_string(graph.size()));
    }
}

std::string join_ids(const ProcessGraph& graph, const std::vector<std::size_t>& indices) {
    std::string out;
    for (auto i : indices) {
        out += (out.empty() ? "" : ", ") + graph.id(i);
    }
    return out;
}

LegalityViolation make_violation(const ProcessGraph& graph, LegalityRule rule, std::size_t element,
                                 const std::vector<std::size_t>& others, std::string message) {
    LegalityViolation v{rule, {graph.id(element)}, std::move(message)};
    for (auto o : others) {
        v.elements.push_back(graph.id(o));
    }
    return v;
}

/// Whether element i may take value v in the successor of `from`, given that
/// work[0..i) is already assigned. Checks every rule whose elements are all
/// assigned once i is.
bool admissible(const ProcessGraph& graph, const InstanceState& from, const InstanceState& work, std::size_t i,
                ElementState v) {
    const auto f = from[i];
    if (v == ElementState::done && f == ElementState::inactive) {
        return false;
    }
    const auto pre = graph.pre(i);
    if (f == ElementState::inactive && v == ElementState::active) {
        for (auto p : pre) {
            if (!is_started(from[p])) {
                return false;
            }
        }
    }
    for (auto p : pre) {
        if (p >= i) {
            continue;
        }
        if (v == ElementState::active && !is_started(work[p])) {
            return false;
        }
        if (v == ElementState::done && is_backward(from[p], work[p])) {
            return false;
        }
    }
    const bool back = is_backward(f, v);
    for (auto q : graph.post(i)) {
        if (q >= i) {
            continue;
        }
        if (work[q] == ElementState::active && v == ElementState::inactive) {
            return false;
        }
        if (back && work[q] == ElementState::done) {
            return false;
        }
    }
    return true;
}

constexpr ElementState kStates[] = {ElementState::inactive, ElementState::active, ElementState::done};

/// Fills work[start..) with some legal completion; stuttering values first.
bool complete(const ProcessGraph& graph, const InstanceState& from, InstanceState& work, std::size_t start) {
    if (start == graph.size()) {
        return true;
    }
    const auto keep = from[start];
    if (admissible(graph, from, work, start, keep)) {
        work[start] = keep;
        if (complete(graph, from, work, start + 1)) {
            return true;
        }
    }
    for (auto v : kStates) {
        if (v != keep && admissible(graph, from, work, start, v)) {
            work[start] = v;
            if (complete(graph, from, work, start + 1)) {
                return true;
            }
        }
    }
    return false;
}

InstanceState random_step(const ProcessGraph& graph, const InstanceState& from, std::mt19937_64& rng) {
    InstanceState work = from;
    std::vector<ElementState> candidates;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        candidates.clear();
        for (auto v : kStates) {
            if (!admissible(graph, from, work, i, v)) {
                continue;
            }
            work[i] = v;
            if (complete(graph, from, work, i + 1)) {
                candidates.push_back(v);
            }
        }
        // Stuttering always completes, so the list is never empty.
        work[i] = candidates[rng() % candidates.size()];
    }
    return work;
}

void apply(const ProcessGraph& graph, InstanceState& s, const StateDelta& delta) {
    for (const auto& [id, value] : delta) {
        s[graph.require_index(id)] = value;
    }
}

} // namespace

std::vector<LegalityViolation> check_step(const ProcessGraph& graph, const InstanceState& s,
                                          const InstanceState& next) {
    require_size(graph, s);
    require_size(graph, next);
    std::vector<LegalityViolation> out;
    for (std::size_t e = 0; e < graph.size(); ++e) {
        const auto from = s[e];
        const auto to = next[e];
        const auto& id = graph.id(e);

        if (from == ElementState::inactive && to == ElementState::active) {
            std::vector<std::size_t> missing;
            for (auto p : graph.pre(e)) {
                if (!is_started(s[p])) {
                    missing.push_back(p);
                }
            }
            if (!missing.empty()) {
                out.push_back(make_violation(graph, LegalityRule::r2_act, e, missing,
                                             id + " activated while prerequisites were inactive: " +
                                                 join_ids(graph, missing)));
            }
        }
        if (to == ElementState::done && from == ElementState::inactive) {
            out.push_back(make_violation(graph, LegalityRule::r3_done, e, {},
                                         id + " became done without having been active"));
        }
        if (is_backward(from, to)) {
            std::vector<std::size_t> stuck;
            for (auto q : graph.post(e)) {
                if (next[q] == ElementState::done) {
                    stuck.push_back(q);
                }
            }
            if (!stuck.empty()) {
                out.push_back(make_violation(graph, LegalityRule::r4_reset, e, stuck,
                                             id + " moved " + std::string(to_string(from)) + " -> " +
                                                 std::string(to_string(to)) + " while dependents stayed done: " +
                                                 join_ids(graph, stuck)));
            }
        }
        if (to == ElementState::active) {
            std::vector<std::size_t> unsupported;
            for (auto p : graph.pre(e)) {
                if (!is_started(next[p])) {
                    unsupported.push_back(p);
                }
            }
            if (!unsupported.empty()) {
                out.push_back(make_violation(graph, LegalityRule::r5_inv, e, unsupported,
                                             id + " is active without started prerequisites: " +
                                                 join_ids(graph, unsupported)));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

SuccessorGenerator::SuccessorGenerator(const ProcessGraph& graph, const InstanceState& from)
    : _graph(graph), _from(from), _work(from), _choice(graph.size(), 0) {
    require_size(graph, from);
}

std::optional<InstanceState> SuccessorGenerator::next() {
    if (_done) {
        return std::nullopt;
    }
    const auto n = _graph.size();
    if (n == 0) {
        _done = true;
        return _work;
    }
    while (true) {
        if (_choice[_depth] > 2) {
            _choice[_depth] = 0;
            if (_depth == 0) {
                _done = true;
                return std::nullopt;
            }
            --_depth;
            continue;
        }
        const auto v = static_cast<ElementState>(_choice[_depth]++);
        if (!admissible(_graph, _from, _work, _depth, v)) {
            continue;
        }
        _work[_depth] = v;
        if (_depth + 1 == n) {
            return _work;
        }
        ++_depth;
    }
}

std::vector<InstanceState> successors(const ProcessGraph& graph, const InstanceState& s) {
    std::vector<InstanceState> out;
    SuccessorGenerator gen(graph, s);
    while (auto next = gen.next()) {
        out.push_back(std::move(*next));
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string describe(std::size_t step, const std::vector<LegalityViolation>& violations) {
    std::ostringstream out;
    out << "illegal step to t=" << step;
    for (const auto& v : violations) {
        out << "; " << to_string(v.rule) << ": " << v.message;
    }
    return out.str();
}

} // namespace

SimulationError::SimulationError(std::size_t step, std::vector<LegalityViolation> violations)
    : Error(describe(step, violations)), _step(step), _violations(std::move(violations)) {}

Trace simulate(const ProcessModel& model, const SimulationPolicy& policy, std::size_t steps,
               const FeedbackOverlay& overlay) {
    if (auto report = validate(model); !report.well_formed()) {
        throw Error("cannot simulate ill-formed process '" + model.name + "': " + report.violations.front().message);
    }
    const ProcessGraph graph(model);
    const auto n = graph.size();

    if (const auto* scripted = std::get_if<ScriptedPolicy>(&policy)) {
        for (const auto& delta : scripted->deltas) {
            for (const auto& entry : delta) {
                (void)graph.require_index(entry.first);
            }
        }
    }

    std::vector<InstanceState> states;
    states.reserve(steps + 1);
    states.push_back(initial_state(graph));

    std::vector<std::size_t> active_since(n, 0);
    std::mt19937_64 rng(std::holds_alternative<UniformRandomPolicy>(policy)
                            ? std::get<UniformRandomPolicy>(policy).seed
                            : 0);

    for (std::size_t t = 1; t <= steps; ++t) {
        const auto& s = states.back();
        InstanceState next = s;

        if (const auto* eager = std::get_if<EagerPolicy>(&policy)) {
            const auto dwell = std::max<std::size_t>(eager->dwell, 1);
            for (std::size_t i = 0; i < n; ++i) {
                if (s[i] == ElementState::inactive) {
                    bool enabled = true;
                    for (auto p : graph.pre(i)) {
                        enabled = enabled && is_started(s[p]);
                    }
                    if (enabled) {
                        next[i] = ElementState::active;
                    }
                } else if (s[i] == ElementState::active && t - active_since[i] >= dwell) {
                    next[i] = ElementState::done;
                }
            }
        } else if (std::holds_alternative<UniformRandomPolicy>(policy)) {
            next = random_step(graph, s, rng);
        } else {
            const auto& deltas = std::get<ScriptedPolicy>(policy).deltas;
            if (t - 1 < deltas.size()) {
                apply(graph, next, deltas[t - 1]);
            }
        }

        if (auto it = overlay.find(t); it != overlay.end()) {
            apply(graph, next, it->second);
        }
        if (auto violations = check_step(graph, s, next); !violations.empty()) {
            throw SimulationError(t, std::move(violations));
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (next[i] == ElementState::active && s[i] != ElementState::active) {
                active_since[i] = t;
            }
        }
        states.push_back(std::move(next));
    }
    return make_trace(graph, std::move(states));
}

} // namespace mlproc
