// SPDX-License-Identifier: Apache-2.0
#include "mlproc/search.hpp"

#include <limits>
#include <memory>
#include <map>
#include <queue>
#include <unordered_map>

namespace mlproc {

namespace {

constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

std::size_t add_sat(std::size_t a, std::size_t b) { return (a == kUnreachable || b == kUnreachable) ? kUnreachable : a + b; }

/// Earliest number of steps until each element can be started.
std::vector<std::size_t> activation_bounds(const ProcessGraph& graph, const InstanceState& s) {
    std::vector<std::size_t> act(graph.size(), 0);
    const auto& order = graph.topological_order();
    if (!order) {
        throw Error("process '" + graph.name() + "' has a dependency cycle");
    }
    for (auto i : *order) {
        if (is_started(s[i])) {
            continue;
        }
        std::size_t latest = 0;
        for (auto p : graph.pre(i)) {
            latest = std::max(latest, act[p]);
        }
        act[i] = latest + 1;
    }
    return act;
}

std::size_t literal_bound(ltl::Predicate predicate, bool positive, ElementState state, std::size_t act) {
    using ltl::Predicate;
    const bool started = is_started(state);
    if (!positive) {
        switch (predicate) {
        case Predicate::inactive: return started ? 0 : act;
        case Predicate::active: return state == ElementState::active ? 1 : 0;
        case Predicate::done: return state == ElementState::done ? 1 : 0;
        case Predicate::started: return started ? 1 : 0;
        }
    }
    switch (predicate) {
    case Predicate::inactive: return started ? 1 : 0;
    case Predicate::active:
        return state == ElementState::active ? 0 : state == ElementState::done ? 1 : act;
    case Predicate::done:
        return state == ElementState::done ? 0 : state == ElementState::active ? 1 : act + 1;
    case Predicate::started: return started ? 0 : act;
    }
    return 0;
}

std::size_t bound_of(const ltl::Formula& f, bool positive, const InstanceState& s,
                     const std::vector<std::size_t>& act) {
    using ltl::Op;
    switch (f.op()) {
    case Op::truth: return positive ? 0 : kUnreachable;
    case Op::falsity: return positive ? kUnreachable : 0;
    case Op::atom: return literal_bound(f.predicate(), positive, s[f.slot()], act[f.slot()]);
    case Op::negation: return bound_of(f.lhs(), !positive, s, act);
    case Op::conjunction:
    case Op::disjunction: {
        const auto a = bound_of(f.lhs(), positive, s, act);
        const auto b = bound_of(f.rhs(), positive, s, act);
        const bool take_max = (f.op() == Op::conjunction) == positive;
        return take_max ? std::max(a, b) : std::min(a, b);
    }
    case Op::implication: {
        const auto a = bound_of(f.lhs(), !positive, s, act);
        const auto b = bound_of(f.rhs(), positive, s, act);
        return positive ? std::min(a, b) : std::max(a, b);
    }
    default: throw Error("temporal operator in state predicate: " + ltl::to_string(f));
    }
}

void require_well_formed(const ProcessModel& model) {
    if (auto report = validate(model); !report.well_formed()) {
        throw Error("process '" + model.name + "' is not well formed: " + report.violations.front().message);
    }
}

} // namespace

std::size_t steps_lower_bound(const ProcessGraph& graph, const ltl::Formula& goal, const InstanceState& state) {
    return bound_of(goal, true, state, activation_bounds(graph, state));
}

std::optional<Trace> reach(const ProcessModel& model, const ltl::Formula& goal, std::size_t depth,
                           ReachStatistics* statistics) {
    if (goal.has_temporal()) {
        throw Error("reach goal must be a state predicate: " + ltl::to_string(goal));
    }
    require_well_formed(model);
    const ProcessGraph full(model);
    const auto roots = ltl::atoms_of(goal);
    (void)ltl::resolve(goal, full.ids()); // reports unknown ids against the whole model

    const ProcessModel cone_model = ancestor_closure(model, roots);
    const ProcessGraph cone(cone_model);
    const auto cone_goal = ltl::resolve(goal, cone.ids());

    struct Node {
        InstanceState state;
        std::size_t parent;
        std::size_t steps;
        bool closed = false;
    };
    struct Entry {
        std::size_t estimate;
        std::size_t steps;
        std::size_t seq;
        std::size_t node;
    };
    // Lowest estimate first, then the deeper entry, then the latest inserted
    // (successors come in canonical order, so that is the most advanced one).
    auto later = [](const Entry& a, const Entry& b) {
        if (a.estimate != b.estimate) {
            return a.estimate > b.estimate;
        }
        if (a.steps != b.steps) {
            return a.steps < b.steps;
        }
        return a.seq < b.seq;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(later)> open(later);
    std::vector<Node> nodes;
    std::unordered_map<InstanceState, std::size_t, InstanceStateHash> index;
    std::size_t seq = 0;
    ReachStatistics stats;
    stats.searched_elements = cone.size();

    auto start = initial_state(cone);
    const auto h0 = steps_lower_bound(cone, cone_goal, start);
    if (h0 != kUnreachable && h0 <= depth) {
        nodes.push_back({start, kUnreachable, 0});
        index.emplace(std::move(start), 0);
        open.push({h0, 0, seq++, 0});
    }

    std::optional<std::size_t> found;
    while (!open.empty()) {
        const auto entry = open.top();
        open.pop();
        auto& node = nodes[entry.node];
        if (node.closed || entry.steps != node.steps) {
            continue;
        }
        if (ltl::holds_in(cone_goal, node.state)) {
            found = entry.node;
            break;
        }
        node.closed = true;
        if (node.steps == depth) {
            continue;
        }
        ++stats.expanded;
        const auto from = node.state; // nodes may reallocate below
        const auto steps = node.steps + 1;
        SuccessorGenerator gen(cone, from);
        while (auto succ = gen.next()) {
            ++stats.generated;
            const auto h = steps_lower_bound(cone, cone_goal, *succ);
            if (h == kUnreachable || add_sat(steps, h) > depth) {
                continue;
            }
            auto it = index.find(*succ);
            if (it == index.end()) {
                nodes.push_back({*succ, entry.node, steps});
                index.emplace(std::move(*succ), nodes.size() - 1);
                open.push({steps + h, steps, seq++, nodes.size() - 1});
            } else if (auto& known = nodes[it->second]; !known.closed && steps < known.steps) {
                known.steps = steps;
                known.parent = entry.node;
                open.push({steps + h, steps, seq++, it->second});
            }
        }
    }
    if (statistics != nullptr) {
        *statistics = stats;
    }
    if (!found) {
        return std::nullopt;
    }

    std::vector<InstanceState> path;
    for (auto at = *found; at != kUnreachable; at = nodes[at].parent) {
        path.push_back(nodes[at].state);
    }
    std::vector<std::size_t> slot(cone.size());
    for (std::size_t i = 0; i < cone.size(); ++i) {
        slot[i] = full.require_index(cone.id(i));
    }
    std::vector<InstanceState> states;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        InstanceState s(full.size());
        for (std::size_t i = 0; i < cone.size(); ++i) {
            s[slot[i]] = (*it)[i];
        }
        states.push_back(std::move(s));
    }
    return make_trace(full, std::move(states));
}

// ---------------------------------------------------------------------------

namespace {

ProcessGraph guarded_graph(const ProcessModel& model, bool force) {
    require_well_formed(model);
    ProcessGraph graph(model);
    if (graph.size() > enumerate_element_limit && !force) {
        throw Error("process '" + model.name + "' has " + std::to_string(graph.size()) +
                    " elements; enumeration is limited to " + std::to_string(enumerate_element_limit) +
                    " without force");
    }
    return graph;
}

} // namespace

void enumerate(const ProcessModel& model, std::size_t depth, const std::function<bool(const Trace&)>& visit,
               bool force) {
    const auto graph = guarded_graph(model, force);
    std::vector<InstanceState> path{initial_state(graph)};
    // generators[k] produces the candidates for path position k + 1
    std::vector<std::unique_ptr<SuccessorGenerator>> generators;

    if (depth == 0) {
        visit(make_trace(graph, path));
        return;
    }
    generators.push_back(std::make_unique<SuccessorGenerator>(graph, path.back()));
    while (!generators.empty()) {
        auto succ = generators.back()->next();
        if (!succ) {
            generators.pop_back();
            path.pop_back();
            continue;
        }
        path.push_back(std::move(*succ));
        if (path.size() == depth + 1) {
            if (!visit(make_trace(graph, path))) {
                return;
            }
            path.pop_back();
            continue;
        }
        generators.push_back(std::make_unique<SuccessorGenerator>(graph, path.back()));
    }
}

std::uint64_t count_traces(const ProcessModel& model, std::size_t depth, bool force) {
    const auto graph = guarded_graph(model, force);
    std::map<InstanceState, std::uint64_t> layer{{initial_state(graph), 1}};
    std::map<InstanceState, std::vector<InstanceState>> cache;
    for (std::size_t d = 0; d < depth; ++d) {
        std::map<InstanceState, std::uint64_t> next;
        for (const auto& [state, count] : layer) {
            auto [it, fresh] = cache.try_emplace(state);
            if (fresh) {
                it->second = successors(graph, state);
            }
            for (const auto& succ : it->second) {
                auto& slot = next[succ];
                if (slot > std::numeric_limits<std::uint64_t>::max() - count) {
                    throw Error("trace count exceeds 64 bits");
                }
                slot += count;
            }
        }
        layer = std::move(next);
    }
    std::uint64_t total = 0;
    for (const auto& [_, count] : layer) {
        if (total > std::numeric_limits<std::uint64_t>::max() - count) {
            throw Error("trace count exceeds 64 bits");
        }
        total += count;
    }
    return total;
}

} // namespace mlproc
