// SPDX-License-Identifier: Apache-2.0
#include "mlproc/model.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mlproc {

bool is_valid_identifier(std::string_view text) {
    if (text.empty() || text.front() < 'a' || text.front() > 'z') {
        return false;
    }
    return std::all_of(text.begin(), text.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

std::string_view to_string(Phase phase) {
    switch (phase) {
    case Phase::planning: return "planning";
    case Phase::development: return "development";
    case Phase::deployment: return "deployment";
    case Phase::operations: return "operations";
    }
    return "?";
}

std::optional<Phase> phase_from_string(std::string_view text) {
    for (auto phase : {Phase::planning, Phase::development, Phase::deployment, Phase::operations}) {
        if (to_string(phase) == text) {
            return phase;
        }
    }
    return std::nullopt;
}

std::string_view to_string(WellFormednessRule rule) {
    switch (rule) {
    case WellFormednessRule::w1_identifier: return "W1";
    case WellFormednessRule::w2_endpoint_kind: return "W2";
    case WellFormednessRule::w3_no_product: return "W3";
    case WellFormednessRule::w4_no_producer: return "W4";
    case WellFormednessRule::w5_cycle: return "W5";
    case WellFormednessRule::w6_feedback_order: return "W6";
    case WellFormednessRule::w7_unknown_id: return "W7";
    }
    return "W?";
}

const Element* ProcessModel::find(std::string_view id) const {
    auto it = std::find_if(elements.begin(), elements.end(),
                           [&](const Element& e) { return e.id == id; });
    return it == elements.end() ? nullptr : &*it;
}

ProcessModel canonicalize(ProcessModel model) {
    std::sort(model.elements.begin(), model.elements.end());
    std::sort(model.associations.begin(), model.associations.end());
    std::sort(model.feedback.begin(), model.feedback.end());
    return model;
}

bool operator==(const ProcessModel& lhs, const ProcessModel& rhs) {
    if (lhs.name != rhs.name) {
        return false;
    }
    auto a = canonicalize(lhs);
    auto b = canonicalize(rhs);
    return a.elements == b.elements && a.associations == b.associations && a.feedback == b.feedback;
}

bool WellFormednessReport::has(WellFormednessRule rule) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const ModelDiagnostic& d) { return d.rule == rule; });
}

// ---------------------------------------------------------------------------

namespace {

class Validator {
public:
    explicit Validator(const ProcessModel& model) : _model(model) {
        for (const auto& e : model.elements) {
            _by_id.emplace(e.id, &e); // first declaration wins
        }
    }

    WellFormednessReport run() {
        check_identifiers();
        check_associations();
        check_production();
        check_cycles();
        check_feedback();
        std::sort(_report.violations.begin(), _report.violations.end());
        _report.violations.erase(std::unique(_report.violations.begin(), _report.violations.end()),
                                 _report.violations.end());
        std::sort(_report.warnings.begin(), _report.warnings.end());
        return std::move(_report);
    }

private:
    void add(WellFormednessRule rule, std::vector<ElementId> elements, std::string message) {
        _report.violations.push_back({rule, std::move(elements), std::move(message)});
    }

    const Element* lookup(const ElementId& id) const {
        auto it = _by_id.find(id);
        return it == _by_id.end() ? nullptr : it->second;
    }

    void check_identifiers() {
        if (!is_valid_identifier(_model.name)) {
            add(WellFormednessRule::w1_identifier, {}, "invalid process name '" + _model.name + "'");
        }
        std::map<ElementId, int> seen;
        for (const auto& e : _model.elements) {
            if (!is_valid_identifier(e.id)) {
                add(WellFormednessRule::w1_identifier, {e.id}, "invalid element id '" + e.id + "'");
            }
            if (++seen[e.id] == 2) {
                add(WellFormednessRule::w1_identifier, {e.id}, "duplicate element id '" + e.id + "'");
            }
        }
        std::set<Association> associations;
        for (const auto& a : _model.associations) {
            if (!associations.insert(a).second) {
                add(WellFormednessRule::w1_identifier, {a.from, a.to},
                    "duplicate association " + a.from + " -> " + a.to);
            }
        }
        std::set<std::pair<ElementId, ElementId>> feedback;
        for (const auto& f : _model.feedback) {
            if (!feedback.emplace(f.source, f.target).second) {
                add(WellFormednessRule::w1_identifier, {f.source, f.target},
                    "duplicate feedback " + f.source + " -> " + f.target);
            }
        }
    }

    void check_associations() {
        for (const auto& a : _model.associations) {
            const auto* from = lookup(a.from);
            const auto* to = lookup(a.to);
            if (from == nullptr) {
                add(WellFormednessRule::w7_unknown_id, {a.from}, "association references unknown element '" + a.from + "'");
            }
            if (to == nullptr) {
                add(WellFormednessRule::w7_unknown_id, {a.to}, "association references unknown element '" + a.to + "'");
            }
            if (from == nullptr || to == nullptr) {
                continue;
            }
            const bool ok = a.kind == AssociationKind::require
                                ? is_artifact(from->kind) && is_activity(to->kind)
                                : is_activity(from->kind) && is_artifact(to->kind);
            if (!ok) {
                add(WellFormednessRule::w2_endpoint_kind, {a.from, a.to},
                    std::string(a.kind == AssociationKind::require ? "require" : "produce") + " " + a.from +
                        " -> " + a.to + " connects the wrong element kinds");
            }
        }
    }

    void check_production() {
        std::map<ElementId, std::vector<ElementId>> producers;
        std::set<ElementId> productive;
        for (const auto& a : _model.associations) {
            if (a.kind == AssociationKind::produce) {
                producers[a.to].push_back(a.from);
                productive.insert(a.from);
            }
        }
        std::set<ElementId> visited;
        for (const auto& e : _model.elements) {
            if (!visited.insert(e.id).second) {
                continue;
            }
            auto& prods = producers[e.id];
            std::sort(prods.begin(), prods.end());
            prods.erase(std::unique(prods.begin(), prods.end()), prods.end());
            if (is_activity(e.kind)) {
                if (productive.count(e.id) == 0) {
                    add(WellFormednessRule::w3_no_product, {e.id}, "activity '" + e.id + "' produces no artifact");
                }
                if (e.external) {
                    add(WellFormednessRule::w4_no_producer, {e.id}, "activity '" + e.id + "' cannot be external");
                }
                continue;
            }
            if (!e.external && prods.empty()) {
                add(WellFormednessRule::w4_no_producer, {e.id},
                    "artifact '" + e.id + "' has no producer and is not external");
            }
            if (e.external && !prods.empty()) {
                add(WellFormednessRule::w4_no_producer, {e.id},
                    "external artifact '" + e.id + "' must not have a producer");
            }
            if (prods.size() > 1) {
                std::vector<ElementId> involved{e.id};
                involved.insert(involved.end(), prods.begin(), prods.end());
                _report.warnings.push_back(
                    {std::move(involved), "artifact '" + e.id + "' has several producers; all of them are required"});
            }
        }
    }

    // Edges over known endpoints only; W7 covers the rest.
    std::map<ElementId, std::vector<ElementId>> successor_map() const {
        std::map<ElementId, std::vector<ElementId>> next;
        for (const auto& [id, _] : _by_id) {
            next[id];
        }
        for (const auto& a : _model.associations) {
            if (lookup(a.from) != nullptr && lookup(a.to) != nullptr) {
                next[a.from].push_back(a.to);
            }
        }
        return next;
    }

    void check_cycles() {
        // Tarjan's strongly connected components.
        const auto next = successor_map();
        std::map<ElementId, int> index;
        std::map<ElementId, int> low;
        std::set<ElementId> on_stack;
        std::vector<ElementId> stack;
        int counter = 0;

        std::function<void(const ElementId&)> connect = [&](const ElementId& v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            on_stack.insert(v);
            for (const auto& w : next.at(v)) {
                if (index.count(w) == 0) {
                    connect(w);
                    low[v] = std::min(low[v], low[w]);
                } else if (on_stack.count(w) != 0) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
            if (low[v] != index[v]) {
                return;
            }
            std::vector<ElementId> component;
            ElementId w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                component.push_back(w);
            } while (w != v);
            const auto& succ = next.at(v);
            const bool self_loop = std::find(succ.begin(), succ.end(), v) != succ.end();
            if (component.size() > 1 || self_loop) {
                std::sort(component.begin(), component.end());
                std::string text;
                for (const auto& c : component) {
                    text += (text.empty() ? "" : ", ") + c;
                }
                add(WellFormednessRule::w5_cycle, component, "dependency cycle through " + text);
            }
        };
        for (const auto& [id, _] : next) {
            if (index.count(id) == 0) {
                connect(id);
            }
        }
    }

    void check_feedback() {
        std::map<ElementId, std::vector<ElementId>> prev;
        for (const auto& a : _model.associations) {
            prev[a.to].push_back(a.from);
        }
        auto strict_ancestor = [&](const ElementId& of, const ElementId& candidate) {
            std::set<ElementId> seen;
            std::vector<ElementId> todo = prev[of];
            while (!todo.empty()) {
                auto cur = todo.back();
                todo.pop_back();
                if (cur == candidate) {
                    return true;
                }
                if (seen.insert(cur).second) {
                    const auto& more = prev[cur];
                    todo.insert(todo.end(), more.begin(), more.end());
                }
            }
            return false;
        };
        for (const auto& f : _model.feedback) {
            const auto* source = lookup(f.source);
            const auto* target = lookup(f.target);
            if (source == nullptr) {
                add(WellFormednessRule::w7_unknown_id, {f.source}, "feedback references unknown element '" + f.source + "'");
            }
            if (target == nullptr) {
                add(WellFormednessRule::w7_unknown_id, {f.target}, "feedback references unknown element '" + f.target + "'");
            }
            if (source == nullptr || target == nullptr) {
                continue;
            }
            if (!is_artifact(source->kind)) {
                add(WellFormednessRule::w6_feedback_order, {f.source, f.target},
                    "feedback source '" + f.source + "' is not an artifact");
            }
            if (f.source == f.target || !strict_ancestor(f.source, f.target)) {
                add(WellFormednessRule::w6_feedback_order, {f.source, f.target},
                    "feedback " + f.source + " -> " + f.target + " does not lead to an earlier element");
            }
        }
    }

    const ProcessModel& _model;
    std::map<ElementId, const Element*> _by_id;
    WellFormednessReport _report;
};

void require_known(const ProcessModel& model, std::string_view id) {
    if (model.find(id) == nullptr) {
        throw Error("unknown element '" + std::string(id) + "'");
    }
}

std::vector<ElementId> sorted_unique(std::vector<ElementId> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

} // namespace

WellFormednessReport validate(const ProcessModel& model) { return Validator(model).run(); }

std::vector<ElementId> pre(const ProcessModel& model, std::string_view id) {
    require_known(model, id);
    std::vector<ElementId> out;
    for (const auto& a : model.associations) {
        if (a.to == id) {
            out.push_back(a.from);
        }
    }
    return sorted_unique(std::move(out));
}

std::vector<ElementId> post(const ProcessModel& model, std::string_view id) {
    require_known(model, id);
    std::vector<ElementId> out;
    for (const auto& a : model.associations) {
        if (a.from == id) {
            out.push_back(a.to);
        }
    }
    return sorted_unique(std::move(out));
}

std::map<ElementId, int> topo_levels(const ProcessModel& model) {
    const ProcessGraph graph(model);
    const auto& order = graph.topological_order();
    if (!order) {
        throw Error("process '" + model.name + "' has a dependency cycle");
    }
    std::vector<int> level(graph.size(), 1);
    for (auto i : *order) {
        for (auto p : graph.pre(i)) {
            level[i] = std::max(level[i], level[p] + 1);
        }
    }
    std::map<ElementId, int> out;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        out.emplace(graph.id(i), level[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------

ProcessGraph::ProcessGraph(const ProcessModel& model) : _name(model.name), _elements(model.elements) {
    std::sort(_elements.begin(), _elements.end(),
              [](const Element& a, const Element& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < _elements.size(); ++i) {
        if (_elements[i].id == _elements[i - 1].id) {
            throw Error("duplicate element id '" + _elements[i].id + "'");
        }
    }
    _ids.reserve(_elements.size());
    for (const auto& e : _elements) {
        _ids.push_back(e.id);
    }
    _pre.resize(_elements.size());
    _post.resize(_elements.size());
    for (const auto& a : model.associations) {
        const auto from = require_index(a.from);
        const auto to = require_index(a.to);
        _pre[to].push_back(from);
        _post[from].push_back(to);
    }
    for (auto* lists : {&_pre, &_post}) {
        for (auto& list : *lists) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
    }

    // Kahn with a min-heap keeps the order deterministic.
    std::vector<std::size_t> indegree(size());
    for (std::size_t i = 0; i < size(); ++i) {
        indegree[i] = _pre[i].size();
    }
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < size(); ++i) {
        if (indegree[i] == 0) {
            ready.insert(i);
        }
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        auto i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (auto q : _post[i]) {
            if (--indegree[q] == 0) {
                ready.insert(q);
            }
        }
    }
    if (order.size() == size()) {
        _topo = std::move(order);
    }
}

std::optional<std::size_t> ProcessGraph::index_of(std::string_view id) const {
    auto it = std::lower_bound(_ids.begin(), _ids.end(), id,
                               [](const ElementId& a, std::string_view b) { return a < b; });
    if (it == _ids.end() || *it != id) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - _ids.begin());
}

std::size_t ProcessGraph::require_index(std::string_view id) const {
    if (auto index = index_of(id)) {
        return *index;
    }
    throw Error("unknown element '" + std::string(id) + "' in process '" + _name + "'");
}

ProcessModel ancestor_closure(const ProcessModel& model, std::span<const ElementId> roots) {
    std::map<ElementId, std::vector<ElementId>> prev;
    for (const auto& a : model.associations) {
        prev[a.to].push_back(a.from);
    }
    std::set<ElementId> keep;
    std::vector<ElementId> todo(roots.begin(), roots.end());
    while (!todo.empty()) {
        auto id = todo.back();
        todo.pop_back();
        if (keep.insert(id).second) {
            const auto& more = prev[id];
            todo.insert(todo.end(), more.begin(), more.end());
        }
    }
    ProcessModel out;
    out.name = model.name;
    for (const auto& e : model.elements) {
        if (keep.count(e.id) != 0) {
            out.elements.push_back(e);
        }
    }
    for (const auto& a : model.associations) {
        if (keep.count(a.from) != 0 && keep.count(a.to) != 0) {
            out.associations.push_back(a);
        }
    }
    return out;
}

} // namespace mlproc
