// SPDX-License-Identifier: Apache-2.0
#include "mlproc/conformance.hpp"

#include "text.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace mlproc {

std::optional<std::size_t> Trace::index_of(std::string_view id) const {
    auto it = std::lower_bound(elements.begin(), elements.end(), id,
                               [](const ElementId& a, std::string_view b) { return a < b; });
    if (it == elements.end() || *it != id) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - elements.begin());
}

ElementState Trace::state_of(std::size_t position, std::string_view id) const {
    auto index = index_of(id);
    return index ? states.at(position)[*index] : ElementState::inactive;
}

Trace Trace::prefix(std::size_t last) const {
    Trace out = *this;
    const auto keep = std::min(last + 1, states.size());
    out.states.resize(keep);
    out.times.resize(keep);
    return out;
}

namespace {

std::map<std::string_view, ElementState> started_entries(const Trace& trace, std::size_t position) {
    std::map<std::string_view, ElementState> out;
    const auto& s = trace.states[position];
    for (std::size_t i = 0; i < trace.elements.size(); ++i) {
        if (s[i] != ElementState::inactive) {
            out.emplace(trace.elements[i], s[i]);
        }
    }
    return out;
}

} // namespace

bool operator==(const Trace& lhs, const Trace& rhs) {
    if (lhs.model_name != rhs.model_name || lhs.times != rhs.times || lhs.states.size() != rhs.states.size()) {
        return false;
    }
    for (std::size_t t = 0; t < lhs.states.size(); ++t) {
        if (started_entries(lhs, t) != started_entries(rhs, t)) {
            return false;
        }
    }
    return true;
}

Trace bind(const Trace& trace, const ProcessGraph& graph) {
    if (trace.model_name != graph.name()) {
        throw Error("trace is for process '" + trace.model_name + "', not '" + graph.name() + "'");
    }
    std::vector<std::size_t> target(trace.elements.size());
    for (std::size_t i = 0; i < trace.elements.size(); ++i) {
        auto index = graph.index_of(trace.elements[i]);
        if (!index) {
            throw Error("trace references unknown element '" + trace.elements[i] + "'");
        }
        target[i] = *index;
    }
    Trace out;
    out.model_name = trace.model_name;
    out.elements.assign(graph.ids().begin(), graph.ids().end());
    out.times = trace.times;
    out.states.reserve(trace.states.size());
    for (const auto& s : trace.states) {
        if (s.size() != trace.elements.size()) {
            throw Error("trace state does not cover its element universe");
        }
        InstanceState bound(graph.size());
        for (std::size_t i = 0; i < target.size(); ++i) {
            bound[target[i]] = s[i];
        }
        out.states.push_back(std::move(bound));
    }
    return out;
}

Trace make_trace(const ProcessGraph& graph, std::vector<InstanceState> states) {
    Trace out;
    out.model_name = graph.name();
    out.elements.assign(graph.ids().begin(), graph.ids().end());
    out.times.resize(states.size());
    for (std::size_t t = 0; t < states.size(); ++t) {
        out.times[t] = t;
    }
    out.states = std::move(states);
    return out;
}

ConformanceReport check_trace(const ProcessModel& model, const Trace& trace) {
    return check_trace(ProcessGraph(model), trace);
}

ConformanceReport check_trace(const ProcessGraph& graph, const Trace& trace) {
    if (trace.states.empty()) {
        throw Error("trace has no time points");
    }
    if (trace.times.size() != trace.states.size()) {
        throw Error("trace has " + std::to_string(trace.times.size()) + " time labels for " +
                    std::to_string(trace.states.size()) + " states");
    }
    const Trace bound = bind(trace, graph);
    ConformanceReport report;

    for (std::size_t t = 0; t < bound.states.size(); ++t) {
        const auto& s = bound.states[t];
        if (t == 0) {
            LegalityViolation init{LegalityRule::r1_init, {}, {}};
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (s[i] != ElementState::inactive) {
                    init.elements.push_back(graph.id(i));
                }
            }
            if (!init.elements.empty()) {
                init.message = "initial state is not all inactive: " + detail::join(init.elements, ", ");
                report.violations.push_back({0, std::move(init)});
            }
        }
        const std::size_t expected = t == 0 ? 0 : bound.times[t - 1] + 1;
        if (bound.times[t] != expected) {
            report.violations.push_back(
                {t,
                 {LegalityRule::r6_time,
                  {},
                  "time label " + std::to_string(bound.times[t]) + " at position " + std::to_string(t) +
                      ", expected " + std::to_string(expected)}});
        }
        if (t > 0) {
            for (auto& v : check_step(graph, bound.states[t - 1], s)) {
                report.violations.push_back({t, std::move(v)});
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

namespace {

struct Block {
    std::size_t label;
    std::vector<std::pair<ElementId, ElementState>> entries;
};

bool all_digits(std::string_view text) {
    return !text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
}

} // namespace

Trace parse_trace(std::string_view text, TimeLabels labels) {
    Trace trace;
    bool have_header = false;
    std::vector<Block> blocks;

    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto tokens = detail::split_words(detail::strip_comment(line));
        if (tokens.empty()) {
            return;
        }
        auto span_of = [&](const detail::Word& w) { return SourceSpan{line_no, w.column, w.column + w.text.size()}; };
        const auto& head = tokens.front();

        if (!have_header) {
            if (head.text != "trace") {
                throw ParseError(span_of(head), "expected 'trace <model_name>', found '" + std::string(head.text) + "'");
            }
            if (tokens.size() != 2 || !is_valid_identifier(tokens[1].text)) {
                throw ParseError(span_of(tokens.size() > 1 ? tokens[1] : head), "expected a model name after 'trace'");
            }
            trace.model_name = std::string(tokens[1].text);
            have_header = true;
            return;
        }
        if (head.text == "trace") {
            throw ParseError(span_of(head), "duplicate 'trace' header");
        }
        if (head.text == "t" && tokens.size() >= 2 &&
            (all_digits(tokens[1].text) || tokens[1].text.front() == '-' || tokens[1].text.front() == '+')) {
            if (tokens.size() != 2) {
                throw ParseError(span_of(tokens[2]), "unexpected text after time label");
            }
            if (!all_digits(tokens[1].text)) {
                throw ParseError(span_of(tokens[1]), "time label must be a natural number");
            }
            std::size_t label = 0;
            try {
                label = std::stoull(std::string(tokens[1].text));
            } catch (const std::exception&) {
                throw ParseError(span_of(tokens[1]), "time label out of range");
            }
            const std::size_t expected = blocks.empty() ? 0 : blocks.back().label + 1;
            if (labels == TimeLabels::strict && label != expected) {
                throw ParseError(span_of(tokens[1]),
                                 blocks.empty() ? "first time block must be 't 0', found 't " + std::to_string(label) + "'"
                                                : "time blocks must be consecutive: expected 't " +
                                                      std::to_string(expected) + "' after 't " +
                                                      std::to_string(blocks.back().label) + "', found 't " +
                                                      std::to_string(label) + "'");
            }
            blocks.push_back({label, {}});
            return;
        }
        if (blocks.empty()) {
            throw ParseError(span_of(head), "element state before the first 't <N>' block");
        }
        if (!is_valid_identifier(head.text)) {
            throw ParseError(span_of(head), "invalid element id '" + std::string(head.text) + "'");
        }
        if (tokens.size() != 2) {
            throw ParseError(span_of(tokens.size() > 2 ? tokens[2] : head),
                             "expected '<element_id> <inactive|active|done>'");
        }
        auto state = state_from_string(tokens[1].text);
        if (!state) {
            throw ParseError(span_of(tokens[1]), "unknown state '" + std::string(tokens[1].text) + "'");
        }
        auto& entries = blocks.back().entries;
        for (const auto& [id, _] : entries) {
            if (id == head.text) {
                throw ParseError(span_of(head), "element '" + id + "' listed twice in block 't " +
                                                    std::to_string(blocks.back().label) + "'");
            }
        }
        entries.emplace_back(std::string(head.text), *state);
    });

    if (!have_header) {
        throw ParseError({1, 1, 1}, "missing 'trace <model_name>' header");
    }
    if (blocks.empty()) {
        throw ParseError({1, 1, 1}, "trace has no time blocks");
    }

    std::set<ElementId> universe;
    for (const auto& b : blocks) {
        for (const auto& [id, _] : b.entries) {
            universe.insert(id);
        }
    }
    trace.elements.assign(universe.begin(), universe.end());
    InstanceState current(trace.elements.size());
    for (const auto& b : blocks) {
        for (const auto& [id, state] : b.entries) {
            current[*trace.index_of(id)] = state;
        }
        trace.times.push_back(b.label);
        trace.states.push_back(current);
    }
    return trace;
}

std::string serialize_trace(const Trace& trace) {
    std::ostringstream out;
    out << "trace " << trace.model_name << '\n';
    InstanceState previous(trace.elements.size());
    for (std::size_t t = 0; t < trace.states.size(); ++t) {
        out << "t " << (t < trace.times.size() ? trace.times[t] : t) << '\n';
        const auto& s = trace.states[t];
        for (std::size_t i = 0; i < trace.elements.size(); ++i) {
            if (s[i] != previous[i]) {
                out << "  " << trace.elements[i] << ' ' << to_string(s[i]) << '\n';
            }
        }
        previous = s;
    }
    return out.str();
}

} // namespace mlproc
