// SPDX-License-Identifier: Apache-2.0
#pragma once

// Recorded process instances and the conformance check against a model.
//
// Trace file format (line oriented, `#` comments):
//
//   trace <model_name>
//   t 0
//   t 1
//     use_case_analysis active
//
// Each `t <N>` block lists only the elements whose state changed; block 0 is
// relative to the all-inactive state.

#include "mlproc/model.hpp"
#include "mlproc/semantics.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlproc {

/// A sequence of states over a fixed universe of element ids (sorted).
/// Elements missing from the universe are inactive throughout, so equality
/// compares the non-inactive entries only.
struct Trace {
    std::string model_name;
    std::vector<ElementId> elements;
    std::vector<std::size_t> times; // labels as recorded; well-formed traces have times[i] == i
    std::vector<InstanceState> states;

    [[nodiscard]] std::size_t length() const { return states.size(); }
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view id) const;
    /// Inactive for ids outside the universe.
    [[nodiscard]] ElementState state_of(std::size_t position, std::string_view id) const;
    /// Positions 0..last (inclusive).
    [[nodiscard]] Trace prefix(std::size_t last) const;

    friend bool operator==(const Trace& lhs, const Trace& rhs);
};

/// Trace over the graph's elements; ids missing from `trace` become inactive.
/// Throws Error for model-name mismatch or unknown elements.
[[nodiscard]] Trace bind(const Trace& trace, const ProcessGraph& graph);

/// Trace with consecutive labels from a dense state sequence over the graph.
[[nodiscard]] Trace make_trace(const ProcessGraph& graph, std::vector<InstanceState> states);

struct TimedViolation {
    std::size_t t;
    LegalityViolation violation;

    friend bool operator==(const TimedViolation&, const TimedViolation&) = default;
};

struct ConformanceReport {
    std::vector<TimedViolation> violations; // ordered by t

    [[nodiscard]] bool conforming() const { return violations.empty(); }
};

/// Every violation of the trace against the model (not only the first):
/// R1 at t=0, R6 wherever a label is not its predecessor plus one, and all
/// check_step() violations of each pair tagged with the later position.
/// Throws Error for model-name mismatch or unknown elements.
[[nodiscard]] ConformanceReport check_trace(const ProcessModel& model, const Trace& trace);
[[nodiscard]] ConformanceReport check_trace(const ProcessGraph& graph, const Trace& trace);

enum class TimeLabels {
    strict,  // labels must be 0, 1, 2, ...; anything else is a ParseError
    lenient, // any natural labels accepted; check_trace reports R6_TIME
};

[[nodiscard]] Trace parse_trace(std::string_view text, TimeLabels labels = TimeLabels::strict);
[[nodiscard]] std::string serialize_trace(const Trace& trace);

} // namespace mlproc
