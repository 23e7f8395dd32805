// SPDX-License-Identifier: Apache-2.0
#pragma once

// Small-step execution semantics of process instances.
//
// A step s -> s' is legal iff for every element e:
//   R2  e activates (inactive -> active) only if all of pre(e) are started in s
//   R3  e is done in s' only if it was active or done in s
//   R4  if e moves backward, no element of post(e) is done in s'
//   R5  every active element of s' has all of pre(e) started in s'
// R1 (all-inactive start) and R6 (time labels) concern whole traces and are
// checked by check_trace().

#include "mlproc/model.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mlproc {

enum class ElementState : std::uint8_t { inactive = 0, active = 1, done = 2 };

[[nodiscard]] std::string_view to_string(ElementState state);
[[nodiscard]] std::optional<ElementState> state_from_string(std::string_view text);
[[nodiscard]] constexpr bool is_started(ElementState s) { return s != ElementState::inactive; }

/// s -> next is a move against the progress order (a feedback move).
[[nodiscard]] constexpr bool is_backward(ElementState s, ElementState next) {
    return (s == ElementState::active && next == ElementState::inactive) ||
           (s == ElementState::done && next != ElementState::done);
}

/// Dense state vector; position i belongs to element i of the ProcessGraph
/// (or of the Trace universe) it was created for.
struct InstanceState {
    std::vector<ElementState> values;

    InstanceState() = default;
    explicit InstanceState(std::size_t size, ElementState fill = ElementState::inactive)
        : values(size, fill) {}
    explicit InstanceState(std::vector<ElementState> v) : values(std::move(v)) {}

    [[nodiscard]] std::size_t size() const { return values.size(); }
    ElementState& operator[](std::size_t i) { return values[i]; }
    ElementState operator[](std::size_t i) const { return values[i]; }

    friend bool operator==(const InstanceState&, const InstanceState&) = default;
    friend auto operator<=>(const InstanceState&, const InstanceState&) = default;
};

struct InstanceStateHash {
    std::size_t operator()(const InstanceState& s) const noexcept;
};

[[nodiscard]] InstanceState initial_state(const ProcessGraph& graph);

/// Support invariant: every active element has all prerequisites started.
[[nodiscard]] bool satisfies_support(const ProcessGraph& graph, const InstanceState& s);

enum class LegalityRule : std::uint8_t { r1_init, r2_act, r3_done, r4_reset, r5_inv, r6_time };

[[nodiscard]] std::string_view to_string(LegalityRule rule);

struct LegalityViolation {
    LegalityRule rule;
    std::vector<ElementId> elements;
    std::string message;

    friend bool operator==(const LegalityViolation&, const LegalityViolation&) = default;
};

/// Violations of R2..R5 for the step s -> next, ordered by element then rule.
/// Throws Error if either state does not match the graph size.
[[nodiscard]] std::vector<LegalityViolation> check_step(const ProcessGraph& graph, const InstanceState& s,
                                                        const InstanceState& next);

/// Lazily enumerates all legal successors of a state in canonical order:
/// lexicographic over element index with inactive < active < done.
/// The graph must outlive the generator.
class SuccessorGenerator {
public:
    SuccessorGenerator(const ProcessGraph& graph, const InstanceState& from);

    /// Next successor, or nullopt when exhausted.
    [[nodiscard]] std::optional<InstanceState> next();

private:
    const ProcessGraph& _graph;
    InstanceState _from;
    InstanceState _work;
    std::vector<std::uint8_t> _choice; // next value to try per depth
    std::size_t _depth = 0;
    bool _done = false;
};

/// All legal successors, materialized.
[[nodiscard]] std::vector<InstanceState> successors(const ProcessGraph& graph, const InstanceState& s);

// ---------------------------------------------------------------------------
// Simulation

using StateDelta = std::vector<std::pair<ElementId, ElementState>>;

/// Every enabled element activates immediately and finishes after `dwell` steps.
struct EagerPolicy {
    std::size_t dwell = 1;
};

/// Per element in id order, a uniformly chosen move among those that still
/// admit a legal completion of the step.
struct UniformRandomPolicy {
    std::uint64_t seed = 0;
};

/// deltas[k] is applied for step k+1; missing entries stutter.
struct ScriptedPolicy {
    std::vector<StateDelta> deltas;
};

using SimulationPolicy = std::variant<EagerPolicy, UniformRandomPolicy, ScriptedPolicy>;

/// Deltas forced on top of the policy's proposal, keyed by the step index
/// (the time point they produce).
using FeedbackOverlay = std::map<std::size_t, StateDelta>;

class SimulationError : public Error {
public:
    SimulationError(std::size_t step, std::vector<LegalityViolation> violations);

    [[nodiscard]] std::size_t step() const { return _step; }
    [[nodiscard]] const std::vector<LegalityViolation>& violations() const { return _violations; }

private:
    std::size_t _step;
    std::vector<LegalityViolation> _violations;
};

struct Trace;

/// Runs `steps` steps from the initial state. The model must be well formed.
/// Throws SimulationError if a scripted or overlaid step is illegal and Error if
/// a delta names an unknown element.
[[nodiscard]] Trace simulate(const ProcessModel& model, const SimulationPolicy& policy, std::size_t steps,
                             const FeedbackOverlay& overlay = {});

} // namespace mlproc
