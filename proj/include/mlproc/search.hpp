// SPDX-License-Identifier: Apache-2.0
#pragma once

// Explicit-state search over the legal evolutions of a process model.

#include "mlproc/conformance.hpp"
#include "mlproc/ltl.hpp"
#include "mlproc/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace mlproc {

struct ReachStatistics {
    std::size_t expanded = 0;  // states whose successors were generated
    std::size_t generated = 0; // successor states produced
    std::size_t searched_elements = 0;
};

/// Shortest trace from the initial state whose last state satisfies `goal`,
/// with at most `depth` steps, or nullopt if none exists.
///
/// The search runs on the goal's cone of influence (goal atoms and their
/// transitive prerequisites; everything else stays inactive) and orders the
/// frontier by steps taken plus a consistent lower bound on the steps still
/// needed, so witnesses are minimal in length. Ties are broken
/// deterministically. Throws Error if `goal` contains a temporal operator or
/// refers to unknown elements.
[[nodiscard]] std::optional<Trace> reach(const ProcessModel& model, const ltl::Formula& goal, std::size_t depth,
                                         ReachStatistics* statistics = nullptr);

/// Lower bound on the number of steps needed from `state` until `goal`
/// (resolved against the graph) holds; SIZE_MAX if it can never hold.
[[nodiscard]] std::size_t steps_lower_bound(const ProcessGraph& graph, const ltl::Formula& goal,
                                            const InstanceState& state);

/// Largest model enumerate() accepts without `force`.
inline constexpr std::size_t enumerate_element_limit = 8;

/// Calls `visit` for every conforming trace with exactly depth + 1 states, in
/// canonical order, until it returns false. Throws Error for models above the
/// element limit unless `force` is set.
void enumerate(const ProcessModel& model, std::size_t depth, const std::function<bool(const Trace&)>& visit,
               bool force = false);

/// Number of traces enumerate() would visit, counted without materializing them.
[[nodiscard]] std::uint64_t count_traces(const ProcessModel& model, std::size_t depth, bool force = false);

} // namespace mlproc
