// SPDX-License-Identifier: Apache-2.0
#pragma once

// Built-in process models and example instances.

#include "mlproc/conformance.hpp"
#include "mlproc/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mlproc::catalog {

/// ML development life cycle from use case analysis through monitoring:
/// 13 activities, 19 artifacts (4 of them supplied by the customer).
[[nodiscard]] ProcessModel ml_dev_process();

/// Multi-agent reinforcement learning training set-up with three feedback
/// loops from the evaluation verdict.
[[nodiscard]] ProcessModel marl_process();

struct TraceFixture {
    std::string name; // file stem
    std::string description;
    Trace trace;
    /// For mutants: the single rule they break and where.
    std::optional<LegalityRule> expected_rule;
    std::size_t expected_t = 0;
};

/// ml_dev: happy_path, feedback_retune, mutant_r1 .. mutant_r6,
/// mutant_retune_stale; marl: marl_happy_path, marl_reward_loop.
[[nodiscard]] std::vector<TraceFixture> example_traces();

struct FixtureFile {
    std::string filename;
    std::string contents;
};

/// Model and trace files for "ml_dev" or "marl"; empty for other names.
[[nodiscard]] std::vector<FixtureFile> fixture_files(std::string_view catalog);

} // namespace mlproc::catalog
