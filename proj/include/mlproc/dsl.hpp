// SPDX-License-Identifier: Apache-2.0
#pragma once

// Process model text format, one statement per line, `#` comments:
//
//   process <name>
//   activity <id> phase=<planning|development|deployment|operations> kind=<human|automated> [lane="..."] [name="..."]
//   artifact <id> phase=<...> kind=<data|logical|functional> [external] [lane="..."] [name="..."]
//   produce <activity_id> -> <artifact_id>
//   require <artifact_id> -> <activity_id>
//   feedback <artifact_id> -> <element_id> [label="..."]

#include "mlproc/model.hpp"

#include <string>
#include <string_view>

namespace mlproc {

/// Parses without validating; call validate() on the result.
/// Throws ParseError (with a SourceSpan inside the input) on syntax errors,
/// unknown keywords and duplicate declarations.
[[nodiscard]] ProcessModel parse_model(std::string_view text);

/// Canonical text: activities, artifacts, then produce, require and feedback
/// lines, each group sorted. parse_model(print_model(m)) == m.
[[nodiscard]] std::string print_model(const ProcessModel& model);

/// Graphviz rendering with one cluster per phase. Throws Error for models
/// that are not well formed.
[[nodiscard]] std::string export_dot(const ProcessModel& model);

} // namespace mlproc
