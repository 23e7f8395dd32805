// SPDX-License-Identifier: Apache-2.0
#pragma once

// Static process models: elements (activities and artifacts), require/produce
// associations between them, and feedback annotations.

#include "mlproc/error.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlproc {

using ElementId = std::string;

/// `[a-z][a-z0-9_]*`
[[nodiscard]] bool is_valid_identifier(std::string_view text);

enum class Phase : std::uint8_t { planning, development, deployment, operations };

/// Two activity kinds followed by three artifact kinds.
enum class ElementKind : std::uint8_t {
    human_task,
    automated_procedure,
    data,
    logical_statement,
    functional_description,
};

[[nodiscard]] constexpr bool is_activity(ElementKind kind) {
    return kind == ElementKind::human_task || kind == ElementKind::automated_procedure;
}
[[nodiscard]] constexpr bool is_artifact(ElementKind kind) { return !is_activity(kind); }

[[nodiscard]] std::string_view to_string(Phase phase);
[[nodiscard]] std::optional<Phase> phase_from_string(std::string_view text);

struct Element {
    ElementId id;
    ElementKind kind = ElementKind::human_task;
    Phase phase = Phase::planning;
    std::string lane;
    bool external = false;
    std::string display_name;

    friend bool operator==(const Element&, const Element&) = default;
    friend auto operator<=>(const Element&, const Element&) = default;
};

enum class AssociationKind : std::uint8_t { require, produce };

struct Association {
    AssociationKind kind = AssociationKind::produce;
    ElementId from;
    ElementId to;

    friend bool operator==(const Association&, const Association&) = default;
    friend auto operator<=>(const Association&, const Association&) = default;
};

struct FeedbackAnnotation {
    ElementId source;
    ElementId target;
    std::string label;

    friend bool operator==(const FeedbackAnnotation&, const FeedbackAnnotation&) = default;
    friend auto operator<=>(const FeedbackAnnotation&, const FeedbackAnnotation&) = default;
};

/// A process model as declared. Nothing here is checked; see validate().
/// Equality ignores declaration order.
struct ProcessModel {
    std::string name;
    std::vector<Element> elements;
    std::vector<Association> associations;
    std::vector<FeedbackAnnotation> feedback;

    [[nodiscard]] const Element* find(std::string_view id) const;

    friend bool operator==(const ProcessModel& lhs, const ProcessModel& rhs);
};

/// Same model with every collection sorted; elements by id.
[[nodiscard]] ProcessModel canonicalize(ProcessModel model);

// ---------------------------------------------------------------------------
// Well-formedness

enum class WellFormednessRule : std::uint8_t {
    w1_identifier,      // duplicate or invalid id, duplicate declaration
    w2_endpoint_kind,   // require must be artifact->activity, produce activity->artifact
    w3_no_product,      // activity without produce association
    w4_no_producer,     // non-external artifact without producer; misuse of `external`
    w5_cycle,           // association graph has a cycle
    w6_feedback_order,  // feedback does not point strictly backwards
    w7_unknown_id,      // reference to an undeclared element
};

[[nodiscard]] std::string_view to_string(WellFormednessRule rule);

struct ModelDiagnostic {
    WellFormednessRule rule;
    std::vector<ElementId> elements;
    std::string message;

    friend bool operator==(const ModelDiagnostic&, const ModelDiagnostic&) = default;
    friend auto operator<=>(const ModelDiagnostic&, const ModelDiagnostic&) = default;
};

struct ModelWarning {
    std::vector<ElementId> elements;
    std::string message;

    friend bool operator==(const ModelWarning&, const ModelWarning&) = default;
    friend auto operator<=>(const ModelWarning&, const ModelWarning&) = default;
};

struct WellFormednessReport {
    std::vector<ModelDiagnostic> violations; // sorted
    std::vector<ModelWarning> warnings;      // sorted; do not affect well_formed()

    [[nodiscard]] bool well_formed() const { return violations.empty(); }
    [[nodiscard]] bool has(WellFormednessRule rule) const;
};

[[nodiscard]] WellFormednessReport validate(const ProcessModel& model);

// ---------------------------------------------------------------------------
// Dependency structure

/// Elements with an association into `id`, sorted. Throws Error for unknown ids.
[[nodiscard]] std::vector<ElementId> pre(const ProcessModel& model, std::string_view id);
/// Elements with an association out of `id`, sorted. Throws Error for unknown ids.
[[nodiscard]] std::vector<ElementId> post(const ProcessModel& model, std::string_view id);

/// level(e) = 1 for empty pre(e), else 1 + max level over pre(e).
/// Throws Error if the association graph is cyclic or references unknown ids.
[[nodiscard]] std::map<ElementId, int> topo_levels(const ProcessModel& model);

/// Index-based view of a structurally sound model (unique ids, all references
/// resolvable). Element indices follow lexicographic id order, which is the
/// canonical iteration order used throughout the library.
class ProcessGraph {
public:
    /// Throws Error on duplicate ids or dangling association references.
    explicit ProcessGraph(const ProcessModel& model);

    [[nodiscard]] const std::string& name() const { return _name; }
    [[nodiscard]] std::size_t size() const { return _elements.size(); }
    [[nodiscard]] const Element& element(std::size_t index) const { return _elements[index]; }
    [[nodiscard]] const ElementId& id(std::size_t index) const { return _elements[index].id; }
    [[nodiscard]] std::span<const ElementId> ids() const { return _ids; }
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view id) const;
    /// Throws Error for unknown ids.
    [[nodiscard]] std::size_t require_index(std::string_view id) const;

    [[nodiscard]] std::span<const std::size_t> pre(std::size_t index) const { return _pre[index]; }
    [[nodiscard]] std::span<const std::size_t> post(std::size_t index) const { return _post[index]; }

    /// Indices of the elements in a topological order (pre before post), or
    /// nullopt for cyclic graphs.
    [[nodiscard]] const std::optional<std::vector<std::size_t>>& topological_order() const {
        return _topo;
    }

private:
    std::string _name;
    std::vector<Element> _elements;
    std::vector<ElementId> _ids;
    std::vector<std::vector<std::size_t>> _pre;
    std::vector<std::vector<std::size_t>> _post;
    std::optional<std::vector<std::size_t>> _topo;
};

/// Sub-model containing `roots` and all their transitive prerequisites, with
/// the associations among them. Feedback annotations are dropped.
[[nodiscard]] ProcessModel ancestor_closure(const ProcessModel& model,
                                            std::span<const ElementId> roots);

} // namespace mlproc
