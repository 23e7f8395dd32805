// SPDX-License-Identifier: Apache-2.0
#pragma once

// Linear temporal logic over finite traces with element-state atoms.
//
// Grammar, loosest binding first:
//
//   phi := phi "->" phi                      (right associative)
//        | phi "||" phi | phi "&&" phi
//        | phi "U" phi                       (right associative)
//        | "!" phi | "X" phi | "F" phi | "G" phi
//        | "F[<=" nat "]" phi | "G[<=" nat "]" phi
//        | "true" | "false" | "(" phi ")"
//        | ("inactive"|"active"|"done"|"started") "(" id ")"
//
// Next is strong: X phi is false at the last position.

#include "mlproc/conformance.hpp"
#include "mlproc/semantics.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlproc::ltl {

enum class Op : std::uint8_t {
    truth,
    falsity,
    atom,
    negation,
    conjunction,
    disjunction,
    implication,
    next,
    eventually,
    always,
    until,
    eventually_within,
    always_within,
};

enum class Predicate : std::uint8_t { inactive, active, done, started };

[[nodiscard]] std::string_view to_string(Predicate predicate);
[[nodiscard]] bool holds(Predicate predicate, ElementState state);

/// Immutable formula tree; copies share structure.
class Formula {
public:
    static constexpr std::size_t unresolved = static_cast<std::size_t>(-1);

    Formula(); // true

    [[nodiscard]] Op op() const { return _node->op; }
    [[nodiscard]] Predicate predicate() const { return _node->predicate; }
    [[nodiscard]] const ElementId& element() const { return _node->element; }
    /// Position of the atom's element in the universe it was resolved against.
    [[nodiscard]] std::size_t slot() const { return _node->slot; }
    [[nodiscard]] std::size_t bound() const { return _node->bound; }
    [[nodiscard]] const Formula& lhs() const { return _node->children.at(0); }
    [[nodiscard]] const Formula& rhs() const { return _node->children.at(1); }
    [[nodiscard]] std::size_t arity() const { return _node->children.size(); }

    [[nodiscard]] bool is_constant() const { return op() == Op::truth || op() == Op::falsity; }
    [[nodiscard]] bool is_temporal() const;
    [[nodiscard]] bool has_temporal() const;
    [[nodiscard]] std::size_t depth() const;

    friend bool operator==(const Formula& lhs, const Formula& rhs);

    // Builders; none of them simplify.
    static Formula constant(bool value);
    static Formula atom(Predicate predicate, ElementId element, std::size_t slot = unresolved);
    static Formula unary(Op op, Formula operand, std::size_t bound = 0);
    static Formula binary(Op op, Formula lhs, Formula rhs);

private:
    struct Node {
        Op op = Op::truth;
        Predicate predicate = Predicate::inactive;
        ElementId element;
        std::size_t slot = unresolved;
        std::size_t bound = 0;
        std::vector<Formula> children;
    };
    explicit Formula(std::shared_ptr<const Node> node) : _node(std::move(node)) {}

    std::shared_ptr<const Node> _node;
};

[[nodiscard]] inline Formula truth() { return Formula::constant(true); }
[[nodiscard]] inline Formula falsity() { return Formula::constant(false); }
[[nodiscard]] inline Formula atom(Predicate p, ElementId id) { return Formula::atom(p, std::move(id)); }
[[nodiscard]] inline Formula negation(Formula f) { return Formula::unary(Op::negation, std::move(f)); }
[[nodiscard]] inline Formula next(Formula f) { return Formula::unary(Op::next, std::move(f)); }
[[nodiscard]] inline Formula eventually(Formula f) { return Formula::unary(Op::eventually, std::move(f)); }
[[nodiscard]] inline Formula always(Formula f) { return Formula::unary(Op::always, std::move(f)); }
[[nodiscard]] inline Formula eventually_within(std::size_t k, Formula f) {
    return Formula::unary(Op::eventually_within, std::move(f), k);
}
[[nodiscard]] inline Formula always_within(std::size_t k, Formula f) {
    return Formula::unary(Op::always_within, std::move(f), k);
}
[[nodiscard]] inline Formula conjunction(Formula a, Formula b) {
    return Formula::binary(Op::conjunction, std::move(a), std::move(b));
}
[[nodiscard]] inline Formula disjunction(Formula a, Formula b) {
    return Formula::binary(Op::disjunction, std::move(a), std::move(b));
}
[[nodiscard]] inline Formula implication(Formula a, Formula b) {
    return Formula::binary(Op::implication, std::move(a), std::move(b));
}
[[nodiscard]] inline Formula until(Formula a, Formula b) {
    return Formula::binary(Op::until, std::move(a), std::move(b));
}

/// Throws ParseError with a 1-based column on line 1 (formulas are single-line
/// after newlines are treated as whitespace).
[[nodiscard]] Formula parse_formula(std::string_view text);

/// Fully parenthesized; parse_formula(to_string(f)) == f.
[[nodiscard]] std::string to_string(const Formula& formula);

/// Element ids mentioned by atoms, sorted and unique.
[[nodiscard]] std::vector<ElementId> atoms_of(const Formula& formula);

/// Binds every atom to its position in `universe` (sorted ids).
/// Throws Error for ids outside the universe.
[[nodiscard]] Formula resolve(const Formula& formula, std::span<const ElementId> universe);

/// Truth at position i of the trace. Throws Error for atoms outside the
/// trace's element universe and for positions past the end.
[[nodiscard]] bool eval_at(const Formula& formula, const Trace& trace, std::size_t position);
[[nodiscard]] bool eval(const Formula& formula, const Trace& trace);

/// Satisfaction of each position of the trace, computed bottom-up.
[[nodiscard]] std::vector<bool> satisfaction(const Formula& formula, const Trace& trace);

/// Consumes one state: the result holds on the remaining suffix iff the input
/// held on the state followed by that suffix. The formula must be resolved
/// against the state's universe. Constants are folded.
[[nodiscard]] Formula progress(const Formula& formula, const InstanceState& state);

/// Truth of a residual formula on the empty suffix after the last state.
[[nodiscard]] bool finish(const Formula& formula);

/// Value of a formula without temporal operators on one state (resolved).
[[nodiscard]] bool holds_in(const Formula& formula, const InstanceState& state);

} // namespace mlproc::ltl
