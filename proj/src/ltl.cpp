// SPDX-License-Identifier: Apache-2.0
#include "mlproc/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

namespace mlproc::ltl {

std::string_view to_string(Predicate predicate) {
    switch (predicate) {
    case Predicate::inactive: return "inactive";
    case Predicate::active: return "active";
    case Predicate::done: return "done";
    case Predicate::started: return "started";
    }
    return "?";
}

bool holds(Predicate predicate, ElementState state) {
    switch (predicate) {
    case Predicate::inactive: return state == ElementState::inactive;
    case Predicate::active: return state == ElementState::active;
    case Predicate::done: return state == ElementState::done;
    case Predicate::started: return state != ElementState::inactive;
    }
    return false;
}

// ---------------------------------------------------------------------------

Formula::Formula() : _node(std::make_shared<const Node>()) {}

Formula Formula::constant(bool value) {
    auto node = std::make_shared<Node>();
    node->op = value ? Op::truth : Op::falsity;
    return Formula(std::move(node));
}

Formula Formula::atom(Predicate predicate, ElementId element, std::size_t slot) {
    auto node = std::make_shared<Node>();
    node->op = Op::atom;
    node->predicate = predicate;
    node->element = std::move(element);
    node->slot = slot;
    return Formula(std::move(node));
}

Formula Formula::unary(Op op, Formula operand, std::size_t bound) {
    auto node = std::make_shared<Node>();
    node->op = op;
    node->bound = bound;
    node->children.push_back(std::move(operand));
    return Formula(std::move(node));
}

Formula Formula::binary(Op op, Formula lhs, Formula rhs) {
    auto node = std::make_shared<Node>();
    node->op = op;
    node->children.push_back(std::move(lhs));
    node->children.push_back(std::move(rhs));
    return Formula(std::move(node));
}

bool Formula::is_temporal() const {
    switch (op()) {
    case Op::next:
    case Op::eventually:
    case Op::always:
    case Op::until:
    case Op::eventually_within:
    case Op::always_within: return true;
    default: return false;
    }
}

bool Formula::has_temporal() const {
    if (is_temporal()) {
        return true;
    }
    for (const auto& child : _node->children) {
        if (child.has_temporal()) {
            return true;
        }
    }
    return false;
}

std::size_t Formula::depth() const {
    std::size_t deepest = 0;
    for (const auto& child : _node->children) {
        deepest = std::max(deepest, child.depth());
    }
    return deepest + 1;
}

bool operator==(const Formula& lhs, const Formula& rhs) {
    if (lhs._node == rhs._node) {
        return true;
    }
    if (lhs.op() != rhs.op() || lhs.arity() != rhs.arity()) {
        return false;
    }
    if (lhs.op() == Op::atom) {
        return lhs.predicate() == rhs.predicate() && lhs.element() == rhs.element();
    }
    if (lhs.op() == Op::eventually_within || lhs.op() == Op::always_within) {
        if (lhs.bound() != rhs.bound()) {
            return false;
        }
    }
    for (std::size_t i = 0; i < lhs.arity(); ++i) {
        if (!(lhs._node->children[i] == rhs._node->children[i])) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok : std::uint8_t {
    end,
    lparen,
    rparen,
    bang,
    and_,
    or_,
    arrow,
    next,
    eventually,
    always,
    until,
    eventually_within,
    always_within,
    word,
};

struct Token {
    Tok kind = Tok::end;
    std::string_view text;
    std::size_t column = 1; // 1-based
    std::size_t bound = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : _text(text) {}

    Token next() {
        while (_pos < _text.size() && std::isspace(static_cast<unsigned char>(_text[_pos])) != 0) {
            ++_pos;
        }
        const auto start = _pos;
        Token tok;
        tok.column = start + 1;
        if (_pos >= _text.size()) {
            return tok;
        }
        const char c = _text[_pos];
        auto take = [&](Tok kind, std::size_t len) {
            tok.kind = kind;
            tok.text = _text.substr(start, len);
            _pos += len;
            return tok;
        };
        switch (c) {
        case '(': return take(Tok::lparen, 1);
        case ')': return take(Tok::rparen, 1);
        case '!': return take(Tok::bang, 1);
        default: break;
        }
        if (rest().starts_with("&&")) {
            return take(Tok::and_, 2);
        }
        if (rest().starts_with("||")) {
            return take(Tok::or_, 2);
        }
        if (rest().starts_with("->")) {
            return take(Tok::arrow, 2);
        }
        if ((c == 'F' || c == 'G') && rest().substr(1).starts_with("[<=")) {
            return bounded(c == 'F' ? Tok::eventually_within : Tok::always_within);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            while (_pos < _text.size() &&
                   (std::isalnum(static_cast<unsigned char>(_text[_pos])) != 0 || _text[_pos] == '_')) {
                ++_pos;
            }
            tok.text = _text.substr(start, _pos - start);
            if (tok.text == "X") {
                tok.kind = Tok::next;
            } else if (tok.text == "F") {
                tok.kind = Tok::eventually;
            } else if (tok.text == "G") {
                tok.kind = Tok::always;
            } else if (tok.text == "U") {
                tok.kind = Tok::until;
            } else {
                tok.kind = Tok::word;
            }
            return tok;
        }
        throw ParseError({1, start + 1, start + 2}, "unexpected character '" + std::string(1, c) + "'");
    }

private:
    std::string_view rest() const { return _text.substr(_pos); }

    Token bounded(Tok kind) {
        const auto start = _pos;
        _pos += 4; // F[<=
        while (_pos < _text.size() && _text[_pos] == ' ') {
            ++_pos;
        }
        const auto number_start = _pos;
        if (_pos < _text.size() && _text[_pos] == '-') {
            throw ParseError({1, _pos + 1, _pos + 2}, "negative bound in temporal operator");
        }
        while (_pos < _text.size() && std::isdigit(static_cast<unsigned char>(_text[_pos])) != 0) {
            ++_pos;
        }
        if (_pos == number_start) {
            throw ParseError({1, number_start + 1, number_start + 2}, "expected a natural number bound");
        }
        Token tok;
        tok.kind = kind;
        tok.column = start + 1;
        try {
            tok.bound = std::stoull(std::string(_text.substr(number_start, _pos - number_start)));
        } catch (const std::exception&) {
            throw ParseError({1, number_start + 1, _pos + 1}, "bound out of range");
        }
        while (_pos < _text.size() && _text[_pos] == ' ') {
            ++_pos;
        }
        if (_pos >= _text.size() || _text[_pos] != ']') {
            throw ParseError({1, _pos + 1, _pos + 2}, "expected ']' after bound");
        }
        ++_pos;
        tok.text = _text.substr(start, _pos - start);
        return tok;
    }

    std::string_view _text;
    std::size_t _pos = 0;
};

class Parser {
public:
    explicit Parser(std::string_view text) : _lexer(text) { advance(); }

    Formula parse() {
        auto f = implication_level();
        if (_tok.kind != Tok::end) {
            fail("unexpected '" + std::string(_tok.text) + "'");
        }
        return f;
    }

private:
    void advance() { _tok = _lexer.next(); }

    [[noreturn]] void fail(const std::string& message) const {
        const auto width = std::max<std::size_t>(_tok.text.size(), 1);
        throw ParseError({1, _tok.column, _tok.column + width}, message);
    }

    void expect(Tok kind, std::string_view what) {
        if (_tok.kind != kind) {
            fail("expected " + std::string(what) +
                 (_tok.kind == Tok::end ? " at end of input" : ", found '" + std::string(_tok.text) + "'"));
        }
        advance();
    }

    Formula implication_level() {
        auto lhs = or_level();
        if (_tok.kind == Tok::arrow) {
            advance();
            return implication(std::move(lhs), implication_level());
        }
        return lhs;
    }

    Formula or_level() {
        auto lhs = and_level();
        while (_tok.kind == Tok::or_) {
            advance();
            lhs = disjunction(std::move(lhs), and_level());
        }
        return lhs;
    }

    Formula and_level() {
        auto lhs = until_level();
        while (_tok.kind == Tok::and_) {
            advance();
            lhs = conjunction(std::move(lhs), until_level());
        }
        return lhs;
    }

    Formula until_level() {
        auto lhs = unary_level();
        if (_tok.kind == Tok::until) {
            advance();
            return until(std::move(lhs), until_level());
        }
        return lhs;
    }

    Formula unary_level() {
        const auto tok = _tok;
        switch (tok.kind) {
        case Tok::bang: advance(); return negation(unary_level());
        case Tok::next: advance(); return next(unary_level());
        case Tok::eventually: advance(); return eventually(unary_level());
        case Tok::always: advance(); return always(unary_level());
        case Tok::eventually_within: advance(); return eventually_within(tok.bound, unary_level());
        case Tok::always_within: advance(); return always_within(tok.bound, unary_level());
        default: return primary();
        }
    }

    Formula primary() {
        if (_tok.kind == Tok::lparen) {
            advance();
            auto inner = implication_level();
            expect(Tok::rparen, "')'");
            return inner;
        }
        if (_tok.kind != Tok::word) {
            fail(_tok.kind == Tok::end ? "unexpected end of formula"
                                       : "expected a formula, found '" + std::string(_tok.text) + "'");
        }
        if (_tok.text == "true" || _tok.text == "false") {
            const bool value = _tok.text == "true";
            advance();
            return Formula::constant(value);
        }
        std::optional<Predicate> predicate;
        for (auto p : {Predicate::inactive, Predicate::active, Predicate::done, Predicate::started}) {
            if (to_string(p) == _tok.text) {
                predicate = p;
            }
        }
        if (!predicate) {
            fail("unknown predicate '" + std::string(_tok.text) + "'");
        }
        advance();
        expect(Tok::lparen, "'('");
        if (_tok.kind != Tok::word || !is_valid_identifier(_tok.text)) {
            fail("expected an element id");
        }
        auto id = std::string(_tok.text);
        advance();
        expect(Tok::rparen, "')'");
        return atom(*predicate, std::move(id));
    }

    Lexer _lexer;
    Token _tok;
};

} // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Formula& f) {
    switch (f.op()) {
    case Op::truth: return "true";
    case Op::falsity: return "false";
    case Op::atom: return std::string(to_string(f.predicate())) + "(" + f.element() + ")";
    case Op::negation: return "(!" + to_string(f.lhs()) + ")";
    case Op::next: return "(X " + to_string(f.lhs()) + ")";
    case Op::eventually: return "(F " + to_string(f.lhs()) + ")";
    case Op::always: return "(G " + to_string(f.lhs()) + ")";
    case Op::eventually_within: return "(F[<=" + std::to_string(f.bound()) + "] " + to_string(f.lhs()) + ")";
    case Op::always_within: return "(G[<=" + std::to_string(f.bound()) + "] " + to_string(f.lhs()) + ")";
    case Op::conjunction: return "(" + to_string(f.lhs()) + " && " + to_string(f.rhs()) + ")";
    case Op::disjunction: return "(" + to_string(f.lhs()) + " || " + to_string(f.rhs()) + ")";
    case Op::implication: return "(" + to_string(f.lhs()) + " -> " + to_string(f.rhs()) + ")";
    case Op::until: return "(" + to_string(f.lhs()) + " U " + to_string(f.rhs()) + ")";
    }
    return "?";
}

namespace {

void collect_atoms(const Formula& f, std::set<ElementId>& out) {
    if (f.op() == Op::atom) {
        out.insert(f.element());
    }
    for (std::size_t i = 0; i < f.arity(); ++i) {
        collect_atoms(i == 0 ? f.lhs() : f.rhs(), out);
    }
}

Formula rebuild(const Formula& f, std::vector<Formula> children) {
    if (children.size() == 1) {
        return Formula::unary(f.op(), std::move(children[0]), f.bound());
    }
    return Formula::binary(f.op(), std::move(children[0]), std::move(children[1]));
}

} // namespace

std::vector<ElementId> atoms_of(const Formula& formula) {
    std::set<ElementId> ids;
    collect_atoms(formula, ids);
    return {ids.begin(), ids.end()};
}

Formula resolve(const Formula& f, std::span<const ElementId> universe) {
    if (f.op() == Op::atom) {
        auto it = std::lower_bound(universe.begin(), universe.end(), f.element());
        if (it == universe.end() || *it != f.element()) {
            throw Error("formula refers to unknown element '" + f.element() + "'");
        }
        return Formula::atom(f.predicate(), f.element(), static_cast<std::size_t>(it - universe.begin()));
    }
    if (f.arity() == 0) {
        return f;
    }
    std::vector<Formula> children;
    for (std::size_t i = 0; i < f.arity(); ++i) {
        children.push_back(resolve(i == 0 ? f.lhs() : f.rhs(), universe));
    }
    return rebuild(f, std::move(children));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::vector<bool> compute(const Formula& f, const Trace& trace) {
    const auto n = trace.length();
    std::vector<bool> out(n, false);
    switch (f.op()) {
    case Op::truth: out.assign(n, true); break;
    case Op::falsity: break;
    case Op::atom:
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = holds(f.predicate(), trace.states[i][f.slot()]);
        }
        break;
    case Op::negation: {
        auto a = compute(f.lhs(), trace);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = !a[i];
        }
        break;
    }
    case Op::conjunction:
    case Op::disjunction:
    case Op::implication: {
        auto a = compute(f.lhs(), trace);
        auto b = compute(f.rhs(), trace);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = f.op() == Op::conjunction   ? (a[i] && b[i])
                     : f.op() == Op::disjunction ? (a[i] || b[i])
                                                 : (!a[i] || b[i]);
        }
        break;
    }
    case Op::next: {
        auto a = compute(f.lhs(), trace);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            out[i] = a[i + 1];
        }
        break;
    }
    case Op::eventually:
    case Op::always: {
        auto a = compute(f.lhs(), trace);
        const bool is_f = f.op() == Op::eventually;
        bool carry = !is_f; // value past the end
        for (std::size_t i = n; i-- > 0;) {
            carry = is_f ? (a[i] || carry) : (a[i] && carry);
            out[i] = carry;
        }
        break;
    }
    case Op::until: {
        auto a = compute(f.lhs(), trace);
        auto b = compute(f.rhs(), trace);
        bool carry = false;
        for (std::size_t i = n; i-- > 0;) {
            carry = b[i] || (a[i] && carry);
            out[i] = carry;
        }
        break;
    }
    case Op::eventually_within:
    case Op::always_within: {
        auto a = compute(f.lhs(), trace);
        const bool is_f = f.op() == Op::eventually_within;
        // nearest j >= i where the operand is true (F) or false (G)
        std::optional<std::size_t> nearest;
        for (std::size_t i = n; i-- > 0;) {
            if (a[i] == is_f) {
                nearest = i;
            }
            const bool within = nearest && *nearest - i <= f.bound();
            out[i] = is_f ? within : !within;
        }
        break;
    }
    }
    return out;
}

bool needs_resolution(const Formula& f) {
    if (f.op() == Op::atom) {
        return f.slot() == Formula::unresolved;
    }
    for (std::size_t i = 0; i < f.arity(); ++i) {
        if (needs_resolution(i == 0 ? f.lhs() : f.rhs())) {
            return true;
        }
    }
    return false;
}

} // namespace

std::vector<bool> satisfaction(const Formula& formula, const Trace& trace) {
    return compute(resolve(formula, trace.elements), trace);
}

bool eval_at(const Formula& formula, const Trace& trace, std::size_t position) {
    if (position >= trace.length()) {
        throw Error("position " + std::to_string(position) + " is outside a trace of length " +
                    std::to_string(trace.length()));
    }
    return satisfaction(formula, trace)[position];
}

bool eval(const Formula& formula, const Trace& trace) { return eval_at(formula, trace, 0); }

// ---------------------------------------------------------------------------
// Progression

namespace {

Formula fold_not(Formula a) {
    if (a.is_constant()) {
        return Formula::constant(a.op() == Op::falsity);
    }
    if (a.op() == Op::negation) {
        return a.lhs();
    }
    return negation(std::move(a));
}

Formula fold_and(Formula a, Formula b) {
    if (a.op() == Op::falsity || b.op() == Op::falsity) {
        return falsity();
    }
    if (a.op() == Op::truth) {
        return b;
    }
    if (b.op() == Op::truth || a == b) {
        return a;
    }
    return conjunction(std::move(a), std::move(b));
}

Formula fold_or(Formula a, Formula b) {
    if (a.op() == Op::truth || b.op() == Op::truth) {
        return truth();
    }
    if (a.op() == Op::falsity) {
        return b;
    }
    if (b.op() == Op::falsity || a == b) {
        return a;
    }
    return disjunction(std::move(a), std::move(b));
}

} // namespace

Formula progress(const Formula& f, const InstanceState& state) {
    switch (f.op()) {
    case Op::truth:
    case Op::falsity: return f;
    case Op::atom:
        if (f.slot() == Formula::unresolved || f.slot() >= state.size()) {
            throw Error("atom '" + f.element() + "' is not resolved against this state");
        }
        return Formula::constant(holds(f.predicate(), state[f.slot()]));
    case Op::negation: return fold_not(progress(f.lhs(), state));
    case Op::conjunction: return fold_and(progress(f.lhs(), state), progress(f.rhs(), state));
    case Op::disjunction: return fold_or(progress(f.lhs(), state), progress(f.rhs(), state));
    case Op::implication: return fold_or(fold_not(progress(f.lhs(), state)), progress(f.rhs(), state));
    // The operand must hold at the next position, which must exist: `F true`
    // is the obligation "the suffix is not empty".
    case Op::next: return fold_and(f.lhs(), eventually(truth()));
    case Op::eventually: return fold_or(progress(f.lhs(), state), f);
    case Op::always: return fold_and(progress(f.lhs(), state), f);
    case Op::until:
        return fold_or(progress(f.rhs(), state), fold_and(progress(f.lhs(), state), f));
    case Op::eventually_within:
        return fold_or(progress(f.lhs(), state),
                       f.bound() > 0 ? eventually_within(f.bound() - 1, f.lhs()) : falsity());
    case Op::always_within:
        return fold_and(progress(f.lhs(), state),
                        f.bound() > 0 ? always_within(f.bound() - 1, f.lhs()) : truth());
    }
    return f;
}

bool finish(const Formula& f) {
    switch (f.op()) {
    case Op::truth: return true;
    case Op::falsity: return false;
    case Op::atom: return false;
    case Op::negation: return !finish(f.lhs());
    case Op::conjunction: return finish(f.lhs()) && finish(f.rhs());
    case Op::disjunction: return finish(f.lhs()) || finish(f.rhs());
    case Op::implication: return !finish(f.lhs()) || finish(f.rhs());
    case Op::next:
    case Op::eventually:
    case Op::until:
    case Op::eventually_within: return false;
    case Op::always:
    case Op::always_within: return true;
    }
    return false;
}

bool holds_in(const Formula& f, const InstanceState& state) {
    if (f.has_temporal()) {
        throw Error("temporal operator in state predicate: " + to_string(f));
    }
    if (needs_resolution(f)) {
        throw Error("state predicate is not resolved: " + to_string(f));
    }
    return progress(f, state).op() == Op::truth;
}

} // namespace mlproc::ltl
