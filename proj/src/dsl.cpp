// SPDX-License-Identifier: Apache-2.0
#include "mlproc/dsl.hpp"

#include "text.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace mlproc {

namespace {

struct Token {
    enum class Kind { word, arrow, attribute } kind = Kind::word;
    std::string text;  // word, or attribute key
    std::string value; // attribute value (unescaped)
    std::size_t column = 1;
    std::size_t width = 1;
};

std::vector<Token> tokenize(std::size_t line_no, std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto is_space = [](char c) { return c == ' ' || c == '\t'; };
    while (i < line.size()) {
        if (is_space(line[i])) {
            ++i;
            continue;
        }
        if (line[i] == '#') {
            break;
        }
        Token tok;
        tok.column = i + 1;
        const auto start = i;
        if (line.substr(i).starts_with("->")) {
            tok.kind = Token::Kind::arrow;
            tok.text = "->";
            i += 2;
        } else {
            while (i < line.size() && !is_space(line[i]) && line[i] != '=' && line[i] != '#') {
                ++i;
            }
            tok.text = std::string(line.substr(start, i - start));
            if (i < line.size() && line[i] == '=') {
                tok.kind = Token::Kind::attribute;
                ++i;
                if (i < line.size() && line[i] == '"') {
                    ++i;
                    bool closed = false;
                    while (i < line.size()) {
                        const char c = line[i++];
                        if (c == '"') {
                            closed = true;
                            break;
                        }
                        if (c == '\\' && i < line.size()) {
                            const char e = line[i++];
                            tok.value += e == 'n' ? '\n' : e;
                        } else {
                            tok.value += c;
                        }
                    }
                    if (!closed) {
                        throw ParseError({line_no, start + 1, line.size() + 1}, "unterminated string");
                    }
                } else {
                    const auto value_start = i;
                    while (i < line.size() && !is_space(line[i]) && line[i] != '#') {
                        ++i;
                    }
                    tok.value = std::string(line.substr(value_start, i - value_start));
                }
            }
        }
        tok.width = std::max<std::size_t>(i - start, 1);
        out.push_back(std::move(tok));
    }
    return out;
}

std::optional<ElementKind> kind_from_string(std::string_view text, bool activity) {
    if (activity) {
        if (text == "human") return ElementKind::human_task;
        if (text == "automated") return ElementKind::automated_procedure;
        return std::nullopt;
    }
    if (text == "data") return ElementKind::data;
    if (text == "logical") return ElementKind::logical_statement;
    if (text == "functional") return ElementKind::functional_description;
    return std::nullopt;
}

std::string_view kind_keyword(ElementKind kind) {
    switch (kind) {
    case ElementKind::human_task: return "human";
    case ElementKind::automated_procedure: return "automated";
    case ElementKind::data: return "data";
    case ElementKind::logical_statement: return "logical";
    case ElementKind::functional_description: return "functional";
    }
    return "?";
}

class ModelParser {
public:
    ProcessModel run(std::string_view text) {
        detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
            _line = line_no;
            auto tokens = tokenize(line_no, line);
            if (!tokens.empty()) {
                statement(tokens);
            }
        });
        if (!_have_process) {
            throw ParseError({1, 1, 1}, "missing 'process <name>' declaration");
        }
        return std::move(_model);
    }

private:
    [[noreturn]] void fail(const Token& at, const std::string& message) const {
        throw ParseError({_line, at.column, at.column + at.width}, message);
    }

    const Token& word(const std::vector<Token>& tokens, std::size_t i, std::string_view what) const {
        if (i >= tokens.size()) {
            fail(tokens.back(), "expected " + std::string(what));
        }
        if (tokens[i].kind != Token::Kind::word) {
            fail(tokens[i], "expected " + std::string(what));
        }
        return tokens[i];
    }

    ElementId identifier(const std::vector<Token>& tokens, std::size_t i, std::string_view what) const {
        const auto& tok = word(tokens, i, what);
        if (!is_valid_identifier(tok.text)) {
            fail(tok, "invalid identifier '" + tok.text + "'");
        }
        return tok.text;
    }

    void statement(const std::vector<Token>& tokens) {
        const auto& head = tokens.front();
        if (head.kind != Token::Kind::word) {
            fail(head, "expected a keyword");
        }
        const auto& keyword = head.text;
        if (keyword == "process") {
            if (_have_process) {
                fail(head, "duplicate 'process' declaration");
            }
            _model.name = identifier(tokens, 1, "a process name");
            if (tokens.size() > 2) {
                fail(tokens[2], "unexpected text after process name");
            }
            _have_process = true;
            return;
        }
        if (keyword != "activity" && keyword != "artifact" && keyword != "produce" && keyword != "require" &&
            keyword != "feedback") {
            fail(head, "unknown keyword '" + keyword + "'");
        }
        if (!_have_process) {
            fail(head, "'" + keyword + "' before the 'process' declaration");
        }
        if (keyword == "activity" || keyword == "artifact") {
            element(tokens, keyword == "activity");
        } else {
            edge(tokens);
        }
    }

    void element(const std::vector<Token>& tokens, bool activity) {
        Element e;
        e.id = identifier(tokens, 1, "an element id");
        if (!_declared.insert(e.id).second) {
            fail(tokens[1], "duplicate declaration of '" + e.id + "'");
        }
        std::set<std::string> seen;
        bool have_phase = false;
        bool have_kind = false;
        for (std::size_t i = 2; i < tokens.size(); ++i) {
            const auto& tok = tokens[i];
            if (tok.kind == Token::Kind::word && tok.text == "external") {
                if (activity) {
                    fail(tok, "activities cannot be external");
                }
                if (e.external) {
                    fail(tok, "duplicate 'external' flag");
                }
                e.external = true;
                continue;
            }
            if (tok.kind != Token::Kind::attribute) {
                fail(tok, "expected key=value, found '" + tok.text + "'");
            }
            if (!seen.insert(tok.text).second) {
                fail(tok, "duplicate attribute '" + tok.text + "'");
            }
            if (tok.text == "phase") {
                auto phase = phase_from_string(tok.value);
                if (!phase) {
                    fail(tok, "unknown phase '" + tok.value + "'");
                }
                e.phase = *phase;
                have_phase = true;
            } else if (tok.text == "kind") {
                auto kind = kind_from_string(tok.value, activity);
                if (!kind) {
                    fail(tok, "unknown " + std::string(activity ? "activity" : "artifact") + " kind '" +
                                  tok.value + "'");
                }
                e.kind = *kind;
                have_kind = true;
            } else if (tok.text == "lane") {
                e.lane = tok.value;
            } else if (tok.text == "name") {
                e.display_name = tok.value;
            } else {
                fail(tok, "unknown attribute '" + tok.text + "'");
            }
        }
        if (!have_phase) {
            fail(tokens.front(), "'" + e.id + "' needs phase=...");
        }
        if (!have_kind) {
            fail(tokens.front(), "'" + e.id + "' needs kind=...");
        }
        _model.elements.push_back(std::move(e));
    }

    void edge(const std::vector<Token>& tokens) {
        const auto& keyword = tokens.front().text;
        auto from = identifier(tokens, 1, "a source element id");
        if (tokens.size() < 3 || tokens[2].kind != Token::Kind::arrow) {
            fail(tokens.size() < 3 ? tokens.back() : tokens[2], "expected '->'");
        }
        auto to = identifier(tokens, 3, "a target element id");
        if (keyword == "feedback") {
            FeedbackAnnotation f{from, to, {}};
            for (std::size_t i = 4; i < tokens.size(); ++i) {
                const auto& tok = tokens[i];
                if (tok.kind != Token::Kind::attribute || tok.text != "label" || i != 4) {
                    fail(tok, "expected optional label=\"...\"");
                }
                f.label = tok.value;
            }
            if (!_feedback.emplace(from, to).second) {
                fail(tokens[1], "duplicate feedback " + from + " -> " + to);
            }
            _model.feedback.push_back(std::move(f));
            return;
        }
        if (tokens.size() > 4) {
            fail(tokens[4], "unexpected text after association");
        }
        Association a{keyword == "produce" ? AssociationKind::produce : AssociationKind::require, from, to};
        if (!_associations.insert(a).second) {
            fail(tokens[1], "duplicate association " + keyword + " " + from + " -> " + to);
        }
        _model.associations.push_back(std::move(a));
    }

    ProcessModel _model;
    bool _have_process = false;
    std::size_t _line = 0;
    std::set<ElementId> _declared;
    std::set<Association> _associations;
    std::set<std::pair<ElementId, ElementId>> _feedback;
};

std::string quoted(std::string_view text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += c;
        }
    }
    return out + "\"";
}

} // namespace

ProcessModel parse_model(std::string_view text) { return ModelParser().run(text); }

std::string print_model(const ProcessModel& model) {
    const auto m = canonicalize(model);
    std::ostringstream out;
    out << "process " << m.name << '\n';

    std::vector<const Element*> ordered;
    for (const auto& e : m.elements) {
        ordered.push_back(&e);
    }
    std::stable_sort(ordered.begin(), ordered.end(), [](const Element* a, const Element* b) {
        return is_activity(a->kind) && !is_activity(b->kind);
    });
    if (!ordered.empty()) {
        out << '\n';
    }
    for (const auto* e : ordered) {
        out << (is_activity(e->kind) ? "activity " : "artifact ") << e->id << " phase=" << to_string(e->phase)
            << " kind=" << kind_keyword(e->kind);
        if (e->external) {
            out << " external";
        }
        if (!e->lane.empty()) {
            out << " lane=" << quoted(e->lane);
        }
        if (!e->display_name.empty()) {
            out << " name=" << quoted(e->display_name);
        }
        out << '\n';
    }

    if (!m.associations.empty() || !m.feedback.empty()) {
        out << '\n';
    }
    for (auto kind : {AssociationKind::produce, AssociationKind::require}) {
        for (const auto& a : m.associations) {
            if (a.kind == kind) {
                out << (kind == AssociationKind::produce ? "produce " : "require ") << a.from << " -> " << a.to << '\n';
            }
        }
    }
    for (const auto& f : m.feedback) {
        out << "feedback " << f.source << " -> " << f.target;
        if (!f.label.empty()) {
            out << " label=" << quoted(f.label);
        }
        out << '\n';
    }
    return out.str();
}

std::string export_dot(const ProcessModel& model) {
    if (auto report = validate(model); !report.well_formed()) {
        throw Error("cannot export ill-formed process '" + model.name + "': " + report.violations.front().message);
    }
    const auto m = canonicalize(model);
    std::ostringstream out;
    out << "digraph " << quoted(m.name) << " {\n";
    out << "  rankdir=LR;\n";
    out << "  compound=true;\n";
    for (auto phase : {Phase::planning, Phase::development, Phase::deployment, Phase::operations}) {
        std::vector<const Element*> members;
        for (const auto& e : m.elements) {
            if (e.phase == phase) {
                members.push_back(&e);
            }
        }
        if (members.empty()) {
            continue;
        }
        auto name = std::string(to_string(phase));
        auto title = name;
        title.front() = static_cast<char>(title.front() - 'a' + 'A');
        out << "  subgraph cluster_" << name << " {\n";
        out << "    label=" << quoted(title) << ";\n";
        for (const auto* e : members) {
            out << "    " << e->id << " [shape=" << (is_activity(e->kind) ? "box" : "ellipse");
            if (e->external) {
                out << ", peripheries=2";
            }
            out << ", label=" << quoted(e->display_name.empty() ? e->id : e->display_name) << "];\n";
        }
        out << "  }\n";
    }
    for (const auto& a : m.associations) {
        out << "  " << a.from << " -> " << a.to << " [dir=both, arrowtail=odot];\n";
    }
    for (const auto& f : m.feedback) {
        out << "  " << f.source << " -> " << f.target << " [style=dashed, constraint=false";
        if (!f.label.empty()) {
            out << ", label=" << quoted(f.label);
        }
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace mlproc
