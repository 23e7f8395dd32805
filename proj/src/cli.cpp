// SPDX-License-Identifier: Apache-2.0
#include "mlproc/cli.hpp"

#include "mlproc/catalog.hpp"
#include "mlproc/conformance.hpp"
#include "mlproc/dsl.hpp"
#include "mlproc/ltl.hpp"
#include "mlproc/search.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace mlproc::cli {

namespace {

/// Error already reported to the diagnostic stream.
struct Reported {};

class Session {
public:
    Session(std::ostream& out, std::ostream& err) : _out(out), _err(err) {}

    [[noreturn]] void fail(const std::string& where, const std::string& message) {
        _err << "mlproc: " << where << ": " << message << '\n';
        throw Reported{};
    }

    [[noreturn]] void fail(const std::string& where, const ParseError& e) {
        _err << "mlproc: " << where << ':' << e.what() << '\n';
        throw Reported{};
    }

    std::string read(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            fail(path, "cannot open file");
        }
        std::ostringstream text;
        text << in.rdbuf();
        if (in.bad()) {
            fail(path, "read error");
        }
        return std::move(text).str();
    }

    void write(const std::string& path, const std::string& contents) {
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file) {
            fail(path, "cannot open file for writing");
        }
        file << contents;
        file.flush();
        if (!file) {
            fail(path, "write error");
        }
    }

    ProcessModel load_model(const std::string& path, bool require_well_formed = true) {
        const auto text = read(path);
        ProcessModel model;
        try {
            model = parse_model(text);
        } catch (const ParseError& e) {
            fail(path, e);
        }
        if (require_well_formed) {
            const auto report = validate(model);
            if (!report.well_formed()) {
                for (const auto& v : report.violations) {
                    _err << "mlproc: " << path << ": " << to_string(v.rule) << ": " << v.message << '\n';
                }
                fail(path, "process '" + model.name + "' is not well formed");
            }
        }
        return model;
    }

    Trace load_trace(const std::string& path, const ProcessGraph& graph) {
        const auto text = read(path);
        Trace trace;
        try {
            trace = parse_trace(text, TimeLabels::lenient);
        } catch (const ParseError& e) {
            fail(path, e);
        }
        try {
            return bind(trace, graph);
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }

    ltl::Formula load_formula(const std::string& where, const std::string& text) {
        try {
            return ltl::parse_formula(text);
        } catch (const ParseError& e) {
            fail(where, e);
        }
    }

    /// Payload to a file, or to the report stream.
    void emit(const std::optional<std::string>& path, const std::string& contents) {
        if (path) {
            write(*path, contents);
            _out << "wrote " << *path << '\n';
        } else {
            _out << contents;
        }
    }

    std::ostream& out() { return _out; }

private:
    std::ostream& _out;
    std::ostream& _err;
};

/// " a,b" or nothing.
std::string join_ids(const std::vector<ElementId>& ids) {
    std::string text;
    for (const auto& id : ids) {
        text += (text.empty() ? " " : ",") + id;
    }
    return text;
}

ExitStatus verdict(std::ostream& out, ExitStatus status, std::string_view word, std::string_view prefix = "") {
    out << prefix << "VERDICT: " << word << '\n';
    return status;
}

struct Options {
    std::string model;
    std::string trace;
    std::optional<std::string> output;
    std::string policy = "eager";
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    std::size_t dwell = 1;
    std::optional<std::string> formula;
    std::optional<std::string> formula_file;
    std::string goal;
    std::size_t depth = 0;
    bool count_only = false;
    bool force = false;
    std::string catalog;
    std::string directory = ".";
};

ExitStatus cmd_validate(Session& s, const Options& o) {
    const auto model = s.load_model(o.model, false);
    const auto report = validate(model);
    auto& out = s.out();
    out << "process " << model.name << ": " << model.elements.size() << " elements, " << model.associations.size()
        << " associations, " << model.feedback.size() << " feedback annotations\n";
    for (const auto& v : report.violations) {
        out << to_string(v.rule) << join_ids(v.elements) << ": " << v.message << '\n';
    }
    for (const auto& w : report.warnings) {
        out << "warning" << join_ids(w.elements) << ": " << w.message << '\n';
    }
    if (!report.well_formed()) {
        out << report.violations.size() << " violation(s)\n";
        return verdict(out, ExitStatus::failure, "ill-formed");
    }
    return verdict(out, ExitStatus::success, "well-formed");
}

ExitStatus cmd_export_dot(Session& s, const Options& o) {
    const auto model = s.load_model(o.model);
    s.emit(o.output, export_dot(model));
    return verdict(s.out(), ExitStatus::success, "exported", o.output ? "" : "// ");
}

ExitStatus cmd_simulate(Session& s, const Options& o) {
    const auto model = s.load_model(o.model);
    SimulationPolicy policy;
    if (o.policy == "eager") {
        if (o.dwell == 0) {
            s.fail("--dwell", "must be at least 1");
        }
        policy = EagerPolicy{o.dwell};
    } else if (o.policy == "random") {
        policy = UniformRandomPolicy{o.seed};
    } else {
        s.fail("--policy", "expected 'eager' or 'random', got '" + o.policy + "'");
    }
    const auto trace = simulate(model, policy, o.steps);
    s.emit(o.output, serialize_trace(trace));
    return verdict(s.out(), ExitStatus::success, "simulated", o.output ? "" : "# ");
}

ExitStatus cmd_check_trace(Session& s, const Options& o) {
    const auto model = s.load_model(o.model);
    const ProcessGraph graph(model);
    const auto trace = s.load_trace(o.trace, graph);
    const auto report = check_trace(graph, trace);
    auto& out = s.out();
    out << "trace of " << trace.length() << " states against process " << model.name << '\n';
    for (const auto& [t, v] : report.violations) {
        out << "t=" << t << ' ' << to_string(v.rule) << join_ids(v.elements) << ": " << v.message << '\n';
    }
    if (!report.conforming()) {
        out << report.violations.size() << " violation(s)\n";
        return verdict(out, ExitStatus::failure, "non-conforming");
    }
    return verdict(out, ExitStatus::success, "conforming");
}

ExitStatus cmd_check_ltl(Session& s, const Options& o) {
    if (o.formula.has_value() == o.formula_file.has_value()) {
        s.fail("check-ltl", "give exactly one of --formula and --formula-file");
    }
    const auto formula = o.formula ? s.load_formula("--formula", *o.formula)
                                   : s.load_formula(*o.formula_file, s.read(*o.formula_file));
    const auto model = s.load_model(o.model);
    const ProcessGraph graph(model);
    const auto trace = s.load_trace(o.trace, graph);
    if (trace.length() == 0) {
        s.fail(o.trace, "empty trace");
    }
    std::vector<bool> sat;
    try {
        sat = ltl::satisfaction(formula, trace);
    } catch (const Error& e) {
        s.fail(o.formula ? "--formula" : *o.formula_file, e.what());
    }
    auto& out = s.out();
    out << "formula " << ltl::to_string(formula) << '\n';
    std::size_t count = 0;
    for (bool b : sat) {
        count += b ? 1 : 0;
    }
    out << "satisfied at " << count << " of " << sat.size() << " positions\n";
    return sat.front() ? verdict(out, ExitStatus::success, "holds") : verdict(out, ExitStatus::failure, "fails");
}

ExitStatus cmd_reach(Session& s, const Options& o) {
    const auto goal = s.load_formula("--goal", o.goal);
    const auto model = s.load_model(o.model);
    ReachStatistics stats;
    std::optional<Trace> witness;
    try {
        witness = reach(model, goal, o.depth, &stats);
    } catch (const Error& e) {
        s.fail("--goal", e.what());
    }
    auto& out = s.out();
    const std::string note = o.output ? "" : "# ";
    out << note << "goal " << ltl::to_string(goal) << " within " << o.depth << " steps\n";
    out << note << "searched " << stats.searched_elements << " of " << model.elements.size() << " elements, expanded "
        << stats.expanded << " states\n";
    if (!witness) {
        out << "no witness\n";
        return verdict(out, ExitStatus::failure, "unreachable");
    }
    out << note << "witness of " << witness->length() - 1 << " steps\n";
    s.emit(o.output, serialize_trace(*witness));
    return verdict(out, ExitStatus::success, "reachable", note);
}

ExitStatus cmd_enumerate(Session& s, const Options& o) {
    const auto model = s.load_model(o.model);
    auto& out = s.out();
    std::uint64_t count = 0;
    try {
        if (o.count_only) {
            count = count_traces(model, o.depth, o.force);
        } else {
            enumerate(
                model, o.depth,
                [&](const Trace& trace) {
                    out << "# trace " << ++count << '\n' << serialize_trace(trace);
                    return true;
                },
                o.force);
        }
    } catch (const Error& e) {
        s.fail(o.model, e.what());
    }
    out << "# " << count << " traces of " << o.depth << " steps\n";
    return verdict(out, ExitStatus::success, "enumerated", "# ");
}

ExitStatus cmd_init_example(Session& s, const Options& o) {
    const auto files = catalog::fixture_files(o.catalog);
    if (files.empty()) {
        s.fail("init-example", "unknown example '" + o.catalog + "' (expected ml_dev or marl)");
    }
    std::error_code ec;
    std::filesystem::create_directories(o.directory, ec);
    if (ec) {
        s.fail(o.directory, ec.message());
    }
    for (const auto& file : files) {
        const auto path = (std::filesystem::path(o.directory) / file.filename).string();
        s.write(path, file.contents);
        s.out() << "wrote " << path << '\n';
    }
    return verdict(s.out(), ExitStatus::success, "written");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Process model checker for ML development life cycles", "mlproc"};
    app.require_subcommand(1);

    auto* validate_cmd = app.add_subcommand("validate", "Check model well-formedness");
    validate_cmd->add_option("model", o.model, "Process model file")->required();

    auto* dot_cmd = app.add_subcommand("export-dot", "Render a model as Graphviz dot");
    dot_cmd->add_option("model", o.model, "Process model file")->required();
    dot_cmd->add_option("-o,--output", o.output, "Output file");

    auto* sim_cmd = app.add_subcommand("simulate", "Generate a conforming trace");
    sim_cmd->add_option("model", o.model, "Process model file")->required();
    sim_cmd->add_option("--policy", o.policy, "eager or random")->capture_default_str();
    sim_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--steps", o.steps, "Number of steps")->required();
    sim_cmd->add_option("--dwell", o.dwell, "Steps an eager element stays active")->capture_default_str();
    sim_cmd->add_option("-o,--output", o.output, "Output trace file");

    auto* trace_cmd = app.add_subcommand("check-trace", "Check a trace for conformance");
    trace_cmd->add_option("model", o.model, "Process model file")->required();
    trace_cmd->add_option("trace", o.trace, "Trace file")->required();

    auto* ltl_cmd = app.add_subcommand("check-ltl", "Evaluate a temporal formula on a trace");
    ltl_cmd->add_option("model", o.model, "Process model file")->required();
    ltl_cmd->add_option("trace", o.trace, "Trace file")->required();
    ltl_cmd->add_option("--formula", o.formula, "Formula text");
    ltl_cmd->add_option("--formula-file", o.formula_file, "File holding the formula");

    auto* reach_cmd = app.add_subcommand("reach", "Search for a shortest trace reaching a state predicate");
    reach_cmd->add_option("model", o.model, "Process model file")->required();
    reach_cmd->add_option("--goal", o.goal, "State predicate")->required();
    reach_cmd->add_option("--depth", o.depth, "Maximum number of steps")->required();
    reach_cmd->add_option("-o,--output", o.output, "Witness trace file");

    auto* enum_cmd = app.add_subcommand("enumerate", "List all conforming traces of a length");
    enum_cmd->add_option("model", o.model, "Process model file")->required();
    enum_cmd->add_option("--depth", o.depth, "Number of steps")->required();
    enum_cmd->add_flag("--count-only", o.count_only, "Print the count only");
    enum_cmd->add_flag("--force", o.force, "Lift the model size limit");

    auto* init_cmd = app.add_subcommand("init-example", "Write an example model and traces");
    init_cmd->add_option("example", o.catalog, "ml_dev or marl")->required();
    init_cmd->add_option("-o,--output-dir", o.directory, "Target directory")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) {
            return 0;
        }
        return static_cast<int>(verdict(out, ExitStatus::error, "error"));
    }

    Session session(out, err);
    try {
        ExitStatus status = ExitStatus::error;
        if (validate_cmd->parsed()) {
            status = cmd_validate(session, o);
        } else if (dot_cmd->parsed()) {
            status = cmd_export_dot(session, o);
        } else if (sim_cmd->parsed()) {
            status = cmd_simulate(session, o);
        } else if (trace_cmd->parsed()) {
            status = cmd_check_trace(session, o);
        } else if (ltl_cmd->parsed()) {
            status = cmd_check_ltl(session, o);
        } else if (reach_cmd->parsed()) {
            status = cmd_reach(session, o);
        } else if (enum_cmd->parsed()) {
            status = cmd_enumerate(session, o);
        } else if (init_cmd->parsed()) {
            status = cmd_init_example(session, o);
        }
        return static_cast<int>(status);
    } catch (const Reported&) {
    } catch (const std::exception& e) {
        err << "mlproc: " << e.what() << '\n';
    }
    return static_cast<int>(verdict(out, ExitStatus::error, "error"));
}

} // namespace mlproc::cli
