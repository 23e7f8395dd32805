// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace mlproc;
using oracle::Rng;

namespace {

ParseError parse_error(std::string_view text) {
    try {
        (void)parse_model(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected ParseError for: " << text);
    return ParseError({}, "");
}

std::size_t count_lines_with(const std::string& text, std::string_view needle) {
    std::istringstream in(text);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) {
        n += line.find(needle) != std::string::npos ? 1 : 0;
    }
    return n;
}

constexpr const char* kSmall = R"(# a tiny process
process demo

activity collect phase=planning kind=human lane="ops" name="Collect \"raw\" data"
artifact raw phase=planning kind=data
artifact contract phase=planning kind=logical external
activity train phase=development kind=automated
artifact model phase=development kind=functional

produce collect -> raw
require raw -> train     # trailing comment
require contract -> train
produce train -> model
feedback model -> collect label="more data"
)";

} // namespace

TEST_CASE("parse a small model") {
    const auto m = parse_model(kSmall);
    CHECK(m.name == "demo");
    CHECK(m.elements.size() == 5);
    CHECK(m.associations.size() == 4);
    REQUIRE(m.feedback.size() == 1);
    CHECK(m.feedback.front().label == "more data");
    const auto* collect = m.find("collect");
    REQUIRE(collect != nullptr);
    CHECK(collect->display_name == "Collect \"raw\" data");
    CHECK(collect->lane == "ops");
    CHECK(m.find("contract")->external);
    CHECK(m.find("train")->kind == ElementKind::automated_procedure);
    CHECK(m.find("model")->kind == ElementKind::functional_description);
    CHECK(validate(m).well_formed());
}

TEST_CASE("canonical printing") {
    const auto m = parse_model(kSmall);
    const auto text = print_model(m);
    CHECK(text == "process demo\n"
                  "\n"
                  "activity collect phase=planning kind=human lane=\"ops\" name=\"Collect \\\"raw\\\" data\"\n"
                  "activity train phase=development kind=automated\n"
                  "artifact contract phase=planning kind=logical external\n"
                  "artifact model phase=development kind=functional\n"
                  "artifact raw phase=planning kind=data\n"
                  "\n"
                  "produce collect -> raw\n"
                  "produce train -> model\n"
                  "require contract -> train\n"
                  "require raw -> train\n"
                  "feedback model -> collect label=\"more data\"\n");
    CHECK(print_model(parse_model(text)) == text);
    CHECK(print_model(ProcessModel{"empty", {}, {}, {}}) == "process empty\n");
}

TEST_CASE("misspelled keyword is located") {
    const auto e = parse_error("process p\n\nartefact raw phase=planning kind=data\n");
    CHECK(e.span().line == 3);
    CHECK(e.span().column_begin == 1);
    CHECK(std::string(e.what()).rfind("3:1:", 0) == 0);
}

TEST_CASE("syntax diagnostics") {
    CHECK(parse_error("").span().line == 1);
    CHECK(parse_error("activity a phase=planning kind=human\n").span().line == 1);
    CHECK(parse_error("process p\nprocess q\n").span().line == 2);
    CHECK(parse_error("process p\nactivity a phase=planning\n").span().line == 2);
    CHECK(parse_error("process p\nactivity a kind=human\n").span().line == 2);
    CHECK(parse_error("process p\nactivity a phase=later kind=human\n").span().column_begin == 12);
    CHECK(parse_error("process p\nactivity a phase=planning kind=data\n").span().line == 2);
    CHECK(parse_error("process p\nartifact a phase=planning kind=human\n").span().line == 2);
    CHECK(parse_error("process p\nactivity a phase=planning kind=human external\n").span().line == 2);
    CHECK(parse_error("process p\nactivity a phase=planning kind=human name=\"open\n").span().line == 2);
    CHECK(parse_error("process p\nactivity a phase=planning kind=human color=red\n").span().line == 2);
    CHECK(parse_error("process p\nactivity a phase=planning kind=human phase=planning\n").span().line == 2);
    CHECK(parse_error("process p\nactivity a phase=planning kind=human\nactivity a phase=planning kind=human\n")
              .span()
              .line == 3);
    CHECK(parse_error("process p\nproduce a b\n").span().line == 2);
    CHECK(parse_error("process p\nproduce a -> b -> c\n").span().line == 2);
    CHECK(parse_error("process p\nfeedback a -> b note=\"x\"\n").span().line == 2);
    CHECK(parse_error("process p\nactivity Bad phase=planning kind=human\n").span().column_begin == 10);
}

TEST_CASE("diagnostic spans lie inside the input") {
    const std::vector<std::string> broken = {
        "process p\nartefact x\n",
        "process p\nactivity a phase=planning kind=\n",
        "process p\nactivity a phase=planning kind=human lane=\"x\n",
        "process p\nrequire -> b\n",
        "process\n",
        "process p q\n",
    };
    for (const auto& text : broken) {
        const auto e = parse_error(text);
        std::vector<std::string> lines;
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);) {
            lines.push_back(line);
        }
        REQUIRE(e.span().line >= 1);
        REQUIRE(e.span().line <= lines.size());
        CHECK(e.span().column_begin >= 1);
        CHECK(e.span().column_begin <= lines[e.span().line - 1].size() + 1);
        CHECK(e.span().column_end >= e.span().column_begin);
    }
}

TEST_CASE("parser does not validate") {
    const auto m = parse_model("process p\nactivity idle phase=planning kind=human\n");
    const auto report = validate(m);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations.front().rule == WellFormednessRule::w3_no_product);
    const auto dangling = parse_model("process p\nrequire ghost -> nobody\n");
    CHECK(validate(dangling).has(WellFormednessRule::w7_unknown_id));
}

TEST_CASE("print/parse round trip on generated models") {
    Rng rng(17);
    for (int round = 0; round < 300; ++round) {
        const auto m = oracle::random_model(rng, rng.below(6), rng.below(3), true);
        const auto text = print_model(m);
        const auto back = parse_model(text);
        CHECK(back == m);
        CHECK(print_model(back) == text);
        CHECK(print_model(canonicalize(m)) == text);
    }
}

TEST_CASE("catalog round trip") {
    for (const auto& m : {catalog::ml_dev_process(), catalog::marl_process()}) {
        const auto text = print_model(m);
        CHECK(parse_model(text) == m);
        CHECK(print_model(parse_model(text)) == text);
    }
}

TEST_CASE("dot export") {
    const auto m = catalog::ml_dev_process();
    const auto dot = export_dot(m);
    CHECK(dot.rfind("digraph \"ml_dev\" {\n", 0) == 0);
    CHECK(count_lines_with(dot, "subgraph cluster_") == 4);
    const auto planning = dot.find("cluster_planning");
    const auto development = dot.find("cluster_development");
    const auto deployment = dot.find("cluster_deployment");
    const auto operations = dot.find("cluster_operations");
    CHECK(planning < development);
    CHECK(development < deployment);
    CHECK(deployment < operations);
    CHECK(count_lines_with(dot, " -> ") == m.associations.size() + m.feedback.size());
    CHECK(count_lines_with(dot, "style=dashed") == m.feedback.size());
    for (const auto& a : m.associations) {
        CHECK(count_lines_with(dot, "  " + a.from + " -> " + a.to + " [dir=both") == 1);
    }
    CHECK(count_lines_with(dot, "peripheries=2") == 4);
    CHECK(count_lines_with(dot, "shape=box") == 13);
    CHECK(count_lines_with(dot, "shape=ellipse") == 19);
    CHECK(dot.find("label=\"re-tune hyper-parameters\"") != std::string::npos);
    CHECK(export_dot(m) == dot);

    const auto marl = export_dot(catalog::marl_process());
    CHECK(count_lines_with(marl, "subgraph cluster_") == 2);

    auto bad = m;
    bad.associations.push_back({AssociationKind::require, "monitoring_report", "use_case_analysis"});
    CHECK_THROWS_AS((void)export_dot(bad), Error);
}
