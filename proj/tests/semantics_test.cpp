// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <doctest.h>

using namespace mlproc;
using oracle::A;
using oracle::D;
using oracle::I;
using oracle::Rng;

namespace {

bool has_rule(const std::vector<LegalityViolation>& vs, LegalityRule rule, const std::string& element) {
    for (const auto& v : vs) {
        if (v.rule == rule && v.elements.front() == element) {
            return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("state names") {
    CHECK(to_string(ElementState::active) == "active");
    CHECK(state_from_string("done") == ElementState::done);
    CHECK_FALSE(state_from_string("finished").has_value());
    CHECK(to_string(LegalityRule::r1_init) == "R1_INIT");
    CHECK(to_string(LegalityRule::r4_reset) == "R4_RESET");
    CHECK(to_string(LegalityRule::r6_time) == "R6_TIME");
    CHECK(is_backward(D, A));
    CHECK(is_backward(A, I));
    CHECK_FALSE(is_backward(A, D));
    CHECK_FALSE(is_backward(I, D));
}

TEST_CASE("check_step on the chain") {
    const ProcessGraph g(oracle::chain_model()); // act_a act_b art_a art_b
    const InstanceState idle(4);

    CHECK(check_step(g, idle, InstanceState({A, I, I, I})).empty());

    auto vs = check_step(g, idle, InstanceState({I, I, A, I})); // art_a before act_a
    CHECK(has_rule(vs, LegalityRule::r2_act, "art_a"));
    CHECK(has_rule(vs, LegalityRule::r5_inv, "art_a"));

    vs = check_step(g, idle, InstanceState({D, I, I, I}));
    REQUIRE(vs.size() == 1);
    CHECK(vs.front().rule == LegalityRule::r3_done);

    // act_a done -> inactive while art_a stays done
    vs = check_step(g, InstanceState({D, I, D, I}), InstanceState({I, I, D, I}));
    REQUIRE(vs.size() == 1);
    CHECK(vs.front().rule == LegalityRule::r4_reset);
    CHECK(vs.front().elements == std::vector<ElementId>{"act_a", "art_a"});

    // synchronized reset is fine
    CHECK(check_step(g, InstanceState({D, I, D, I}), InstanceState({I, I, I, I})).empty());

    // act_b active loses its support
    vs = check_step(g, InstanceState({D, A, D, I}), InstanceState({D, A, I, I}));
    REQUIRE(vs.size() == 1);
    CHECK(vs.front().rule == LegalityRule::r5_inv);
    CHECK(vs.front().elements.front() == "act_b");

    CHECK_THROWS_AS((void)check_step(g, idle, InstanceState(3)), Error);
}

TEST_CASE("stuttering is always legal from a supported state") {
    Rng rng(21);
    for (int round = 0; round < 200; ++round) {
        const auto m = oracle::random_model(rng, 1 + rng.below(4));
        const ProcessGraph g(m);
        auto s = oracle::random_state(rng, g.size());
        if (!satisfies_support(g, s)) {
            continue;
        }
        CHECK(check_step(g, s, s).empty());
    }
}

TEST_CASE("check_step agrees with the reference on random pairs") {
    Rng rng(8);
    for (int round = 0; round < 2000; ++round) {
        const auto m = oracle::random_model(rng, 1 + rng.below(4), rng.below(2));
        const ProcessGraph g(m);
        const auto ids = oracle::sorted_ids(m);
        const auto s = oracle::random_state(rng, g.size());
        const auto n = oracle::random_state(rng, g.size());
        CHECK(check_step(g, s, n).empty() ==
              oracle::legal_step(m, oracle::to_assignment(ids, s), oracle::to_assignment(ids, n)));
    }
}

TEST_CASE("successors of small examples") {
    {
        const auto m = oracle::two_element_model();
        const ProcessGraph g(m);
        const auto succ = successors(g, initial_state(g));
        CHECK(succ == std::vector<InstanceState>{InstanceState({I, I}), InstanceState({A, I})});
    }
    {
        const ProcessGraph g(oracle::chain_model());
        CHECK(successors(g, initial_state(g)).size() == 2);
    }
}

TEST_CASE("successors equal brute-force filtering in canonical order") {
    Rng rng(2024);
    std::size_t compared = 0;
    for (int round = 0; round < 300; ++round) {
        const auto m = oracle::random_model(rng, 1 + rng.below(2), rng.below(2));
        if (m.elements.size() > 4) {
            continue;
        }
        const ProcessGraph g(m);
        for (const auto& s : oracle::all_states(g.size())) {
            CHECK(successors(g, s) == oracle::brute_successors(m, s));
            ++compared;
        }
    }
    CHECK(compared > 1000);
    const auto chain = oracle::chain_model();
    const ProcessGraph g(chain);
    for (const auto& s : oracle::all_states(4)) {
        CHECK(successors(g, s) == oracle::brute_successors(chain, s));
    }
}

TEST_CASE("generator is lazy and restartable per state") {
    const ProcessGraph g(catalog::ml_dev_process());
    const auto s = initial_state(g);
    SuccessorGenerator gen(g, s);
    const auto first = gen.next();
    REQUIRE(first.has_value());
    CHECK(*first == s); // all-inactive stutter comes first
    std::size_t count = 1;
    while (gen.next()) {
        ++count;
    }
    CHECK(count == successors(g, s).size());
    CHECK_FALSE(gen.next().has_value());
}

TEST_CASE("eager simulation follows topological levels") {
    const auto m = catalog::ml_dev_process();
    const auto trace = simulate(m, EagerPolicy{1}, 20);
    CHECK(trace.length() == 21);
    CHECK(trace.state_of(11, "factory_quality_seal") == I);
    CHECK(trace.state_of(12, "factory_quality_seal") == A);
    CHECK(trace.state_of(13, "factory_quality_seal") == D);
    const auto levels = topo_levels(m);
    for (const auto& [id, level] : levels) {
        const auto l = static_cast<std::size_t>(level);
        if (l <= 20) {
            CHECK(trace.state_of(l - 1, id) == I);
            CHECK(trace.state_of(l, id) == A);
        }
        if (l + 1 <= 20) {
            CHECK(trace.state_of(l + 1, id) == D);
        }
    }
    CHECK(check_trace(m, trace).conforming());
}

TEST_CASE("eager dwell") {
    const auto m = oracle::chain_model();
    const auto trace = simulate(m, EagerPolicy{3}, 10);
    CHECK(trace.state_of(1, "act_a") == A);
    CHECK(trace.state_of(3, "act_a") == A);
    CHECK(trace.state_of(4, "act_a") == D);
    CHECK(trace.state_of(2, "art_a") == A);
    CHECK(check_trace(m, trace).conforming());
}

TEST_CASE("random simulation is deterministic per seed and conforming") {
    const auto m = catalog::ml_dev_process();
    const auto a = simulate(m, UniformRandomPolicy{42}, 40);
    const auto b = simulate(m, UniformRandomPolicy{42}, 40);
    const auto c = simulate(m, UniformRandomPolicy{43}, 40);
    CHECK(serialize_trace(a) == serialize_trace(b));
    CHECK(serialize_trace(a) != serialize_trace(c));
    CHECK(check_trace(m, a).conforming());
    CHECK(check_trace(m, c).conforming());
}

TEST_CASE("scripted simulation and overlays") {
    const auto m = oracle::chain_model();
    const auto ok = simulate(m, ScriptedPolicy{{{{"act_a", A}}, {{"act_a", D}, {"art_a", A}}}}, 3);
    CHECK(ok.state_of(2, "art_a") == A);
    CHECK(ok.state_of(3, "art_a") == A); // missing delta stutters

    try {
        (void)simulate(m, ScriptedPolicy{{{{"act_a", D}}}}, 1);
        FAIL("expected SimulationError");
    } catch (const SimulationError& e) {
        CHECK(e.step() == 1);
        REQUIRE(!e.violations().empty());
        CHECK(e.violations().front().rule == LegalityRule::r3_done);
    }
    CHECK_THROWS_AS((void)simulate(m, ScriptedPolicy{{{{"ghost", A}}}}, 1), Error);

    // an overlay can hold an element back
    FeedbackOverlay hold{{1, {{"act_a", I}}}};
    const auto held = simulate(m, EagerPolicy{1}, 3, hold);
    CHECK(held.state_of(1, "act_a") == I);
    CHECK(held.state_of(2, "act_a") == A);
    CHECK(check_trace(m, held).conforming());

    // and an illegal overlay is reported
    FeedbackOverlay bad{{1, {{"art_a", A}}}};
    CHECK_THROWS_AS((void)simulate(m, EagerPolicy{1}, 3, bad), SimulationError);
}

TEST_CASE("simulate rejects ill-formed models") {
    auto m = oracle::chain_model();
    m.associations.push_back({AssociationKind::require, "art_b", "act_a"});
    CHECK_THROWS_AS((void)simulate(m, EagerPolicy{}, 3), Error);
}
