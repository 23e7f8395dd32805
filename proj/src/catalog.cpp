// SPDX-License-Identifier: Apache-2.0
#include "mlproc/catalog.hpp"

#include "mlproc/dsl.hpp"
#include "mlproc/semantics.hpp"

#include <initializer_list>

namespace mlproc::catalog {

namespace {

using K = ElementKind;
using P = Phase;

class Builder {
public:
    explicit Builder(std::string name) { _model.name = std::move(name); }

    Builder& activity(const char* id, P phase, K kind, const char* lane, const char* title,
                      std::initializer_list<const char*> requires_, std::initializer_list<const char*> produces) {
        _model.elements.push_back({id, kind, phase, lane, false, title});
        for (const auto* r : requires_) {
            _model.associations.push_back({AssociationKind::require, r, id});
        }
        for (const auto* p : produces) {
            _model.associations.push_back({AssociationKind::produce, id, p});
        }
        return *this;
    }

    Builder& artifact(const char* id, P phase, K kind, const char* lane, const char* title, bool external = false) {
        _model.elements.push_back({id, kind, phase, lane, external, title});
        return *this;
    }

    Builder& feedback(const char* source, const char* target, const char* label) {
        _model.feedback.push_back({source, target, label});
        return *this;
    }

    ProcessModel build() { return std::move(_model); }

private:
    ProcessModel _model;
};

constexpr bool kExternal = true;

} // namespace

ProcessModel ml_dev_process() {
    Builder b("ml_dev");
    // planning
    b.activity("use_case_analysis", P::planning, K::human_task, "business", "Use Case Analysis", {},
               {"development_specification"});
    b.artifact("development_specification", P::planning, K::logical_statement, "business",
               "Development Specification");

    // development
    b.activity("data_selection", P::development, K::human_task, "data", "Data Selection",
               {"development_specification"}, {"training_data", "test_data", "validation_data"});
    b.activity("target_definition", P::development, K::human_task, "requirements", "Target Definition",
               {"development_specification"}, {"dev_performance_indicators"});
    b.activity("model_definition", P::development, K::human_task, "ml_model", "ML Model Definition",
               {"training_data", "dev_performance_indicators"}, {"initial_ml_model"});
    b.activity("hyperparameter_selection", P::development, K::human_task, "ml_model", "Hyper-Parameter Selection",
               {"initial_ml_model"}, {"hyper_parameters"});
    b.activity("training", P::development, K::automated_procedure, "ml_model", "Training",
               {"initial_ml_model", "hyper_parameters", "training_data"}, {"trained_ml_model"});
    b.activity("testing", P::development, K::automated_procedure, "verification", "Testing",
               {"trained_ml_model", "dev_performance_indicators", "test_data"}, {"test_verdict"});
    b.activity("validation", P::development, K::human_task, "verification", "Validation",
               {"trained_ml_model", "development_specification", "validation_data"}, {"factory_quality_seal"});
    b.artifact("training_data", P::development, K::data, "data", "Training Data");
    b.artifact("test_data", P::development, K::data, "data", "Test Data");
    b.artifact("validation_data", P::development, K::data, "data", "Validation Data");
    b.artifact("dev_performance_indicators", P::development, K::logical_statement, "requirements",
               "Development Performance Indicators");
    b.artifact("initial_ml_model", P::development, K::functional_description, "ml_model", "Initial ML Model");
    b.artifact("hyper_parameters", P::development, K::logical_statement, "ml_model", "Hyper-Parameters");
    b.artifact("trained_ml_model", P::development, K::functional_description, "ml_model", "Trained ML Model");
    b.artifact("test_verdict", P::development, K::logical_statement, "verification", "Test Verdict");
    b.artifact("factory_quality_seal", P::development, K::logical_statement, "verification", "Factory Quality Seal");

    // deployment
    b.activity("onsite_target_definition", P::deployment, K::human_task, "requirements", "On-Site Target Definition",
               {"on_site_contract", "factory_quality_seal"}, {"onsite_performance_indicators"});
    b.activity("onsite_adaptation", P::deployment, K::automated_procedure, "ml_model", "On-Site Adaptation",
               {"trained_ml_model", "onsite_performance_indicators", "customer_data"}, {"adapted_ml_model"});
    b.activity("onboarding", P::deployment, K::human_task, "verification", "Onboarding",
               {"adapted_ml_model", "on_site_contract", "customer_data"}, {"onsite_quality_seal"});
    b.artifact("on_site_contract", P::deployment, K::logical_statement, "business", "On-Site Contract", kExternal);
    b.artifact("customer_data", P::deployment, K::data, "data", "Customer Data", kExternal);
    b.artifact("onsite_performance_indicators", P::deployment, K::logical_statement, "requirements",
               "On-Site Performance Indicators");
    b.artifact("adapted_ml_model", P::deployment, K::functional_description, "ml_model", "Adapted ML Model");
    b.artifact("onsite_quality_seal", P::deployment, K::logical_statement, "verification", "On-Site Quality Seal");

    // operations
    b.activity("production_target_definition", P::operations, K::human_task, "requirements",
               "Production Target Definition", {"sla", "onsite_quality_seal"}, {"production_performance_indicators"});
    b.activity("monitoring", P::operations, K::automated_procedure, "operations", "Monitoring",
               {"adapted_ml_model", "production_performance_indicators", "production_data"}, {"monitoring_report"});
    b.artifact("sla", P::operations, K::logical_statement, "business", "SLA", kExternal);
    b.artifact("production_data", P::operations, K::data, "data", "Production Data", kExternal);
    b.artifact("production_performance_indicators", P::operations, K::logical_statement, "requirements",
               "Production Performance Indicators");
    b.artifact("monitoring_report", P::operations, K::logical_statement, "operations", "Monitoring Report");

    b.feedback("test_verdict", "model_definition", "revise model architecture");
    b.feedback("test_verdict", "hyperparameter_selection", "re-tune hyper-parameters");
    b.feedback("monitoring_report", "data_selection", "extend data sets");
    return b.build();
}

ProcessModel marl_process() {
    Builder b("marl");
    b.artifact("development_specification", P::planning, K::logical_statement, "business",
               "Development Specification", kExternal);
    b.activity("define_training_target", P::development, K::human_task, "requirements", "Define Training Target",
               {"development_specification"}, {"training_target"});
    b.activity("derive_reward", P::development, K::human_task, "ml_model", "Derive Reward",
               {"training_target"}, {"reward_function"});
    b.activity("configure_environment", P::development, K::human_task, "data", "Configure Environment",
               {"development_specification"}, {"environment_simulation"});
    b.activity("train_agents", P::development, K::automated_procedure, "ml_model", "Train Agents",
               {"reward_function", "environment_simulation"}, {"policy_model"});
    b.activity("evaluate", P::development, K::human_task, "verification", "Evaluate",
               {"policy_model", "training_target"}, {"evaluation_verdict"});
    b.artifact("training_target", P::development, K::logical_statement, "requirements", "Training Target");
    b.artifact("reward_function", P::development, K::functional_description, "ml_model", "Reward Function");
    b.artifact("environment_simulation", P::development, K::functional_description, "data",
               "Environment Simulation");
    b.artifact("policy_model", P::development, K::functional_description, "ml_model", "Policy Model");
    b.artifact("evaluation_verdict", P::development, K::logical_statement, "verification", "Evaluation Verdict");
    b.feedback("evaluation_verdict", "derive_reward", "adjust reward");
    b.feedback("evaluation_verdict", "define_training_target", "adjust training target");
    b.feedback("evaluation_verdict", "configure_environment", "adjust environment difficulty");
    return b.build();
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kHappySteps = 20;
constexpr std::size_t kRetuneSteps = 30;
constexpr std::size_t kRetuneReset = 14;
constexpr std::size_t kMarlSteps = 24;
constexpr std::size_t kMarlReset = 11;

StateDelta all(std::initializer_list<const char*> ids, ElementState state) {
    StateDelta delta;
    for (const auto* id : ids) {
        delta.emplace_back(id, state);
    }
    return delta;
}

/// Eager run where validation waits for the train-test loop: after the first
/// test verdict the loop re-opens hyper-parameters, training and testing in
/// one synchronized step.
Trace retune_trace(const ProcessModel& model) {
    FeedbackOverlay overlay;
    for (std::size_t t = 11; t <= kRetuneReset; ++t) {
        overlay[t] = all({"validation"}, ElementState::inactive);
    }
    auto& reset = overlay[kRetuneReset];
    auto more = all({"hyper_parameters", "training", "trained_ml_model", "testing", "test_verdict"},
                    ElementState::inactive);
    reset.insert(reset.end(), more.begin(), more.end());
    return simulate(model, EagerPolicy{1}, kRetuneSteps, overlay);
}

Trace marl_reward_loop(const ProcessModel& model) {
    FeedbackOverlay overlay;
    overlay[kMarlReset] = all({"derive_reward"}, ElementState::active);
    auto more = all({"reward_function", "train_agents", "policy_model", "evaluate", "evaluation_verdict"},
                    ElementState::inactive);
    overlay[kMarlReset].insert(overlay[kMarlReset].end(), more.begin(), more.end());
    return simulate(model, EagerPolicy{1}, kMarlSteps, overlay);
}

void set_from(Trace& trace, std::size_t first, std::size_t last, std::string_view id, ElementState state) {
    const auto index = *trace.index_of(id);
    for (std::size_t t = first; t <= last && t < trace.length(); ++t) {
        trace.states[t][index] = state;
    }
}

} // namespace

std::vector<TraceFixture> example_traces() {
    const auto ml = ml_dev_process();
    const auto happy = simulate(ml, EagerPolicy{1}, kHappySteps);
    const auto retune = retune_trace(ml);
    const auto last = happy.length() - 1;

    std::vector<TraceFixture> out;
    out.push_back({"happy_path", "eager execution of ml_dev, every element one step active", happy, {}, 0});
    out.push_back({"feedback_retune", "train-test loop re-opened after the first test verdict", retune, {}, 0});

    auto r1 = happy;
    set_from(r1, 0, 0, "use_case_analysis", ElementState::active);
    out.push_back({"mutant_r1", "use_case_analysis already active at t=0", r1, LegalityRule::r1_init, 0});

    auto r2 = happy;
    set_from(r2, 8, 8, "training", ElementState::active);
    out.push_back({"mutant_r2", "training starts while hyper_parameters was still inactive", r2,
                   LegalityRule::r2_act, 8});

    auto r3 = happy;
    set_from(r3, 2, 2, "development_specification", ElementState::done);
    out.push_back({"mutant_r3", "development_specification done without being active", r3,
                   LegalityRule::r3_done, 2});

    auto r4 = happy;
    set_from(r4, 14, last, "hyper_parameters", ElementState::inactive);
    out.push_back({"mutant_r4", "hyper_parameters reset while training stays done", r4, LegalityRule::r4_reset, 14});

    auto r5 = happy;
    set_from(r5, 9, last, "hyper_parameters", ElementState::inactive);
    out.push_back({"mutant_r5", "hyper_parameters withdrawn while training is active", r5, LegalityRule::r5_inv, 9});

    auto r6 = happy;
    for (std::size_t t = 5; t < r6.times.size(); ++t) {
        r6.times[t] = t + 1;
    }
    out.push_back({"mutant_r6", "time label 5 is skipped", r6, LegalityRule::r6_time, 5});

    auto stale = retune;
    set_from(stale, kRetuneReset, kRetuneReset + 2, "trained_ml_model", ElementState::done);
    out.push_back({"mutant_retune_stale", "feedback_retune with trained_ml_model left done during the reset", stale,
                   LegalityRule::r4_reset, kRetuneReset});

    const auto marl = marl_process();
    out.push_back({"marl_happy_path", "eager execution of marl", simulate(marl, EagerPolicy{1}, kMarlSteps), {}, 0});
    out.push_back({"marl_reward_loop", "reward re-derived after the first evaluation verdict",
                   marl_reward_loop(marl), {}, 0});
    return out;
}

std::vector<FixtureFile> fixture_files(std::string_view catalog) {
    std::vector<FixtureFile> out;
    const bool ml = catalog == "ml_dev";
    if (!ml && catalog != "marl") {
        return out;
    }
    out.push_back({std::string(catalog) + ".proc", print_model(ml ? ml_dev_process() : marl_process())});
    for (const auto& fixture : example_traces()) {
        if ((fixture.trace.model_name == "ml_dev") == ml) {
            out.push_back({fixture.name + ".trace", serialize_trace(fixture.trace)});
        }
    }
    return out;
}

} // namespace mlproc::catalog
