// Acceptance checks for the orchestration engine. Each criterion prints one
// PASS/FAIL line and the binary exits nonzero when any criterion fails.
//
//   1. Scoring oracle: the 175-row results fixture reproduces the reference
//      aggregates (S_ckpt 59.92%, avg_S_partial 51.78%, PCR 41.14%) in < 1 s.
//   2. Continual learning at desk scale: with persistent memory, iterations 2
//      and 3 spend strictly fewer actions than iteration 1 and the final
//      checkpoint fraction beats the no-memory baseline by >= 10 points,
//      deterministically, in < 30 s.
//   3. Loop state machine: across randomized scripted runs, attempts per
//      sub-task stay <= 2 with at most one retry, trajectories respect the
//      action budget, retry prompts swap the memory encouragement for the
//      failure report, failed retries are followed by a replan record, success
//      verdicts are followed by exactly one stored procedure, and every run
//      terminates under the caps even on adversarial fixture output.
//   4. Memory store properties: load/save identity and byte-deterministic
//      serialization over >= 1000 randomized stores, query round-trips, no
//      guide step bodies in the startup context, and consolidation that is a
//      no-change fixpoint, cap-respecting, and atomic under gateway failure.
//   5. Memory transfer: a store produced under one scripted backend set, when
//      reloaded for another, answers guide queries and renders startup context
//      identically, and the second engine actually exploits the transferred
//      guide.
//   6. Replay determinism: replaying any logged scripted run reproduces the
//      trajectory, result, and memory artifacts byte for byte.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "helpers.hpp"
#include "playbook/config.hpp"
#include "playbook/executor.hpp"
#include "playbook/harness.hpp"
#include "playbook/memory.hpp"
#include "playbook/text.hpp"

using namespace playbook;

namespace {

struct CheckFailure {
    std::string message;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw CheckFailure{message};
}

std::string fmt_id(int n) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "st-%03d", n);
    return buf;
}

EngineConfig scripted_config(const fs::path& fixture_dir) {
    EngineConfig config;
    BackendSpec spec;
    spec.kind = "scripted";
    spec.fixture_dir = fixture_dir.string();
    config.backends["default"] = spec;
    return config;
}

std::vector<TaskSpec> load_cl_tasks() {
    std::vector<TaskSpec> tasks;
    for (int i = 1; i <= 5; ++i) {
        tasks.push_back(load_task_spec(testutil::fixture_dir() / "cl" / "tasks" /
                                       ("cl-result-0" + std::to_string(i) + ".json")));
    }
    return tasks;
}

// --- criterion 1: scoring oracle -------------------------------------------------

void criterion_scoring_oracle() {
    const Json doc = Json::parse(
        testutil::read_file(testutil::fixture_dir() / "scoring" / "results_175.json"));
    std::vector<TaskResult> results;
    long long completed = 0;
    long long total = 0;
    int perfect = 0;
    for (const Json& row : doc.at("results")) {
        TaskResult r;
        r.task_id = row.at("task_id").get<std::string>();
        r.completed_ckpt = row.at("completed_ckpt").get<int>();
        r.total_ckpt = row.at("total_ckpt").get<int>();
        r.s_full = row.at("s_full").get<int>();
        r.s_partial = score_partial(r.completed_ckpt, r.total_ckpt, r.s_full);
        const double reported = row.at("reported_s_partial_pct").get<double>();
        require(std::abs(r.s_partial * 100.0 - reported) <= 0.005 + 1e-9,
                "task " + r.task_id + ": partial score " +
                    std::to_string(r.s_partial * 100.0) + " differs from reported " +
                    std::to_string(reported));
        completed += r.completed_ckpt;
        total += r.total_ckpt;
        perfect += r.s_full;
        results.push_back(std::move(r));
    }
    require(results.size() == 175, "expected 175 rows, got " + std::to_string(results.size()));
    require(completed == 465 && total == 776,
            "checkpoint totals " + std::to_string(completed) + "/" + std::to_string(total) +
                " != 465/776");
    require(perfect == 72, "perfect completions " + std::to_string(perfect) + " != 72");

    const Scores scores = score_aggregate(results);
    require(std::abs(scores.s_ckpt * 100.0 - 59.92) <= 0.05,
            "S_ckpt " + std::to_string(scores.s_ckpt * 100.0) + " != 59.92 +- 0.05");
    require(std::abs(scores.avg_s_partial * 100.0 - 51.78) <= 0.05,
            "avg_S_partial " + std::to_string(scores.avg_s_partial * 100.0) +
                " != 51.78 +- 0.05");
    require(std::abs(scores.pcr * 100.0 - 41.14) <= 0.05,
            "PCR " + std::to_string(scores.pcr * 100.0) + " != 41.14 +- 0.05");
}

// --- criterion 2: continual-learning trend ----------------------------------------

void criterion_continual_learning() {
    const std::vector<TaskSpec> tasks = load_cl_tasks();
    const EngineConfig config = scripted_config(testutil::fixture_dir() / "cl" / "backends");
    testutil::TempDir tmp("acceptance-cl");

    const auto series =
        run_iterations(tasks, 3, tmp.path() / "m1.json", config, tmp.path() / "runs1", true);
    require(series.size() == 3, "expected 3 iterations");
    require(series[1].total_actions < series[0].total_actions,
            "iteration 2 actions " + std::to_string(series[1].total_actions) +
                " not below iteration 1 actions " + std::to_string(series[0].total_actions));
    require(series[2].total_actions < series[0].total_actions,
            "iteration 3 actions " + std::to_string(series[2].total_actions) +
                " not below iteration 1 actions " + std::to_string(series[0].total_actions));

    const auto baseline = run_iterations(tasks, 1, "", config, "", false);
    require(baseline.size() == 1, "expected 1 baseline iteration");
    const double gain = series[2].scores.s_ckpt - baseline[0].scores.s_ckpt;
    require(gain >= 0.10 - 1e-12,
            "iteration-3 checkpoint fraction beats the baseline by only " +
                std::to_string(gain * 100.0) + " points");

    // The whole trend is deterministic: a second run from scratch reproduces
    // every statistic exactly.
    const auto repeat =
        run_iterations(tasks, 3, tmp.path() / "m2.json", config, tmp.path() / "runs2", true);
    require(repeat.size() == series.size(), "repeat run produced a different shape");
    for (std::size_t i = 0; i < series.size(); ++i) {
        require(repeat[i].to_json().dump() == series[i].to_json().dump(),
                "iteration " + std::to_string(i + 1) + " statistics differ between runs");
    }
}

// --- criterion 3: loop state machine ----------------------------------------------

struct ScenarioBackendSet {
    ScriptedBackend planner;
    ScriptedBackend executor;
    ScriptedBackend reflector;

    ScenarioBackendSet(ScriptedFixture p, ScriptedFixture e, ScriptedFixture r)
        : planner(std::move(p), "planner"),
          executor(std::move(e), "executor"),
          reflector(std::move(r), "reflector") {}
};

TaskSpec scenario_task(int scenario) {
    TaskSpec spec;
    spec.id = "rand-" + std::to_string(scenario);
    spec.description = "Randomized loop scenario " + std::to_string(scenario);
    spec.initial_state = Json{{"cwd", "/work"}, {"dirs", Json::array({"/work"})}};
    spec.checkpoints.push_back(
        {"touched", Json{{"kind", "file_exists"}, {"path", "/work/f-1-1-1.txt"}}});
    return spec;
}

std::string action_turn(const std::string& command) {
    return "Thought: take the next step\n" +
           testutil::fenced(Json{{"tool", "run_cmd"},
                                 {"arguments", Json{{"command", command}}}});
}

std::string done_turn(const std::string& summary) {
    return "Thought: finished\n" +
           testutil::fenced(Json{{"done", true}, {"summary", summary}});
}

Json checklist_reply() {
    return Json{{"items", Json::array({Json{{"dimension", "deliverable"},
                                            {"description", "the scripted commands ran"},
                                            {"method", "trajectory_reference"}}})}};
}

Json verdict_reply(bool success, const std::string& cause) {
    Json verdict{{"flag", success ? "success" : "failure"},
                 {"items", Json::array({Json{{"item", 1},
                                             {"passed", success},
                                             {"evidence", Json{{"step", 1}}},
                                             {"note", success ? "ok" : "bad"}}})}};
    if (!success) {
        verdict["failure"] = Json{{"causes", Json::array({cause})},
                                  {"remediations", Json::array({"try a different command"})},
                                  {"evidence_steps", Json::array({1})}};
    }
    return verdict;
}

Json sop_reply(int subtask) {
    return Json{{"application", "App" + std::to_string(subtask)},
                {"function", "Fn" + std::to_string(subtask)},
                {"summary", "scripted procedure"},
                {"steps", Json::array({Json{{"text", "Run: echo into the target file"},
                                            {"evidence", Json::array({1})}}})}};
}

// Verifies the loop invariants over one finished run.
void check_loop_invariants(const RunLog& log, const testutil::RecordingBackend& executor_log,
                           int budget, bool causes_are_scripted, const std::string& label) {
    std::map<std::string, int> starts;
    std::map<std::string, int> retries;
    std::vector<std::string> failures_awaiting_replan;
    int pending_sop = 0;

    for (const auto& r : log.records()) {
        const std::string type = r.at("type").get<std::string>();
        if (type == "subtask_start") {
            const std::string sub = r.at("subtask").get<std::string>();
            const int attempt = r.at("attempt").get<int>();
            require(attempt >= 1 && attempt <= 2,
                    label + ": attempt " + std::to_string(attempt) + " out of range");
            if (++starts[sub] > 2) {
                throw CheckFailure{label + ": sub-task " + sub + " started a third time"};
            }
            if (r.at("mode") == "retry" && ++retries[sub] > 1) {
                throw CheckFailure{label + ": sub-task " + sub + " retried twice"};
            }
        } else if (type == "step") {
            const int index = r.at("index").get<int>();
            require(index >= 1 && index <= budget,
                    label + ": step index " + std::to_string(index) + " exceeds budget " +
                        std::to_string(budget));
        } else if (type == "verdict") {
            require(pending_sop == 0,
                    label + ": success verdict was not followed by exactly one stored sop");
            const Json& verdict = r.at("verdict");
            const bool success = verdict.at("flag") == "success";
            if (success) {
                pending_sop = 1;
            } else {
                const bool concluded =
                    r.at("attempt").get<int>() == 2 || !verdict.at("retry_granted").get<bool>();
                if (concluded) {
                    failures_awaiting_replan.push_back(r.at("subtask").get<std::string>());
                }
            }
        } else if (type == "sop_added") {
            require(pending_sop == 1, label + ": sop stored without a success verdict");
            pending_sop = 0;
        } else if (type == "sop_dropped") {
            require(pending_sop == 1, label + ": sop dropped without a success verdict");
            pending_sop = 0;
        } else if (type == "replan" && r.value("trigger", "") == "subtask_concluded") {
            const std::string sub = r.at("subtask").get<std::string>();
            auto it = std::find(failures_awaiting_replan.begin(),
                                failures_awaiting_replan.end(), sub);
            if (it != failures_awaiting_replan.end()) failures_awaiting_replan.erase(it);
        }
    }
    require(failures_awaiting_replan.empty(),
            label + ": a concluded failure was never followed by a replan record");
    require(pending_sop == 0, label + ": the final success verdict stored no sop");

    // Prompt rule: normal-mode requests carry the memory encouragement, retry
    // requests carry the failure report instead — never both, never neither.
    for (std::size_t i = 0; i < executor_log.requests().size(); ++i) {
        std::string text;
        for (const auto& msg : executor_log.requests()[i]) text += msg.content + "\n";
        const bool retry = contains(text, kRetryFramingHeader);
        const bool encouraged = contains(text, kMemoryEncouragement);
        require(retry != encouraged,
                label + ": executor request " + std::to_string(i) +
                    " must carry exactly one of the retry framing and the memory encouragement");
        if (retry && causes_are_scripted) {
            require(contains(text, "CAUSE-"),
                    label + ": retry request " + std::to_string(i) +
                        " does not include the prior failure report");
        }
    }
}

void run_structured_scenario(std::mt19937& rng, int scenario) {
    const int num_subtasks = 1 + static_cast<int>(rng() % 3);
    const int budget = 3 + static_cast<int>(rng() % 4);

    struct SubPlan {
        int pattern;  // 0 success, 1 fail->success, 2 fail->fail
        int actions1;
        int actions2;
        bool junk_first;
    };
    std::vector<SubPlan> plans;
    for (int i = 0; i < num_subtasks; ++i) {
        SubPlan p;
        const int roll = static_cast<int>(rng() % 4);
        p.pattern = roll <= 1 ? 0 : (roll == 2 ? 1 : 2);
        p.actions1 = 1 + static_cast<int>(rng() % 2);
        p.actions2 = 1 + static_cast<int>(rng() % 2);
        p.junk_first = rng() % 3 == 0;
        plans.push_back(p);
    }

    testutil::StepList planner_steps;
    Json initial = Json::array();
    for (int i = 1; i <= num_subtasks; ++i) {
        initial.push_back(Json{{"desc", "scripted objective " + std::to_string(i)},
                               {"goal", "goal " + std::to_string(i)}});
    }
    planner_steps.push_back({"", testutil::fenced(Json{{"plan", initial}})});
    for (int i = 1; i <= num_subtasks; ++i) {
        Json keep = Json::array();
        for (int j = i + 1; j <= num_subtasks; ++j) keep.push_back(Json{{"id", fmt_id(j)}});
        planner_steps.push_back({"", testutil::fenced(Json{{"plan", keep}})});
    }
    planner_steps.push_back({"", testutil::fenced(Json{{"overall_complete", true}})});

    testutil::StepList executor_steps;
    testutil::StepList reflector_steps;
    auto add_attempt = [&](int sub, int attempt, int actions, bool junk, bool success) {
        if (junk) executor_steps.push_back({"", "~~~ not a protocol reply ~~~"});
        for (int a = 1; a <= actions; ++a) {
            executor_steps.push_back(
                {"", action_turn("echo x > /work/f-" + std::to_string(sub) + "-" +
                                 std::to_string(attempt) + "-" + std::to_string(a) + ".txt")});
        }
        executor_steps.push_back({"", done_turn("attempt finished")});
        reflector_steps.push_back({"", testutil::fenced(checklist_reply())});
        const std::string cause = "CAUSE-" + std::to_string(sub) + "-a" +
                                  std::to_string(attempt);
        reflector_steps.push_back({"", testutil::fenced(verdict_reply(success, cause))});
        if (success) reflector_steps.push_back({"", testutil::fenced(sop_reply(sub))});
    };
    for (int i = 0; i < num_subtasks; ++i) {
        const SubPlan& p = plans[i];
        add_attempt(i + 1, 1, p.actions1, p.junk_first, p.pattern == 0);
        if (p.pattern != 0) add_attempt(i + 1, 2, p.actions2, false, p.pattern == 1);
    }
    reflector_steps.push_back(
        {"", testutil::fenced(Json{{"strategic", Json::array()}, {"tools", Json::array()}})});
    reflector_steps.push_back({"", testutil::fenced(Json::object())});  // merge plan

    ScenarioBackendSet set(testutil::make_fixture(planner_steps, /*strict=*/false),
                           testutil::make_fixture(executor_steps, /*strict=*/false),
                           testutil::make_fixture(reflector_steps, /*strict=*/false));
    testutil::RecordingBackend executor_log(set.executor);
    RoleBackends roles;
    roles.planner = &set.planner;
    roles.executor = &executor_log;
    roles.reflector = &set.reflector;

    EngineConfig config;
    config.action_budget = budget;
    MemoryStore store;
    RunLog log;
    const TaskResult result =
        run_task(scenario_task(scenario), store, config, roles, log);
    const std::string label = "scenario " + std::to_string(scenario);
    require(result.status == "completed", label + ": expected completion, got " + result.status);
    check_loop_invariants(log, executor_log, budget, /*causes_are_scripted=*/true, label);
}

void run_adversarial_scenario(int scenario, bool planner_sane) {
    testutil::StepList junk{{"", "%%% scripted junk %%%"}};
    testutil::StepList planner_steps = junk;
    if (planner_sane) {
        planner_steps = {
            {"", testutil::fenced(Json{
                     {"plan", Json::array({Json{{"desc", "only objective"},
                                                {"goal", "something verifiable"}}})}})},
            {"", testutil::fenced(Json{{"plan", Json::array()}})},
        };
    }
    ScenarioBackendSet set(testutil::make_fixture(planner_steps, /*strict=*/false),
                           testutil::make_fixture(junk, /*strict=*/false),
                           testutil::make_fixture(junk, /*strict=*/false));
    testutil::RecordingBackend executor_log(set.executor);
    RoleBackends roles;
    roles.planner = &set.planner;
    roles.executor = &executor_log;
    roles.reflector = &set.reflector;

    EngineConfig config;
    config.action_budget = 4;
    MemoryStore store;
    RunLog log;
    const TaskResult result =
        run_task(scenario_task(1000 + scenario), store, config, roles, log);
    const std::string label = "adversarial " + std::to_string(scenario);
    // The run must conclude with a reported engine status, never hang or throw.
    require(!result.status.empty(), label + ": empty status");
    check_loop_invariants(log, executor_log, 4, /*causes_are_scripted=*/false, label);
}

void criterion_loop_state_machine() {
    std::mt19937 rng(20260814u);
    for (int scenario = 1; scenario <= 30; ++scenario) {
        run_structured_scenario(rng, scenario);
    }
    for (int scenario = 1; scenario <= 10; ++scenario) {
        run_adversarial_scenario(scenario, /*planner_sane=*/scenario % 2 == 0);
    }
}

// --- criterion 4: memory store properties ------------------------------------------

std::string rand_word(std::mt19937& rng) {
    static const char* kWords[] = {"upload", "retry", "page",  "index", "form",
                                   "queue",  "cache", "token", "panel", "draft"};
    return std::string(kWords[rng() % 10]) + std::to_string(rng() % 100);
}

MemoryStore random_store(std::mt19937& rng) {
    MemoryStore store;
    const int n_strat = static_cast<int>(rng() % 6);
    for (int i = 0; i < n_strat; ++i) {
        StrategicEntry entry;
        entry.dilemma = "when " + rand_word(rng) + " " + std::to_string(i);
        entry.strategy = "prefer " + rand_word(rng);
        entry.provenance = {"task-" + std::to_string(rng() % 20)};
        store.upsert_strategic(entry);
        if (rng() % 4 == 0) {
            entry.strategy = "instead " + rand_word(rng);
            store.upsert_strategic(entry);  // same dilemma: revision bump path
        }
    }
    const int n_sop = static_cast<int>(rng() % 5);
    for (int i = 0; i < n_sop; ++i) {
        SopIndexEntry index;
        index.application = "App-" + rand_word(rng);
        index.function = "Fn-" + std::to_string(i);
        index.summary = "does " + rand_word(rng);
        SopContent content;
        content.steps = {"STEPBODY-" + rand_word(rng), "STEPBODY-" + rand_word(rng)};
        content.parameters = {"target"};
        content.provenance = {"task-" + std::to_string(rng() % 20)};
        store.add_sop(index, content);
        if (rng() % 3 == 0) {
            content.steps = {"STEPBODY-" + rand_word(rng)};
            store.add_sop(index, content);  // same key: new content revision
        }
    }
    const int n_tool = static_cast<int>(rng() % 4);
    static const char* kTools[] = {"run_cmd", "file_write", "browser_click", "access_guide"};
    for (int i = 0; i < n_tool; ++i) {
        ToolMemoryEntry entry;
        entry.tool = kTools[rng() % 4];
        entry.static_description = "static " + rand_word(rng);
        entry.dynamic_instruction = "dynamic " + rand_word(rng);
        store.set_tool_memory(entry);
    }
    return store;
}

void criterion_memory_properties() {
    std::mt19937 rng(97531u);
    for (int round = 0; round < 1000; ++round) {
        MemoryStore store = random_store(rng);
        const std::string bytes = serialize_memory(store);
        MemoryStore reparsed = parse_memory(bytes);
        require(serialize_memory(reparsed) == bytes,
                "round " + std::to_string(round) + ": save/load/save is not byte-identical");

        const StartupContext startup = reparsed.render_startup_context();
        for (const std::string* text :
             {&startup.strategic_text, &startup.sop_index_text, &startup.tool_static_text}) {
            require(!contains(*text, "STEPBODY-"),
                    "round " + std::to_string(round) +
                        ": startup context leaked a guide step body");
        }

        if (!store.sop_index().empty()) {
            const SopIndexEntry& first = store.sop_index().front();
            const GuideResult hit =
                reparsed.query_sops({{first.application, {first.function}}});
            require(hit.found.size() == 1 && hit.missing.empty(),
                    "round " + std::to_string(round) + ": stored guide not found");
            require(hit.found[0].sop_id == first.sop_id,
                    "round " + std::to_string(round) + ": query returned the wrong guide");
            const GuideResult miss =
                reparsed.query_sops({{first.application, {"Fn-absent"}}});
            require(miss.found.empty() && miss.missing.size() == 1,
                    "round " + std::to_string(round) + ": absent guide not reported missing");
        }
    }

    for (int round = 0; round < 20; ++round) {
        MemoryStore store = random_store(rng);
        const std::string before = serialize_memory(store);

        auto noop = testutil::make_scripted({{"Produce a merge plan",
                                              testutil::fenced(Json::object())}},
                                            /*strict=*/false);
        const ConsolidationReport report = consolidate(store, noop, 12);
        require(report.error.empty() && !report.changed,
                "consolidation round " + std::to_string(round) + ": no-change plan reported " +
                    (report.error.empty() ? "a change" : report.error));
        require(serialize_memory(store) == before,
                "consolidation round " + std::to_string(round) + ": fixpoint violated");

        testutil::ThrowingBackend broken;
        const ConsolidationReport failed = consolidate(store, broken, 12);
        require(!failed.error.empty() && serialize_memory(store) == before,
                "consolidation round " + std::to_string(round) +
                    ": gateway failure was not rolled back atomically");
    }

    for (int round = 0; round < 50; ++round) {
        MemoryStore store;
        const int entries = 5 + static_cast<int>(rng() % 6);
        for (int i = 0; i < entries; ++i) {
            StrategicEntry entry;
            entry.dilemma = "dilemma " + std::to_string(i);
            entry.strategy = "strategy";
            store.upsert_strategic(entry);
        }
        const int cap = 1 + static_cast<int>(rng() % 4);
        store.apply_merge_plan(Json::object(), cap);
        require(static_cast<int>(store.strategic().size()) <= cap,
                "cap round " + std::to_string(round) + ": strategic entries exceed the cap");
    }
}

// --- criterion 5: memory transfer ---------------------------------------------------

TaskResult run_cl_task(const std::string& task_id, MemoryStore& store) {
    const fs::path dir = testutil::fixture_dir() / "cl" / "backends" / task_id;
    ScriptedBackend planner(load_fixture(dir / "planner.json"), "planner");
    ScriptedBackend executor(load_fixture(dir / "executor.json"), "executor");
    ScriptedBackend reflector(load_fixture(dir / "reflector.json"), "reflector");
    RoleBackends roles;
    roles.planner = &planner;
    roles.executor = &executor;
    roles.reflector = &reflector;
    const TaskSpec spec =
        load_task_spec(testutil::fixture_dir() / "cl" / "tasks" / (task_id + ".json"));
    EngineConfig config;
    RunLog log;
    return run_task(spec, store, config, roles, log);
}

void criterion_memory_transfer() {
    // Engine A learns a guide the hard way.
    MemoryStore produced;
    const TaskResult first = run_cl_task("cl-result-01", produced);
    require(first.status == "completed", "producer run failed: " + first.status);
    require(!produced.sop_index().empty(), "producer run stored no guide");
    const std::string bytes = serialize_memory(produced);

    // The file is handed to a different engine.
    MemoryStore transferred = parse_memory(bytes);
    require(serialize_memory(transferred) == bytes, "transfer altered the stored bytes");

    std::map<std::string, std::vector<std::string>> batch;
    for (const auto& entry : produced.sop_index()) {
        batch[entry.application].push_back(entry.function);
    }
    batch["GhostApp"].push_back("GhostFn");
    const GuideResult from_a = produced.query_sops(batch);
    const GuideResult from_b = transferred.query_sops(batch);
    require(from_a.found.size() == from_b.found.size() && from_a.missing == from_b.missing,
            "guide queries differ across the transfer");
    for (std::size_t i = 0; i < from_a.found.size(); ++i) {
        require(from_a.found[i].to_json().dump() == from_b.found[i].to_json().dump(),
                "guide body " + std::to_string(i) + " differs across the transfer");
    }

    const StartupContext a = produced.render_startup_context();
    const StartupContext b = transferred.render_startup_context();
    require(a.strategic_text == b.strategic_text && a.sop_index_text == b.sop_index_text &&
                a.tool_static_text == b.tool_static_text,
            "startup contexts differ across the transfer");

    // The second engine exploits the transferred guide: the solve takes the
    // short path (2 steps + 1 verification call) instead of rediscovery.
    const TaskResult second = run_cl_task("cl-result-02", transferred);
    require(second.status == "completed", "consumer run failed: " + second.status);
    require(second.total_actions == 3,
            "consumer run spent " + std::to_string(second.total_actions) +
                " actions; the transferred guide was not used");
}

// --- criterion 6: replay determinism -------------------------------------------------

void criterion_replay_determinism() {
    testutil::TempDir tmp("acceptance-replay");
    const EngineConfig e2e = scripted_config(testutil::fixture_dir() / "e2e");

    int checked = 0;
    for (const char* scenario : {"inventory-summary", "version-record", "launch-note",
                                 "feedback-collection"}) {
        const TaskSpec spec =
            load_task_spec(testutil::fixture_dir() / "e2e" / scenario / "task.json");
        MemoryStore store;
        const RunArtifacts recorded = execute_task_run(spec, store, e2e, "acceptance");
        const fs::path run_dir = tmp.path() / scenario;
        write_run_dir(recorded, run_dir);

        for (int round = 0; round < 2; ++round) {
            const RunArtifacts replayed = replay_run(run_dir);
            const std::string label = std::string(scenario) + " replay " +
                                      std::to_string(round + 1);
            require(replayed.trajectory_bytes == recorded.trajectory_bytes,
                    label + ": trajectory bytes diverged");
            require(replayed.memory_before_bytes == recorded.memory_before_bytes,
                    label + ": starting memory bytes diverged");
            require(replayed.memory_after_bytes == recorded.memory_after_bytes,
                    label + ": resulting memory bytes diverged");
            require(replayed.result.to_json().dump() == recorded.result.to_json().dump(),
                    label + ": scored result diverged");
        }
        ++checked;
    }
    require(checked == 4, "expected to replay all four scripted scenarios");

    // A mid-series run whose starting memory is itself a product of earlier
    // tasks must also replay exactly.
    const EngineConfig cl = scripted_config(testutil::fixture_dir() / "cl" / "backends");
    const auto series = run_iterations(load_cl_tasks(), 1, tmp.path() / "mem.json", cl,
                                       tmp.path() / "cl-runs", true);
    require(!series.empty(), "iteration run produced no statistics");
    const fs::path mid_run = tmp.path() / "cl-runs" / "iter1" / "cl-result-03";
    const RunArtifacts replayed = replay_run(mid_run);
    require(replayed.trajectory_bytes == testutil::read_file(mid_run / "trajectory.jsonl"),
            "mid-series trajectory diverged under replay");
    require(replayed.memory_after_bytes == testutil::read_file(mid_run / "memory_after.json"),
            "mid-series memory delta diverged under replay");
    require(replayed.result.to_json().dump(2) + "\n" ==
                testutil::read_file(mid_run / "result.json"),
            "mid-series result diverged under replay");
}

// --- runner ---------------------------------------------------------------------------

struct Criterion {
    int number;
    const char* title;
    double time_limit_seconds;  // 0 = no limit
    std::function<void()> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "scoring oracle", 1.0, criterion_scoring_oracle},
        {2, "continual-learning trend", 30.0, criterion_continual_learning},
        {3, "loop state machine", 0.0, criterion_loop_state_machine},
        {4, "memory store properties", 0.0, criterion_memory_properties},
        {5, "memory transfer", 0.0, criterion_memory_transfer},
        {6, "replay determinism", 0.0, criterion_replay_determinism},
    };

    bool all_passed = true;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string failure;
        try {
            criterion.body();
        } catch (const CheckFailure& f) {
            failure = f.message;
        } catch (const std::exception& e) {
            failure = std::string("unexpected exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (failure.empty() && criterion.time_limit_seconds > 0.0 &&
            elapsed > criterion.time_limit_seconds) {
            failure = "exceeded the " + std::to_string(criterion.time_limit_seconds) +
                      " s budget (" + std::to_string(elapsed) + " s)";
        }
        if (failure.empty()) {
            std::printf("CRITERION %d: PASS (%s, %.2fs)\n", criterion.number, criterion.title,
                        elapsed);
        } else {
            all_passed = false;
            std::printf("CRITERION %d: FAIL (%s: %s)\n", criterion.number, criterion.title,
                        failure.c_str());
        }
    }
    return all_passed ? 0 : 1;
}
