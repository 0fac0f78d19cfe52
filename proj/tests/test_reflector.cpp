#include <optional>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "playbook/reflector.hpp"
#include "playbook/text.hpp"

using namespace playbook;

namespace {

SubTask make_subtask() {
    SubTask st;
    st.id = "st-001";
    st.desc = "Create the output file";
    st.goal = "/work/out.txt holds the payload";
    return st;
}

SubTaskTrajectory make_trajectory(int steps = 2, ExecMode mode = ExecMode::normal) {
    SubTaskTrajectory t;
    t.subtask_id = "st-001";
    t.mode = mode;
    t.outcome = TrajectoryOutcome::agent_declared_done;
    t.done_summary = "wrote and verified the file";
    for (int i = 1; i <= steps; ++i) {
        Step s;
        s.index = i;
        s.thought = "thought " + std::to_string(i);
        s.action = Action{"run_cmd", Json{{"command", i == 1 ? "echo payload > /work/out.txt"
                                                             : "cat /work/out.txt"}},
                          i};
        s.observation.payload = i == 1 ? "returncode: 0\n" : "payload\nreturncode: 0\n";
        t.steps.push_back(std::move(s));
    }
    return t;
}

SimEnvironment make_env() {
    return SimEnvironment::from_seed(Json::parse(
        R"({"cwd": "/work", "dirs": ["/work"], "files": {"/work/out.txt": "payload\n"}})"));
}

Json checklist_item(const std::string& dimension, const std::string& description,
                    const std::string& method) {
    return Json{{"dimension", dimension}, {"description", description}, {"method", method}};
}

Json checklist_reply(std::vector<Json> items) {
    return Json{{"items", Json(std::move(items))}};
}

Json verdict_item(int item, bool passed, Json evidence, const std::string& note = "") {
    return Json{{"item", item}, {"passed", passed}, {"evidence", std::move(evidence)},
                {"note", note}};
}

Checklist mixed_checklist() {
    Checklist c;
    c.items.push_back({ChecklistDimension::truthfulness, "claims match observations",
                       VerifyMethod::trajectory_reference});
    c.items.push_back({ChecklistDimension::deliverable, "the file exists with the payload",
                       VerifyMethod::active_verification});
    return c;
}

Json upgrade_reply(std::vector<Json> strategic, std::vector<Json> tools) {
    return Json{{"strategic", Json(std::move(strategic))}, {"tools", Json(std::move(tools))}};
}

}  // namespace

TEST_SUITE("reflector") {

TEST_CASE("dimension, method, and flag names round-trip") {
    CHECK(dimension_name(ChecklistDimension::data_fidelity) == "data_fidelity");
    CHECK(dimension_from_string("deliverable") == ChecklistDimension::deliverable);
    CHECK_THROWS_AS(dimension_from_string("vibes"), ParseError);
    CHECK(method_name(VerifyMethod::active_verification) == "active_verification");
    CHECK_THROWS_AS(method_from_string("guessing"), ParseError);
    CHECK(flag_name(VerdictFlag::success) == "success");
    CHECK(flag_from_string("failure") == VerdictFlag::failure);
    CHECK_THROWS_AS(flag_from_string("maybe"), ParseError);
}

TEST_CASE("build_checklist parses a valid reply and shows the full trajectory") {
    ScriptedBackend backend(
        testutil::make_fixture(
            {{"Produce the ordered checklist",
              testutil::fenced(checklist_reply(
                  {checklist_item("deliverable", "the output file exists",
                                  "active_verification"),
                   checklist_item("truthfulness", "the verify step saw the payload",
                                  "trajectory_reference")}))}}),
        "reflector");
    testutil::RecordingBackend recorder(backend);

    Checklist checklist = build_checklist(make_subtask(), make_trajectory(), recorder);
    CHECK_FALSE(checklist.degraded);
    REQUIRE(checklist.items.size() == 2);
    CHECK(checklist.items[0].dimension == ChecklistDimension::deliverable);
    CHECK(checklist.items[0].method == VerifyMethod::active_verification);
    CHECK(checklist.items[1].description == "the verify step saw the payload");

    const std::string user = recorder.latest_user(0);
    CHECK(contains(user, "Sub-task st-001: Create the output file"));
    CHECK(contains(user, "Goal: /work/out.txt holds the payload"));
    CHECK(contains(user,
                   "Trajectory (mode normal, outcome agent-declared-done, 2 steps):"));
    CHECK(contains(user, "Step 1:\n  thought: thought 1"));
    CHECK(contains(user, "action: run_cmd {\"command\":\"echo payload > /work/out.txt\"}"));
    CHECK(contains(user, "Agent summary: wrote and verified the file"));
}

TEST_CASE("build_checklist re-asks on schema problems and degrades on exhaustion") {
    SUBCASE("invalid dimension is corrected") {
        ScriptedBackend backend(
            testutil::make_fixture(
                {{"Produce the ordered checklist",
                  testutil::fenced(checklist_reply(
                      {checklist_item("vibes", "d", "trajectory_reference")}))},
                 {"item 1 has invalid dimension 'vibes'",
                  testutil::fenced(checklist_reply(
                      {checklist_item("deliverable", "d", "trajectory_reference")}))}}),
            "reflector");
        Checklist checklist = build_checklist(make_subtask(), make_trajectory(), backend);
        CHECK_FALSE(checklist.degraded);
        CHECK(checklist.items.size() == 1);
    }

    SUBCASE("persistent failure produces the generic per-dimension checklist") {
        ScriptedFixture fixture;
        fixture.strict = false;
        fixture.steps.push_back({"", "no json at all"});
        ScriptedBackend backend(fixture, "reflector");
        Checklist checklist = build_checklist(make_subtask(), make_trajectory(), backend);
        CHECK(checklist.degraded);
        REQUIRE(checklist.items.size() == 3);
        CHECK(checklist.items[0].dimension == ChecklistDimension::truthfulness);
        CHECK(checklist.items[1].dimension == ChecklistDimension::deliverable);
        CHECK(checklist.items[2].dimension == ChecklistDimension::data_fidelity);
        for (const auto& item : checklist.items) {
            CHECK(item.method == VerifyMethod::trajectory_reference);
        }
    }
}

TEST_CASE("evaluate rejects an empty checklist") {
    SimEnvironment env = make_env();
    ToolRegistry registry = default_registry();
    MemoryStore store;
    ScriptedBackend backend(testutil::make_fixture({}), "reflector");
    CHECK_THROWS_AS(evaluate(make_subtask(), make_trajectory(), Checklist{}, env, registry,
                             store, backend),
                    ValidationError);
}

TEST_CASE("evaluate concludes a zero-step trajectory without any gateway call") {
    SimEnvironment env = make_env();
    ToolRegistry registry = default_registry();
    MemoryStore store;
    // A strict fixture with no steps throws on any call, proving none happen.
    ScriptedBackend backend(testutil::make_fixture({}), "reflector");

    Checklist checklist = mixed_checklist();
    SubTaskTrajectory empty = make_trajectory(0);

    Evaluation eval =
        evaluate(make_subtask(), empty, checklist, env, registry, store, backend);
    CHECK(eval.gateway_attempts == 0);
    CHECK(eval.verdict.flag == VerdictFlag::failure);
    CHECK(eval.verdict.degraded);
    CHECK(eval.verdict.retry_granted);
    REQUIRE(eval.verdict.items.size() == 2);
    CHECK(eval.verdict.items[0].item == 1);
    CHECK_FALSE(eval.verdict.items[0].passed);
    CHECK(eval.verdict.items[0].note == "no trajectory steps exist to support this item");
    REQUIRE(eval.failure.has_value());
    CHECK(eval.failure->causes ==
          std::vector<std::string>{"the agent concluded without taking any action"});

    SubTaskTrajectory empty_retry = make_trajectory(0, ExecMode::retry);
    Evaluation retry_eval =
        evaluate(make_subtask(), empty_retry, checklist, env, registry, store, backend);
    CHECK_FALSE(retry_eval.verdict.retry_granted);
}

TEST_CASE("evaluate scores trajectory-reference checklists with one verdict call") {
    SimEnvironment env = make_env();
    ToolRegistry registry = default_registry();
    MemoryStore store;

    Checklist checklist;
    checklist.items.push_back({ChecklistDimension::truthfulness, "grounded",
                               VerifyMethod::trajectory_reference});
    checklist.items.push_back({ChecklistDimension::deliverable, "file produced",
                               VerifyMethod::trajectory_reference});

    ScriptedBackend backend(
        testutil::make_fixture(
            {{"Produce the final verdict",
              testutil::fenced(Json{
                  {"flag", "success"},
                  {"items", Json::array({verdict_item(2, true, Json{{"step", 1}}, "written"),
                                         verdict_item(1, true, Json{{"step", 2}},
                                                      "verified")})}})}}),
        "reflector");
    testutil::RecordingBackend recorder(backend);

    Evaluation eval = evaluate(make_subtask(), make_trajectory(), checklist, env, registry,
                               store, recorder);
    CHECK(eval.gateway_attempts == 1);
    CHECK(eval.verdict.flag == VerdictFlag::success);
    CHECK_FALSE(eval.verdict.retry_granted);
    CHECK_FALSE(eval.verdict.degraded);
    CHECK(eval.verdict.checks.empty());
    REQUIRE(eval.verdict.items.size() == 2);
    // Items come back sorted by checklist number regardless of reply order.
    CHECK(eval.verdict.items[0].item == 1);
    CHECK(eval.verdict.items[0].evidence_step == 2);
    CHECK(eval.verdict.items[1].item == 2);
    CHECK(eval.verdict.items[1].note == "written");
    CHECK_FALSE(eval.failure.has_value());

    const std::string user = recorder.latest_user(0);
    CHECK(contains(user, "Checklist:\n1. [truthfulness / trajectory_reference] grounded"));
    CHECK(contains(user, "Verification observations: (none)"));
}

TEST_CASE("evaluate dispatches active checks and feeds their results to the verdict") {
    SimEnvironment env = make_env();
    ToolRegistry registry = default_registry();
    MemoryStore store;
    Checklist checklist = mixed_checklist();

    ScriptedBackend backend(
        testutil::make_fixture(
            {{"List the verification actions",
              testutil::fenced(Json{
                  {"checks",
                   Json::array({Json{{"item", 2},
                                     {"tool", "run_cmd"},
                                     {"arguments", Json{{"command", "cat /work/out.txt"}}}}})}})},
             {"Produce the final verdict",
              testutil::fenced(Json{
                  {"flag", "success"},
                  {"items",
                   Json::array({verdict_item(1, true, Json{{"step", 2}}),
                                verdict_item(2, true, Json{{"check", 1}}, "fresh read")})}})}}),
        "reflector");
    testutil::RecordingBackend recorder(backend);

    Evaluation eval = evaluate(make_subtask(), make_trajectory(), checklist, env, registry,
                               store, recorder);
    CHECK(eval.gateway_attempts == 2);
    CHECK(eval.verdict.flag == VerdictFlag::success);
    REQUIRE(eval.verdict.checks.size() == 1);
    CHECK(eval.verdict.checks[0].checklist_item == 2);
    CHECK(eval.verdict.checks[0].action.tool == "run_cmd");
    CHECK(eval.verdict.checks[0].observation.payload == "payload\nreturncode: 0\n");
    CHECK(eval.verdict.items[1].evidence_check == 1);

    const std::string verdict_prompt = recorder.latest_user(1);
    CHECK(contains(verdict_prompt,
                   "Check 1 (item 2): run_cmd {\"command\":\"cat /work/out.txt\"}"));
    CHECK(contains(verdict_prompt, "result: payload"));
}

TEST_CASE("evaluate fails conservatively when the check budget clips cited checks") {
    SimEnvironment env = make_env();
    ToolRegistry registry = default_registry();
    MemoryStore store;
    Checklist checklist = mixed_checklist();
    ReflectorConfig config;
    config.tool_budget = 0;  // nothing may run

    ScriptedBackend backend(
        testutil::make_fixture(
            {{"List the verification actions",
              testutil::fenced(Json{
                  {"checks", Json::array({Json{{"item", 2}, {"tool", "run_cmd"},
                                               {"arguments",
                                                Json{{"command", "cat /work/out.txt"}}}}})}})},
             {"Produce the final verdict",
              testutil::fenced(Json{
                  {"flag", "success"},
                  {"items",
                   Json::array({verdict_item(1, true, Json{{"step", 2}}),
                                verdict_item(2, true, Json{{"check", 1}}, "claimed")})}})}}),
        "reflector");

    Evaluation eval = evaluate(make_subtask(), make_trajectory(), checklist, env, registry,
                               store, backend, config);
    CHECK(eval.verdict.checks.empty());
    CHECK(eval.verdict.degraded);
    CHECK(eval.verdict.flag == VerdictFlag::failure);
    CHECK(eval.verdict.retry_granted);
    const VerdictItem& clipped = eval.verdict.items[1];
    CHECK_FALSE(clipped.passed);
    CHECK(clipped.evidence_check == 0);
    CHECK(contains(clipped.note,
                   "verification budget exhausted before this check ran; failed conservatively"));
    REQUIRE(eval.failure.has_value());
    CHECK(eval.failure->causes[0] ==
          "the verification budget was exhausted before every active check could run");
}

TEST_CASE("evaluate re-asks until every checklist item is scored") {
    SimEnvironment env = make_env();
    ToolRegistry registry = default_registry();
    MemoryStore store;

    Checklist checklist;
    checklist.items.push_back({ChecklistDimension::truthfulness, "a",
                               VerifyMethod::trajectory_reference});
    checklist.items.push_back({ChecklistDimension::deliverable, "b",
                               VerifyMethod::trajectory_reference});

    ScriptedBackend backend(
        testutil::make_fixture(
            {{"Produce the final verdict",
              testutil::fenced(Json{{"flag", "success"},
                                    {"items", Json::array({verdict_item(
                                                  1, true, Json{{"step", 1}})})}})},
             {"checklist item 2 was never scored",
              testutil::fenced(Json{
                  {"flag", "failure"},
                  {"items", Json::array({verdict_item(1, true, Json{{"step", 1}}),
                                         verdict_item(2, false, Json{{"step", 2}},
                                                      "missing payload")})},
                  {"failure",
                   Json{{"causes", Json::array({"the file holds the wrong payload"})},
                        {"remediations", Json::array({"rewrite the file"})},
                        {"evidence_steps", Json::array({2})}}}})}}),
        "reflector");

    Evaluation eval = evaluate(make_subtask(), make_trajectory(), checklist, env, registry,
                               store, backend);
    CHECK(eval.gateway_attempts == 2);
    CHECK(eval.verdict.flag == VerdictFlag::failure);
    CHECK(eval.verdict.retry_granted);
    REQUIRE(eval.failure.has_value());
    CHECK(eval.failure->causes == std::vector<std::string>{"the file holds the wrong payload"});
    CHECK(eval.failure->suggested_remediations == std::vector<std::string>{"rewrite the file"});
    CHECK(eval.failure->evidence_steps == std::vector<int>{2});
}

TEST_CASE("evaluate degrades to a conservative failure on gateway errors") {
    SimEnvironment env = make_env();
    ToolRegistry registry = default_registry();
    MemoryStore store;
    testutil::ThrowingBackend backend(/*retryable=*/true);

    Checklist checklist = mixed_checklist();
    Evaluation eval = evaluate(make_subtask(), make_trajectory(), checklist, env, registry,
                               store, backend);
    CHECK(eval.verdict.flag == VerdictFlag::failure);
    CHECK(eval.verdict.degraded);
    CHECK(eval.verdict.retry_granted);
    CHECK(eval.gateway_attempts == 1);
    REQUIRE(eval.verdict.items.size() == 2);
    CHECK(contains(eval.verdict.items[0].note, "evaluation degraded: backend unavailable"));
    REQUIRE(eval.failure.has_value());
    CHECK(contains(eval.failure->causes[0], "the evaluation call failed: backend unavailable"));

    SubTaskTrajectory retry_traj = make_trajectory(2, ExecMode::retry);
    Evaluation retry_eval = evaluate(make_subtask(), retry_traj, checklist, env, registry,
                                     store, backend);
    CHECK_FALSE(retry_eval.verdict.retry_granted);
}

TEST_CASE("distill_sop grounds every step and trims its fields") {
    Json sop_json{
        {"application", "  FileSystem  "},
        {"function", "Create or Overwrite File"},
        {"summary", "Write a file with shell redirection."},
        {"preconditions", Json::array({"parent directory exists"})},
        {"steps",
         Json::array({Json{{"text", "  Run: echo '<content>' > <path>  "},
                           {"evidence", Json::array({1})}},
                      Json{{"text", "Run: cat <path> to verify"},
                           {"evidence", Json::array({2})}}})},
        {"parameters", Json::array({"path", "content"})},
        {"notes", Json::array({"redirection replaces the file"})}};

    ScriptedBackend backend(
        testutil::make_fixture(
            {{"Summarize the effective operational sequence", testutil::fenced(sop_json)}}),
        "reflector");

    std::string warning;
    std::optional<DistilledSop> sop =
        distill_sop(make_subtask(), make_trajectory(), backend, &warning);
    REQUIRE(sop.has_value());
    CHECK(warning.empty());
    CHECK(sop->index.application == "FileSystem");
    CHECK(sop->index.function == "Create or Overwrite File");
    CHECK(sop->index.summary == "Write a file with shell redirection.");
    REQUIRE(sop->content.steps.size() == 2);
    CHECK(sop->content.steps[0] == "Run: echo '<content>' > <path>");
    CHECK(sop->content.parameters == std::vector<std::string>{"path", "content"});
    CHECK(sop->content.provenance == std::vector<std::string>{"st-001"});
}

TEST_CASE("distill_sop re-asks ungrounded steps and drops persistent offenders") {
    Json ungrounded{{"application", "App"},
                    {"function", "Fn"},
                    {"summary", "s"},
                    {"steps", Json::array({Json{{"text", "invented step"},
                                                {"evidence", Json::array({9})}}})}};

    SUBCASE("a corrected reply is accepted") {
        Json grounded = ungrounded;
        grounded["steps"][0]["evidence"] = Json::array({1});
        ScriptedBackend backend(
            testutil::make_fixture(
                {{"Summarize the effective operational sequence",
                  testutil::fenced(ungrounded)},
                 {"sop step 1 cites a nonexistent trajectory step",
                  testutil::fenced(grounded)}}),
            "reflector");
        std::optional<DistilledSop> sop = distill_sop(make_subtask(), make_trajectory(), backend);
        REQUIRE(sop.has_value());
        CHECK(sop->content.steps[0] == "invented step");
    }

    SUBCASE("exhaustion drops the distillation with a warning") {
        ScriptedFixture fixture;
        fixture.strict = false;
        fixture.steps.push_back({"", testutil::fenced(ungrounded)});
        ScriptedBackend backend(fixture, "reflector");
        std::string warning;
        std::optional<DistilledSop> sop =
            distill_sop(make_subtask(), make_trajectory(), backend, &warning);
        CHECK_FALSE(sop.has_value());
        CHECK(contains(warning,
                       "distillation dropped, memory must not absorb unsupported claims:"));
    }
}

TEST_CASE("post_task_update writes strategic and tool memory then consolidates") {
    MemoryStore store;
    ToolRegistry registry = default_registry();
    const std::set<std::string> known = registry.name_set();

    std::vector<TrajectoryDigest> digests;
    TrajectoryDigest d;
    d.subtask = make_subtask();
    d.mode = ExecMode::normal;
    d.outcome = TrajectoryOutcome::agent_declared_done;
    d.verdict_flag = "success";
    d.steps = 2;
    digests.push_back(d);

    ScriptedBackend backend(
        testutil::make_fixture(
            {{"Perform the post-task memory upgrade",
              testutil::fenced(upgrade_reply(
                  {Json{{"dilemma", "output files must match an exact payload"},
                        {"strategy", "write with redirection, then cat to compare"}}},
                  {Json{{"tool", "run_cmd"},
                        {"static_description", "Shell access to the workspace."},
                        {"dynamic_instruction", "prefer one idempotent command per step"}},
                   Json{{"tool", "imaginary_tool"},
                        {"static_description", "does not exist"},
                        {"dynamic_instruction", ""}}}))},
             {"Produce a merge plan", testutil::fenced(Json::object())}}),
        "reflector");
    testutil::RecordingBackend recorder(backend);

    UpdateReport report =
        post_task_update("task-1", "Produce the output", digests, store, recorder, &known, 12);

    CHECK_FALSE(report.rolled_back);
    CHECK(report.error.empty());
    CHECK(report.strategic_upserts ==
          std::vector<std::string>{"output files must match an exact payload"});
    CHECK(report.tool_updates == std::vector<std::string>{"run_cmd", "imaginary_tool"});
    CHECK(report.unknown_tools == std::vector<std::string>{"imaginary_tool"});
    CHECK(report.skipped.empty());
    CHECK(report.consolidation.error.empty());

    REQUIRE(store.strategic().size() == 1);
    CHECK(store.strategic()[0].provenance == std::vector<std::string>{"task-1"});
    CHECK(store.find_tool("run_cmd") != nullptr);
    CHECK(store.find_tool("run_cmd")->dynamic_instruction ==
          "prefer one idempotent command per step");
    // upsert + 2 tool writes + final post-update bump; the no-op consolidation
    // does not advance the revision.
    CHECK(store.revision() == 4);

    const std::string user = recorder.latest_user(0);
    CHECK(contains(user, "Task task-1: Produce the output"));
    CHECK(contains(
        user, "- st-001 [normal, agent-declared-done, verdict success, 2 steps]: Create the "
              "output file"));
    CHECK(contains(user, "Current strategic entries:\n(none)"));
    CHECK(contains(user, "Current tool memory:\n(none)"));
}

TEST_CASE("post_task_update skips invalid tool entries but keeps going") {
    MemoryStore store;
    ScriptedBackend backend(
        testutil::make_fixture(
            {{"Perform the post-task memory upgrade",
              testutil::fenced(upgrade_reply(
                  {}, {Json{{"tool", "ghost"}, {"static_description", ""},
                            {"dynamic_instruction", "be careful"}}}))},
             {"Produce a merge plan", testutil::fenced(Json::object())}}),
        "reflector");

    UpdateReport report = post_task_update("task-2", "desc", {}, store, backend, nullptr, 12);
    CHECK_FALSE(report.rolled_back);
    CHECK(report.tool_updates.empty());
    REQUIRE(report.skipped.size() == 1);
    CHECK(contains(report.skipped[0], "ghost: "));
    CHECK(store.find_tool("ghost") == nullptr);
    CHECK(store.revision() == 1);  // only the final bump
}

TEST_CASE("post_task_update rolls the store back when any stage fails") {
    MemoryStore store;
    StrategicEntry seeded;
    seeded.dilemma = "pre-existing dilemma";
    seeded.strategy = "pre-existing strategy";
    store.upsert_strategic(seeded);
    const std::string before = store.to_json().dump(2);

    SUBCASE("upgrade call itself fails") {
        testutil::ThrowingBackend backend(/*retryable=*/false);
        UpdateReport report = post_task_update("t", "d", {}, store, backend, nullptr, 12);
        CHECK(report.rolled_back);
        CHECK(contains(report.error, "backend unavailable"));
        CHECK(report.strategic_upserts.empty());
        CHECK(report.tool_updates.empty());
        CHECK(store.to_json().dump(2) == before);
    }

    SUBCASE("consolidation failure also rolls back the earlier writes") {
        ScriptedFixture fixture;
        fixture.strict = false;
        fixture.steps.push_back(
            {"Perform the post-task memory upgrade",
             testutil::fenced(upgrade_reply({Json{{"dilemma", "new dilemma"},
                                                  {"strategy", "new strategy"}}},
                                            {}))});
        fixture.steps.push_back({"Produce a merge plan", "not a merge plan at all"});
        ScriptedBackend backend(fixture, "reflector");

        UpdateReport report = post_task_update("t", "d", {}, store, backend, nullptr, 12);
        CHECK(report.rolled_back);
        CHECK(contains(report.error, "consolidation failed:"));
        CHECK(report.strategic_upserts.empty());
        CHECK(store.to_json().dump(2) == before);
        CHECK(store.strategic().size() == 1);
    }
}

TEST_CASE("verdict and failure report json round-trips") {
    Verdict v;
    v.flag = VerdictFlag::failure;
    v.retry_granted = true;
    v.degraded = true;
    VerdictItem item;
    item.item = 1;
    item.passed = false;
    item.evidence_step = 3;
    item.note = "mismatch";
    v.items.push_back(item);
    VerificationCall call;
    call.checklist_item = 1;
    call.action = Action{"run_cmd", Json{{"command", "ls"}}, 1};
    call.observation.payload = "out.txt\nreturncode: 0\n";
    v.checks.push_back(call);

    Verdict back = Verdict::from_json(v.to_json());
    CHECK(back.flag == VerdictFlag::failure);
    CHECK(back.retry_granted);
    CHECK(back.degraded);
    REQUIRE(back.items.size() == 1);
    CHECK(back.items[0].evidence_step == 3);
    CHECK(back.items[0].note == "mismatch");
    REQUIRE(back.checks.size() == 1);
    CHECK(back.checks[0].action.tool == "run_cmd");

    FailureReport report;
    report.causes = {"c1"};
    report.suggested_remediations = {"r1"};
    report.evidence_steps = {1, 2};
    FailureReport parsed = FailureReport::from_json(report.to_json());
    CHECK(parsed.causes == report.causes);
    CHECK(parsed.evidence_steps == report.evidence_steps);
    CHECK(contains(report.render(), "Failure report:\nCauses:\n- c1\n"));
}

}  // TEST_SUITE
