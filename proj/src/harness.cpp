#include "playbook/harness.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "playbook/executor.hpp"
#include "playbook/text.hpp"
#include "playbook/tools.hpp"

namespace playbook {

// --- task specifications -----------------------------------------------------

Json TaskSpec::to_json() const {
    Json checkpoints_json = Json::array();
    for (const auto& c : checkpoints) {
        checkpoints_json.push_back(Json{{"id", c.id}, {"validator", c.validator}});
    }
    Json j;
    j["schema_version"] = 1;
    j["id"] = id;
    j["description"] = description;
    j["initial_state"] = initial_state;
    j["checkpoints"] = std::move(checkpoints_json);
    j["full_predicate"] = full_predicate;
    return j;
}

TaskSpec TaskSpec::from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("task spec must be a json object");
    TaskSpec spec;
    spec.id = j.value("id", std::string{});
    if (trim(spec.id).empty()) throw ParseError("task spec: missing or empty 'id'");
    spec.description = j.value("description", std::string{});
    if (trim(spec.description).empty()) {
        throw ParseError("task spec '" + spec.id + "': missing or empty 'description'");
    }
    spec.initial_state = j.value("initial_state", Json::object());
    if (!j.contains("checkpoints") || !j.at("checkpoints").is_array() ||
        j.at("checkpoints").empty()) {
        throw ParseError("task spec '" + spec.id + "': needs at least one checkpoint");
    }
    for (const auto& c : j.at("checkpoints")) {
        Checkpoint cp;
        cp.id = c.value("id", std::string{});
        if (trim(cp.id).empty()) {
            throw ParseError("task spec '" + spec.id + "': checkpoint without an 'id'");
        }
        if (!c.contains("validator") || !c.at("validator").is_object()) {
            throw ParseError("task spec '" + spec.id + "': checkpoint '" + cp.id +
                             "' needs a 'validator' object");
        }
        cp.validator = c.at("validator");
        spec.checkpoints.push_back(std::move(cp));
    }
    spec.full_predicate = j.value("full_predicate", Json{});
    return spec;
}

TaskSpec load_task_spec(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open task spec: " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("task spec " + path.string() + ": " + e.what());
    }
    return TaskSpec::from_json(j);
}

// --- scoring -------------------------------------------------------------------

Json TaskResult::to_json() const {
    Json j;
    j["task_id"] = task_id;
    j["completed_ckpt"] = completed_ckpt;
    j["total_ckpt"] = total_ckpt;
    j["s_full"] = s_full;
    j["s_partial"] = s_partial;
    j["trajectory_path"] = trajectory_path;
    j["memory_revision_before"] = memory_revision_before;
    j["memory_revision_after"] = memory_revision_after;
    j["status"] = status;
    j["total_actions"] = total_actions;
    return j;
}

TaskResult TaskResult::from_json(const Json& j) {
    TaskResult r;
    r.task_id = j.value("task_id", std::string{});
    r.completed_ckpt = j.value("completed_ckpt", 0);
    r.total_ckpt = j.value("total_ckpt", 0);
    r.s_full = j.value("s_full", 0);
    r.s_partial = j.value("s_partial", 0.0);
    r.trajectory_path = j.value("trajectory_path", std::string{});
    r.memory_revision_before = j.value("memory_revision_before", std::int64_t{0});
    r.memory_revision_after = j.value("memory_revision_after", std::int64_t{0});
    r.status = j.value("status", std::string{});
    r.total_actions = j.value("total_actions", 0);
    return r;
}

Json Scores::to_json() const {
    return Json{{"s_ckpt", s_ckpt}, {"avg_s_partial", avg_s_partial}, {"pcr", pcr}};
}

double score_partial(int completed, int total, int s_full) {
    if (total < 1) throw ValidationError("score_partial: total checkpoints must be >= 1");
    if (completed < 0 || completed > total) {
        throw ValidationError("score_partial: completed must lie in [0, total]");
    }
    if (s_full != 0 && s_full != 1) {
        throw ValidationError("score_partial: s_full must be 0 or 1");
    }
    return 0.5 * (static_cast<double>(completed) / static_cast<double>(total)) +
           0.5 * static_cast<double>(s_full);
}

Scores score_aggregate(const std::vector<TaskResult>& results) {
    if (results.empty()) throw ValidationError("score_aggregate: empty result list");
    long long completed = 0;
    long long total = 0;
    double partial_sum = 0.0;
    long long perfect = 0;
    for (const auto& r : results) {
        if (r.total_ckpt < 1) {
            throw ValidationError("score_aggregate: task '" + r.task_id +
                                  "' has no checkpoints");
        }
        completed += r.completed_ckpt;
        total += r.total_ckpt;
        partial_sum += r.s_partial;
        if (r.s_full == 1) ++perfect;
    }
    Scores scores;
    scores.s_ckpt = static_cast<double>(completed) / static_cast<double>(total);
    scores.avg_s_partial = partial_sum / static_cast<double>(results.size());
    scores.pcr = static_cast<double>(perfect) / static_cast<double>(results.size());
    return scores;
}

// --- checkpoint evaluation -------------------------------------------------------

bool eval_predicate(const Json& predicate, const SimEnvironment& env) {
    if (!predicate.is_object() || !predicate.contains("kind") ||
        !predicate.at("kind").is_string()) {
        throw ValidationError("predicate must be an object with a string 'kind'");
    }
    const std::string kind = predicate.at("kind").get<std::string>();
    auto required = [&](const char* field) -> std::string {
        if (!predicate.contains(field) || !predicate.at(field).is_string()) {
            throw ValidationError("predicate '" + kind + "': missing string field '" + field +
                                  "'");
        }
        return predicate.at(field).get<std::string>();
    };

    if (kind == "file_exists") {
        return env.file_exists(required("path"));
    }
    if (kind == "file_contains") {
        const std::string* content = env.file_content(required("path"));
        return content != nullptr && contains(*content, required("needle"));
    }
    if (kind == "message_sent_matching") {
        const std::string channel = required("channel");
        const std::string pattern = required("pattern");
        const std::string author = predicate.value("author", std::string{"agent"});
        const auto* messages = env.channel_messages(channel);
        if (messages == nullptr) return false;
        return std::any_of(messages->begin(), messages->end(), [&](const ChatRecord& m) {
            return (author == "*" || m.author == author) && contains(m.text, pattern);
        });
    }
    if (kind == "issue_field_equals") {
        const IssueRecord* issue = env.find_issue(required("project"), required("id"));
        if (issue == nullptr) return false;
        const std::string field = required("field");
        const std::string value = required("value");
        if (field == "title") return issue->title == value;
        auto it = issue->fields.find(field);
        return it != issue->fields.end() && it->second == value;
    }
    if (kind == "all" || kind == "any") {
        if (!predicate.contains("of") || !predicate.at("of").is_array()) {
            throw ValidationError("predicate '" + kind + "': missing 'of' array");
        }
        const Json& of = predicate.at("of");
        if (kind == "all") {
            return std::all_of(of.begin(), of.end(),
                               [&](const Json& p) { return eval_predicate(p, env); });
        }
        return std::any_of(of.begin(), of.end(),
                           [&](const Json& p) { return eval_predicate(p, env); });
    }
    throw ValidationError("unknown predicate kind '" + kind + "'");
}

std::vector<CheckpointResult> validate_checkpoints(const TaskSpec& spec,
                                                   const SimEnvironment& env) {
    std::vector<CheckpointResult> results;
    results.reserve(spec.checkpoints.size());
    for (const auto& checkpoint : spec.checkpoints) {
        CheckpointResult r;
        r.id = checkpoint.id;
        try {
            r.passed = eval_predicate(checkpoint.validator, env);
        } catch (const std::exception& e) {
            r.passed = false;
            r.diagnostic = e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

// --- one full task run ------------------------------------------------------------

namespace {

std::string lineage_record_text(int attempt, const Verdict& verdict,
                                const std::optional<FailureReport>& failure) {
    std::ostringstream out;
    out << "Attempt " << attempt << " verdict: " << flag_name(verdict.flag) << "\n";
    if (failure.has_value()) out << failure->render();
    return out.str();
}

// Distills and stores an SOP for one successful trajectory; logs either the
// addition or the grounded-evidence drop.
void handle_success(const std::string& task_id, const SubTask& subtask,
                    const SubTaskTrajectory& trajectory, MemoryStore& store,
                    Backend& reflector, RunLog& log) {
    std::string warning;
    auto sop = distill_sop(subtask, trajectory, reflector, &warning);
    if (sop.has_value()) {
        sop->content.provenance = {task_id + ":" + subtask.id};
        const std::string sop_id = store.add_sop(sop->index, sop->content);
        log.append("sop_added", Json{{"subtask", subtask.id},
                                     {"sop_id", sop_id},
                                     {"application", sop->index.application},
                                     {"function", sop->index.function}});
    } else {
        log.append("sop_dropped", Json{{"subtask", subtask.id}, {"warning", warning}});
    }
}

}  // namespace

TaskResult run_task(const TaskSpec& spec, MemoryStore& store, const EngineConfig& config,
                    const RoleBackends& backends, RunLog& log) {
    if (backends.planner == nullptr || backends.executor == nullptr ||
        backends.reflector == nullptr) {
        throw ValidationError("run_task: planner, executor and reflector backends required");
    }
    if (spec.checkpoints.empty()) {
        throw ValidationError("run_task: task '" + spec.id + "' has no checkpoints");
    }

    TaskResult result;
    result.task_id = spec.id;
    result.total_ckpt = static_cast<int>(spec.checkpoints.size());
    result.memory_revision_before = store.revision();

    SimEnvironment env = SimEnvironment::from_seed(spec.initial_state);
    ToolRegistry registry = default_registry();
    Backend* vision = backends.vision != nullptr ? backends.vision : backends.executor;

    const PlannerCaps planner_caps{config.caps.max_subtasks, config.caps.max_reviews};
    ExecutorConfig exec_config;
    exec_config.action_budget = config.action_budget;
    exec_config.keep_newest = config.keep_newest;
    ReflectorConfig reflect_config;
    reflect_config.tool_budget = config.caps.reflector_tool_budget;

    log.append("task_start", Json{{"task", spec.id},
                                  {"description", spec.description},
                                  {"memory_revision", store.revision()}});

    std::vector<TrajectoryDigest> digests;
    int total_actions = 0;
    std::string status = "completed";
    bool run_update = true;

    try {
        SubTaskQueue queue =
            initial_plan(spec.description, store.render_startup_context(), *backends.planner,
                         planner_caps);
        log.append("plan", queue.to_json());

        int incomplete_reviews = 0;
        while (true) {
            if (queue.pending.empty()) {
                ReviewReport review;
                try {
                    review = final_review(spec.description, queue, env, *backends.planner);
                } catch (const PlanningError& e) {
                    log.append("review", Json{{"error", e.what()}});
                    status = std::string("unknown-completion: ") + e.what();
                    break;
                }
                log.append("review", review.to_json());
                if (review.overall_complete) {
                    status = "completed";
                    break;
                }
                ++incomplete_reviews;
                if (incomplete_reviews >= planner_caps.max_reviews) {
                    status = "incomplete";
                    break;
                }
                if (queue.capped) {
                    status = "capped";
                    break;
                }
                ReplanTrigger trigger;
                trigger.kind = ReplanTrigger::Kind::review_incomplete;
                trigger.review = review;
                try {
                    const ReplanOutcome outcome =
                        replan(queue, trigger, *backends.planner, planner_caps);
                    log.append("replan", Json{{"trigger", "review_incomplete"},
                                              {"revision", queue.revision},
                                              {"pruned", outcome.pruned_ids},
                                              {"new", outcome.new_ids},
                                              {"attempts", outcome.gateway_attempts},
                                              {"capped", queue.capped}});
                } catch (const PlanningError& e) {
                    log.append("replan", Json{{"trigger", "review_incomplete"},
                                              {"error", e.what()}});
                    throw;
                }
                continue;
            }

            SubTask subtask = queue.pending.front();
            queue.pending.erase(queue.pending.begin());

            // --- attempt 1 (normal mode) --------------------------------------
            log.append("subtask_start", Json{{"subtask", subtask.id},
                                             {"desc", subtask.desc},
                                             {"goal", subtask.goal},
                                             {"attempt", 1},
                                             {"mode", "normal"}});
            SubtaskRunInputs inputs;
            inputs.task_desc = spec.description;
            inputs.subtask = subtask;
            inputs.mode = ExecMode::normal;
            SubTaskTrajectory trajectory = run_subtask(inputs, exec_config, store, registry,
                                                       env, *backends.executor, vision, &log);
            subtask.attempt_count = 1;
            total_actions += static_cast<int>(trajectory.steps.size());

            if (trajectory.outcome == TrajectoryOutcome::gateway_error) {
                digests.push_back({subtask, ExecMode::normal, trajectory.outcome, "",
                                   static_cast<int>(trajectory.steps.size())});
                status = "gateway_error: " + trajectory.error;
                break;
            }

            Checklist checklist = build_checklist(subtask, trajectory, *backends.reflector);
            log.append("checklist",
                       Json{{"subtask", subtask.id}, {"checklist", checklist.to_json()}});
            Evaluation eval = evaluate(subtask, trajectory, checklist, env, registry, store,
                                       *backends.reflector, reflect_config);
            total_actions += static_cast<int>(eval.verdict.checks.size());
            log.append("verdict", Json{{"subtask", subtask.id},
                                       {"attempt", 1},
                                       {"verdict", eval.verdict.to_json()},
                                       {"gateway_attempts", eval.gateway_attempts}});
            if (eval.failure.has_value()) {
                log.append("failure_report", Json{{"subtask", subtask.id},
                                                  {"attempt", 1},
                                                  {"report", eval.failure->to_json()}});
            }
            digests.push_back({subtask, ExecMode::normal, trajectory.outcome,
                               flag_name(eval.verdict.flag),
                               static_cast<int>(trajectory.steps.size())});

            Verdict concluding_verdict = eval.verdict;
            std::optional<FailureReport> concluding_failure = eval.failure;

            if (eval.verdict.flag == VerdictFlag::success) {
                handle_success(spec.id, subtask, trajectory, store, *backends.reflector, log);
            } else if (eval.verdict.retry_granted) {
                // --- attempt 2 (retry mode) ------------------------------------
                log.append("subtask_start", Json{{"subtask", subtask.id},
                                                 {"desc", subtask.desc},
                                                 {"goal", subtask.goal},
                                                 {"attempt", 2},
                                                 {"mode", "retry"}});
                FailureReport prior_failure =
                    concluding_failure.value_or(FailureReport{{"the first attempt failed"},
                                                              {},
                                                              {}});
                SubtaskRunInputs retry_inputs;
                retry_inputs.task_desc = spec.description;
                retry_inputs.subtask = subtask;
                retry_inputs.mode = ExecMode::retry;
                retry_inputs.lineage_records = {
                    lineage_record_text(1, eval.verdict, concluding_failure)};
                retry_inputs.prior_failure = &prior_failure;
                SubTaskTrajectory retry_trajectory =
                    run_subtask(retry_inputs, exec_config, store, registry, env,
                                *backends.executor, vision, &log);
                subtask.attempt_count = 2;
                total_actions += static_cast<int>(retry_trajectory.steps.size());

                if (retry_trajectory.outcome == TrajectoryOutcome::gateway_error) {
                    digests.push_back({subtask, ExecMode::retry, retry_trajectory.outcome, "",
                                       static_cast<int>(retry_trajectory.steps.size())});
                    status = "gateway_error: " + retry_trajectory.error;
                    break;
                }

                Checklist retry_checklist =
                    build_checklist(subtask, retry_trajectory, *backends.reflector);
                log.append("checklist", Json{{"subtask", subtask.id},
                                             {"checklist", retry_checklist.to_json()}});
                Evaluation retry_eval =
                    evaluate(subtask, retry_trajectory, retry_checklist, env, registry, store,
                             *backends.reflector, reflect_config);
                total_actions += static_cast<int>(retry_eval.verdict.checks.size());
                log.append("verdict", Json{{"subtask", subtask.id},
                                           {"attempt", 2},
                                           {"verdict", retry_eval.verdict.to_json()},
                                           {"gateway_attempts", retry_eval.gateway_attempts}});
                if (retry_eval.failure.has_value()) {
                    log.append("failure_report",
                               Json{{"subtask", subtask.id},
                                    {"attempt", 2},
                                    {"report", retry_eval.failure->to_json()}});
                }
                digests.push_back({subtask, ExecMode::retry, retry_trajectory.outcome,
                                   flag_name(retry_eval.verdict.flag),
                                   static_cast<int>(retry_trajectory.steps.size())});

                concluding_verdict = retry_eval.verdict;
                concluding_failure = retry_eval.failure;
                if (retry_eval.verdict.flag == VerdictFlag::success) {
                    handle_success(spec.id, subtask, retry_trajectory, store,
                                   *backends.reflector, log);
                }
            }

            // --- conclusion replan ------------------------------------------------
            ReplanTrigger trigger;
            trigger.kind = ReplanTrigger::Kind::subtask_concluded;
            trigger.subtask = subtask;
            trigger.verdict = concluding_verdict;
            trigger.failure = concluding_failure;
            try {
                const ReplanOutcome outcome =
                    replan(queue, trigger, *backends.planner, planner_caps);
                log.append("replan", Json{{"trigger", "subtask_concluded"},
                                          {"subtask", subtask.id},
                                          {"verdict", flag_name(concluding_verdict.flag)},
                                          {"revision", queue.revision},
                                          {"pruned", outcome.pruned_ids},
                                          {"new", outcome.new_ids},
                                          {"attempts", outcome.gateway_attempts},
                                          {"capped", queue.capped}});
            } catch (const PlanningError& e) {
                log.append("replan", Json{{"trigger", "subtask_concluded"},
                                          {"subtask", subtask.id},
                                          {"verdict", flag_name(concluding_verdict.flag)},
                                          {"error", e.what()}});
                throw;
            }
        }
    } catch (const PlanningError& e) {
        status = std::string("planning_error: ") + e.what();
        run_update = false;
    } catch (const GatewayError& e) {
        status = std::string("gateway_error: ") + e.what();
        run_update = false;
    } catch (const std::exception& e) {
        status = std::string("error: ") + e.what();
        run_update = false;
    }

    if (run_update) {
        const std::set<std::string> known_tools = registry.name_set();
        const UpdateReport update =
            post_task_update(spec.id, spec.description, digests, store, *backends.reflector,
                             &known_tools, config.caps.strategic_cap);
        log.append("update_report", update.to_json());
    }

    // Checkpoints always score the terminal environment: partial credit
    // survives crashes and truncated runs.
    const std::vector<CheckpointResult> checkpoint_results = validate_checkpoints(spec, env);
    int completed = 0;
    Json checkpoint_json = Json::array();
    for (const auto& c : checkpoint_results) {
        if (c.passed) ++completed;
        Json entry{{"id", c.id}, {"passed", c.passed}};
        if (!c.diagnostic.empty()) entry["diagnostic"] = c.diagnostic;
        checkpoint_json.push_back(std::move(entry));
    }
    bool full = false;
    if (spec.full_predicate.is_null()) {
        full = completed == result.total_ckpt;
    } else {
        try {
            full = eval_predicate(spec.full_predicate, env);
        } catch (const std::exception&) {
            full = false;
        }
    }

    result.completed_ckpt = completed;
    result.s_full = full ? 1 : 0;
    result.s_partial = score_partial(completed, result.total_ckpt, result.s_full);
    result.status = status;
    result.total_actions = total_actions;
    result.memory_revision_after = store.revision();

    log.append("checkpoints", Json{{"results", std::move(checkpoint_json)},
                                   {"completed", completed},
                                   {"total", result.total_ckpt},
                                   {"s_full", result.s_full}});
    log.append("result", result.to_json());
    return result;
}

// --- run artifacts and replay ------------------------------------------------------

RunArtifacts execute_task_run(const TaskSpec& spec, MemoryStore& store,
                              const EngineConfig& config, const std::string& run_label) {
    RunArtifacts artifacts;
    artifacts.memory_before_bytes = serialize_memory(store);

    const auto planner = make_backend(config.backend_for("planner"), "planner", spec.id);
    const auto executor = make_backend(config.backend_for("executor"), "executor", spec.id);
    const auto reflector = make_backend(config.backend_for("reflector"), "reflector", spec.id);
    RoleBackends backends;
    backends.planner = planner.get();
    backends.executor = executor.get();
    backends.reflector = reflector.get();
    backends.vision = executor.get();

    RunLog log;
    artifacts.result = run_task(spec, store, config, backends, log);
    artifacts.result.trajectory_path = "trajectory.jsonl";
    artifacts.trajectory_bytes = log.bytes();
    artifacts.memory_after_bytes = serialize_memory(store);
    artifacts.run_meta = Json{{"schema_version", 1},
                              {"label", run_label},
                              {"task", spec.to_json()},
                              {"config", config.to_json()}};
    return artifacts;
}

namespace {

void write_text_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << bytes;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

void write_run_dir(const RunArtifacts& artifacts, const fs::path& run_dir) {
    fs::create_directories(run_dir);
    write_text_file(run_dir / "run_meta.json", artifacts.run_meta.dump(2) + "\n");
    write_text_file(run_dir / "memory_before.json", artifacts.memory_before_bytes);
    write_text_file(run_dir / "trajectory.jsonl", artifacts.trajectory_bytes);
    write_text_file(run_dir / "result.json", artifacts.result.to_json().dump(2) + "\n");
    write_text_file(run_dir / "memory_after.json", artifacts.memory_after_bytes);
}

RunArtifacts replay_run(const fs::path& run_dir) {
    Json meta;
    try {
        meta = Json::parse(read_text_file(run_dir / "run_meta.json"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("run_meta.json in " + run_dir.string() + ": " + e.what());
    }
    if (!meta.contains("task") || !meta.contains("config")) {
        throw ParseError("run_meta.json in " + run_dir.string() +
                         " lacks the embedded task or config");
    }
    const TaskSpec spec = TaskSpec::from_json(meta.at("task"));
    const EngineConfig config = EngineConfig::from_json(meta.at("config"));
    MemoryStore store = parse_memory(read_text_file(run_dir / "memory_before.json"));
    return execute_task_run(spec, store, config, meta.value("label", std::string{}));
}

// --- continual-learning driver ------------------------------------------------------

Json IterationStats::to_json() const {
    Json results_json = Json::array();
    for (const auto& r : results) results_json.push_back(r.to_json());
    return Json{{"iteration", iteration},
                {"scores", scores.to_json()},
                {"total_actions", total_actions},
                {"memory_revision", memory_revision},
                {"strategic_entries", strategic_entries},
                {"sop_entries", sop_entries},
                {"tool_entries", tool_entries},
                {"results", std::move(results_json)}};
}

std::vector<IterationStats> run_iterations(const std::vector<TaskSpec>& tasks, int iterations,
                                           const fs::path& store_path,
                                           const EngineConfig& config, const fs::path& out_dir,
                                           bool memory_enabled) {
    if (tasks.empty()) throw ValidationError("run_iterations: no tasks given");
    if (iterations < 1) throw ValidationError("run_iterations: iterations must be >= 1");

    MemoryStore store;
    if (memory_enabled && !store_path.empty()) {
        store = load_memory(store_path, /*create_if_missing=*/true);
    }

    std::vector<IterationStats> series;
    for (int iteration = 1; iteration <= iterations; ++iteration) {
        IterationStats stats;
        stats.iteration = iteration;
        const std::string label = "iter" + std::to_string(iteration);
        for (const auto& task : tasks) {
            if (!memory_enabled) store = MemoryStore{};  // no-memory baseline
            RunArtifacts artifacts = execute_task_run(task, store, config, label);
            if (memory_enabled && !store_path.empty()) save_memory(store, store_path);
            if (!out_dir.empty()) write_run_dir(artifacts, out_dir / label / task.id);
            stats.total_actions += artifacts.result.total_actions;
            stats.results.push_back(std::move(artifacts.result));
        }
        stats.scores = score_aggregate(stats.results);
        stats.memory_revision = store.revision();
        stats.strategic_entries = store.strategic().size();
        stats.sop_entries = store.sop_index().size();
        stats.tool_entries = store.tool_entries().size();
        if (!out_dir.empty()) {
            write_text_file(out_dir / label / "scores.json", stats.to_json().dump(2) + "\n");
        }
        series.push_back(std::move(stats));
    }
    return series;
}

}  // namespace playbook
