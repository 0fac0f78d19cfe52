#pragma once

#include <optional>
#include <string>
#include <vector>

#include "playbook/common.hpp"
#include "playbook/config.hpp"
#include "playbook/env.hpp"
#include "playbook/logging.hpp"
#include "playbook/memory.hpp"
#include "playbook/planner.hpp"
#include "playbook/reflector.hpp"

namespace playbook {

// --- task specifications -----------------------------------------------------

// Validators are declarative predicates over the terminal environment:
//   {"kind": "file_exists", "path": ...}
//   {"kind": "file_contains", "path": ..., "needle": ...}
//   {"kind": "message_sent_matching", "channel": ..., "pattern": ..., "author"?: ...}
//   {"kind": "issue_field_equals", "project": ..., "id": ..., "field": ..., "value": ...}
//   {"kind": "all"|"any", "of": [...]}
struct Checkpoint {
    std::string id;
    Json validator;
};

struct TaskSpec {
    std::string id;
    std::string description;
    Json initial_state = Json::object();  // environment seed
    std::vector<Checkpoint> checkpoints;  // at least one
    Json full_predicate;                  // null -> all checkpoints must pass

    Json to_json() const;
    static TaskSpec from_json(const Json& j);
};

TaskSpec load_task_spec(const fs::path& path);

// --- scoring -------------------------------------------------------------------

struct TaskResult {
    std::string task_id;
    int completed_ckpt = 0;
    int total_ckpt = 0;
    int s_full = 0;
    double s_partial = 0.0;
    std::string trajectory_path;
    std::int64_t memory_revision_before = 0;
    std::int64_t memory_revision_after = 0;
    std::string status;     // completed | incomplete | capped | unknown-completion |
                            // planning_error: ... | gateway_error: ... | error: ...
    int total_actions = 0;  // executor steps + reflector verification calls

    Json to_json() const;
    static TaskResult from_json(const Json& j);
};

struct Scores {
    double s_ckpt = 0.0;
    double avg_s_partial = 0.0;
    double pcr = 0.0;

    Json to_json() const;
};

// 0.5 * completed/total + 0.5 * s_full; total must be >= 1.
double score_partial(int completed, int total, int s_full);
Scores score_aggregate(const std::vector<TaskResult>& results);

// --- checkpoint evaluation -------------------------------------------------------

struct CheckpointResult {
    std::string id;
    bool passed = false;
    std::string diagnostic;  // set when a validator was malformed or threw
};

bool eval_predicate(const Json& predicate, const SimEnvironment& env);
std::vector<CheckpointResult> validate_checkpoints(const TaskSpec& spec,
                                                   const SimEnvironment& env);

// --- one full task run ------------------------------------------------------------

struct RoleBackends {
    Backend* planner = nullptr;
    Backend* executor = nullptr;
    Backend* reflector = nullptr;
    Backend* vision = nullptr;  // defaults to the executor backend
};

// Drives plan -> [execute -> evaluate -> (sop | retry | replan)]* -> review
// cycles -> post-task update, then scores checkpoints on the terminal
// environment. Engine errors surface in result.status, never as exceptions;
// partial credit survives crashes.
TaskResult run_task(const TaskSpec& spec, MemoryStore& store, const EngineConfig& config,
                    const RoleBackends& backends, RunLog& log);

// --- run artifacts and replay ------------------------------------------------------

struct RunArtifacts {
    TaskResult result;
    Json run_meta;
    std::string trajectory_bytes;
    std::string memory_before_bytes;
    std::string memory_after_bytes;
};

// Builds per-task backends from the config, runs the task against the given
// store, and returns every artifact in memory (nothing touches disk).
RunArtifacts execute_task_run(const TaskSpec& spec, MemoryStore& store,
                              const EngineConfig& config, const std::string& run_label);

// Layout: run_meta.json, memory_before.json, trajectory.jsonl, result.json,
// memory_after.json.
void write_run_dir(const RunArtifacts& artifacts, const fs::path& run_dir);

// Re-executes the run recorded in a run dir from its stored config, task and
// starting memory. The caller compares the returned artifacts with the stored
// ones byte-for-byte.
RunArtifacts replay_run(const fs::path& run_dir);

// --- continual-learning driver ------------------------------------------------------

struct IterationStats {
    int iteration = 0;
    Scores scores;
    int total_actions = 0;
    std::int64_t memory_revision = 0;
    std::size_t strategic_entries = 0;
    std::size_t sop_entries = 0;
    std::size_t tool_entries = 0;
    std::vector<TaskResult> results;

    Json to_json() const;
};

// Runs every task in order, `iterations` times. With memory enabled the store
// at store_path persists across tasks and iterations; disabled, every task
// starts from an empty throwaway store (the no-memory baseline). Task
// failures never abort the iteration. Run dirs land under
// out_dir/iter<k>/<task_id>/ when out_dir is non-empty.
std::vector<IterationStats> run_iterations(const std::vector<TaskSpec>& tasks, int iterations,
                                           const fs::path& store_path,
                                           const EngineConfig& config, const fs::path& out_dir,
                                           bool memory_enabled = true);

}  // namespace playbook
