#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "playbook/common.hpp"
#include "playbook/env.hpp"
#include "playbook/gateway.hpp"
#include "playbook/memory.hpp"
#include "playbook/trajectory.hpp"
#include "playbook/verdict.hpp"

namespace playbook {

struct SubTaskQueue {
    std::vector<SubTask> pending;  // execution order
    std::vector<std::pair<SubTask, Verdict>> completed;
    int revision = 0;       // incremented per (re)plan
    int created_total = 0;  // sub-tasks ever created, for cap enforcement
    bool capped = false;    // creation cap hit; the run must wind down

    Json to_json() const;  // snapshot for the run log
};

struct PlannerCaps {
    int max_subtasks = 50;
    int max_reviews = 3;  // consecutive incomplete final reviews before forced stop
};

struct ReviewReport {
    bool overall_complete = false;
    std::string summary;
    std::vector<std::string> residual_items;

    Json to_json() const;
    static ReviewReport from_json(const Json& j);
};

// What prompted a replan: a concluded sub-task (success, or failure after its
// retry) or an incomplete final review asking for more work.
struct ReplanTrigger {
    enum class Kind { subtask_concluded, review_incomplete };
    Kind kind = Kind::subtask_concluded;

    // subtask_concluded
    std::optional<SubTask> subtask;
    std::optional<Verdict> verdict;
    std::optional<FailureReport> failure;

    // review_incomplete
    std::optional<ReviewReport> review;
};

struct ReplanOutcome {
    std::vector<std::string> pruned_ids;  // pending sub-tasks dropped by the new plan
    std::vector<std::string> new_ids;
    int gateway_attempts = 1;
};

// Derives the opening queue from the task description alone. Schema failures
// and empty plans abort the task with a planning error.
SubTaskQueue initial_plan(const std::string& task_desc, const StartupContext& startup,
                          Backend& gateway, const PlannerCaps& caps = {});

// Re-shapes the pending queue after a trigger. Appends the concluded sub-task
// to completed, bumps the revision, assigns lineage to newly created
// sub-tasks, and stops creating past the cap (queue.capped).
ReplanOutcome replan(SubTaskQueue& queue, const ReplanTrigger& trigger, Backend& gateway,
                     const PlannerCaps& caps = {});

// Global end-of-task check against the environment. Schema failures raise a
// planning error; the caller records an unknown-completion status.
ReviewReport final_review(const std::string& task_desc, const SubTaskQueue& queue,
                          const SimEnvironment& env, Backend& gateway);

}  // namespace playbook
