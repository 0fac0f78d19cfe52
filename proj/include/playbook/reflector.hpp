#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "playbook/common.hpp"
#include "playbook/env.hpp"
#include "playbook/gateway.hpp"
#include "playbook/logging.hpp"
#include "playbook/memory.hpp"
#include "playbook/tools.hpp"
#include "playbook/trajectory.hpp"
#include "playbook/verdict.hpp"

namespace playbook {

struct ReflectorConfig {
    int tool_budget = 5;  // verification actions per evaluation
    int max_reasks = 2;
};

// Asks the gateway for an ordered checklist over the three dimensions. On a
// schema failure this degrades to one generic trajectory-referencing item per
// dimension instead of blocking the run.
Checklist build_checklist(const SubTask& subtask, const SubTaskTrajectory& trajectory,
                          Backend& gateway);

struct Evaluation {
    Verdict verdict;
    std::optional<FailureReport> failure;  // present on failure verdicts
    int gateway_attempts = 0;
};

// Scores the checklist: trajectory-referencing items must cite a step index;
// active-verification items get fresh tool calls (at most config.tool_budget;
// items whose check was skipped fail conservatively). A failure on a
// normal-mode trajectory grants the single retry.
Evaluation evaluate(const SubTask& subtask, const SubTaskTrajectory& trajectory,
                    const Checklist& checklist, SimEnvironment& env,
                    const ToolRegistry& registry, const MemoryStore& store, Backend& gateway,
                    const ReflectorConfig& config = {});

struct DistilledSop {
    SopIndexEntry index;
    SopContent content;
};

// Turns a successful trajectory into an SOP. Every distilled step must cite
// at least one real trajectory step; after bounded re-asks an ungrounded
// distillation is dropped (warning set) rather than stored.
std::optional<DistilledSop> distill_sop(const SubTask& subtask,
                                        const SubTaskTrajectory& trajectory, Backend& gateway,
                                        std::string* warning = nullptr);

struct UpdateReport {
    std::vector<std::string> strategic_upserts;  // dilemmas written
    std::vector<std::string> tool_updates;       // tool names written
    std::vector<std::string> skipped;            // entries rejected with reasons
    std::vector<std::string> unknown_tools;      // flagged by the registry cross-check
    ConsolidationReport consolidation;
    bool rolled_back = false;
    std::string error;

    Json to_json() const;
};

// Digest of one executed sub-task handed to the post-task upgrade prompt.
struct TrajectoryDigest {
    SubTask subtask;
    ExecMode mode = ExecMode::normal;
    TrajectoryOutcome outcome = TrajectoryOutcome::budget_exhausted;
    std::string verdict_flag;  // "success" / "failure" / "" when never evaluated
    int steps = 0;
};

// The full post-task memory upgrade: strategic upserts, tool-memory updates,
// then consolidation. Any gateway failure rolls the store back to its
// pre-update snapshot. On success the store revision always advances.
UpdateReport post_task_update(const std::string& task_id, const std::string& task_desc,
                              const std::vector<TrajectoryDigest>& digests, MemoryStore& store,
                              Backend& gateway, const std::set<std::string>* known_tools,
                              int strategic_cap);

}  // namespace playbook
