#pragma once

#include <string>
#include <vector>

#include "playbook/common.hpp"
#include "playbook/memory.hpp"
#include "playbook/tools.hpp"

namespace playbook {

struct SubTask {
    std::string id;
    std::string desc;       // scope of the sub-task
    std::string goal;       // evaluation basis
    std::string lineage;    // parent sub-task id when spawned by replanning
    int attempt_count = 0;  // 0, 1, or 2 (one execution + one retry)

    Json to_json() const;
    static SubTask from_json(const Json& j);
};

enum class ExecMode { normal, retry };
enum class TrajectoryOutcome { agent_declared_done, budget_exhausted, gateway_error };

std::string exec_mode_name(ExecMode mode);
ExecMode exec_mode_from_string(const std::string& name);
std::string outcome_name(TrajectoryOutcome outcome);
TrajectoryOutcome outcome_from_string(const std::string& name);

struct Step {
    std::string thought;
    Action action;
    Observation observation;
    int index = 0;  // 1-based, contiguous

    Json to_json() const;
    static Step from_json(const Json& j);
};

struct SubTaskTrajectory {
    std::string subtask_id;
    std::vector<Step> steps;
    ExecMode mode = ExecMode::normal;
    TrajectoryOutcome outcome = TrajectoryOutcome::budget_exhausted;
    std::string done_summary;  // the agent's claimed result when it declared done
    std::string error;         // populated on a gateway_error outcome
    StartupContext startup_snapshot;

    Json to_json() const;
    static SubTaskTrajectory from_json(const Json& j);
};

}  // namespace playbook
