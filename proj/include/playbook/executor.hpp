#pragma once

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

// Fixed protocol strings. Tests assert on these, so they live in one place.
inline constexpr const char* kMemoryEncouragement =
    "Before your first action, check the procedural memory index above and retrieve any "
    "relevant guide with access_guide.";
inline constexpr const char* kRetryFramingHeader =
    "This is a retry of a failed attempt. Address the failure report below.";
inline constexpr const char* kTruncationMarkerPrefix = "[earlier steps omitted: ";
inline constexpr const char* kProtocolViolationTool = "(protocol)";

struct ExecutorConfig {
    int action_budget = 20;  // N
    int keep_newest = 12;    // verbatim steps kept under context truncation
    int max_reasks = 2;      // protocol re-asks per turn
};

struct SubtaskRunInputs {
    std::string task_desc;
    SubTask subtask;
    ExecMode mode = ExecMode::normal;
    // Rendered verdict/failure records from earlier attempts in this lineage.
    std::vector<std::string> lineage_records;
    // The prior attempt's failure report; required context in retry mode.
    const FailureReport* prior_failure = nullptr;
};

struct AgentTurn {
    enum class Kind { action, done, invalid };
    Kind kind = Kind::invalid;
    Action action;
    std::string done_summary;
    std::string thought;
    std::string problem;  // set for invalid turns
};

// Classifies one assistant reply: a structured tool call, an explicit done
// declaration, or a protocol violation.
AgentTurn parse_agent_turn(const ChatMessage& message);

// Deterministic prompt assembly: system message (strategic memory + tool
// catalog + loop protocol), sub-task framing (with SOP index and the memory
// encouragement in normal mode; failure report instead in retry mode), prior
// lineage records, then the step history, truncated to the newest
// config.keep_newest steps with a single summary marker.
std::vector<ChatMessage> assemble_context(const SubtaskRunInputs& in,
                                          const ExecutorConfig& config, const MemoryStore& store,
                                          const ToolRegistry& registry,
                                          const std::vector<Step>& history);

// The budgeted ReAct loop for one sub-task attempt. Gateway failures truncate
// the trajectory with a gateway_error outcome instead of raising.
SubTaskTrajectory run_subtask(const SubtaskRunInputs& in, const ExecutorConfig& config,
                              const MemoryStore& store, const ToolRegistry& registry,
                              SimEnvironment& env, Backend& gateway, Backend* vision = nullptr,
                              RunLog* log = nullptr);

}  // namespace playbook
