#include "playbook/executor.hpp"

#include <algorithm>
#include <sstream>

#include "playbook/text.hpp"

namespace playbook {

std::string exec_mode_name(ExecMode mode) {
    return mode == ExecMode::normal ? "normal" : "retry";
}

ExecMode exec_mode_from_string(const std::string& name) {
    if (name == "normal") return ExecMode::normal;
    if (name == "retry") return ExecMode::retry;
    throw ParseError("unknown execution mode '" + name + "'");
}

std::string outcome_name(TrajectoryOutcome outcome) {
    switch (outcome) {
        case TrajectoryOutcome::agent_declared_done: return "agent-declared-done";
        case TrajectoryOutcome::budget_exhausted: return "budget-exhausted";
        case TrajectoryOutcome::gateway_error: return "gateway-error";
    }
    return "budget-exhausted";
}

TrajectoryOutcome outcome_from_string(const std::string& name) {
    if (name == "agent-declared-done") return TrajectoryOutcome::agent_declared_done;
    if (name == "budget-exhausted") return TrajectoryOutcome::budget_exhausted;
    if (name == "gateway-error") return TrajectoryOutcome::gateway_error;
    throw ParseError("unknown trajectory outcome '" + name + "'");
}

Json Step::to_json() const {
    Json j;
    j["index"] = index;
    j["thought"] = thought;
    j["action"] = action.to_json();
    j["observation"] = observation.to_json();
    return j;
}

Step Step::from_json(const Json& j) {
    Step s;
    s.index = j.value("index", 0);
    s.thought = j.value("thought", std::string{});
    if (j.contains("action")) s.action = Action::from_json(j.at("action"));
    if (j.contains("observation")) s.observation = Observation::from_json(j.at("observation"));
    return s;
}

Json SubTaskTrajectory::to_json() const {
    Json j;
    j["subtask_id"] = subtask_id;
    j["mode"] = exec_mode_name(mode);
    j["outcome"] = outcome_name(outcome);
    j["done_summary"] = done_summary;
    if (!error.empty()) j["error"] = error;
    Json steps_json = Json::array();
    for (const auto& s : steps) steps_json.push_back(s.to_json());
    j["steps"] = std::move(steps_json);
    j["startup"] = Json{{"strategic_text", startup_snapshot.strategic_text},
                        {"sop_index_text", startup_snapshot.sop_index_text},
                        {"tool_static_text", startup_snapshot.tool_static_text}};
    return j;
}

SubTaskTrajectory SubTaskTrajectory::from_json(const Json& j) {
    SubTaskTrajectory t;
    t.subtask_id = j.value("subtask_id", std::string{});
    t.mode = exec_mode_from_string(j.value("mode", std::string{"normal"}));
    t.outcome = outcome_from_string(j.value("outcome", std::string{"budget-exhausted"}));
    t.done_summary = j.value("done_summary", std::string{});
    t.error = j.value("error", std::string{});
    if (j.contains("steps")) {
        for (const auto& s : j.at("steps")) t.steps.push_back(Step::from_json(s));
    }
    if (j.contains("startup")) {
        const Json& s = j.at("startup");
        t.startup_snapshot.strategic_text = s.value("strategic_text", std::string{});
        t.startup_snapshot.sop_index_text = s.value("sop_index_text", std::string{});
        t.startup_snapshot.tool_static_text = s.value("tool_static_text", std::string{});
    }
    return t;
}

namespace {

const char* kLoopProtocol =
    "In each turn reply with exactly one of:\n"
    "1. One action:\n"
    "Thought: <your reasoning>\n"
    "```json\n"
    "{\"tool\": \"<tool name>\", \"arguments\": { <flat argument map> }}\n"
    "```\n"
    "2. A done declaration once the sub-task goal is met:\n"
    "Thought: <your reasoning>\n"
    "```json\n"
    "{\"done\": true, \"summary\": \"<what was accomplished>\"}\n"
    "```\n"
    "Deliverables must live in the environment; the summary is text only.";

std::string thought_of(const std::string& content) {
    const std::size_t fence = content.find("```");
    std::string head = fence == std::string::npos ? content : content.substr(0, fence);
    head = trim(head);
    if (head.rfind("Thought:", 0) == 0) head = trim(head.substr(8));
    return head;
}

std::string render_action_message(const Step& step) {
    Json call;
    call["tool"] = step.action.tool;
    call["arguments"] = step.action.arguments;
    return "Thought: " + step.thought + "\n```json\n" + call.dump() + "\n```";
}

}  // namespace

AgentTurn parse_agent_turn(const ChatMessage& message) {
    AgentTurn turn;
    turn.thought = thought_of(message.content);

    Json payload;
    if (!message.tool_call.is_null() && !message.tool_call.empty()) {
        payload = message.tool_call;
        if (payload.contains("name") && !payload.contains("tool")) {
            payload["tool"] = payload.at("name");
        }
    } else {
        auto extracted = extract_json(message.content);
        if (!extracted.has_value()) {
            turn.kind = AgentTurn::Kind::invalid;
            turn.problem = "the reply contains no json payload";
            return turn;
        }
        payload = std::move(*extracted);
    }

    if (payload.is_object() && payload.contains("done") && payload.at("done").is_boolean() &&
        payload.at("done").get<bool>()) {
        turn.kind = AgentTurn::Kind::done;
        turn.done_summary = payload.value("summary", std::string{});
        return turn;
    }
    if (payload.is_object() && payload.contains("tool") && payload.at("tool").is_string()) {
        try {
            turn.action = Action::from_json(payload);
            turn.kind = AgentTurn::Kind::action;
            return turn;
        } catch (const ParseError& e) {
            turn.kind = AgentTurn::Kind::invalid;
            turn.problem = e.what();
            return turn;
        }
    }
    turn.kind = AgentTurn::Kind::invalid;
    turn.problem = "the json payload is neither an action ({\"tool\": ...}) nor a done "
                   "declaration ({\"done\": true, ...})";
    return turn;
}

std::vector<ChatMessage> assemble_context(const SubtaskRunInputs& in,
                                          const ExecutorConfig& config, const MemoryStore& store,
                                          const ToolRegistry& registry,
                                          const std::vector<Step>& history) {
    std::vector<ChatMessage> messages;
    const StartupContext startup = store.render_startup_context();

    std::ostringstream system;
    system << "You are an autonomous agent executing one sub-task of a larger task inside a "
              "simulated workspace.\n";
    if (!startup.strategic_text.empty()) {
        system << "\nStrategic experience:\n" << startup.strategic_text;
    }
    system << "\nAvailable tools:\n" << catalog(registry, store) << "\n" << kLoopProtocol;
    messages.push_back({MessageRole::system, system.str()});

    std::ostringstream framing;
    framing << "Task: " << in.task_desc << "\n"
            << "Sub-task " << in.subtask.id << ": " << in.subtask.desc << "\n"
            << "Goal: " << in.subtask.goal << "\n";
    if (in.mode == ExecMode::normal) {
        if (!startup.sop_index_text.empty()) {
            framing << "Procedural memory index:\n" << startup.sop_index_text;
        }
        framing << kMemoryEncouragement;
    } else {
        framing << kRetryFramingHeader << "\n";
        if (in.prior_failure != nullptr) framing << in.prior_failure->render();
    }
    messages.push_back({MessageRole::user, framing.str()});

    for (const auto& record : in.lineage_records) {
        messages.push_back({MessageRole::user, "Earlier attempt record:\n" + record});
    }

    std::size_t first = 0;
    if (config.keep_newest >= 0 &&
        history.size() > static_cast<std::size_t>(config.keep_newest)) {
        first = history.size() - static_cast<std::size_t>(config.keep_newest);
        messages.push_back({MessageRole::user, std::string(kTruncationMarkerPrefix) +
                                                   std::to_string(first) +
                                                   " steps, newest shown verbatim]"});
    }
    for (std::size_t i = first; i < history.size(); ++i) {
        const Step& step = history[i];
        messages.push_back({MessageRole::assistant, render_action_message(step)});
        messages.push_back({MessageRole::user, "Observation (step " + std::to_string(step.index) +
                                                   "):\n" + step.observation.render()});
    }
    return messages;
}

SubTaskTrajectory run_subtask(const SubtaskRunInputs& in, const ExecutorConfig& config,
                              const MemoryStore& store, const ToolRegistry& registry,
                              SimEnvironment& env, Backend& gateway, Backend* vision,
                              RunLog* log) {
    if (in.subtask.attempt_count >= 2) {
        throw ValidationError("sub-task '" + in.subtask.id + "' already used both attempts");
    }
    if (config.action_budget < 1) throw ValidationError("action budget must be >= 1");

    SubTaskTrajectory traj;
    traj.subtask_id = in.subtask.id;
    traj.mode = in.mode;
    traj.startup_snapshot = store.render_startup_context();

    DispatchContext ctx{env, store, vision != nullptr ? vision : &gateway};

    for (int index = 1; index <= config.action_budget; ++index) {
        std::vector<ChatMessage> messages =
            assemble_context(in, config, store, registry, traj.steps);

        AgentTurn turn;
        std::string raw_reply;
        int reasks = 0;
        try {
            const int turns = 1 + std::max(0, config.max_reasks);
            for (int attempt = 1; attempt <= turns; ++attempt) {
                CompletionRequest req;
                req.messages = messages;
                raw_reply = gateway.chat(req);
                turn = parse_agent_turn(ChatMessage{MessageRole::assistant, raw_reply});
                if (turn.kind != AgentTurn::Kind::invalid) break;
                reasks = attempt;
                messages.push_back({MessageRole::assistant, raw_reply});
                messages.push_back(
                    {MessageRole::user, "Protocol violation: " + turn.problem +
                                            ". Reply with exactly one action or one done "
                                            "declaration as instructed."});
            }
        } catch (const GatewayError& e) {
            traj.outcome = TrajectoryOutcome::gateway_error;
            traj.error = e.what();
            if (log != nullptr) {
                log->append("gateway_error",
                            Json{{"subtask", in.subtask.id}, {"error", traj.error}});
            }
            return traj;
        }

        if (turn.kind == AgentTurn::Kind::done) {
            traj.outcome = TrajectoryOutcome::agent_declared_done;
            traj.done_summary = turn.done_summary;
            if (log != nullptr) {
                log->append("done_declared", Json{{"subtask", in.subtask.id},
                                                  {"mode", exec_mode_name(in.mode)},
                                                  {"summary", turn.done_summary},
                                                  {"steps", index - 1}});
            }
            return traj;
        }

        Step step;
        step.index = index;
        if (turn.kind == AgentTurn::Kind::invalid) {
            step.thought = trim(raw_reply);
            step.action = Action{kProtocolViolationTool, Json::object(), index};
            step.observation =
                Observation{"protocol violation: " + turn.problem +
                                ". No action was executed; the step still counted against the "
                                "budget.",
                            "", true};
        } else {
            step.thought = turn.thought;
            step.action = turn.action;
            step.action.step_index = index;
            step.observation = dispatch(registry, step.action, ctx);
        }
        traj.steps.push_back(step);

        if (log != nullptr) {
            log->append("step", Json{{"subtask", in.subtask.id},
                                     {"mode", exec_mode_name(in.mode)},
                                     {"index", index},
                                     {"thought", step.thought},
                                     {"action", step.action.to_json()},
                                     {"observation", step.observation.to_json()},
                                     {"observation_hash",
                                      fnv1a64_hex(step.observation.payload)},
                                     {"reasks", reasks}});
        }
    }

    traj.outcome = TrajectoryOutcome::budget_exhausted;
    return traj;
}

}  // namespace playbook
