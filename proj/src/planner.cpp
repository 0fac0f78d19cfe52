#include "playbook/planner.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "playbook/text.hpp"

namespace playbook {

Json SubTask::to_json() const {
    Json j;
    j["id"] = id;
    j["desc"] = desc;
    j["goal"] = goal;
    if (!lineage.empty()) j["lineage"] = lineage;
    j["attempt_count"] = attempt_count;
    return j;
}

SubTask SubTask::from_json(const Json& j) {
    SubTask st;
    st.id = j.value("id", std::string{});
    st.desc = j.value("desc", std::string{});
    st.goal = j.value("goal", std::string{});
    st.lineage = j.value("lineage", std::string{});
    st.attempt_count = j.value("attempt_count", 0);
    if (trim(st.desc).empty() || trim(st.goal).empty()) {
        throw ParseError("sub-task '" + st.id + "' needs non-empty desc and goal");
    }
    return st;
}

Json SubTaskQueue::to_json() const {
    Json j;
    j["revision"] = revision;
    j["created_total"] = created_total;
    j["capped"] = capped;
    Json pending_json = Json::array();
    for (const auto& st : pending) pending_json.push_back(st.to_json());
    j["pending"] = std::move(pending_json);
    Json completed_json = Json::array();
    for (const auto& [st, verdict] : completed) {
        completed_json.push_back(Json{{"id", st.id}, {"flag", flag_name(verdict.flag)}});
    }
    j["completed"] = std::move(completed_json);
    return j;
}

Json ReviewReport::to_json() const {
    Json j;
    j["overall_complete"] = overall_complete;
    j["summary"] = summary;
    Json items = Json::array();
    for (const auto& r : residual_items) items.push_back(r);
    j["residual_items"] = std::move(items);
    return j;
}

ReviewReport ReviewReport::from_json(const Json& j) {
    ReviewReport r;
    r.overall_complete = j.value("overall_complete", false);
    r.summary = j.value("summary", std::string{});
    if (j.contains("residual_items")) {
        for (const auto& item : j.at("residual_items")) {
            r.residual_items.push_back(item.get<std::string>());
        }
    }
    return r;
}

namespace {

std::string next_subtask_id(int created_total) {
    std::ostringstream out;
    out << "st-" << std::setw(3) << std::setfill('0') << (created_total + 1);
    return out.str();
}

ResponseSchema plan_schema(std::set<std::string> known_ids, bool allow_empty) {
    return ResponseSchema{
        "plan", [known_ids = std::move(known_ids), allow_empty](const Json& j) -> std::string {
            if (!j.is_object() || !j.contains("plan") || !j.at("plan").is_array()) {
                return "reply must be an object with a 'plan' list";
            }
            const Json& plan = j.at("plan");
            if (!allow_empty && plan.empty()) return "the plan needs at least one sub-task";
            std::set<std::string> seen;
            for (const Json& item : plan) {
                if (!item.is_object()) return "every plan item must be an object";
                if (item.contains("id")) {
                    const std::string id =
                        item.at("id").is_string() ? item.at("id").get<std::string>() : "";
                    if (known_ids.count(id) == 0) {
                        return "plan item references unknown sub-task id '" + id + "'";
                    }
                    if (!seen.insert(id).second) return "duplicate sub-task id '" + id + "'";
                } else {
                    if (trim(item.value("desc", std::string{})).empty() ||
                        trim(item.value("goal", std::string{})).empty()) {
                        return "new plan items need non-empty 'desc' and 'goal'";
                    }
                }
            }
            return "";
        }};
}

Completion planner_call(Backend& gateway, CompletionRequest request) {
    try {
        return complete(gateway, request);
    } catch (const GatewayError& e) {
        if (e.retryable) throw;
        throw PlanningError(e.what());
    }
}

std::string render_pending(const std::vector<SubTask>& pending) {
    std::ostringstream out;
    for (const auto& st : pending) {
        out << "- " << st.id << ": " << st.desc << " (goal: " << st.goal << ")\n";
    }
    return out.str();
}

}  // namespace

SubTaskQueue initial_plan(const std::string& task_desc, const StartupContext& startup,
                          Backend& gateway, const PlannerCaps& caps) {
    if (trim(task_desc).empty()) throw PlanningError("task description is empty");

    CompletionRequest req;
    std::string system =
        "You are the planning half of an autonomous task agent. You decompose a task into an "
        "ordered queue of sub-tasks, each a pair of scope ('desc') and evaluation basis "
        "('goal').";
    if (!startup.strategic_text.empty()) {
        system += "\n\nStrategic experience:\n" + startup.strategic_text;
    }
    req.messages.push_back({MessageRole::system, system});

    std::ostringstream user;
    user << "Produce the initial plan for the task below as an ordered list of sub-tasks.\n"
         << "Task: " << task_desc << "\n";
    if (!startup.sop_index_text.empty()) {
        user << "Available procedural memory (index only):\n" << startup.sop_index_text;
    }
    user << "Reply with a fenced json object: {\"plan\": [{\"desc\": \"...\", \"goal\": "
            "\"...\"}, ...]} with at least one sub-task.";
    req.messages.push_back({MessageRole::user, user.str()});
    req.schema = plan_schema({}, /*allow_empty=*/false);

    const Completion completion = planner_call(gateway, std::move(req));

    SubTaskQueue queue;
    queue.revision = 1;
    for (const Json& item : completion.parsed.at("plan")) {
        if (queue.created_total >= caps.max_subtasks) {
            queue.capped = true;
            break;
        }
        SubTask st;
        st.id = next_subtask_id(queue.created_total);
        st.desc = item.at("desc").get<std::string>();
        st.goal = item.at("goal").get<std::string>();
        queue.pending.push_back(std::move(st));
        ++queue.created_total;
    }
    return queue;
}

ReplanOutcome replan(SubTaskQueue& queue, const ReplanTrigger& trigger, Backend& gateway,
                     const PlannerCaps& caps) {
    CompletionRequest req;
    req.messages.push_back(
        {MessageRole::system,
         "You are the planning half of an autonomous task agent. You update the pending "
         "sub-task queue after new information."});

    std::ostringstream user;
    user << "Produce the updated plan.\n";
    std::string lineage_parent;
    if (trigger.kind == ReplanTrigger::Kind::subtask_concluded) {
        const SubTask& st = trigger.subtask.value();
        lineage_parent = st.id;
        user << "Concluded sub-task " << st.id << " ('" << st.desc << "') with verdict: "
             << (trigger.verdict.has_value() ? flag_name(trigger.verdict->flag) : "unknown")
             << ".\n";
        if (trigger.failure.has_value()) {
            user << "Failure report:\n" << trigger.failure->render();
        }
    } else {
        const ReviewReport& review = trigger.review.value();
        user << "The final review found the task incomplete.\n"
             << "Review summary: " << review.summary << "\n";
        if (!review.residual_items.empty()) {
            user << "Residual objectives:\n";
            for (const auto& r : review.residual_items) user << "- " << r << "\n";
        }
    }
    user << "Current pending sub-tasks:\n"
         << (queue.pending.empty() ? std::string{"(none)\n"} : render_pending(queue.pending))
         << "Keep a pending sub-task by listing {\"id\": \"st-...\"}; add new sub-tasks as "
            "{\"desc\": \"...\", \"goal\": \"...\"}; omit an id to prune it. Reply with a "
            "fenced json object {\"plan\": [...]} in execution order.";
    req.messages.push_back({MessageRole::user, user.str()});

    std::set<std::string> known_ids;
    for (const auto& st : queue.pending) known_ids.insert(st.id);
    req.schema = plan_schema(known_ids, /*allow_empty=*/true);

    const Completion completion = planner_call(gateway, std::move(req));

    if (trigger.kind == ReplanTrigger::Kind::subtask_concluded) {
        queue.completed.emplace_back(trigger.subtask.value(),
                                     trigger.verdict.value_or(Verdict{}));
    }
    ++queue.revision;

    std::vector<SubTask> old_pending = std::move(queue.pending);
    queue.pending.clear();

    ReplanOutcome outcome;
    outcome.gateway_attempts = completion.attempts;
    std::set<std::string> kept;
    for (const Json& item : completion.parsed.at("plan")) {
        if (item.contains("id")) {
            const std::string id = item.at("id").get<std::string>();
            auto it = std::find_if(old_pending.begin(), old_pending.end(),
                                   [&](const SubTask& st) { return st.id == id; });
            if (it != old_pending.end()) {
                queue.pending.push_back(*it);
                kept.insert(id);
            }
            continue;
        }
        if (queue.created_total >= caps.max_subtasks) {
            queue.capped = true;
            continue;
        }
        SubTask st;
        st.id = next_subtask_id(queue.created_total);
        st.desc = item.at("desc").get<std::string>();
        st.goal = item.at("goal").get<std::string>();
        st.lineage = lineage_parent;
        outcome.new_ids.push_back(st.id);
        queue.pending.push_back(std::move(st));
        ++queue.created_total;
    }
    for (const auto& st : old_pending) {
        if (kept.count(st.id) == 0) outcome.pruned_ids.push_back(st.id);
    }
    return outcome;
}

ReviewReport final_review(const std::string& task_desc, const SubTaskQueue& queue,
                          const SimEnvironment& env, Backend& gateway) {
    CompletionRequest req;
    req.messages.push_back(
        {MessageRole::system,
         "You are the planning half of an autonomous task agent, checking whether the overall "
         "task objectives have been met."});

    std::ostringstream user;
    user << "Perform the final review of the task against the global environment state.\n"
         << "Task: " << task_desc << "\n"
         << "Executed sub-tasks:\n";
    for (const auto& [st, verdict] : queue.completed) {
        user << "- " << st.id << ": " << st.desc << " -> " << flag_name(verdict.flag) << "\n";
    }
    user << "Environment state:\n" << env.describe()
         << "Reply with a fenced json object {\"overall_complete\": true|false, \"summary\": "
            "\"...\", \"residual_items\": [\"...\"]}; residual_items must be empty when "
            "overall_complete is true.";
    req.messages.push_back({MessageRole::user, user.str()});

    req.schema = ResponseSchema{"review", [](const Json& j) -> std::string {
        if (!j.is_object() || !j.contains("overall_complete") ||
            !j.at("overall_complete").is_boolean()) {
            return "reply must be an object with a boolean 'overall_complete'";
        }
        if (j.contains("residual_items") && !j.at("residual_items").is_array()) {
            return "'residual_items' must be a list";
        }
        const bool complete = j.at("overall_complete").get<bool>();
        const bool has_residuals =
            j.contains("residual_items") && !j.at("residual_items").empty();
        if (complete && has_residuals) {
            return "overall_complete=true conflicts with non-empty residual_items";
        }
        return "";
    }};

    const Completion completion = planner_call(gateway, std::move(req));
    return ReviewReport::from_json(completion.parsed);
}

}  // namespace playbook
