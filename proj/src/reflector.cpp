#include "playbook/reflector.hpp"

#include <algorithm>
#include <sstream>

#include "playbook/executor.hpp"
#include "playbook/text.hpp"

namespace playbook {

// --- verdict type plumbing ---------------------------------------------------

std::string dimension_name(ChecklistDimension d) {
    switch (d) {
        case ChecklistDimension::truthfulness: return "truthfulness";
        case ChecklistDimension::deliverable: return "deliverable";
        case ChecklistDimension::data_fidelity: return "data_fidelity";
    }
    return "truthfulness";
}

ChecklistDimension dimension_from_string(const std::string& name) {
    if (name == "truthfulness") return ChecklistDimension::truthfulness;
    if (name == "deliverable") return ChecklistDimension::deliverable;
    if (name == "data_fidelity") return ChecklistDimension::data_fidelity;
    throw ParseError("unknown checklist dimension '" + name + "'");
}

std::string method_name(VerifyMethod m) {
    return m == VerifyMethod::trajectory_reference ? "trajectory_reference"
                                                   : "active_verification";
}

VerifyMethod method_from_string(const std::string& name) {
    if (name == "trajectory_reference") return VerifyMethod::trajectory_reference;
    if (name == "active_verification") return VerifyMethod::active_verification;
    throw ParseError("unknown verification method '" + name + "'");
}

std::string flag_name(VerdictFlag f) {
    return f == VerdictFlag::success ? "success" : "failure";
}

VerdictFlag flag_from_string(const std::string& name) {
    if (name == "success") return VerdictFlag::success;
    if (name == "failure") return VerdictFlag::failure;
    throw ParseError("unknown verdict flag '" + name + "'");
}

Json ChecklistItem::to_json() const {
    return Json{{"dimension", dimension_name(dimension)},
                {"description", description},
                {"method", method_name(method)}};
}

ChecklistItem ChecklistItem::from_json(const Json& j) {
    ChecklistItem item;
    item.dimension = dimension_from_string(j.value("dimension", std::string{}));
    item.description = j.value("description", std::string{});
    item.method = method_from_string(j.value("method", std::string{}));
    return item;
}

Json Checklist::to_json() const {
    Json items_json = Json::array();
    for (const auto& i : items) items_json.push_back(i.to_json());
    return Json{{"items", std::move(items_json)}, {"degraded", degraded}};
}

Checklist Checklist::from_json(const Json& j) {
    Checklist c;
    if (j.contains("items")) {
        for (const auto& i : j.at("items")) c.items.push_back(ChecklistItem::from_json(i));
    }
    c.degraded = j.value("degraded", false);
    return c;
}

Json VerificationCall::to_json() const {
    return Json{{"checklist_item", checklist_item},
                {"action", action.to_json()},
                {"observation", observation.to_json()}};
}

VerificationCall VerificationCall::from_json(const Json& j) {
    VerificationCall c;
    c.checklist_item = j.value("checklist_item", 0);
    if (j.contains("action")) c.action = Action::from_json(j.at("action"));
    if (j.contains("observation")) c.observation = Observation::from_json(j.at("observation"));
    return c;
}

Json VerdictItem::to_json() const {
    Json j;
    j["item"] = item;
    j["passed"] = passed;
    if (evidence_step > 0) j["evidence_step"] = evidence_step;
    if (evidence_check > 0) j["evidence_check"] = evidence_check;
    j["note"] = note;
    return j;
}

VerdictItem VerdictItem::from_json(const Json& j) {
    VerdictItem v;
    v.item = j.value("item", 0);
    v.passed = j.value("passed", false);
    v.evidence_step = j.value("evidence_step", 0);
    v.evidence_check = j.value("evidence_check", 0);
    v.note = j.value("note", std::string{});
    return v;
}

std::string FailureReport::render() const {
    std::ostringstream out;
    out << "Failure report:\nCauses:\n";
    for (const auto& c : causes) out << "- " << c << "\n";
    if (!suggested_remediations.empty()) {
        out << "Suggested remediations:\n";
        for (const auto& r : suggested_remediations) out << "- " << r << "\n";
    }
    if (!evidence_steps.empty()) {
        out << "Evidence steps: ";
        for (std::size_t i = 0; i < evidence_steps.size(); ++i) {
            if (i > 0) out << ", ";
            out << evidence_steps[i];
        }
        out << "\n";
    }
    return out.str();
}

Json FailureReport::to_json() const {
    return Json{{"causes", causes},
                {"suggested_remediations", suggested_remediations},
                {"evidence_steps", evidence_steps}};
}

FailureReport FailureReport::from_json(const Json& j) {
    FailureReport r;
    if (j.contains("causes")) r.causes = j.at("causes").get<std::vector<std::string>>();
    if (j.contains("suggested_remediations")) {
        r.suggested_remediations =
            j.at("suggested_remediations").get<std::vector<std::string>>();
    }
    if (j.contains("evidence_steps")) {
        r.evidence_steps = j.at("evidence_steps").get<std::vector<int>>();
    }
    return r;
}

Json Verdict::to_json() const {
    Json items_json = Json::array();
    for (const auto& i : items) items_json.push_back(i.to_json());
    Json checks_json = Json::array();
    for (const auto& c : checks) checks_json.push_back(c.to_json());
    return Json{{"flag", flag_name(flag)},
                {"items", std::move(items_json)},
                {"checks", std::move(checks_json)},
                {"retry_granted", retry_granted},
                {"degraded", degraded}};
}

Verdict Verdict::from_json(const Json& j) {
    Verdict v;
    v.flag = flag_from_string(j.value("flag", std::string{"failure"}));
    if (j.contains("items")) {
        for (const auto& i : j.at("items")) v.items.push_back(VerdictItem::from_json(i));
    }
    if (j.contains("checks")) {
        for (const auto& c : j.at("checks")) v.checks.push_back(VerificationCall::from_json(c));
    }
    v.retry_granted = j.value("retry_granted", false);
    v.degraded = j.value("degraded", false);
    return v;
}

// --- rendering helpers --------------------------------------------------------

namespace {

const char* kReflectorSystem =
    "You are the independent reflector. You verify sub-task outcomes strictly against the "
    "recorded trajectory and the live environment, never against the agent's claims alone.";

std::string render_subtask(const SubTask& subtask) {
    return "Sub-task " + subtask.id + ": " + subtask.desc + "\nGoal: " + subtask.goal + "\n";
}

std::string render_trajectory(const SubTaskTrajectory& trajectory) {
    std::ostringstream out;
    out << "Trajectory (mode " << exec_mode_name(trajectory.mode) << ", outcome "
        << outcome_name(trajectory.outcome) << ", " << trajectory.steps.size() << " steps):\n";
    for (const auto& step : trajectory.steps) {
        out << "Step " << step.index << ":\n";
        out << "  thought: " << step.thought << "\n";
        out << "  action: " << step.action.tool << " " << step.action.arguments.dump() << "\n";
        out << (step.observation.error_flag ? "  observation (error): " : "  observation: ")
            << step.observation.render() << "\n";
    }
    if (!trajectory.done_summary.empty()) {
        out << "Agent summary: " << trajectory.done_summary << "\n";
    }
    if (!trajectory.error.empty()) {
        out << "Engine error: " << trajectory.error << "\n";
    }
    return out.str();
}

std::string render_checklist_text(const Checklist& checklist) {
    std::ostringstream out;
    out << "Checklist:\n";
    for (std::size_t i = 0; i < checklist.items.size(); ++i) {
        const ChecklistItem& item = checklist.items[i];
        out << (i + 1) << ". [" << dimension_name(item.dimension) << " / "
            << method_name(item.method) << "] " << item.description << "\n";
    }
    return out.str();
}

std::string string_list_error(const Json& j, const std::string& field) {
    if (!j.is_array()) return "'" + field + "' must be an array of strings";
    for (const auto& v : j) {
        if (!v.is_string()) return "'" + field + "' must contain only strings";
    }
    return "";
}

ResponseSchema checklist_schema() {
    ResponseSchema schema;
    schema.name = "checklist";
    schema.validate = [](const Json& j) -> std::string {
        if (!j.is_object() || !j.contains("items") || !j.at("items").is_array()) {
            return "expected an object with an 'items' array";
        }
        const Json& items = j.at("items");
        if (items.empty()) return "'items' must not be empty";
        for (std::size_t i = 0; i < items.size(); ++i) {
            const Json& item = items[i];
            if (!item.is_object()) return "item " + std::to_string(i + 1) + " must be an object";
            const std::string dim = item.value("dimension", std::string{});
            if (dim != "truthfulness" && dim != "deliverable" && dim != "data_fidelity") {
                return "item " + std::to_string(i + 1) + " has invalid dimension '" + dim + "'";
            }
            if (trim(item.value("description", std::string{})).empty()) {
                return "item " + std::to_string(i + 1) + " needs a non-empty description";
            }
            const std::string method = item.value("method", std::string{});
            if (method != "trajectory_reference" && method != "active_verification") {
                return "item " + std::to_string(i + 1) + " has invalid method '" + method + "'";
            }
        }
        return "";
    };
    return schema;
}

Checklist degraded_checklist() {
    Checklist c;
    c.degraded = true;
    c.items.push_back({ChecklistDimension::truthfulness,
                       "Every conclusion the agent reported is grounded in a recorded "
                       "observation.",
                       VerifyMethod::trajectory_reference});
    c.items.push_back({ChecklistDimension::deliverable,
                       "The deliverable the goal asks for was actually produced in the "
                       "environment.",
                       VerifyMethod::trajectory_reference});
    c.items.push_back({ChecklistDimension::data_fidelity,
                       "Data the agent reported matches the environment contents without "
                       "invention.",
                       VerifyMethod::trajectory_reference});
    return c;
}

}  // namespace

// --- checklist ----------------------------------------------------------------

Checklist build_checklist(const SubTask& subtask, const SubTaskTrajectory& trajectory,
                          Backend& gateway) {
    std::ostringstream user;
    user << "Produce the ordered checklist for verifying this sub-task across the three "
            "dimensions: truthfulness (conclusions grounded in observations), deliverable "
            "(the requested artifact exists), data_fidelity (reported data matches the "
            "environment).\n\n"
         << render_subtask(subtask) << "\n"
         << render_trajectory(trajectory) << "\n"
         << "Reply with a fenced json object of shape "
            "{\"items\": [{\"dimension\": \"truthfulness\" | \"deliverable\" | "
            "\"data_fidelity\", \"description\": \"...\", \"method\": "
            "\"trajectory_reference\" | \"active_verification\"}]} with at least one item. "
            "Use active_verification for anything that should be re-checked against the live "
            "environment.";

    CompletionRequest req;
    req.messages = {{MessageRole::system, kReflectorSystem}, {MessageRole::user, user.str()}};
    req.schema = checklist_schema();

    try {
        const Completion c = complete(gateway, req);
        Checklist out;
        for (const auto& item : c.parsed.at("items")) {
            out.items.push_back(ChecklistItem::from_json(item));
        }
        return out;
    } catch (const GatewayError&) {
        return degraded_checklist();
    }
}

// --- evaluation -----------------------------------------------------------------

namespace {

ResponseSchema checks_schema(const Checklist& checklist) {
    ResponseSchema schema;
    schema.name = "verification_actions";
    const std::size_t n = checklist.items.size();
    std::vector<bool> active(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        active[i] = checklist.items[i].method == VerifyMethod::active_verification;
    }
    schema.validate = [n, active](const Json& j) -> std::string {
        if (!j.is_object() || !j.contains("checks") || !j.at("checks").is_array()) {
            return "expected an object with a 'checks' array";
        }
        const Json& checks = j.at("checks");
        for (std::size_t i = 0; i < checks.size(); ++i) {
            const Json& c = checks[i];
            if (!c.is_object()) return "check " + std::to_string(i + 1) + " must be an object";
            if (!c.contains("item") || !c.at("item").is_number_integer()) {
                return "check " + std::to_string(i + 1) + " needs an integer 'item'";
            }
            const int item = c.at("item").get<int>();
            if (item < 1 || static_cast<std::size_t>(item) > n) {
                return "check " + std::to_string(i + 1) + " cites unknown checklist item " +
                       std::to_string(item);
            }
            if (!active[static_cast<std::size_t>(item - 1)]) {
                return "check " + std::to_string(i + 1) + " targets item " +
                       std::to_string(item) + ", which is not an active_verification item";
            }
            if (trim(c.value("tool", std::string{})).empty()) {
                return "check " + std::to_string(i + 1) + " needs a non-empty 'tool'";
            }
            if (c.contains("arguments") && !c.at("arguments").is_object()) {
                return "check " + std::to_string(i + 1) + " 'arguments' must be an object";
            }
        }
        return "";
    };
    return schema;
}

ResponseSchema verdict_schema(const Checklist& checklist, std::size_t step_count,
                              std::size_t issued_checks) {
    ResponseSchema schema;
    schema.name = "verdict";
    const std::size_t n = checklist.items.size();
    std::vector<VerifyMethod> methods;
    methods.reserve(n);
    for (const auto& item : checklist.items) methods.push_back(item.method);

    schema.validate = [n, methods, step_count, issued_checks](const Json& j) -> std::string {
        if (!j.is_object()) return "expected a json object";
        const std::string flag = j.value("flag", std::string{});
        if (flag != "success" && flag != "failure") {
            return "'flag' must be \"success\" or \"failure\"";
        }
        if (!j.contains("items") || !j.at("items").is_array()) {
            return "expected an 'items' array";
        }
        const Json& items = j.at("items");
        std::vector<bool> seen(n, false);
        bool all_passed = true;
        for (std::size_t i = 0; i < items.size(); ++i) {
            const Json& it = items[i];
            const std::string label = "verdict item " + std::to_string(i + 1);
            if (!it.is_object()) return label + " must be an object";
            if (!it.contains("item") || !it.at("item").is_number_integer()) {
                return label + " needs an integer 'item'";
            }
            const int idx = it.at("item").get<int>();
            if (idx < 1 || static_cast<std::size_t>(idx) > n) {
                return label + " cites unknown checklist item " + std::to_string(idx);
            }
            if (seen[static_cast<std::size_t>(idx - 1)]) {
                return label + " repeats checklist item " + std::to_string(idx);
            }
            seen[static_cast<std::size_t>(idx - 1)] = true;
            if (!it.contains("passed") || !it.at("passed").is_boolean()) {
                return label + " needs a boolean 'passed'";
            }
            if (!it.at("passed").get<bool>()) all_passed = false;
            if (!it.contains("evidence") || !it.at("evidence").is_object()) {
                return label + " needs an 'evidence' object";
            }
            const Json& ev = it.at("evidence");
            if (methods[static_cast<std::size_t>(idx - 1)] ==
                VerifyMethod::trajectory_reference) {
                if (!ev.contains("step") || !ev.at("step").is_number_integer()) {
                    return label + " must cite a trajectory step as {\"step\": k}";
                }
                const int s = ev.at("step").get<int>();
                if (s < 1 || static_cast<std::size_t>(s) > step_count) {
                    return label + " cites nonexistent trajectory step " + std::to_string(s);
                }
            } else {
                if (!ev.contains("check") || !ev.at("check").is_number_integer()) {
                    return label + " must cite a verification check as {\"check\": j}";
                }
                const int c = ev.at("check").get<int>();
                if (c < 1 || static_cast<std::size_t>(c) > issued_checks) {
                    return label + " cites nonexistent verification check " + std::to_string(c);
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!seen[i]) {
                return "checklist item " + std::to_string(i + 1) + " was never scored";
            }
        }
        if (flag == "success" && !all_passed) {
            return "flag is \"success\" but at least one item failed";
        }
        if (flag == "failure") {
            if (!j.contains("failure") || !j.at("failure").is_object()) {
                return "a failure verdict needs a 'failure' object";
            }
            const Json& f = j.at("failure");
            if (!f.contains("causes") || !f.at("causes").is_array() || f.at("causes").empty()) {
                return "'failure.causes' must be a non-empty array";
            }
            for (const auto& c : f.at("causes")) {
                if (!c.is_string() || trim(c.get<std::string>()).empty()) {
                    return "'failure.causes' must contain non-empty strings";
                }
            }
            if (f.contains("remediations")) {
                const std::string err = string_list_error(f.at("remediations"), "remediations");
                if (!err.empty()) return err;
            }
            if (f.contains("evidence_steps")) {
                if (!f.at("evidence_steps").is_array()) {
                    return "'failure.evidence_steps' must be an array";
                }
                for (const auto& s : f.at("evidence_steps")) {
                    if (!s.is_number_integer() || s.get<int>() < 1 ||
                        static_cast<std::size_t>(s.get<int>()) > step_count) {
                        return "'failure.evidence_steps' cites a nonexistent trajectory step";
                    }
                }
            }
        }
        return "";
    };
    return schema;
}

std::string render_checks(const std::vector<VerificationCall>& checks) {
    if (checks.empty()) return "Verification observations: (none)\n";
    std::ostringstream out;
    out << "Verification observations:\n";
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const VerificationCall& c = checks[i];
        out << "Check " << (i + 1) << " (item " << c.checklist_item << "): " << c.action.tool
            << " " << c.action.arguments.dump() << "\n"
            << (c.observation.error_flag ? "  result (error): " : "  result: ")
            << c.observation.render() << "\n";
    }
    return out.str();
}

std::string verdict_reply_shape() {
    return "Reply with a fenced json object of shape "
           "{\"flag\": \"success\" | \"failure\", "
           "\"items\": [{\"item\": <checklist number>, \"passed\": true | false, "
           "\"evidence\": {\"step\": <trajectory step>} or {\"check\": <verification "
           "check>}, \"note\": \"...\"}], "
           "\"failure\": {\"causes\": [\"...\"], \"remediations\": [\"...\"], "
           "\"evidence_steps\": [<trajectory steps>]}}. "
           "Score every checklist item exactly once. Cite {\"step\": k} for "
           "trajectory_reference items and {\"check\": j} for active_verification items. "
           "Include the failure object only when flag is \"failure\".";
}

}  // namespace

Evaluation evaluate(const SubTask& subtask, const SubTaskTrajectory& trajectory,
                    const Checklist& checklist, SimEnvironment& env,
                    const ToolRegistry& registry, const MemoryStore& store, Backend& gateway,
                    const ReflectorConfig& config) {
    if (checklist.items.empty()) {
        throw ValidationError("evaluate: checklist must contain at least one item");
    }

    Evaluation out;
    Verdict& verdict = out.verdict;
    verdict.degraded = checklist.degraded;
    const std::size_t n_items = checklist.items.size();
    const std::size_t n_steps = trajectory.steps.size();

    if (n_steps == 0) {
        // Nothing to reference and nothing was done; conclude without a
        // gateway round trip.
        for (std::size_t i = 0; i < n_items; ++i) {
            verdict.items.push_back({static_cast<int>(i) + 1, false, 0, 0,
                                     "no trajectory steps exist to support this item"});
        }
        verdict.flag = VerdictFlag::failure;
        verdict.degraded = true;
        out.failure = FailureReport{
            {"the agent concluded without taking any action"},
            {"execute concrete actions toward the goal before declaring done"},
            {}};
        verdict.retry_granted = trajectory.mode == ExecMode::normal;
        return out;
    }

    const bool has_active =
        std::any_of(checklist.items.begin(), checklist.items.end(), [](const ChecklistItem& i) {
            return i.method == VerifyMethod::active_verification;
        });

    std::size_t issued = 0;
    try {
        if (has_active) {
            std::ostringstream user;
            user << "List the verification actions you will run for the checklist items "
                    "marked active_verification.\n\n"
                 << render_subtask(subtask) << "\n"
                 << render_checklist_text(checklist) << "\n"
                 << render_trajectory(trajectory) << "\n"
                 << "Reply with a fenced json object of shape "
                    "{\"checks\": [{\"item\": <checklist number>, \"tool\": \"<tool name>\", "
                    "\"arguments\": { ... }}]}. Only active_verification items may be "
                    "checked; at most "
                 << config.tool_budget << " checks will run.";

            CompletionRequest req;
            req.messages = {{MessageRole::system, kReflectorSystem},
                            {MessageRole::user, user.str()}};
            req.schema = checks_schema(checklist);
            req.max_reasks = config.max_reasks;
            const Completion c = complete(gateway, req);
            out.gateway_attempts += c.attempts;

            const Json& checks = c.parsed.at("checks");
            issued = checks.size();
            const std::size_t budget =
                config.tool_budget < 0 ? 0 : static_cast<std::size_t>(config.tool_budget);
            DispatchContext ctx{env, store, &gateway};
            for (std::size_t k = 0; k < checks.size() && k < budget; ++k) {
                const Json& c_json = checks[k];
                Action action;
                action.tool = c_json.at("tool").get<std::string>();
                action.arguments = c_json.value("arguments", Json::object());
                action.step_index = static_cast<int>(k) + 1;
                VerificationCall call;
                call.checklist_item = c_json.at("item").get<int>();
                call.action = action;
                call.observation = dispatch(registry, action, ctx);
                verdict.checks.push_back(std::move(call));
            }
        }

        std::ostringstream user;
        user << "Produce the final verdict for the checklist.\n\n"
             << render_subtask(subtask) << "\n"
             << render_checklist_text(checklist) << "\n"
             << render_trajectory(trajectory) << "\n"
             << render_checks(verdict.checks) << "\n"
             << verdict_reply_shape();

        CompletionRequest req;
        req.messages = {{MessageRole::system, kReflectorSystem},
                        {MessageRole::user, user.str()}};
        req.schema = verdict_schema(checklist, n_steps, issued);
        req.max_reasks = config.max_reasks;
        const Completion c = complete(gateway, req);
        out.gateway_attempts += c.attempts;

        verdict.flag = flag_from_string(c.parsed.at("flag").get<std::string>());
        std::vector<VerdictItem> items;
        for (const auto& it : c.parsed.at("items")) {
            VerdictItem v;
            v.item = it.at("item").get<int>();
            v.passed = it.at("passed").get<bool>();
            const Json& ev = it.at("evidence");
            if (ev.contains("step")) v.evidence_step = ev.at("step").get<int>();
            if (ev.contains("check")) v.evidence_check = ev.at("check").get<int>();
            v.note = it.value("note", std::string{});
            items.push_back(std::move(v));
        }
        std::sort(items.begin(), items.end(),
                  [](const VerdictItem& a, const VerdictItem& b) { return a.item < b.item; });
        verdict.items = std::move(items);
        if (verdict.flag == VerdictFlag::failure) {
            const Json& f = c.parsed.at("failure");
            FailureReport report;
            report.causes = f.at("causes").get<std::vector<std::string>>();
            if (f.contains("remediations")) {
                report.suggested_remediations =
                    f.at("remediations").get<std::vector<std::string>>();
            }
            if (f.contains("evidence_steps")) {
                report.evidence_steps = f.at("evidence_steps").get<std::vector<int>>();
            }
            out.failure = std::move(report);
        }

        // A check may have been listed but never run because the verification
        // budget ran out; its items cannot claim fresh evidence.
        const int dispatched = static_cast<int>(verdict.checks.size());
        bool forced = false;
        for (auto& vi : verdict.items) {
            const ChecklistItem& ci = checklist.items[static_cast<std::size_t>(vi.item - 1)];
            if (ci.method == VerifyMethod::active_verification &&
                vi.evidence_check > dispatched) {
                vi.passed = false;
                vi.evidence_check = 0;
                if (!vi.note.empty()) vi.note += "; ";
                vi.note += "verification budget exhausted before this check ran; failed "
                           "conservatively";
                forced = true;
            }
        }
        if (forced) {
            verdict.degraded = true;
            if (verdict.flag == VerdictFlag::success) {
                verdict.flag = VerdictFlag::failure;
                out.failure = FailureReport{
                    {"the verification budget was exhausted before every active check could "
                     "run"},
                    {"request fewer, more targeted verification actions"},
                    {}};
            } else if (out.failure.has_value()) {
                out.failure->causes.push_back(
                    "the verification budget was exhausted before every active check could "
                    "run");
            }
        }
    } catch (const GatewayError& e) {
        out.gateway_attempts += e.attempts;
        verdict.items.clear();
        for (std::size_t i = 0; i < n_items; ++i) {
            verdict.items.push_back({static_cast<int>(i) + 1, false, 0, 0,
                                     std::string("evaluation degraded: ") + e.what()});
        }
        verdict.flag = VerdictFlag::failure;
        verdict.degraded = true;
        out.failure =
            FailureReport{{std::string("the evaluation call failed: ") + e.what()},
                          {"re-run the sub-task and keep its evidence in the trajectory"},
                          {}};
    }

    verdict.retry_granted =
        verdict.flag == VerdictFlag::failure && trajectory.mode == ExecMode::normal;
    return out;
}

// --- distillation ---------------------------------------------------------------

namespace {

ResponseSchema sop_schema(std::size_t step_count) {
    ResponseSchema schema;
    schema.name = "sop";
    schema.validate = [step_count](const Json& j) -> std::string {
        if (!j.is_object()) return "expected a json object";
        if (trim(j.value("application", std::string{})).empty()) {
            return "'application' must be a non-empty string";
        }
        if (trim(j.value("function", std::string{})).empty()) {
            return "'function' must be a non-empty string";
        }
        if (trim(j.value("summary", std::string{})).empty()) {
            return "'summary' must be a non-empty string";
        }
        if (!j.contains("steps") || !j.at("steps").is_array() || j.at("steps").empty()) {
            return "'steps' must be a non-empty array";
        }
        const Json& steps = j.at("steps");
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const Json& s = steps[i];
            const std::string label = "sop step " + std::to_string(i + 1);
            if (!s.is_object() || trim(s.value("text", std::string{})).empty()) {
                return label + " needs a non-empty 'text'";
            }
            if (!s.contains("evidence") || !s.at("evidence").is_array() ||
                s.at("evidence").empty()) {
                return label + " must cite at least one trajectory step in 'evidence'";
            }
            for (const auto& e : s.at("evidence")) {
                if (!e.is_number_integer() || e.get<int>() < 1 ||
                    static_cast<std::size_t>(e.get<int>()) > step_count) {
                    return label + " cites a nonexistent trajectory step";
                }
            }
        }
        for (const char* field : {"preconditions", "parameters", "notes"}) {
            if (j.contains(field)) {
                const std::string err = string_list_error(j.at(field), field);
                if (!err.empty()) return err;
            }
        }
        return "";
    };
    return schema;
}

std::vector<std::string> string_list(const Json& j, const char* field) {
    if (!j.contains(field)) return {};
    return j.at(field).get<std::vector<std::string>>();
}

}  // namespace

std::optional<DistilledSop> distill_sop(const SubTask& subtask,
                                        const SubTaskTrajectory& trajectory, Backend& gateway,
                                        std::string* warning) {
    std::ostringstream user;
    user << "Summarize the effective operational sequence from this successful trajectory "
            "into a reusable standard operating procedure.\n\n"
         << render_subtask(subtask) << "\n"
         << render_trajectory(trajectory) << "\n"
         << "Reply with a fenced json object of shape "
            "{\"application\": \"...\", \"function\": \"...\", \"summary\": \"...\", "
            "\"preconditions\": [\"...\"], \"steps\": [{\"text\": \"...\", \"evidence\": "
            "[<trajectory step indices>]}], \"parameters\": [\"...\"], \"notes\": "
            "[\"...\"]}. Every step must cite at least one trajectory step index that "
            "actually supports it.";

    CompletionRequest req;
    req.messages = {{MessageRole::system, kReflectorSystem}, {MessageRole::user, user.str()}};
    req.schema = sop_schema(trajectory.steps.size());

    try {
        const Completion c = complete(gateway, req);
        DistilledSop sop;
        sop.index.application = trim(c.parsed.at("application").get<std::string>());
        sop.index.function = trim(c.parsed.at("function").get<std::string>());
        sop.index.summary = trim(c.parsed.at("summary").get<std::string>());
        sop.content.preconditions = string_list(c.parsed, "preconditions");
        for (const auto& s : c.parsed.at("steps")) {
            sop.content.steps.push_back(trim(s.at("text").get<std::string>()));
        }
        sop.content.parameters = string_list(c.parsed, "parameters");
        sop.content.notes = string_list(c.parsed, "notes");
        sop.content.provenance = {subtask.id};
        return sop;
    } catch (const GatewayError& e) {
        if (warning != nullptr) {
            *warning = "distillation dropped, memory must not absorb unsupported claims: " +
                       std::string(e.what());
        }
        return std::nullopt;
    }
}

// --- post-task upgrade ------------------------------------------------------------

Json UpdateReport::to_json() const {
    return Json{{"strategic_upserts", strategic_upserts},
                {"tool_updates", tool_updates},
                {"skipped", skipped},
                {"unknown_tools", unknown_tools},
                {"consolidation", consolidation.to_json()},
                {"rolled_back", rolled_back},
                {"error", error}};
}

namespace {

ResponseSchema upgrade_schema() {
    ResponseSchema schema;
    schema.name = "memory_upgrade";
    schema.validate = [](const Json& j) -> std::string {
        if (!j.is_object()) return "expected a json object";
        if (!j.contains("strategic") || !j.at("strategic").is_array()) {
            return "expected a 'strategic' array";
        }
        for (std::size_t i = 0; i < j.at("strategic").size(); ++i) {
            const Json& s = j.at("strategic")[i];
            const std::string label = "strategic entry " + std::to_string(i + 1);
            if (!s.is_object()) return label + " must be an object";
            if (trim(s.value("dilemma", std::string{})).empty()) {
                return label + " needs a non-empty 'dilemma'";
            }
            if (trim(s.value("strategy", std::string{})).empty()) {
                return label + " needs a non-empty 'strategy'";
            }
        }
        if (!j.contains("tools") || !j.at("tools").is_array()) {
            return "expected a 'tools' array";
        }
        for (std::size_t i = 0; i < j.at("tools").size(); ++i) {
            const Json& t = j.at("tools")[i];
            const std::string label = "tool entry " + std::to_string(i + 1);
            if (!t.is_object()) return label + " must be an object";
            if (trim(t.value("tool", std::string{})).empty()) {
                return label + " needs a non-empty 'tool'";
            }
            for (const char* field : {"static_description", "dynamic_instruction"}) {
                if (t.contains(field) && !t.at(field).is_string()) {
                    return label + " '" + field + "' must be a string";
                }
            }
        }
        return "";
    };
    return schema;
}

std::string render_digests(const std::vector<TrajectoryDigest>& digests) {
    if (digests.empty()) return "(no sub-tasks were executed)\n";
    std::ostringstream out;
    for (const auto& d : digests) {
        out << "- " << d.subtask.id << " [" << exec_mode_name(d.mode) << ", "
            << outcome_name(d.outcome) << ", verdict "
            << (d.verdict_flag.empty() ? "unevaluated" : d.verdict_flag) << ", " << d.steps
            << " steps]: " << d.subtask.desc << "\n";
    }
    return out.str();
}

}  // namespace

UpdateReport post_task_update(const std::string& task_id, const std::string& task_desc,
                              const std::vector<TrajectoryDigest>& digests, MemoryStore& store,
                              Backend& gateway, const std::set<std::string>* known_tools,
                              int strategic_cap) {
    UpdateReport report;
    const MemoryStore snapshot = store;

    try {
        std::ostringstream user;
        user << "Perform the post-task memory upgrade: extract reusable dilemma/strategy "
                "pairs from this run and codify effective tool usage.\n\n"
             << "Task " << task_id << ": " << task_desc << "\n"
             << "Sub-task digests:\n"
             << render_digests(digests) << "\n";
        user << "Current strategic entries:\n";
        if (store.strategic().empty()) {
            user << "(none)\n";
        } else {
            for (const auto& s : store.strategic()) {
                user << "- " << s.dilemma << ": " << s.strategy << "\n";
            }
        }
        user << "Current tool memory:\n";
        if (store.tool_entries().empty()) {
            user << "(none)\n";
        } else {
            for (const auto& t : store.tool_entries()) {
                user << "- " << t.tool << ": " << t.static_description;
                if (!t.dynamic_instruction.empty()) {
                    user << " | usage note: " << t.dynamic_instruction;
                }
                user << "\n";
            }
        }
        user << "\nReply with a fenced json object of shape "
                "{\"strategic\": [{\"dilemma\": \"...\", \"strategy\": \"...\"}], "
                "\"tools\": [{\"tool\": \"...\", \"static_description\": \"...\", "
                "\"dynamic_instruction\": \"...\"}]}. Both arrays may be empty when "
                "nothing generalizes.";

        CompletionRequest req;
        req.messages = {{MessageRole::system,
                         "You maintain the agent's long-term memory across tasks: strategic "
                         "principles, procedural guides, and tool usage notes."},
                        {MessageRole::user, user.str()}};
        req.schema = upgrade_schema();
        const Completion c = complete(gateway, req);

        for (const auto& s : c.parsed.at("strategic")) {
            StrategicEntry entry;
            entry.dilemma = trim(s.at("dilemma").get<std::string>());
            entry.strategy = trim(s.at("strategy").get<std::string>());
            entry.provenance = {task_id};
            store.upsert_strategic(entry);
            report.strategic_upserts.push_back(entry.dilemma);
        }
        for (const auto& t : c.parsed.at("tools")) {
            ToolMemoryEntry entry;
            entry.tool = trim(t.at("tool").get<std::string>());
            entry.static_description = t.value("static_description", std::string{});
            entry.dynamic_instruction = t.value("dynamic_instruction", std::string{});
            try {
                const auto note = store.set_tool_memory(entry, known_tools);
                report.tool_updates.push_back(entry.tool);
                if (!note.known_tool) report.unknown_tools.push_back(entry.tool);
            } catch (const ValidationError& e) {
                report.skipped.push_back(entry.tool + ": " + e.what());
            }
        }

        report.consolidation = consolidate(store, gateway, strategic_cap);
        if (!report.consolidation.error.empty()) {
            throw GatewayError("consolidation failed: " + report.consolidation.error,
                               /*retryable=*/false, 1);
        }
        store.bump_revision();
    } catch (const std::exception& e) {
        store = snapshot;
        report.rolled_back = true;
        report.error = e.what();
        report.strategic_upserts.clear();
        report.tool_updates.clear();
    }
    return report;
}

}  // namespace playbook
