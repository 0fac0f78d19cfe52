#include "playbook/tools.hpp"

#include <algorithm>
#include <sstream>

#include "playbook/text.hpp"

namespace playbook {

Json Action::to_json() const {
    Json j;
    j["tool"] = tool;
    j["arguments"] = arguments;
    if (step_index > 0) j["step_index"] = step_index;
    return j;
}

Action Action::from_json(const Json& j) {
    Action a;
    if (!j.contains("tool") || !j.at("tool").is_string()) {
        throw ParseError("action needs a string 'tool'");
    }
    a.tool = j.at("tool").get<std::string>();
    if (j.contains("arguments")) {
        if (!j.at("arguments").is_object()) throw ParseError("action 'arguments' must be a map");
        a.arguments = j.at("arguments");
    }
    a.step_index = j.value("step_index", 0);
    return a;
}

std::string Observation::render() const {
    std::string out = payload;
    if (!dynamic_instruction.empty()) {
        if (!out.empty() && out.back() != '\n') out.push_back('\n');
        out += "[tool guidance] " + dynamic_instruction;
    }
    return out;
}

Json Observation::to_json() const {
    Json j;
    j["payload"] = payload;
    j["dynamic_instruction"] = dynamic_instruction;
    j["error_flag"] = error_flag;
    return j;
}

Observation Observation::from_json(const Json& j) {
    Observation o;
    o.payload = j.value("payload", std::string{});
    o.dynamic_instruction = j.value("dynamic_instruction", std::string{});
    o.error_flag = j.value("error_flag", false);
    return o;
}

void ToolRegistry::register_tool(ToolDef def) {
    if (find(def.name) != nullptr) {
        throw ValidationError("tool '" + def.name + "' is already registered");
    }
    tools_.push_back(std::move(def));
}

const ToolDef* ToolRegistry::find(const std::string& name) const {
    for (const auto& t : tools_) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

std::vector<std::string> ToolRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& t : tools_) out.push_back(t.name);
    return out;
}

std::set<std::string> ToolRegistry::name_set() const {
    std::set<std::string> out;
    for (const auto& t : tools_) out.insert(t.name);
    return out;
}

std::string catalog(const ToolRegistry& registry, const MemoryStore& store) {
    std::ostringstream out;
    for (const auto& name : registry.names()) {
        const ToolDef* def = registry.find(name);
        const ToolMemoryEntry* mem = store.find_tool(name);
        out << "### " << name << def->signature << "\n";
        out << (mem != nullptr && !mem->static_description.empty() ? mem->static_description
                                                                   : def->static_help)
            << "\n";
    }
    return out.str();
}

namespace {

// Argument helpers: all failures become error observations, never exceptions.
bool want_string(const Json& args, const std::string& key, std::string& out,
                 std::string& problem) {
    if (!args.contains(key) || !args.at(key).is_string()) {
        problem = "argument '" + key + "' must be a string";
        return false;
    }
    out = args.at(key).get<std::string>();
    return true;
}

bool want_int(const Json& args, const std::string& key, int& out, std::string& problem) {
    if (args.contains(key)) {
        const Json& v = args.at(key);
        if (v.is_number_integer()) {
            out = v.get<int>();
            return true;
        }
        if (v.is_string()) {
            try {
                out = std::stoi(v.get<std::string>());
                return true;
            } catch (...) {
            }
        }
    }
    problem = "argument '" + key + "' must be an integer";
    return false;
}

EnvResult vision_call(DispatchContext& ctx, const std::string& subject,
                      const std::string& question) {
    if (ctx.vision == nullptr) {
        return {false, "no vision backend configured for this tool"};
    }
    CompletionRequest req;
    req.messages.push_back(
        {MessageRole::system, "You describe visual content for an automation agent."});
    req.messages.push_back({MessageRole::user, question + "\n\n" + subject});
    try {
        Completion c = complete(*ctx.vision, req);
        return {true, c.text};
    } catch (const GatewayError& e) {
        return {false, std::string("vision call failed: ") + e.what()};
    }
}

}  // namespace

Observation dispatch(const ToolRegistry& registry, const Action& action, DispatchContext& ctx) {
    Observation obs;
    if (const ToolMemoryEntry* mem = ctx.store.find_tool(action.tool)) {
        obs.dynamic_instruction = mem->dynamic_instruction;
    }

    const ToolDef* def = registry.find(action.tool);
    if (def == nullptr) {
        obs.error_flag = true;
        obs.payload = "unknown tool '" + action.tool + "'; valid tools: " +
                      join(registry.names(), ", ");
        return obs;
    }

    try {
        EnvResult result = def->handler(ctx, action.arguments);
        obs.payload = result.text;
        obs.error_flag = !result.ok;
    } catch (const std::exception& e) {
        obs.payload = "tool '" + action.tool + "' failed: " + e.what();
        obs.error_flag = true;
    }
    return obs;
}

ToolRegistry default_registry() {
    ToolRegistry registry;

    registry.register_tool(ToolDef{
        "run_cmd", "(command)",
        "Execute a full shell command string inside the simulated workspace shell. The output "
        "ends with a 'returncode: N' line.",
        [](DispatchContext& ctx, const Json& args) -> EnvResult {
            std::string command, problem;
            if (!want_string(args, "command", command, problem)) return {false, problem};
            return ctx.env.run_command(command);
        }});

    registry.register_tool(ToolDef{
        "run_python_code", "(code)",
        "Run a small python-style script in the simulated interpreter. Supported statements: "
        "print(...), write_file(path, text), append_file(path, text), read_file(path), "
        "exists(path), list_dir(path).",
        [](DispatchContext& ctx, const Json& args) -> EnvResult {
            std::string code, problem;
            if (!want_string(args, "code", code, problem)) return {false, problem};
            return ctx.env.run_python(code);
        }});

    registry.register_tool(ToolDef{
        "access_guide", "(batch_requests)",
        "Retrieve detailed operation guides from procedural memory. Arguments: batch_requests, "
        "a map from application name to a list of function names. Returns the full guide for "
        "every match and names the misses.",
        [](DispatchContext& ctx, const Json& args) -> EnvResult {
            if (!args.contains("batch_requests") || !args.at("batch_requests").is_object() ||
                args.at("batch_requests").empty()) {
                return {false,
                        "argument 'batch_requests' must be a non-empty map of application -> "
                        "list of function names"};
            }
            std::map<std::string, std::vector<std::string>> batch;
            for (const auto& [app, fns] : args.at("batch_requests").items()) {
                if (!fns.is_array()) {
                    return {false, "batch_requests['" + app + "'] must be a list"};
                }
                for (const auto& fn : fns) {
                    if (!fn.is_string()) {
                        return {false, "batch_requests['" + app + "'] must hold strings"};
                    }
                    batch[app].push_back(fn.get<std::string>());
                }
            }
            GuideResult result = ctx.store.query_sops(batch);
            std::ostringstream out;
            for (const auto& content : result.found) {
                const SopIndexEntry* row = nullptr;
                for (const auto& e : ctx.store.sop_index()) {
                    if (e.sop_id == content.sop_id) {
                        row = &e;
                        break;
                    }
                }
                out << "Guide for " << (row != nullptr ? row->application : "?") << " / "
                    << (row != nullptr ? row->function : "?") << ":\n"
                    << content.render() << "---\n";
            }
            for (const auto& [app, fn] : result.missing) {
                out << "No SOP found for " << app << " / " << fn << ".\n";
            }
            return {true, out.str()};
        }});

    registry.register_tool(ToolDef{
        "gpt4o_describe_image", "(image_path?)",
        "Describe an image with the vision model; with no image_path the current browser view "
        "is described.",
        [](DispatchContext& ctx, const Json& args) -> EnvResult {
            std::string subject;
            if (args.contains("image_path") && args.at("image_path").is_string()) {
                const std::string path = args.at("image_path").get<std::string>();
                const std::string* content = ctx.env.file_content(path);
                if (content == nullptr) return {false, "no such image file: " + path};
                subject = "Image file " + path + " contents:\n" + *content;
            } else {
                subject = ctx.env.screenshot_description();
            }
            return vision_call(ctx, subject, "Describe this image.");
        }});

    registry.register_tool(ToolDef{
        "browser_go_to_url", "(url)", "Open a URL in the active browser tab.",
        [](DispatchContext& ctx, const Json& args) -> EnvResult {
            std::string url, problem;
            if (!want_string(args, "url", url, problem)) return {false, problem};
            return ctx.env.browser_go_to_url(url);
        }});

    registry.register_tool(ToolDef{
        "browser_input", "(index, text)",
        "Type text into the page element with the given index (textboxes only). Call "
        "browser_update first to learn the element indices.",
        [](DispatchContext& ctx, const Json& args) -> EnvResult {
            int index = 0;
            std::string text, problem;
            if (!want_int(args, "index", index, problem)) return {false, problem};
            if (!want_string(args, "text", text, problem)) return {false, problem};
            return ctx.env.browser_input(index, text);
        }});

    registry.register_tool(ToolDef{
        "browser_send_keys", "(keys)",
        "Send keyboard keys to the page, e.g. 'Enter' to submit the focused form.",
        [](DispatchContext& ctx, const Json& args) -> EnvResult {
            std::string keys, problem;
            if (!want_string(args, "keys", keys, problem)) return {false, problem};
            return ctx.env.browser_send_keys(keys);
        }});

    registry.register_tool(ToolDef{
        "browser_update", "()",
        "Return the current page's element list with stable indices. Always call this before "
        "clicking or typing.",
        [](DispatchContext& ctx, const Json&) -> EnvResult { return ctx.env.browser_update(); }});

    registry.register_tool(ToolDef{
        "browser_click", "(index)", "Click the page element with the given index.",
        [](DispatchContext& ctx, const Json& args) -> EnvResult {
            int index = 0;
            std::string problem;
            if (!want_int(args, "index", index, problem)) return {false, problem};
            return ctx.env.browser_click(index);
        }});

    registry.register_tool(ToolDef{
        "browser_extract_content_by_vision", "(goal)",
        "Extract the parts of the current page relevant to a goal using the vision model.",
        [](DispatchContext& ctx, const Json& args) -> EnvResult {
            std::string goal, problem;
            if (!want_string(args, "goal", goal, problem)) return {false, problem};
            return vision_call(ctx, ctx.env.screenshot_description(),
                               "Extract the content relevant to: " + goal);
        }});

    registry.register_tool(ToolDef{
        "browser_close_tab", "(index)", "Close the browser tab with the given index.",
        [](DispatchContext& ctx, const Json& args) -> EnvResult {
            int index = 0;
            std::string problem;
            if (!want_int(args, "index", index, problem)) return {false, problem};
            return ctx.env.browser_close_tab(index);
        }});

    registry.register_tool(ToolDef{
        "browser_go_back", "()", "Go back to the previous page in the active tab.",
        [](DispatchContext& ctx, const Json&) -> EnvResult { return ctx.env.browser_go_back(); }});

    registry.register_tool(ToolDef{
        "browser_list_tabs", "()", "List all open browser tabs; the active tab is starred.",
        [](DispatchContext& ctx, const Json&) -> EnvResult {
            return ctx.env.browser_list_tabs();
        }});

    registry.register_tool(ToolDef{
        "browser_switch_tab", "(index)", "Switch to the browser tab with the given index.",
        [](DispatchContext& ctx, const Json& args) -> EnvResult {
            int index = 0;
            std::string problem;
            if (!want_int(args, "index", index, problem)) return {false, problem};
            return ctx.env.browser_switch_tab(index);
        }});

    return registry;
}

}  // namespace playbook
