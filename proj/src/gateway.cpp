#include "playbook/gateway.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "playbook/text.hpp"

namespace playbook {

std::string role_name(MessageRole role) {
    switch (role) {
        case MessageRole::system: return "system";
        case MessageRole::user: return "user";
        case MessageRole::assistant: return "assistant";
        case MessageRole::tool: return "tool";
    }
    return "user";
}

MessageRole role_from_string(const std::string& name) {
    if (name == "system") return MessageRole::system;
    if (name == "user") return MessageRole::user;
    if (name == "assistant") return MessageRole::assistant;
    if (name == "tool") return MessageRole::tool;
    throw ParseError("unknown chat role '" + name + "'");
}

std::string validate_message(const ChatMessage& message) {
    const bool has_content = !message.content.empty();
    const bool has_call = !message.tool_call.is_null() && !message.tool_call.empty();
    if (message.role == MessageRole::assistant && has_content == has_call) {
        return "assistant message must carry exactly one of content/tool_call";
    }
    if (message.role == MessageRole::tool && message.tool_result_for.empty()) {
        return "tool message must carry tool_result_for";
    }
    return "";
}

Json ChatMessage::to_json() const {
    Json j;
    j["role"] = role_name(role);
    j["content"] = content;
    if (!tool_call.is_null() && !tool_call.empty()) j["tool_call"] = tool_call;
    if (!tool_result_for.empty()) j["tool_result_for"] = tool_result_for;
    return j;
}

ChatMessage ChatMessage::from_json(const Json& j) {
    ChatMessage m;
    if (!j.contains("role")) throw ParseError("chat message needs a 'role'");
    m.role = role_from_string(j.at("role").get<std::string>());
    m.content = j.value("content", std::string{});
    if (j.contains("tool_call")) m.tool_call = j.at("tool_call");
    m.tool_result_for = j.value("tool_result_for", std::string{});
    const std::string problem = validate_message(m);
    if (!problem.empty()) throw ParseError(problem);
    return m;
}

namespace {

std::optional<Json> try_parse(const std::string& text) {
    const std::string body = trim(text);
    if (body.empty()) return std::nullopt;
    Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
}

struct Fence {
    std::string info;
    std::string body;
};

std::vector<Fence> find_fences(const std::string& text) {
    std::vector<Fence> fences;
    std::size_t pos = 0;
    while (true) {
        const std::size_t open = text.find("```", pos);
        if (open == std::string::npos) break;
        const std::size_t info_end = text.find('\n', open + 3);
        if (info_end == std::string::npos) break;
        const std::size_t close = text.find("```", info_end + 1);
        if (close == std::string::npos) break;
        Fence f;
        f.info = to_lower(trim(text.substr(open + 3, info_end - open - 3)));
        f.body = text.substr(info_end + 1, close - info_end - 1);
        fences.push_back(std::move(f));
        pos = close + 3;
    }
    return fences;
}

}  // namespace

std::optional<Json> extract_json(const std::string& text) {
    const std::vector<Fence> fences = find_fences(text);
    for (auto it = fences.rbegin(); it != fences.rend(); ++it) {
        if (it->info == "json") {
            if (auto j = try_parse(it->body)) return j;
        }
    }
    for (auto it = fences.rbegin(); it != fences.rend(); ++it) {
        if (auto j = try_parse(it->body)) return j;
    }
    return try_parse(text);
}

Completion complete(Backend& backend, const CompletionRequest& request) {
    if (request.messages.empty()) {
        throw ValidationError("completion request has no messages");
    }
    if (request.messages.front().role != MessageRole::system) {
        throw ValidationError("completion request must start with a system message");
    }
    CompletionRequest working = request;
    const int total = 1 + std::max(0, request.max_reasks);
    std::string last_problem;

    for (int attempt = 1; attempt <= total; ++attempt) {
        const std::string reply = backend.chat(working);
        if (!request.schema.has_value()) {
            return Completion{reply, Json{}, attempt};
        }
        std::string problem;
        if (auto parsed = extract_json(reply)) {
            problem = request.schema->validate(*parsed);
            if (problem.empty()) {
                return Completion{reply, std::move(*parsed), attempt};
            }
        } else {
            problem = "no parseable json payload found in the reply";
        }
        last_problem = problem;
        working.messages.push_back({MessageRole::assistant, reply});
        working.messages.push_back(
            {MessageRole::user,
             "Your previous reply was not usable: " + problem +
                 ". Reply again with exactly one fenced ```json block matching the '" +
                 request.schema->name + "' shape and nothing else."});
    }
    throw GatewayError("structured reply '" + request.schema->name + "' still invalid after " +
                           std::to_string(total) + " attempts: " + last_problem,
                       /*retryable=*/false, total);
}

// --- scripted backend -------------------------------------------------------

Json ScriptedStep::to_json() const {
    return Json{{"match", match}, {"reply", reply}};
}

ScriptedStep ScriptedStep::from_json(const Json& j) {
    ScriptedStep s;
    if (!j.contains("reply") || !j.at("reply").is_string()) {
        throw ParseError("fixture step needs a string 'reply'");
    }
    s.match = j.value("match", std::string{});
    s.reply = j.at("reply").get<std::string>();
    return s;
}

Json ScriptedFixture::to_json() const {
    Json steps_json = Json::array();
    for (const auto& s : steps) steps_json.push_back(s.to_json());
    return Json{{"strict", strict}, {"steps", std::move(steps_json)}};
}

ScriptedFixture ScriptedFixture::from_json(const Json& j) {
    ScriptedFixture f;
    f.strict = j.value("strict", true);
    if (!j.contains("steps") || !j.at("steps").is_array()) {
        throw ParseError("fixture needs a 'steps' list");
    }
    std::size_t index = 1;
    for (const auto& s : j.at("steps")) {
        try {
            f.steps.push_back(ScriptedStep::from_json(s));
        } catch (const ParseError& e) {
            throw ParseError("fixture step " + std::to_string(index) + ": " + e.what());
        }
        ++index;
    }
    return f;
}

ScriptedFixture load_fixture(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open fixture file: " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("fixture file " + path.string() + ": " + e.what());
    }
    try {
        return ScriptedFixture::from_json(j);
    } catch (const ParseError& e) {
        throw ParseError("fixture file " + path.string() + ": " + e.what());
    }
}

void save_fixture(const ScriptedFixture& fixture, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write fixture file: " + path.string());
    out << fixture.to_json().dump(2) << "\n";
}

ScriptedBackend::ScriptedBackend(ScriptedFixture fixture, std::string label)
    : fixture_(std::move(fixture)), label_(std::move(label)) {}

std::size_t ScriptedBackend::cursor() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cursor_;
}

std::string ScriptedBackend::chat(const CompletionRequest& request) {
    std::string target;
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
        if (it->role == MessageRole::user) {
            target = it->content;
            break;
        }
    }

    std::lock_guard<std::mutex> lock(mu_);
    if (fixture_.strict) {
        if (cursor_ >= fixture_.steps.size()) {
            throw FixtureError("scripted backend '" + label_ + "' exhausted after " +
                                   std::to_string(fixture_.steps.size()) + " steps",
                               fixture_.steps.size() + 1);
        }
        const ScriptedStep& step = fixture_.steps[cursor_];
        if (!step.match.empty() && target.find(step.match) == std::string::npos) {
            const std::string head = target.substr(0, std::min<std::size_t>(target.size(), 160));
            throw FixtureError("scripted backend '" + label_ + "' step " +
                                   std::to_string(cursor_ + 1) + " expected the request to contain \"" +
                                   step.match + "\" but the latest user message starts: " + head,
                               cursor_ + 1);
        }
        ++cursor_;
        return step.reply;
    }

    for (std::size_t i = cursor_; i < fixture_.steps.size(); ++i) {
        const ScriptedStep& step = fixture_.steps[i];
        if (step.match.empty() || target.find(step.match) != std::string::npos) {
            cursor_ = i + 1;
            return step.reply;
        }
    }
    return kFixtureExhaustedReply;
}

// --- HTTP backend ------------------------------------------------------------

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ConfigError("http backend: base_url is required");
}

std::string HttpBackend::chat(const CompletionRequest& request) {
    Json body;
    body["model"] = request.model.empty() ? config_.model : request.model;
    Json msgs = Json::array();
    for (const auto& m : request.messages) {
        Json wire;
        wire["role"] = role_name(m.role);
        wire["content"] = m.content;
        if (!m.tool_result_for.empty()) wire["tool_call_id"] = m.tool_result_for;
        msgs.push_back(std::move(wire));
    }
    body["messages"] = std::move(msgs);
    body["temperature"] = request.temperature;
    if (request.max_output > 0) body["max_tokens"] = request.max_output;
    const std::string payload = body.dump();

    std::string last_error;
    const int attempts = std::max(1, config_.max_attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }

        auto res = client.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
        } else if (res->status == 200) {
            Json reply = Json::parse(res->body, nullptr, false);
            if (reply.is_discarded()) {
                throw GatewayError("gateway returned unparseable body", /*retryable=*/false,
                                   attempt);
            }
            try {
                return reply.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const nlohmann::json::exception&) {
                throw GatewayError("gateway reply missing choices[0].message.content",
                                   /*retryable=*/false, attempt);
            }
        } else if (res->status == 429 || res->status >= 500) {
            last_error = "status " + std::to_string(res->status);
        } else {
            throw GatewayError("gateway rejected the request with status " +
                                   std::to_string(res->status) + ": " + res->body,
                               /*retryable=*/false, attempt);
        }
        if (attempt < attempts && config_.backoff_ms > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms * attempt));
        }
    }
    throw GatewayError("gateway unreachable after " + std::to_string(attempts) +
                           " attempts: " + last_error,
                       /*retryable=*/true, attempts);
}

}  // namespace playbook
