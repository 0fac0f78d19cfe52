#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "playbook/common.hpp"

namespace playbook {

enum class MessageRole { system, user, assistant, tool };

std::string role_name(MessageRole role);
MessageRole role_from_string(const std::string& name);

struct ChatMessage {
    MessageRole role = MessageRole::user;
    std::string content;
    Json tool_call;               // optional structured action request {name, arguments}
    std::string tool_result_for;  // correlation id, required for tool-role messages

    Json to_json() const;
    static ChatMessage from_json(const Json& j);
};

// Enforces the per-role shape rules; returns an error string or "".
std::string validate_message(const ChatMessage& message);

// Validator returns an empty string when the parsed value is acceptable,
// otherwise a human-readable problem used verbatim in the corrective re-ask.
struct ResponseSchema {
    std::string name;
    std::function<std::string(const Json&)> validate;
};

struct CompletionRequest {
    std::vector<ChatMessage> messages;
    std::string model;        // empty -> backend default
    double temperature = 0.0;
    int max_output = 0;       // token budget; 0 -> backend default
    std::optional<ResponseSchema> schema;
    int max_reasks = 2;       // corrective turns after the first reply
};

struct Completion {
    std::string text;   // raw assistant reply that satisfied the request
    Json parsed;        // extracted JSON payload; null when no schema was set
    int attempts = 1;   // chat calls spent, including re-asks
};

class Backend {
  public:
    virtual ~Backend() = default;
    virtual std::string chat(const CompletionRequest& request) = 0;
    virtual std::string name() const = 0;
};

// Pulls the JSON payload out of a reply: the last fenced ```json block wins,
// then any fenced block that parses, then the whole text.
std::optional<Json> extract_json(const std::string& text);

// One structured exchange: send, extract, validate; on failure append the bad
// reply plus a corrective user turn and try again, up to request.max_reasks
// re-asks. Throws GatewayError when the reply never becomes valid.
Completion complete(Backend& backend, const CompletionRequest& request);

// --- scripted backend -------------------------------------------------------

// `match` is a substring that must occur in the latest user-role message of
// the incoming request ("" matches anything).
struct ScriptedStep {
    std::string match;
    std::string reply;

    Json to_json() const;
    static ScriptedStep from_json(const Json& j);
};

// strict: steps are consumed in order and a mismatch or exhaustion is an
// error. Non-strict: steps are a forward-only script; each call consumes the
// first still-unused step whose match applies, and a call that matches
// nothing gets a canned exhaustion reply.
struct ScriptedFixture {
    std::vector<ScriptedStep> steps;
    bool strict = true;

    Json to_json() const;
    static ScriptedFixture from_json(const Json& j);
};

ScriptedFixture load_fixture(const fs::path& path);
void save_fixture(const ScriptedFixture& fixture, const fs::path& path);

inline constexpr const char* kFixtureExhaustedReply = "[fixture exhausted]";

class ScriptedBackend : public Backend {
  public:
    explicit ScriptedBackend(ScriptedFixture fixture, std::string label = "scripted");

    std::string chat(const CompletionRequest& request) override;
    std::string name() const override { return label_; }

    std::size_t cursor() const;
    std::size_t size() const { return fixture_.steps.size(); }

  private:
    ScriptedFixture fixture_;
    std::string label_;
    std::size_t cursor_ = 0;
    mutable std::mutex mu_;
};

// --- HTTP backend ------------------------------------------------------------

struct HttpBackendConfig {
    std::string base_url;  // e.g. http://127.0.0.1:8080
    std::string model;
    std::string api_key;   // sent as a bearer token when non-empty
    std::string path = "/v1/chat/completions";
    double temperature = 0.0;
    int max_attempts = 3;      // transport-level retries
    int timeout_seconds = 60;
    int backoff_ms = 0;        // sleep between retries, scaled by attempt
};

class HttpBackend : public Backend {
  public:
    explicit HttpBackend(HttpBackendConfig config);

    std::string chat(const CompletionRequest& request) override;
    std::string name() const override { return "http:" + config_.model; }

  private:
    HttpBackendConfig config_;
};

}  // namespace playbook
