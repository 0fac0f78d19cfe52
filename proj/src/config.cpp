#include "playbook/config.hpp"

#include <cstdlib>
#include <fstream>
#include <vector>

#include "playbook/text.hpp"

namespace playbook {

namespace {

const char* kRoles[] = {"default", "planner", "executor", "reflector", "npc"};

int parse_int(const std::string& value, const std::string& what) {
    try {
        std::size_t pos = 0;
        const int parsed = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + value + "' is not an integer");
    }
}

std::int64_t parse_int64(const std::string& value, const std::string& what) {
    try {
        std::size_t pos = 0;
        const std::int64_t parsed = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + value + "' is not an integer");
    }
}

double parse_double(const std::string& value, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double parsed = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + value + "' is not a number");
    }
}

std::string absolutize(const std::string& path, const fs::path& base) {
    if (path.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return p.lexically_normal().string();
    return (base / p).lexically_normal().string();
}

void validate_backend(const std::string& role, const BackendSpec& spec) {
    if (spec.kind != "scripted" && spec.kind != "http") {
        throw ConfigError("backend '" + role + "': unknown kind '" + spec.kind +
                          "' (expected \"scripted\" or \"http\")");
    }
    if (spec.kind == "http") {
        if (spec.endpoint.empty()) {
            throw ConfigError("backend '" + role + "': missing required field 'endpoint'");
        }
        if (spec.model.empty()) {
            throw ConfigError("backend '" + role + "': missing required field 'model'");
        }
        if (spec.timeout_seconds < 1) {
            throw ValidationError("backend '" + role + "': timeout_seconds must be >= 1");
        }
    } else {
        if (spec.fixture.empty() && spec.fixture_dir.empty()) {
            throw ConfigError("backend '" + role +
                              "': missing required field 'fixture' (or 'fixture_dir')");
        }
    }
}

}  // namespace

Json BackendSpec::to_json() const {
    Json j;
    j["kind"] = kind;
    if (!endpoint.empty()) j["endpoint"] = endpoint;
    if (!model.empty()) j["model"] = model;
    j["temperature"] = temperature;
    j["timeout_seconds"] = timeout_seconds;
    if (!api_key.empty()) j["api_key"] = api_key;
    if (!fixture.empty()) j["fixture"] = fixture;
    if (!fixture_dir.empty()) j["fixture_dir"] = fixture_dir;
    return j;
}

BackendSpec BackendSpec::from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("backend spec must be an object");
    BackendSpec spec;
    spec.kind = j.value("kind", std::string{"scripted"});
    spec.endpoint = j.value("endpoint", std::string{});
    spec.model = j.value("model", std::string{});
    spec.temperature = j.value("temperature", 0.0);
    spec.timeout_seconds = j.value("timeout_seconds", 60);
    spec.api_key = j.value("api_key", std::string{});
    spec.fixture = j.value("fixture", std::string{});
    spec.fixture_dir = j.value("fixture_dir", std::string{});
    return spec;
}

const BackendSpec& EngineConfig::backend_for(const std::string& role) const {
    auto it = backends.find(role);
    if (it != backends.end()) return it->second;
    it = backends.find("default");
    if (it != backends.end()) return it->second;
    throw ConfigError("no backend configured for role '" + role + "' and no default backend");
}

Json EngineConfig::to_json() const {
    Json backends_json = Json::object();
    for (const auto& [role, spec] : backends) backends_json[role] = spec.to_json();
    Json j;
    j["backends"] = std::move(backends_json);
    j["action_budget"] = action_budget;
    j["caps"] = Json{{"max_subtasks", caps.max_subtasks},
                     {"max_reviews", caps.max_reviews},
                     {"reflector_tool_budget", caps.reflector_tool_budget},
                     {"strategic_cap", caps.strategic_cap}};
    j["memory_path"] = memory_path;
    j["log_dir"] = log_dir;
    j["environment_seed"] = environment_seed;
    j["keep_newest"] = keep_newest;
    return j;
}

EngineConfig EngineConfig::from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a json object");
    EngineConfig config;
    if (j.contains("backends")) {
        if (!j.at("backends").is_object()) {
            throw ConfigError("'backends' must be an object keyed by role");
        }
        for (const auto& [role, spec] : j.at("backends").items()) {
            config.backends[role] = BackendSpec::from_json(spec);
        }
    }
    config.action_budget = j.value("action_budget", config.action_budget);
    if (j.contains("caps")) {
        const Json& caps = j.at("caps");
        config.caps.max_subtasks = caps.value("max_subtasks", config.caps.max_subtasks);
        config.caps.max_reviews = caps.value("max_reviews", config.caps.max_reviews);
        config.caps.reflector_tool_budget =
            caps.value("reflector_tool_budget", config.caps.reflector_tool_budget);
        config.caps.strategic_cap = caps.value("strategic_cap", config.caps.strategic_cap);
    }
    config.memory_path = j.value("memory_path", config.memory_path);
    config.log_dir = j.value("log_dir", config.log_dir);
    config.environment_seed = j.value("environment_seed", config.environment_seed);
    config.keep_newest = j.value("keep_newest", config.keep_newest);
    return config;
}

EngineConfig load_config(const fs::path& path,
                         const std::map<std::string, std::string>& env_overrides) {
    EngineConfig config;
    fs::path base = fs::current_path();

    if (!path.empty()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot open config file: " + path.string());
        Json j;
        try {
            j = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config file " + path.string() + ": " + e.what());
        }
        config = EngineConfig::from_json(j);
        base = fs::absolute(path).parent_path();
        // Relative paths inside the file resolve against the file's directory.
        config.memory_path = absolutize(config.memory_path, base);
        config.log_dir = absolutize(config.log_dir, base);
        for (auto& [role, spec] : config.backends) {
            spec.fixture = absolutize(spec.fixture, base);
            spec.fixture_dir = absolutize(spec.fixture_dir, base);
        }
    }

    const fs::path cwd = fs::current_path();
    auto env = [&](const char* key) -> const std::string* {
        auto it = env_overrides.find(key);
        return it == env_overrides.end() ? nullptr : &it->second;
    };

    if (const auto* v = env("PLAYBOOK_ACTION_BUDGET")) {
        config.action_budget = parse_int(*v, "PLAYBOOK_ACTION_BUDGET");
    }
    if (const auto* v = env("PLAYBOOK_KEEP_NEWEST")) {
        config.keep_newest = parse_int(*v, "PLAYBOOK_KEEP_NEWEST");
    }
    if (const auto* v = env("PLAYBOOK_MEMORY_PATH")) {
        config.memory_path = absolutize(*v, cwd);
    }
    if (const auto* v = env("PLAYBOOK_LOG_DIR")) {
        config.log_dir = absolutize(*v, cwd);
    }
    if (const auto* v = env("PLAYBOOK_ENVIRONMENT_SEED")) {
        config.environment_seed = parse_int64(*v, "PLAYBOOK_ENVIRONMENT_SEED");
    }
    if (const auto* v = env("PLAYBOOK_MAX_SUBTASKS")) {
        config.caps.max_subtasks = parse_int(*v, "PLAYBOOK_MAX_SUBTASKS");
    }
    if (const auto* v = env("PLAYBOOK_MAX_REVIEWS")) {
        config.caps.max_reviews = parse_int(*v, "PLAYBOOK_MAX_REVIEWS");
    }
    if (const auto* v = env("PLAYBOOK_REFLECTOR_TOOL_BUDGET")) {
        config.caps.reflector_tool_budget = parse_int(*v, "PLAYBOOK_REFLECTOR_TOOL_BUDGET");
    }
    if (const auto* v = env("PLAYBOOK_STRATEGIC_CAP")) {
        config.caps.strategic_cap = parse_int(*v, "PLAYBOOK_STRATEGIC_CAP");
    }

    for (const char* role : kRoles) {
        const std::string upper = to_upper(role);
        auto role_env = [&](const std::string& suffix) -> const std::string* {
            return env(("PLAYBOOK_" + upper + "_" + suffix).c_str());
        };
        const bool any = role_env("KIND") || role_env("MODEL") || role_env("ENDPOINT") ||
                         role_env("API_KEY") || role_env("TEMPERATURE") ||
                         role_env("TIMEOUT_SECONDS") || role_env("FIXTURE") ||
                         role_env("FIXTURE_DIR");
        if (!any) continue;
        BackendSpec& spec = config.backends[role];  // default-constructed when new
        if (const auto* v = role_env("KIND")) spec.kind = *v;
        if (const auto* v = role_env("MODEL")) spec.model = *v;
        if (const auto* v = role_env("ENDPOINT")) spec.endpoint = *v;
        if (const auto* v = role_env("API_KEY")) spec.api_key = *v;
        if (const auto* v = role_env("TEMPERATURE")) {
            spec.temperature = parse_double(*v, "PLAYBOOK_" + upper + "_TEMPERATURE");
        }
        if (const auto* v = role_env("TIMEOUT_SECONDS")) {
            spec.timeout_seconds = parse_int(*v, "PLAYBOOK_" + upper + "_TIMEOUT_SECONDS");
        }
        if (const auto* v = role_env("FIXTURE")) spec.fixture = absolutize(*v, cwd);
        if (const auto* v = role_env("FIXTURE_DIR")) spec.fixture_dir = absolutize(*v, cwd);
        if (!spec.endpoint.empty() && spec.fixture.empty() && spec.fixture_dir.empty() &&
            spec.kind == "scripted" && role_env("ENDPOINT")) {
            spec.kind = "http";
        }
    }

    if (config.action_budget < 1) throw ValidationError("action_budget must be >= 1");
    if (config.keep_newest < 1) throw ValidationError("keep_newest must be >= 1");
    if (config.caps.max_subtasks < 1) throw ValidationError("caps.max_subtasks must be >= 1");
    if (config.caps.max_reviews < 1) throw ValidationError("caps.max_reviews must be >= 1");
    if (config.caps.reflector_tool_budget < 1) {
        throw ValidationError("caps.reflector_tool_budget must be >= 1");
    }
    if (config.caps.strategic_cap < 1) throw ValidationError("caps.strategic_cap must be >= 1");
    for (const auto& [role, spec] : config.backends) validate_backend(role, spec);
    if (config.memory_path.empty()) throw ConfigError("missing required field 'memory_path'");
    if (config.log_dir.empty()) throw ConfigError("missing required field 'log_dir'");

    return config;
}

std::map<std::string, std::string> env_overrides_from_process() {
    std::map<std::string, std::string> overrides;
    std::vector<std::string> keys = {
        "PLAYBOOK_ACTION_BUDGET", "PLAYBOOK_KEEP_NEWEST",   "PLAYBOOK_MEMORY_PATH",
        "PLAYBOOK_LOG_DIR",       "PLAYBOOK_ENVIRONMENT_SEED", "PLAYBOOK_MAX_SUBTASKS",
        "PLAYBOOK_MAX_REVIEWS",   "PLAYBOOK_REFLECTOR_TOOL_BUDGET", "PLAYBOOK_STRATEGIC_CAP"};
    for (const char* role : kRoles) {
        const std::string upper = to_upper(role);
        for (const char* suffix : {"KIND", "MODEL", "ENDPOINT", "API_KEY", "TEMPERATURE",
                                   "TIMEOUT_SECONDS", "FIXTURE", "FIXTURE_DIR"}) {
            keys.push_back("PLAYBOOK_" + upper + "_" + suffix);
        }
    }
    for (const auto& key : keys) {
        if (const char* value = std::getenv(key.c_str())) {
            overrides[key] = value;
        }
    }
    return overrides;
}

std::unique_ptr<Backend> make_backend(const BackendSpec& spec, const std::string& role,
                                      const std::string& task_id) {
    validate_backend(role, spec);
    if (spec.kind == "http") {
        HttpBackendConfig http;
        http.base_url = spec.endpoint;
        http.model = spec.model;
        http.api_key = spec.api_key;
        http.temperature = spec.temperature;
        http.timeout_seconds = spec.timeout_seconds;
        return std::make_unique<HttpBackend>(http);
    }
    fs::path fixture_path;
    if (!spec.fixture.empty()) {
        fixture_path = spec.fixture;
    } else {
        fixture_path = fs::path(spec.fixture_dir) / task_id / (role + ".json");
    }
    try {
        return std::make_unique<ScriptedBackend>(load_fixture(fixture_path),
                                                 "scripted:" + role);
    } catch (const ParseError& e) {
        throw ConfigError("backend '" + role + "': " + e.what());
    }
}

}  // namespace playbook
