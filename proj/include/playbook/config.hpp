#pragma once

#include <map>
#include <memory>
#include <string>

#include "playbook/common.hpp"
#include "playbook/gateway.hpp"

namespace playbook {

struct BackendSpec {
    std::string kind = "scripted";  // "scripted" | "http"

    // http
    std::string endpoint;
    std::string model;
    double temperature = 0.0;
    int timeout_seconds = 60;
    std::string api_key;

    // scripted: either an explicit fixture file, or a directory resolved
    // per task as <fixture_dir>/<task_id>/<role>.json
    std::string fixture;
    std::string fixture_dir;

    Json to_json() const;
    static BackendSpec from_json(const Json& j);
};

struct EngineCaps {
    int max_subtasks = 50;
    int max_reviews = 3;
    int reflector_tool_budget = 5;
    int strategic_cap = 12;
};

struct EngineConfig {
    // Roles: planner, executor, reflector, npc. A "default" entry backs any
    // role that has no entry of its own.
    std::map<std::string, BackendSpec> backends;
    int action_budget = 20;
    EngineCaps caps;
    std::string memory_path = "memory.json";
    std::string log_dir = "runs";
    std::int64_t environment_seed = 0;  // recorded for provenance; the simulated
                                        // apps are fully scripted
    int keep_newest = 12;               // executor context truncation window

    const BackendSpec& backend_for(const std::string& role) const;

    Json to_json() const;
    static EngineConfig from_json(const Json& j);
};

// Layered precedence: built-in defaults < file < env overrides. Flag
// overrides are applied by the CLI on top of the result.
EngineConfig load_config(const fs::path& path,
                         const std::map<std::string, std::string>& env_overrides);

// Collects PLAYBOOK_* variables from the process environment.
std::map<std::string, std::string> env_overrides_from_process();

// Instantiates the backend for a role; scripted fixtures resolve per task.
std::unique_ptr<Backend> make_backend(const BackendSpec& spec, const std::string& role,
                                      const std::string& task_id);

}  // namespace playbook
