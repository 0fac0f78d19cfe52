#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "playbook/common.hpp"
#include "playbook/env.hpp"
#include "playbook/gateway.hpp"
#include "playbook/memory.hpp"

namespace playbook {

struct Action {
    std::string tool;
    Json arguments = Json::object();  // flat name -> value map
    int step_index = 0;               // 1-based position in the sub-task attempt

    Json to_json() const;
    static Action from_json(const Json& j);
};

struct Observation {
    std::string payload;
    std::string dynamic_instruction;  // tool-memory guidance current at dispatch time
    bool error_flag = false;

    // Payload plus the guidance block the agent actually sees.
    std::string render() const;

    Json to_json() const;
    static Observation from_json(const Json& j);
};

struct DispatchContext {
    SimEnvironment& env;
    const MemoryStore& store;
    Backend* vision = nullptr;  // used by the image-description tools
};

struct ToolDef {
    std::string name;
    std::string signature;    // rendered into the catalog, e.g. "(command)"
    std::string static_help;  // fallback description when no tool memory exists
    std::function<EnvResult(DispatchContext&, const Json& arguments)> handler;
};

class ToolRegistry {
  public:
    void register_tool(ToolDef def);  // duplicate name -> ValidationError
    const ToolDef* find(const std::string& name) const;
    std::vector<std::string> names() const;       // registration order
    std::set<std::string> name_set() const;
    std::size_t size() const { return tools_.size(); }

  private:
    std::vector<ToolDef> tools_;
};

// One section per tool; the tool-memory static description wins over the
// registry's fallback help.
std::string catalog(const ToolRegistry& registry, const MemoryStore& store);

// Runs the action against the environment (or the store, for the guide
// lookup). Failures of any kind come back as error_flag observations; the
// current dynamic instruction is attached either way.
Observation dispatch(const ToolRegistry& registry, const Action& action, DispatchContext& ctx);

// The full default tool set.
ToolRegistry default_registry();

}  // namespace playbook
