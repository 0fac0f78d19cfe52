#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace playbook {

// Insertion-ordered JSON everywhere so that serialized artifacts are
// byte-deterministic.
using Json = nlohmann::ordered_json;

namespace fs = std::filesystem;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GatewayError : std::runtime_error {
    GatewayError(const std::string& what, bool retryable_, int attempts_)
        : std::runtime_error(what), retryable(retryable_), attempts(attempts_) {}
    bool retryable = false;
    int attempts = 1;
};

struct FixtureError : std::runtime_error {
    FixtureError(const std::string& what, std::size_t step_index_)
        : std::runtime_error(what), step_index(step_index_) {}
    std::size_t step_index = 0;  // 1-based index of the offending step
};

struct PlanningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace playbook
