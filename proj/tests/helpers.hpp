#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "playbook/common.hpp"
#include "playbook/gateway.hpp"

namespace testutil {

namespace fs = std::filesystem;

inline fs::path fixture_dir() { return fs::path(TEST_FIXTURE_DIR); }
inline fs::path build_dir() { return fs::path(TEST_BUILD_DIR); }

// Unique scratch directory under the build tree, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = build_dir() / "tmp" /
                (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(++counter));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

  private:
    fs::path path_;
};

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("testutil::read_file: cannot open " + p.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("testutil::write_file: cannot write " + p.string());
}

inline std::string fenced(const playbook::Json& j) {
    return "```json\n" + j.dump(2) + "\n```";
}

using StepList = std::vector<std::pair<std::string, std::string>>;  // (match, reply)

inline playbook::ScriptedFixture make_fixture(const StepList& steps, bool strict = true) {
    playbook::ScriptedFixture fixture;
    fixture.strict = strict;
    for (const auto& [match, reply] : steps) {
        fixture.steps.push_back(playbook::ScriptedStep{match, reply});
    }
    return fixture;
}

inline playbook::ScriptedBackend make_scripted(const StepList& steps, bool strict = true,
                                               std::string label = "scripted") {
    return playbook::ScriptedBackend(make_fixture(steps, strict), std::move(label));
}

// Records every request passed through to the wrapped backend; used to assert
// on prompt assembly inside full engine runs.
class RecordingBackend : public playbook::Backend {
  public:
    explicit RecordingBackend(playbook::Backend& inner) : inner_(inner) {}

    std::string chat(const playbook::CompletionRequest& request) override {
        requests_.push_back(request.messages);
        return inner_.chat(request);
    }
    std::string name() const override { return inner_.name(); }

    const std::vector<std::vector<playbook::ChatMessage>>& requests() const { return requests_; }

    // Latest user-role message of request i, empty when none.
    std::string latest_user(std::size_t i) const {
        const auto& msgs = requests_.at(i);
        for (auto it = msgs.rbegin(); it != msgs.rend(); ++it) {
            if (it->role == playbook::MessageRole::user) return it->content;
        }
        return {};
    }

  private:
    playbook::Backend& inner_;
    std::vector<std::vector<playbook::ChatMessage>> requests_;
};

// Always throws; used to exercise gateway-failure handling.
class ThrowingBackend : public playbook::Backend {
  public:
    explicit ThrowingBackend(bool retryable = false) : retryable_(retryable) {}
    std::string chat(const playbook::CompletionRequest&) override {
        throw playbook::GatewayError("backend unavailable", retryable_, 1);
    }
    std::string name() const override { return "throwing"; }

  private:
    bool retryable_;
};

}  // namespace testutil
