#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "playbook/common.hpp"

namespace playbook {

// Everything below is a deterministic in-memory model: same seed + same call
// sequence -> same state, same outputs, same mutation log.

struct ChatRecord {
    std::string author;
    std::string text;
};

struct NpcReply {
    std::string author;
    std::string reply;
};

struct PageElement {
    std::string role;    // textbox | button | link | text
    std::string text;    // label / visible text
    std::string value;   // current input value
    std::string target;  // url opened when a link/button is clicked
};

struct Page {
    std::string title;
    std::vector<PageElement> elements;
    std::string submit_target;  // url opened when Enter is pressed on the page
};

struct IssueRecord {
    std::string id;
    std::string title;
    std::map<std::string, std::string> fields;
};

struct EnvResult {
    bool ok = true;
    std::string text;
};

class SimEnvironment {
  public:
    SimEnvironment();
    static SimEnvironment from_seed(const Json& seed);

    // --- filesystem ---------------------------------------------------------
    std::string normalize_path(const std::string& path) const;
    bool file_exists(const std::string& path) const;
    bool dir_exists(const std::string& path) const;
    const std::string* file_content(const std::string& path) const;
    void write_file(const std::string& path, const std::string& content, bool append = false);
    std::vector<std::string> list_dir(const std::string& path) const;
    const std::map<std::string, std::string>& files() const { return files_; }

    // --- shell + interpreter --------------------------------------------------
    // Output ends with a "returncode: N" line; N != 0 marks a failed command.
    EnvResult run_command(const std::string& command);
    EnvResult run_python(const std::string& code);

    // --- chat -----------------------------------------------------------------
    bool has_channel(const std::string& channel) const;
    EnvResult chat_send(const std::string& channel, const std::string& author,
                        const std::string& text);
    const std::vector<ChatRecord>* channel_messages(const std::string& channel) const;
    std::vector<std::string> channel_names() const;

    // --- issues ---------------------------------------------------------------
    const IssueRecord* find_issue(const std::string& project, const std::string& id) const;
    std::vector<std::string> project_names() const;

    // --- browser ----------------------------------------------------------------
    EnvResult browser_go_to_url(const std::string& url);
    EnvResult browser_update() const;
    EnvResult browser_click(int element_index);
    EnvResult browser_input(int element_index, const std::string& text);
    EnvResult browser_send_keys(const std::string& keys);
    EnvResult browser_close_tab(int tab_index);
    EnvResult browser_go_back();
    EnvResult browser_list_tabs() const;
    EnvResult browser_switch_tab(int tab_index);

    // Textual scene description standing in for a screenshot.
    std::string screenshot_description() const;

    // Global state summary for review prompts.
    std::string describe() const;

    const std::vector<Json>& mutation_log() const { return mutation_log_; }
    Json state_json() const;

  private:
    struct Tab {
        std::vector<std::string> history;  // last entry is the current url
        const std::string& url() const { return history.back(); }
    };

    void log_mutation(Json record);
    EnvResult shell_builtin(const std::vector<std::string>& argv, const std::string& raw);
    EnvResult chat_command(const std::vector<std::string>& argv);
    EnvResult issues_command(const std::vector<std::string>& argv);
    Page* active_page();
    const Page* active_page() const;

    std::map<std::string, std::string> files_;
    std::map<std::string, bool> dirs_;  // explicitly created directories
    std::string cwd_ = "/work";

    std::map<std::string, std::vector<ChatRecord>> channels_;
    std::map<std::string, std::vector<NpcReply>> npc_replies_;  // consumed front-first
    std::map<std::string, std::size_t> npc_cursor_;

    std::map<std::string, std::vector<IssueRecord>> projects_;

    std::map<std::string, Page> pages_;
    std::vector<Tab> tabs_;
    std::size_t active_tab_ = 0;
    int focused_element_ = -1;

    std::vector<Json> mutation_log_;
};

}  // namespace playbook
