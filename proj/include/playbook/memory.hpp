#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "playbook/common.hpp"

namespace playbook {

class Backend;

// <Dilemma, Strategy> pair injected into the system prompt at startup.
struct StrategicEntry {
    std::string dilemma;
    std::string strategy;
    std::vector<std::string> provenance;  // contributing task ids
    int revision = 1;

    Json to_json() const;
    static StrategicEntry from_json(const Json& j);
};

// Lightweight index row; this is all that is loaded at startup.
struct SopIndexEntry {
    std::string application;
    std::string function;
    std::string summary;  // capped at kSummaryCap chars
    std::string sop_id;

    Json to_json() const;
    static SopIndexEntry from_json(const Json& j);
};

// Full guide body, fetched on demand through access_guide.
struct SopContent {
    std::string sop_id;
    std::vector<std::string> preconditions;
    std::vector<std::string> steps;
    std::vector<std::string> parameters;
    std::vector<std::string> notes;
    std::vector<std::string> provenance;
    int revision = 1;

    Json to_json() const;
    static SopContent from_json(const Json& j);
    std::string render() const;
};

// All content revisions filed under one index row; newest last.
struct SopRecord {
    std::string sop_id;
    std::vector<SopContent> revisions;

    const SopContent& latest() const { return revisions.back(); }
};

// Per-tool static description (startup) + dynamic instruction (appended to
// observations after the tool runs).
struct ToolMemoryEntry {
    std::string tool;
    std::string static_description;
    std::string dynamic_instruction;
    int revision = 1;

    Json to_json() const;
    static ToolMemoryEntry from_json(const Json& j);
};

struct StartupContext {
    std::string strategic_text;
    std::string sop_index_text;
    std::string tool_static_text;
};

struct GuideResult {
    std::vector<SopContent> found;
    std::vector<std::pair<std::string, std::string>> missing;  // (application, function)
};

struct ConsolidationReport {
    std::vector<std::string> merged;     // "a + b -> c"
    std::vector<std::string> dropped;    // dilemmas / sop ids removed
    std::vector<std::string> rewritten;
    std::vector<std::string> evicted;    // cap enforcement
    bool changed = false;
    std::string error;  // non-empty when the gateway failed and nothing was applied

    Json to_json() const;
};

class MemoryStore {
  public:
    static constexpr int kSchemaVersion = 1;
    static constexpr std::size_t kSummaryCap = 200;

    const std::vector<StrategicEntry>& strategic() const { return strategic_; }
    const std::vector<SopIndexEntry>& sop_index() const { return sop_index_; }
    const std::map<std::string, SopRecord>& sop_contents() const { return sop_contents_; }
    const std::vector<ToolMemoryEntry>& tool_entries() const { return tool_entries_; }
    std::int64_t revision() const { return store_revision_; }

    bool empty() const {
        return strategic_.empty() && sop_index_.empty() && tool_entries_.empty();
    }

    // Inserts a new entry or replaces the strategy of an existing dilemma
    // (matched case/whitespace-insensitively), bumping its revision.
    void upsert_strategic(StrategicEntry entry);

    // Adds an SOP. A repeated (application, function) keeps one index row:
    // the summary is replaced and the content is attached as a new revision.
    // Returns the stable sop id.
    std::string add_sop(SopIndexEntry index, SopContent content);

    struct ToolMemoryNote {
        bool known_tool = true;
        std::string message;
    };
    // Upsert by tool name. When a registry name set is supplied, unknown
    // tools are accepted but flagged in the returned note.
    ToolMemoryNote set_tool_memory(ToolMemoryEntry entry,
                                   const std::set<std::string>* known_tools = nullptr);

    // Batch index lookup. Absent entries land in `missing`; that is a signal,
    // not an error.
    GuideResult query_sops(
        const std::map<std::string, std::vector<std::string>>& batch_requests) const;

    const SopIndexEntry* find_index(const std::string& application,
                                    const std::string& function) const;
    const ToolMemoryEntry* find_tool(const std::string& tool) const;

    StartupContext render_startup_context() const;

    Json to_json() const;
    static MemoryStore from_json(const Json& j);

    // Applies a structured merge plan produced by the consolidation gateway
    // call. Throws ValidationError when the plan references unknown entries.
    ConsolidationReport apply_merge_plan(const Json& plan, int strategic_cap);

    void bump_revision() { ++store_revision_; }

  private:
    friend ConsolidationReport consolidate(MemoryStore& store, Backend& gateway,
                                           int strategic_cap);

    StrategicEntry* find_strategic(const std::string& dilemma);
    void insert_strategic_sorted(StrategicEntry entry);
    std::string unique_sop_id(const std::string& application, const std::string& function) const;

    std::vector<StrategicEntry> strategic_;        // sorted by normalized dilemma
    std::vector<SopIndexEntry> sop_index_;         // sorted by (application, function) key
    std::map<std::string, SopRecord> sop_contents_;
    std::vector<ToolMemoryEntry> tool_entries_;    // sorted by tool name
    std::int64_t store_revision_ = 0;
};

// Canonical bytes: stable field and entry ordering, two-space indent,
// trailing newline. save/load go through these.
std::string serialize_memory(const MemoryStore& store);
MemoryStore parse_memory(const std::string& bytes);

// Missing file + create_if_missing -> empty store. Never mutates the file.
MemoryStore load_memory(const fs::path& path, bool create_if_missing = true);

// Atomic replace: write to a temp file in the same directory, then rename.
void save_memory(const MemoryStore& store, const fs::path& path);

// Asks the gateway for a merge plan over the current store and applies it
// all-or-nothing. Exact duplicate dilemmas are merged mechanically first;
// entries beyond the strategic cap are evicted deterministically afterwards
// (lowest revision first). On gateway failure the store is unchanged and the
// report carries the error.
ConsolidationReport consolidate(MemoryStore& store, Backend& gateway, int strategic_cap);

}  // namespace playbook
