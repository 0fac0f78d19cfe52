#include "playbook/memory.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "playbook/gateway.hpp"
#include "playbook/text.hpp"

namespace playbook {

namespace {

std::vector<std::string> string_list(const Json& j, const std::string& field,
                                     const std::string& where) {
    if (!j.contains(field)) return {};
    const Json& v = j.at(field);
    if (!v.is_array()) throw ParseError(where + ": field '" + field + "' must be a list");
    std::vector<std::string> out;
    for (const auto& item : v) {
        if (!item.is_string()) throw ParseError(where + ": field '" + field + "' must hold strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::string required_string(const Json& j, const std::string& field, const std::string& where) {
    if (!j.contains(field) || !j.at(field).is_string()) {
        throw ParseError(where + ": missing string field '" + field + "'");
    }
    return j.at(field).get<std::string>();
}

Json string_array(const std::vector<std::string>& v) {
    Json arr = Json::array();
    for (const auto& s : v) arr.push_back(s);
    return arr;
}

std::string clip_summary(std::string s) {
    if (s.size() > MemoryStore::kSummaryCap) s.resize(MemoryStore::kSummaryCap);
    return s;
}

}  // namespace

Json StrategicEntry::to_json() const {
    Json j;
    j["dilemma"] = dilemma;
    j["strategy"] = strategy;
    j["provenance"] = string_array(provenance);
    j["revision"] = revision;
    return j;
}

StrategicEntry StrategicEntry::from_json(const Json& j) {
    StrategicEntry e;
    e.dilemma = required_string(j, "dilemma", "strategic entry");
    e.strategy = required_string(j, "strategy", "strategic entry '" + e.dilemma + "'");
    e.provenance = string_list(j, "provenance", "strategic entry '" + e.dilemma + "'");
    e.revision = j.value("revision", 1);
    if (trim(e.dilemma).empty() || trim(e.strategy).empty()) {
        throw ParseError("strategic entry: dilemma and strategy must be non-empty");
    }
    return e;
}

Json SopIndexEntry::to_json() const {
    Json j;
    j["application"] = application;
    j["function"] = function;
    j["summary"] = summary;
    j["sop_id"] = sop_id;
    return j;
}

SopIndexEntry SopIndexEntry::from_json(const Json& j) {
    SopIndexEntry e;
    e.application = required_string(j, "application", "sop index entry");
    e.function = required_string(j, "function", "sop index entry");
    e.summary = clip_summary(required_string(j, "summary", "sop index entry"));
    e.sop_id = required_string(j, "sop_id", "sop index entry");
    return e;
}

Json SopContent::to_json() const {
    Json j;
    j["sop_id"] = sop_id;
    j["preconditions"] = string_array(preconditions);
    j["steps"] = string_array(steps);
    j["parameters"] = string_array(parameters);
    j["notes"] = string_array(notes);
    j["provenance"] = string_array(provenance);
    j["revision"] = revision;
    return j;
}

SopContent SopContent::from_json(const Json& j) {
    SopContent c;
    c.sop_id = required_string(j, "sop_id", "sop content");
    const std::string where = "sop content '" + c.sop_id + "'";
    c.preconditions = string_list(j, "preconditions", where);
    c.steps = string_list(j, "steps", where);
    c.parameters = string_list(j, "parameters", where);
    c.notes = string_list(j, "notes", where);
    c.provenance = string_list(j, "provenance", where);
    c.revision = j.value("revision", 1);
    if (c.steps.empty()) throw ParseError(where + ": steps must be non-empty");
    return c;
}

std::string SopContent::render() const {
    std::ostringstream out;
    if (!preconditions.empty()) out << "Preconditions: " << join(preconditions, "; ") << "\n";
    out << "Steps:\n";
    for (std::size_t i = 0; i < steps.size(); ++i) {
        out << "  " << (i + 1) << ". " << steps[i] << "\n";
    }
    if (!parameters.empty()) out << "Parameters: " << join(parameters, "; ") << "\n";
    if (!notes.empty()) out << "Notes: " << join(notes, "; ") << "\n";
    return out.str();
}

Json ToolMemoryEntry::to_json() const {
    Json j;
    j["tool"] = tool;
    j["static_description"] = static_description;
    j["dynamic_instruction"] = dynamic_instruction;
    j["revision"] = revision;
    return j;
}

ToolMemoryEntry ToolMemoryEntry::from_json(const Json& j) {
    ToolMemoryEntry e;
    e.tool = required_string(j, "tool", "tool memory entry");
    e.static_description = required_string(j, "static_description", "tool memory '" + e.tool + "'");
    e.dynamic_instruction = j.value("dynamic_instruction", std::string{});
    e.revision = j.value("revision", 1);
    return e;
}

Json ConsolidationReport::to_json() const {
    Json j;
    j["merged"] = string_array(merged);
    j["dropped"] = string_array(dropped);
    j["rewritten"] = string_array(rewritten);
    j["evicted"] = string_array(evicted);
    j["changed"] = changed;
    if (!error.empty()) j["error"] = error;
    return j;
}

StrategicEntry* MemoryStore::find_strategic(const std::string& dilemma) {
    const std::string key = normalize_key(dilemma);
    for (auto& e : strategic_) {
        if (normalize_key(e.dilemma) == key) return &e;
    }
    return nullptr;
}

void MemoryStore::insert_strategic_sorted(StrategicEntry entry) {
    auto pos = std::lower_bound(strategic_.begin(), strategic_.end(), entry,
                                [](const StrategicEntry& a, const StrategicEntry& b) {
                                    return normalize_key(a.dilemma) < normalize_key(b.dilemma);
                                });
    strategic_.insert(pos, std::move(entry));
}

void MemoryStore::upsert_strategic(StrategicEntry entry) {
    if (trim(entry.dilemma).empty()) throw ValidationError("strategic entry: empty dilemma");
    if (trim(entry.strategy).empty()) throw ValidationError("strategic entry: empty strategy");
    if (StrategicEntry* existing = find_strategic(entry.dilemma)) {
        existing->strategy = entry.strategy;
        for (const auto& p : entry.provenance) {
            if (std::find(existing->provenance.begin(), existing->provenance.end(), p) ==
                existing->provenance.end()) {
                existing->provenance.push_back(p);
            }
        }
        ++existing->revision;
    } else {
        entry.revision = 1;
        insert_strategic_sorted(std::move(entry));
    }
    ++store_revision_;
}

std::string MemoryStore::unique_sop_id(const std::string& application,
                                       const std::string& function) const {
    std::string base = slugify(application) + "-" + slugify(function);
    if (base == "-") base = "sop";
    std::string id = base;
    int n = 2;
    while (sop_contents_.count(id) > 0) {
        id = base + "-" + std::to_string(n++);
    }
    return id;
}

std::string MemoryStore::add_sop(SopIndexEntry index, SopContent content) {
    if (trim(index.application).empty() || trim(index.function).empty()) {
        throw ValidationError("add_sop: application and function must be non-empty");
    }
    if (content.steps.empty()) throw ValidationError("add_sop: steps must be non-empty");
    index.summary = clip_summary(index.summary);

    if (const SopIndexEntry* existing = find_index(index.application, index.function)) {
        // One index row per (application, function); latest summary wins and
        // the content lands as a sibling revision.
        const std::string id = existing->sop_id;
        for (auto& row : sop_index_) {
            if (row.sop_id == id) {
                row.summary = index.summary;
                break;
            }
        }
        SopRecord& rec = sop_contents_.at(id);
        content.sop_id = id;
        content.revision = rec.latest().revision + 1;
        rec.revisions.push_back(std::move(content));
        ++store_revision_;
        return id;
    }

    const std::string id = unique_sop_id(index.application, index.function);
    index.sop_id = id;
    content.sop_id = id;
    content.revision = 1;

    auto pos = std::lower_bound(
        sop_index_.begin(), sop_index_.end(), index,
        [](const SopIndexEntry& a, const SopIndexEntry& b) {
            auto ka = std::make_pair(normalize_key(a.application), normalize_key(a.function));
            auto kb = std::make_pair(normalize_key(b.application), normalize_key(b.function));
            return ka < kb;
        });
    sop_index_.insert(pos, index);
    sop_contents_[id] = SopRecord{id, {std::move(content)}};
    ++store_revision_;
    return id;
}

MemoryStore::ToolMemoryNote MemoryStore::set_tool_memory(
    ToolMemoryEntry entry, const std::set<std::string>* known_tools) {
    if (trim(entry.tool).empty()) throw ValidationError("tool memory: empty tool name");

    ToolMemoryNote note;
    if (known_tools != nullptr && known_tools->count(entry.tool) == 0) {
        note.known_tool = false;
        note.message = "tool '" + entry.tool + "' is not in the active tool set";
    }

    auto it = std::find_if(tool_entries_.begin(), tool_entries_.end(),
                           [&](const ToolMemoryEntry& e) { return e.tool == entry.tool; });
    if (it != tool_entries_.end()) {
        if (!trim(entry.static_description).empty()) it->static_description = entry.static_description;
        it->dynamic_instruction = entry.dynamic_instruction;
        ++it->revision;
    } else {
        if (trim(entry.static_description).empty()) {
            throw ValidationError("tool memory '" + entry.tool +
                                  "': static_description must be non-empty");
        }
        entry.revision = 1;
        auto pos = std::lower_bound(tool_entries_.begin(), tool_entries_.end(), entry,
                                    [](const ToolMemoryEntry& a, const ToolMemoryEntry& b) {
                                        return a.tool < b.tool;
                                    });
        tool_entries_.insert(pos, std::move(entry));
    }
    ++store_revision_;
    return note;
}

const SopIndexEntry* MemoryStore::find_index(const std::string& application,
                                             const std::string& function) const {
    const std::string app_key = normalize_key(application);
    const std::string fn_key = normalize_key(function);
    for (const auto& row : sop_index_) {
        if (normalize_key(row.application) == app_key && normalize_key(row.function) == fn_key) {
            return &row;
        }
    }
    return nullptr;
}

const ToolMemoryEntry* MemoryStore::find_tool(const std::string& tool) const {
    for (const auto& e : tool_entries_) {
        if (e.tool == tool) return &e;
    }
    return nullptr;
}

GuideResult MemoryStore::query_sops(
    const std::map<std::string, std::vector<std::string>>& batch_requests) const {
    if (batch_requests.empty()) {
        throw ValidationError("query_sops: batch_requests must be a non-empty map");
    }
    GuideResult result;
    for (const auto& [application, functions] : batch_requests) {
        const std::string app_key = normalize_key(application);
        for (const auto& function : functions) {
            const std::string fn_key = normalize_key(function);
            const SopIndexEntry* best = nullptr;
            double best_score = -1.0;
            bool best_exact = false;
            for (const auto& row : sop_index_) {
                if (normalize_key(row.application) != app_key) continue;
                const bool exact = normalize_key(row.function) == fn_key;
                const double score = exact ? 1.0 : token_jaccard(row.function, function);
                if (!exact && score < 0.6) continue;
                bool better = false;
                if (exact && !best_exact) {
                    better = true;
                } else if (exact == best_exact && score > best_score) {
                    better = true;
                } else if (exact == best_exact && score == best_score && best != nullptr) {
                    const auto& cand_rec = sop_contents_.at(row.sop_id);
                    const auto& best_rec = sop_contents_.at(best->sop_id);
                    if (cand_rec.latest().revision > best_rec.latest().revision) {
                        better = true;
                    } else if (cand_rec.latest().revision == best_rec.latest().revision &&
                               row.sop_id < best->sop_id) {
                        better = true;
                    }
                }
                if (better) {
                    best = &row;
                    best_score = score;
                    best_exact = exact;
                }
            }
            if (best != nullptr) {
                result.found.push_back(sop_contents_.at(best->sop_id).latest());
            } else {
                result.missing.emplace_back(application, function);
            }
        }
    }
    return result;
}

StartupContext MemoryStore::render_startup_context() const {
    StartupContext ctx;

    std::ostringstream strat;
    for (const auto& e : strategic_) {
        strat << "- " << e.dilemma << ": " << e.strategy << "\n";
    }
    ctx.strategic_text = strat.str();

    // Index rows only; SOP bodies never reach the startup context.
    std::ostringstream index;
    std::string current_app;
    for (const auto& row : sop_index_) {
        if (row.application != current_app) {
            current_app = row.application;
            index << "## " << current_app << "\n";
        }
        index << "- " << row.function << ": " << row.summary << "\n";
    }
    ctx.sop_index_text = index.str();

    std::ostringstream tools;
    for (const auto& e : tool_entries_) {
        tools << "### " << e.tool << "\n" << e.static_description << "\n";
    }
    ctx.tool_static_text = tools.str();
    return ctx;
}

Json MemoryStore::to_json() const {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["store_revision"] = store_revision_;

    Json strat = Json::array();
    for (const auto& e : strategic_) strat.push_back(e.to_json());
    j["strategic"] = std::move(strat);

    Json index = Json::array();
    for (const auto& e : sop_index_) index.push_back(e.to_json());
    Json contents = Json::object();
    for (const auto& [id, rec] : sop_contents_) {
        Json revs = Json::array();
        for (const auto& c : rec.revisions) revs.push_back(c.to_json());
        contents[id] = Json{{"sop_id", id}, {"revisions", std::move(revs)}};
    }
    j["procedural"] = Json{{"index", std::move(index)}, {"contents", std::move(contents)}};

    Json tools = Json::array();
    for (const auto& e : tool_entries_) tools.push_back(e.to_json());
    j["tool"] = std::move(tools);
    return j;
}

MemoryStore MemoryStore::from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("memory file: top level must be an object");
    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer()) {
        throw ParseError("memory file: missing integer schema_version");
    }
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
        throw ParseError("memory file: unsupported schema_version " + std::to_string(version));
    }

    MemoryStore store;
    store.store_revision_ = j.value("store_revision", 0);

    if (j.contains("strategic")) {
        for (const auto& e : j.at("strategic")) {
            store.strategic_.push_back(StrategicEntry::from_json(e));
        }
        std::stable_sort(store.strategic_.begin(), store.strategic_.end(),
                         [](const StrategicEntry& a, const StrategicEntry& b) {
                             return normalize_key(a.dilemma) < normalize_key(b.dilemma);
                         });
    }

    if (j.contains("procedural")) {
        const Json& proc = j.at("procedural");
        if (proc.contains("index")) {
            for (const auto& e : proc.at("index")) {
                store.sop_index_.push_back(SopIndexEntry::from_json(e));
            }
        }
        if (proc.contains("contents")) {
            for (const auto& [id, rec] : proc.at("contents").items()) {
                SopRecord record;
                record.sop_id = id;
                if (!rec.contains("revisions") || !rec.at("revisions").is_array() ||
                    rec.at("revisions").empty()) {
                    throw ParseError("memory file: sop '" + id + "' has no content revisions");
                }
                for (const auto& c : rec.at("revisions")) {
                    record.revisions.push_back(SopContent::from_json(c));
                }
                store.sop_contents_[id] = std::move(record);
            }
        }
        // Index/content bijection.
        for (const auto& row : store.sop_index_) {
            if (store.sop_contents_.count(row.sop_id) == 0) {
                throw ParseError("memory file: sop index entry '" + row.sop_id +
                                 "' has no content");
            }
        }
        for (const auto& [id, rec] : store.sop_contents_) {
            const bool indexed = std::any_of(store.sop_index_.begin(), store.sop_index_.end(),
                                             [&](const SopIndexEntry& e) { return e.sop_id == id; });
            if (!indexed) {
                throw ParseError("memory file: sop content '" + id + "' has no index entry");
            }
        }
        std::stable_sort(
            store.sop_index_.begin(), store.sop_index_.end(),
            [](const SopIndexEntry& a, const SopIndexEntry& b) {
                auto ka = std::make_pair(normalize_key(a.application), normalize_key(a.function));
                auto kb = std::make_pair(normalize_key(b.application), normalize_key(b.function));
                return ka < kb;
            });
    }

    if (j.contains("tool")) {
        for (const auto& e : j.at("tool")) {
            store.tool_entries_.push_back(ToolMemoryEntry::from_json(e));
        }
        std::stable_sort(store.tool_entries_.begin(), store.tool_entries_.end(),
                         [](const ToolMemoryEntry& a, const ToolMemoryEntry& b) {
                             return a.tool < b.tool;
                         });
    }
    return store;
}

std::string serialize_memory(const MemoryStore& store) {
    return store.to_json().dump(2) + "\n";
}

MemoryStore parse_memory(const std::string& bytes) {
    Json j;
    try {
        j = Json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("memory file: invalid JSON: ") + e.what());
    }
    return MemoryStore::from_json(j);
}

MemoryStore load_memory(const fs::path& path, bool create_if_missing) {
    if (!fs::exists(path)) {
        if (create_if_missing) return MemoryStore{};
        throw ParseError("memory file not found: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open memory file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_memory(buf.str());
}

void save_memory(const MemoryStore& store, const fs::path& path) {
    const std::string bytes = serialize_memory(store);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write memory file: " + path.string());
        out << bytes;
        if (!out.good()) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed for memory file: " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("atomic replace failed for memory file: " + path.string());
    }
}

ConsolidationReport MemoryStore::apply_merge_plan(const Json& plan, int strategic_cap) {
    if (!plan.is_object()) {
        throw ValidationError("merge plan must be a structured object, not free text");
    }
    ConsolidationReport report;
    const std::string before = serialize_memory(*this);

    // Mechanical pass: exact duplicates by normalized dilemma (possible only
    // in hand-edited files) collapse into the first occurrence.
    for (std::size_t i = 0; i < strategic_.size(); ++i) {
        for (std::size_t k = i + 1; k < strategic_.size();) {
            if (normalize_key(strategic_[k].dilemma) == normalize_key(strategic_[i].dilemma)) {
                for (const auto& p : strategic_[k].provenance) {
                    if (std::find(strategic_[i].provenance.begin(), strategic_[i].provenance.end(),
                                  p) == strategic_[i].provenance.end()) {
                        strategic_[i].provenance.push_back(p);
                    }
                }
                strategic_[i].revision = std::max(strategic_[i].revision, strategic_[k].revision);
                report.merged.push_back(strategic_[k].dilemma + " -> " + strategic_[i].dilemma);
                strategic_.erase(strategic_.begin() + static_cast<std::ptrdiff_t>(k));
            } else {
                ++k;
            }
        }
    }

    if (plan.contains("strategic")) {
        if (!plan.at("strategic").is_array()) {
            throw ValidationError("merge plan: 'strategic' must be a list of directives");
        }
        for (const auto& d : plan.at("strategic")) {
            const std::string action = d.value("action", std::string{});
            if (action == "merge") {
                if (!d.contains("dilemmas") || !d.at("dilemmas").is_array() ||
                    d.at("dilemmas").size() < 2 || !d.contains("into")) {
                    throw ValidationError("merge plan: merge directive needs >=2 dilemmas and 'into'");
                }
                StrategicEntry merged;
                merged.dilemma = required_string(d.at("into"), "dilemma", "merge directive");
                merged.strategy = required_string(d.at("into"), "strategy", "merge directive");
                int max_rev = 0;
                for (const auto& dj : d.at("dilemmas")) {
                    const std::string dilemma = dj.get<std::string>();
                    StrategicEntry* src = find_strategic(dilemma);
                    if (src == nullptr) {
                        throw ValidationError("merge plan: unknown dilemma '" + dilemma + "'");
                    }
                    for (const auto& p : src->provenance) {
                        if (std::find(merged.provenance.begin(), merged.provenance.end(), p) ==
                            merged.provenance.end()) {
                            merged.provenance.push_back(p);
                        }
                    }
                    max_rev = std::max(max_rev, src->revision);
                    report.merged.push_back(dilemma + " -> " + merged.dilemma);
                    strategic_.erase(std::remove_if(strategic_.begin(), strategic_.end(),
                                                    [&](const StrategicEntry& e) {
                                                        return normalize_key(e.dilemma) ==
                                                               normalize_key(dilemma);
                                                    }),
                                     strategic_.end());
                }
                merged.revision = max_rev + 1;
                if (StrategicEntry* clash = find_strategic(merged.dilemma)) {
                    for (const auto& p : merged.provenance) {
                        if (std::find(clash->provenance.begin(), clash->provenance.end(), p) ==
                            clash->provenance.end()) {
                            clash->provenance.push_back(p);
                        }
                    }
                    clash->strategy = merged.strategy;
                    ++clash->revision;
                } else {
                    insert_strategic_sorted(std::move(merged));
                }
            } else if (action == "drop") {
                const std::string dilemma = required_string(d, "dilemma", "drop directive");
                if (find_strategic(dilemma) == nullptr) {
                    throw ValidationError("merge plan: unknown dilemma '" + dilemma + "'");
                }
                strategic_.erase(std::remove_if(strategic_.begin(), strategic_.end(),
                                                [&](const StrategicEntry& e) {
                                                    return normalize_key(e.dilemma) ==
                                                           normalize_key(dilemma);
                                                }),
                                 strategic_.end());
                report.dropped.push_back(dilemma);
            } else if (action == "rewrite") {
                const std::string dilemma = required_string(d, "dilemma", "rewrite directive");
                StrategicEntry* e = find_strategic(dilemma);
                if (e == nullptr) {
                    throw ValidationError("merge plan: unknown dilemma '" + dilemma + "'");
                }
                if (d.contains("strategy")) e->strategy = d.at("strategy").get<std::string>();
                if (d.contains("new_dilemma")) e->dilemma = d.at("new_dilemma").get<std::string>();
                ++e->revision;
                report.rewritten.push_back(dilemma);
                std::stable_sort(strategic_.begin(), strategic_.end(),
                                 [](const StrategicEntry& a, const StrategicEntry& b) {
                                     return normalize_key(a.dilemma) < normalize_key(b.dilemma);
                                 });
            } else {
                throw ValidationError("merge plan: unknown strategic action '" + action + "'");
            }
        }
    }

    if (plan.contains("sops")) {
        if (!plan.at("sops").is_array()) {
            throw ValidationError("merge plan: 'sops' must be a list of directives");
        }
        for (const auto& d : plan.at("sops")) {
            const std::string action = d.value("action", std::string{});
            const std::string id = required_string(d, "sop_id", "sop directive");
            if (sop_contents_.count(id) == 0) {
                throw ValidationError("merge plan: unknown sop_id '" + id + "'");
            }
            if (action == "drop") {
                sop_contents_.erase(id);
                sop_index_.erase(std::remove_if(sop_index_.begin(), sop_index_.end(),
                                                [&](const SopIndexEntry& e) { return e.sop_id == id; }),
                                 sop_index_.end());
                report.dropped.push_back(id);
            } else if (action == "rewrite_summary") {
                const std::string summary = required_string(d, "summary", "sop directive");
                for (auto& row : sop_index_) {
                    if (row.sop_id == id) row.summary = clip_summary(summary);
                }
                report.rewritten.push_back(id);
            } else {
                throw ValidationError("merge plan: unknown sop action '" + action + "'");
            }
        }
    }

    // Deterministic cap enforcement: evict lowest revision first.
    while (static_cast<int>(strategic_.size()) > strategic_cap) {
        auto victim = std::min_element(strategic_.begin(), strategic_.end(),
                                       [](const StrategicEntry& a, const StrategicEntry& b) {
                                           if (a.revision != b.revision) return a.revision < b.revision;
                                           return normalize_key(a.dilemma) < normalize_key(b.dilemma);
                                       });
        report.evicted.push_back(victim->dilemma);
        strategic_.erase(victim);
    }

    report.changed = serialize_memory(*this) != before;
    return report;
}

ConsolidationReport consolidate(MemoryStore& store, Backend& gateway, int strategic_cap) {
    Json snapshot;
    {
        Json strat = Json::array();
        for (const auto& e : store.strategic()) strat.push_back(e.to_json());
        Json index = Json::array();
        for (const auto& e : store.sop_index()) index.push_back(e.to_json());
        snapshot = Json{{"strategic", std::move(strat)}, {"sop_index", std::move(index)}};
    }

    CompletionRequest req;
    req.messages.push_back(
        {MessageRole::system,
         "You maintain an agent's experience store. Reply with a fenced json merge plan."});
    std::ostringstream prompt;
    prompt << "Produce a merge plan for the memory store below: deduplicate, generalize, and"
              " keep strategic memory within " << strategic_cap << " entries.\n"
           << "Current store:\n" << snapshot.dump(2) << "\n"
           << "Reply with a json object {\"strategic\": [...], \"sops\": [...]} where each"
              " strategic directive is {\"action\": \"merge\"|\"drop\"|\"rewrite\", ...} and each"
              " sop directive is {\"action\": \"drop\"|\"rewrite_summary\", \"sop_id\": ...}."
              " Use an empty object for no changes.";
    req.messages.push_back({MessageRole::user, prompt.str()});
    req.schema = ResponseSchema{"merge_plan", [](const Json& j) -> std::string {
                                    if (!j.is_object()) return "merge plan must be an object";
                                    return "";
                                }};

    ConsolidationReport report;
    try {
        Completion completion = complete(gateway, req);
        MemoryStore staged = store;  // all-or-nothing: mutate a copy
        report = staged.apply_merge_plan(completion.parsed, strategic_cap);
        if (report.changed) {
            staged.bump_revision();
            store = std::move(staged);
        }
    } catch (const std::exception& e) {
        report = ConsolidationReport{};
        report.error = e.what();
    }
    return report;
}

}  // namespace playbook
