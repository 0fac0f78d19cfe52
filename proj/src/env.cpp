#include "playbook/env.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "playbook/text.hpp"

namespace playbook {

namespace {

std::string with_returncode(std::string out, int rc) {
    if (!out.empty() && out.back() != '\n') out.push_back('\n');
    return out + "returncode: " + std::to_string(rc) + "\n";
}

// Shell-style tokenizer: whitespace-separated, single/double quotes group.
std::vector<std::string> shell_tokens(const std::string& raw) {
    std::vector<std::string> tokens;
    std::string cur;
    bool in_token = false;
    char quote = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (quote != 0) {
            if (c == quote) {
                quote = 0;
            } else {
                cur.push_back(c);
            }
            continue;
        }
        if (c == '\'' || c == '"') {
            quote = c;
            in_token = true;
            continue;
        }
        if (c == ' ' || c == '\t') {
            if (in_token) {
                tokens.push_back(cur);
                cur.clear();
                in_token = false;
            }
            continue;
        }
        cur.push_back(c);
        in_token = true;
    }
    if (in_token) tokens.push_back(cur);
    return tokens;
}

std::string basename_of(const std::string& path) {
    const std::size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string parent_of(const std::string& path) {
    const std::size_t slash = path.find_last_of('/');
    if (slash == std::string::npos || slash == 0) return "/";
    return path.substr(0, slash);
}

// Parses a python string literal starting at s[i] (which must be a quote).
// Returns the decoded text and advances i past the closing quote.
bool parse_py_string(const std::string& s, std::size_t& i, std::string& out) {
    if (i >= s.size() || (s[i] != '"' && s[i] != '\'')) return false;
    const char quote = s[i];
    ++i;
    out.clear();
    while (i < s.size()) {
        const char c = s[i];
        if (c == '\\' && i + 1 < s.size()) {
            const char n = s[i + 1];
            if (n == 'n') out.push_back('\n');
            else if (n == 't') out.push_back('\t');
            else if (n == '\\') out.push_back('\\');
            else if (n == '"') out.push_back('"');
            else if (n == '\'') out.push_back('\'');
            else { out.push_back(n); }
            i += 2;
            continue;
        }
        if (c == quote) {
            ++i;
            return true;
        }
        out.push_back(c);
        ++i;
    }
    return false;
}

void skip_spaces(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

}  // namespace

SimEnvironment::SimEnvironment() {
    tabs_.push_back(Tab{{"about:blank"}});
}

SimEnvironment SimEnvironment::from_seed(const Json& seed) {
    SimEnvironment env;
    if (seed.is_null()) return env;
    if (!seed.is_object()) throw ParseError("environment seed must be an object");

    if (seed.contains("cwd")) env.cwd_ = env.normalize_path(seed.at("cwd").get<std::string>());
    if (seed.contains("files")) {
        for (const auto& [path, content] : seed.at("files").items()) {
            env.files_[env.normalize_path(path)] = content.get<std::string>();
        }
    }
    if (seed.contains("dirs")) {
        for (const auto& d : seed.at("dirs")) {
            env.dirs_[env.normalize_path(d.get<std::string>())] = true;
        }
    }
    if (seed.contains("chat")) {
        const Json& chat = seed.at("chat");
        if (chat.contains("channels")) {
            for (const auto& [name, msgs] : chat.at("channels").items()) {
                auto& log = env.channels_[name];
                for (const auto& m : msgs) {
                    log.push_back(ChatRecord{m.value("author", std::string{"user"}),
                                             m.value("text", std::string{})});
                }
            }
        }
        if (chat.contains("npc_replies")) {
            for (const auto& [name, replies] : chat.at("npc_replies").items()) {
                auto& queue = env.npc_replies_[name];
                for (const auto& r : replies) {
                    queue.push_back(NpcReply{r.value("author", std::string{"npc"}),
                                             r.value("reply", std::string{})});
                }
                env.channels_[name];  // a scripted channel exists even if empty
            }
        }
    }
    if (seed.contains("issues")) {
        for (const auto& [project, records] : seed.at("issues").items()) {
            auto& list = env.projects_[project];
            for (const auto& r : records) {
                IssueRecord rec;
                rec.id = r.value("id", std::string{});
                rec.title = r.value("title", std::string{});
                if (r.contains("fields")) {
                    for (const auto& [k, v] : r.at("fields").items()) {
                        rec.fields[k] = v.get<std::string>();
                    }
                }
                list.push_back(std::move(rec));
            }
        }
    }
    if (seed.contains("pages")) {
        for (const auto& [url, pj] : seed.at("pages").items()) {
            Page page;
            page.title = pj.value("title", std::string{});
            page.submit_target = pj.value("submit_target", std::string{});
            if (pj.contains("elements")) {
                for (const auto& ej : pj.at("elements")) {
                    PageElement el;
                    el.role = ej.value("role", std::string{"text"});
                    el.text = ej.value("text", std::string{});
                    el.value = ej.value("value", std::string{});
                    el.target = ej.value("target", std::string{});
                    page.elements.push_back(std::move(el));
                }
            }
            env.pages_[url] = std::move(page);
        }
    }
    if (seed.contains("start_url")) {
        env.tabs_.front().history.push_back(seed.at("start_url").get<std::string>());
    }
    return env;
}

void SimEnvironment::log_mutation(Json record) {
    record["seq"] = static_cast<std::int64_t>(mutation_log_.size() + 1);
    mutation_log_.push_back(std::move(record));
}

// --- filesystem ---------------------------------------------------------------

std::string SimEnvironment::normalize_path(const std::string& path) const {
    std::string joined = path;
    if (joined.empty()) joined = cwd_;
    if (joined.front() != '/') joined = cwd_ + "/" + joined;

    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(joined);
    while (std::getline(in, part, '/')) {
        if (part.empty() || part == ".") continue;
        if (part == "..") {
            if (!parts.empty()) parts.pop_back();
            continue;
        }
        parts.push_back(part);
    }
    if (parts.empty()) return "/";
    std::string out;
    for (const auto& p : parts) out += "/" + p;
    return out;
}

bool SimEnvironment::file_exists(const std::string& path) const {
    return files_.count(normalize_path(path)) > 0;
}

bool SimEnvironment::dir_exists(const std::string& path) const {
    const std::string norm = normalize_path(path);
    if (norm == "/") return true;
    if (dirs_.count(norm) > 0) return true;
    const std::string prefix = norm + "/";
    for (const auto& [p, _] : files_) {
        if (p.rfind(prefix, 0) == 0) return true;
    }
    for (const auto& [p, _] : dirs_) {
        if (p.rfind(prefix, 0) == 0) return true;
    }
    return false;
}

const std::string* SimEnvironment::file_content(const std::string& path) const {
    auto it = files_.find(normalize_path(path));
    return it == files_.end() ? nullptr : &it->second;
}

void SimEnvironment::write_file(const std::string& path, const std::string& content,
                                bool append) {
    const std::string norm = normalize_path(path);
    if (append) {
        files_[norm] += content;
    } else {
        files_[norm] = content;
    }
    log_mutation(Json{{"op", append ? "append_file" : "write_file"},
                      {"path", norm},
                      {"bytes", static_cast<std::int64_t>(content.size())}});
}

std::vector<std::string> SimEnvironment::list_dir(const std::string& path) const {
    const std::string norm = normalize_path(path);
    const std::string prefix = norm == "/" ? "/" : norm + "/";
    std::set<std::string> out;
    auto visit = [&](const std::string& key, bool key_is_dir) {
        if (key.rfind(prefix, 0) != 0 || key == norm) return;
        const std::string rest = key.substr(prefix.size());
        const std::size_t slash = rest.find('/');
        const std::string seg = rest.substr(0, slash);
        const bool child_is_dir = slash != std::string::npos || key_is_dir;
        out.insert(seg + (child_is_dir ? "/" : ""));
    };
    for (const auto& [p, _] : files_) visit(p, false);
    for (const auto& [p, _] : dirs_) visit(p, true);
    return {out.begin(), out.end()};
}

// --- shell ---------------------------------------------------------------------

EnvResult SimEnvironment::run_command(const std::string& command) {
    std::vector<std::string> argv = shell_tokens(command);
    if (argv.empty()) return {true, with_returncode("", 0)};

    // Trailing output redirection: cmd ... > path or >> path.
    std::string redirect_path;
    bool redirect_append = false;
    if (argv.size() >= 2) {
        const std::string& op = argv[argv.size() - 2];
        if (op == ">" || op == ">>") {
            redirect_path = argv.back();
            redirect_append = op == ">>";
            argv.resize(argv.size() - 2);
        }
    }
    if (argv.empty()) return {false, with_returncode("sh: missing command", 2)};

    EnvResult inner = shell_builtin(argv, command);
    if (!redirect_path.empty()) {
        // Only successful output is redirected; error text stays visible.
        if (inner.ok) {
            write_file(redirect_path, inner.text, redirect_append);
            inner.text.clear();
        }
    }
    return {inner.ok, with_returncode(inner.text, inner.ok ? 0 : 1)};
}

EnvResult SimEnvironment::shell_builtin(const std::vector<std::string>& argv,
                                        const std::string& raw) {
    const std::string& cmd = argv[0];

    if (cmd == "pwd") return {true, cwd_ + "\n"};

    if (cmd == "cd") {
        const std::string target = argv.size() > 1 ? argv[1] : "/";
        if (!dir_exists(target)) return {false, "cd: " + target + ": no such directory"};
        cwd_ = normalize_path(target);
        return {true, ""};
    }

    if (cmd == "ls") {
        const std::string target = argv.size() > 1 ? argv[1] : cwd_;
        if (file_exists(target)) return {true, basename_of(normalize_path(target)) + "\n"};
        if (!dir_exists(target)) {
            return {false, "ls: cannot access '" + target + "': no such file or directory"};
        }
        std::string out;
        for (const auto& name : list_dir(target)) out += name + "\n";
        return {true, out};
    }

    if (cmd == "cat") {
        if (argv.size() < 2) return {false, "cat: missing operand"};
        std::string out;
        for (std::size_t i = 1; i < argv.size(); ++i) {
            const std::string* content = file_content(argv[i]);
            if (content == nullptr) {
                return {false, "cat: " + argv[i] + ": no such file"};
            }
            out += *content;
        }
        return {true, out};
    }

    if (cmd == "echo") {
        std::string out;
        for (std::size_t i = 1; i < argv.size(); ++i) {
            if (i > 1) out += " ";
            out += argv[i];
        }
        return {true, out + "\n"};
    }

    if (cmd == "mkdir") {
        bool parents = false;
        std::vector<std::string> targets;
        for (std::size_t i = 1; i < argv.size(); ++i) {
            if (argv[i] == "-p") parents = true;
            else targets.push_back(argv[i]);
        }
        if (targets.empty()) return {false, "mkdir: missing operand"};
        for (const auto& t : targets) {
            const std::string norm = normalize_path(t);
            if (dir_exists(norm) && !parents) {
                return {false, "mkdir: cannot create directory '" + t + "': file exists"};
            }
            if (!parents && !dir_exists(parent_of(norm))) {
                return {false, "mkdir: cannot create directory '" + t + "': no such parent"};
            }
            dirs_[norm] = true;
            log_mutation(Json{{"op", "mkdir"}, {"path", norm}});
        }
        return {true, ""};
    }

    if (cmd == "touch") {
        if (argv.size() < 2) return {false, "touch: missing operand"};
        for (std::size_t i = 1; i < argv.size(); ++i) {
            const std::string norm = normalize_path(argv[i]);
            if (files_.count(norm) == 0) {
                files_[norm] = "";
                log_mutation(Json{{"op", "write_file"}, {"path", norm}, {"bytes", 0}});
            }
        }
        return {true, ""};
    }

    if (cmd == "rm") {
        bool recursive = false;
        std::vector<std::string> targets;
        for (std::size_t i = 1; i < argv.size(); ++i) {
            if (argv[i] == "-r" || argv[i] == "-rf" || argv[i] == "-fr") recursive = true;
            else targets.push_back(argv[i]);
        }
        if (targets.empty()) return {false, "rm: missing operand"};
        for (const auto& t : targets) {
            const std::string norm = normalize_path(t);
            if (files_.count(norm) > 0) {
                files_.erase(norm);
                log_mutation(Json{{"op", "rm"}, {"path", norm}});
                continue;
            }
            if (dir_exists(norm)) {
                if (!recursive) return {false, "rm: cannot remove '" + t + "': is a directory"};
                const std::string prefix = norm + "/";
                for (auto it = files_.begin(); it != files_.end();) {
                    if (it->first.rfind(prefix, 0) == 0) it = files_.erase(it);
                    else ++it;
                }
                for (auto it = dirs_.begin(); it != dirs_.end();) {
                    if (it->first == norm || it->first.rfind(prefix, 0) == 0) it = dirs_.erase(it);
                    else ++it;
                }
                log_mutation(Json{{"op", "rm"}, {"path", norm}, {"recursive", true}});
                continue;
            }
            return {false, "rm: cannot remove '" + t + "': no such file or directory"};
        }
        return {true, ""};
    }

    if (cmd == "mv" || cmd == "cp") {
        if (argv.size() != 3) return {false, cmd + ": expected source and destination"};
        const std::string src = normalize_path(argv[1]);
        auto it = files_.find(src);
        if (it == files_.end()) return {false, cmd + ": " + argv[1] + ": no such file"};
        std::string dst = normalize_path(argv[2]);
        if (dir_exists(dst)) dst = dst + "/" + basename_of(src);
        files_[dst] = it->second;
        if (cmd == "mv") files_.erase(src);
        log_mutation(Json{{"op", cmd}, {"from", src}, {"to", dst}});
        return {true, ""};
    }

    if (cmd == "chat") return chat_command(argv);
    if (cmd == "issues") return issues_command(argv);

    (void)raw;
    return {false, "sh: " + cmd + ": command not found"};
}

EnvResult SimEnvironment::chat_command(const std::vector<std::string>& argv) {
    if (argv.size() < 2) {
        return {false, "chat: usage: chat channels|create|read|send|dm ..."};
    }
    const std::string& sub = argv[1];

    if (sub == "channels") {
        std::string out;
        for (const auto& [name, msgs] : channels_) {
            out += name + " (" + std::to_string(msgs.size()) + " messages)\n";
        }
        return {true, out.empty() ? "no channels\n" : out};
    }
    if (sub == "create") {
        if (argv.size() < 3) return {false, "chat: create needs a channel name"};
        if (channels_.count(argv[2]) > 0) {
            return {false, "chat: channel '" + argv[2] + "' already exists"};
        }
        channels_[argv[2]];
        log_mutation(Json{{"op", "chat_create"}, {"channel", argv[2]}});
        return {true, "created #" + argv[2] + "\n"};
    }
    if (sub == "read") {
        if (argv.size() < 3) return {false, "chat: read needs a channel name"};
        const auto* msgs = channel_messages(argv[2]);
        if (msgs == nullptr) return {false, "chat: no channel '" + argv[2] + "'"};
        std::string out;
        for (const auto& m : *msgs) out += m.author + ": " + m.text + "\n";
        return {true, out.empty() ? "(no messages)\n" : out};
    }
    if (sub == "send" || sub == "dm") {
        if (argv.size() < 4) return {false, "chat: " + sub + " needs a target and a message"};
        std::string channel = argv[2];
        if (sub == "dm") channel = "@" + channel;
        std::string text;
        for (std::size_t i = 3; i < argv.size(); ++i) {
            if (i > 3) text += " ";
            text += argv[i];
        }
        return chat_send(channel, "agent", text);
    }
    return {false, "chat: unknown subcommand '" + sub + "'"};
}

EnvResult SimEnvironment::issues_command(const std::vector<std::string>& argv) {
    if (argv.size() < 2) {
        return {false, "issues: usage: issues projects|list|show|create|update ..."};
    }
    const std::string& sub = argv[1];

    if (sub == "projects") {
        std::string out;
        for (const auto& [name, records] : projects_) {
            out += name + " (" + std::to_string(records.size()) + " issues)\n";
        }
        return {true, out.empty() ? "no projects\n" : out};
    }
    if (sub == "list") {
        if (argv.size() < 3) return {false, "issues: list needs a project"};
        auto it = projects_.find(argv[2]);
        if (it == projects_.end()) return {false, "issues: no project '" + argv[2] + "'"};
        std::string out;
        for (const auto& r : it->second) {
            out += r.id + ": " + r.title;
            auto status = r.fields.find("status");
            if (status != r.fields.end()) out += " [status=" + status->second + "]";
            out += "\n";
        }
        return {true, out.empty() ? "(no issues)\n" : out};
    }
    if (sub == "show") {
        if (argv.size() < 4) return {false, "issues: show needs a project and an issue id"};
        const IssueRecord* rec = find_issue(argv[2], argv[3]);
        if (rec == nullptr) {
            return {false, "issues: no issue '" + argv[3] + "' in project '" + argv[2] + "'"};
        }
        std::string out = rec->id + ": " + rec->title + "\n";
        for (const auto& [k, v] : rec->fields) out += "  " + k + ": " + v + "\n";
        return {true, out};
    }
    if (sub == "create") {
        if (argv.size() < 5) {
            return {false, "issues: create needs a project, an issue id, and a title"};
        }
        auto& records = projects_[argv[2]];
        for (const auto& r : records) {
            if (r.id == argv[3]) {
                return {false, "issues: issue '" + argv[3] + "' already exists"};
            }
        }
        IssueRecord rec;
        rec.id = argv[3];
        for (std::size_t i = 4; i < argv.size(); ++i) {
            if (i > 4) rec.title += " ";
            rec.title += argv[i];
        }
        rec.fields["status"] = "open";
        records.push_back(rec);
        log_mutation(Json{{"op", "issue_create"}, {"project", argv[2]}, {"id", argv[3]}});
        return {true, "created " + argv[3] + "\n"};
    }
    if (sub == "update") {
        if (argv.size() < 6) {
            return {false, "issues: update needs a project, an issue id, a field, and a value"};
        }
        auto it = projects_.find(argv[2]);
        if (it == projects_.end()) return {false, "issues: no project '" + argv[2] + "'"};
        for (auto& r : it->second) {
            if (r.id != argv[3]) continue;
            std::string value;
            for (std::size_t i = 5; i < argv.size(); ++i) {
                if (i > 5) value += " ";
                value += argv[i];
            }
            r.fields[argv[4]] = value;
            log_mutation(Json{{"op", "issue_update"},
                              {"project", argv[2]},
                              {"id", argv[3]},
                              {"field", argv[4]},
                              {"value", value}});
            return {true, "updated " + argv[3] + "." + argv[4] + "\n"};
        }
        return {false, "issues: no issue '" + argv[3] + "' in project '" + argv[2] + "'"};
    }
    return {false, "issues: unknown subcommand '" + sub + "'"};
}

// --- pseudo-python ---------------------------------------------------------------

EnvResult SimEnvironment::run_python(const std::string& code) {
    std::ostringstream out;
    std::istringstream in(code);
    std::string line;
    int lineno = 0;

    auto fail = [&](const std::string& message) -> EnvResult {
        out << message << "\n";
        return {false, with_returncode(out.str(), 1)};
    };

    while (std::getline(in, line)) {
        ++lineno;
        const std::string stmt = trim(line);
        if (stmt.empty() || stmt[0] == '#') continue;

        // Recognized statements: print(EXPR), write_file(STR, STR),
        // append_file(STR, STR). EXPR: STR | read_file(STR) | exists(STR) |
        // list_dir(STR), with '+' concatenation of string terms.
        auto parse_call = [&](const std::string& text, std::string& fn,
                              std::vector<std::string>& args) -> bool {
            std::size_t i = 0;
            while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                                       text[i] == '_')) {
                ++i;
            }
            fn = text.substr(0, i);
            skip_spaces(text, i);
            if (i >= text.size() || text[i] != '(') return false;
            ++i;
            skip_spaces(text, i);
            if (i < text.size() && text[i] == ')') {
                return i + 1 == text.size();
            }
            while (true) {
                std::string arg;
                if (!parse_py_string(text, i, arg)) return false;
                args.push_back(arg);
                skip_spaces(text, i);
                if (i < text.size() && text[i] == ',') {
                    ++i;
                    skip_spaces(text, i);
                    continue;
                }
                break;
            }
            if (i >= text.size() || text[i] != ')') return false;
            ++i;
            return i == text.size();
        };

        if (stmt.rfind("print(", 0) == 0 && stmt.back() == ')') {
            const std::string inner = trim(stmt.substr(6, stmt.size() - 7));
            // Evaluate '+'-joined string terms.
            std::string value;
            std::size_t i = 0;
            bool ok = !inner.empty();
            while (ok && i < inner.size()) {
                skip_spaces(inner, i);
                if (i < inner.size() && (inner[i] == '"' || inner[i] == '\'')) {
                    std::string term;
                    ok = parse_py_string(inner, i, term);
                    value += term;
                } else {
                    // a nested call term: fn("arg")
                    std::size_t start = i;
                    int depth = 0;
                    while (i < inner.size()) {
                        if (inner[i] == '(') ++depth;
                        if (inner[i] == ')') {
                            --depth;
                            if (depth == 0) {
                                ++i;
                                break;
                            }
                        }
                        ++i;
                    }
                    std::string callee, farg;
                    std::vector<std::string> fargs;
                    if (!parse_call(trim(inner.substr(start, i - start)), callee, fargs) ||
                        fargs.size() != 1) {
                        ok = false;
                        break;
                    }
                    farg = fargs[0];
                    if (callee == "read_file") {
                        const std::string* content = file_content(farg);
                        if (content == nullptr) {
                            return fail("FileNotFoundError: " + farg);
                        }
                        value += *content;
                    } else if (callee == "exists") {
                        value += (file_exists(farg) || dir_exists(farg)) ? "True" : "False";
                    } else if (callee == "list_dir") {
                        if (!dir_exists(farg)) return fail("FileNotFoundError: " + farg);
                        std::string rendered = "[";
                        bool first = true;
                        for (const auto& name : list_dir(farg)) {
                            if (!first) rendered += ", ";
                            rendered += "'" + name + "'";
                            first = false;
                        }
                        value += rendered + "]";
                    } else {
                        ok = false;
                        break;
                    }
                }
                skip_spaces(inner, i);
                if (i < inner.size()) {
                    if (inner[i] == '+') {
                        ++i;
                        continue;
                    }
                    ok = false;
                }
            }
            if (!ok) {
                return fail("SyntaxError: unsupported statement at line " +
                            std::to_string(lineno));
            }
            out << value << "\n";
            continue;
        }

        std::string fn;
        std::vector<std::string> args;
        if (parse_call(stmt, fn, args)) {
            if ((fn == "write_file" || fn == "append_file") && args.size() == 2) {
                write_file(args[0], args[1], fn == "append_file");
                continue;
            }
        }
        return fail("SyntaxError: unsupported statement at line " + std::to_string(lineno));
    }
    return {true, with_returncode(out.str(), 0)};
}

// --- chat ------------------------------------------------------------------------

bool SimEnvironment::has_channel(const std::string& channel) const {
    return channels_.count(channel) > 0;
}

EnvResult SimEnvironment::chat_send(const std::string& channel, const std::string& author,
                                    const std::string& text) {
    auto it = channels_.find(channel);
    if (it == channels_.end()) {
        return {false, "chat: no channel '" + channel + "'"};
    }
    it->second.push_back(ChatRecord{author, text});
    log_mutation(Json{{"op", "chat_send"}, {"channel", channel}, {"author", author},
                      {"text", text}});

    std::string out = "posted to #" + channel + "\n";
    auto queue = npc_replies_.find(channel);
    if (queue != npc_replies_.end()) {
        std::size_t& cursor = npc_cursor_[channel];
        if (cursor < queue->second.size()) {
            const NpcReply& reply = queue->second[cursor];
            ++cursor;
            it->second.push_back(ChatRecord{reply.author, reply.reply});
            log_mutation(Json{{"op", "chat_send"}, {"channel", channel},
                              {"author", reply.author}, {"text", reply.reply}});
            out += reply.author + ": " + reply.reply + "\n";
        }
    }
    return {true, out};
}

const std::vector<ChatRecord>* SimEnvironment::channel_messages(
    const std::string& channel) const {
    auto it = channels_.find(channel);
    return it == channels_.end() ? nullptr : &it->second;
}

std::vector<std::string> SimEnvironment::channel_names() const {
    std::vector<std::string> names;
    for (const auto& [name, _] : channels_) names.push_back(name);
    return names;
}

// --- issues -------------------------------------------------------------------

const IssueRecord* SimEnvironment::find_issue(const std::string& project,
                                              const std::string& id) const {
    auto it = projects_.find(project);
    if (it == projects_.end()) return nullptr;
    for (const auto& r : it->second) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

std::vector<std::string> SimEnvironment::project_names() const {
    std::vector<std::string> names;
    for (const auto& [name, _] : projects_) names.push_back(name);
    return names;
}

// --- browser -------------------------------------------------------------------

Page* SimEnvironment::active_page() {
    auto it = pages_.find(tabs_[active_tab_].url());
    return it == pages_.end() ? nullptr : &it->second;
}

const Page* SimEnvironment::active_page() const {
    auto it = pages_.find(tabs_[active_tab_].url());
    return it == pages_.end() ? nullptr : &it->second;
}

EnvResult SimEnvironment::browser_go_to_url(const std::string& url) {
    tabs_[active_tab_].history.push_back(url);
    focused_element_ = -1;
    log_mutation(Json{{"op", "browser_navigate"}, {"url", url}});
    auto it = pages_.find(url);
    if (it == pages_.end()) {
        return {false, "404: no page at " + url};
    }
    return {true, "Opened '" + it->second.title + "' (" + url +
                      "). Call browser_update to see the page elements."};
}

EnvResult SimEnvironment::browser_update() const {
    const std::string& url = tabs_[active_tab_].url();
    const Page* page = active_page();
    if (page == nullptr) {
        return {true, "Page: (blank)\nURL: " + url + "\nElements: none\n"};
    }
    std::ostringstream out;
    out << "Page: " << page->title << "\nURL: " << url << "\nElements:\n";
    for (std::size_t i = 0; i < page->elements.size(); ++i) {
        const PageElement& el = page->elements[i];
        out << "[" << (i + 1) << "] " << el.role << " '" << el.text << "'";
        if (el.role == "textbox") out << " value='" << el.value << "'";
        out << "\n";
    }
    return {true, out.str()};
}

EnvResult SimEnvironment::browser_click(int element_index) {
    Page* page = active_page();
    if (page == nullptr) return {false, "browser_click: page has no elements"};
    if (element_index < 1 || element_index > static_cast<int>(page->elements.size())) {
        return {false, "browser_click: no element [" + std::to_string(element_index) + "]"};
    }
    PageElement& el = page->elements[static_cast<std::size_t>(element_index - 1)];
    log_mutation(Json{{"op", "browser_click"}, {"element", element_index}, {"text", el.text}});
    if (!el.target.empty()) {
        const std::string target = el.target;
        EnvResult nav = browser_go_to_url(target);
        return {nav.ok, "Clicked " + el.role + " '" + el.text + "'. " + nav.text};
    }
    if (el.role == "textbox") {
        focused_element_ = element_index;
        return {true, "Focused textbox '" + el.text + "'"};
    }
    return {true, "Clicked " + el.role + " '" + el.text + "'; nothing changed"};
}

EnvResult SimEnvironment::browser_input(int element_index, const std::string& text) {
    Page* page = active_page();
    if (page == nullptr) return {false, "browser_input: page has no elements"};
    if (element_index < 1 || element_index > static_cast<int>(page->elements.size())) {
        return {false, "browser_input: no element [" + std::to_string(element_index) + "]"};
    }
    PageElement& el = page->elements[static_cast<std::size_t>(element_index - 1)];
    if (el.role != "textbox") {
        return {false, "browser_input: element [" + std::to_string(element_index) +
                           "] is a " + el.role + ", not a textbox"};
    }
    el.value = text;
    focused_element_ = element_index;
    log_mutation(Json{{"op", "browser_input"}, {"element", element_index}, {"text", el.text},
                      {"value", text}});
    return {true, "Entered text into '" + el.text + "'"};
}

EnvResult SimEnvironment::browser_send_keys(const std::string& keys) {
    log_mutation(Json{{"op", "browser_send_keys"}, {"keys", keys}});
    Page* page = active_page();
    if (keys.find("Enter") != std::string::npos && page != nullptr &&
        !page->submit_target.empty()) {
        const std::string target = page->submit_target;
        EnvResult nav = browser_go_to_url(target);
        return {nav.ok, "Pressed Enter. " + nav.text};
    }
    if (page != nullptr && focused_element_ >= 1 &&
        focused_element_ <= static_cast<int>(page->elements.size())) {
        PageElement& el = page->elements[static_cast<std::size_t>(focused_element_ - 1)];
        if (el.role == "textbox") {
            el.value += keys;
            return {true, "Typed into '" + el.text + "'"};
        }
    }
    return {true, "Pressed keys: " + keys};
}

EnvResult SimEnvironment::browser_close_tab(int tab_index) {
    if (tab_index < 1 || tab_index > static_cast<int>(tabs_.size())) {
        return {false, "browser_close_tab: no tab [" + std::to_string(tab_index) + "]"};
    }
    tabs_.erase(tabs_.begin() + (tab_index - 1));
    if (tabs_.empty()) tabs_.push_back(Tab{{"about:blank"}});
    if (active_tab_ >= tabs_.size()) active_tab_ = tabs_.size() - 1;
    focused_element_ = -1;
    log_mutation(Json{{"op", "browser_close_tab"}, {"tab", tab_index}});
    return {true, "Closed tab " + std::to_string(tab_index)};
}

EnvResult SimEnvironment::browser_go_back() {
    Tab& tab = tabs_[active_tab_];
    if (tab.history.size() < 2) return {false, "browser_go_back: no earlier page"};
    tab.history.pop_back();
    focused_element_ = -1;
    log_mutation(Json{{"op", "browser_go_back"}, {"url", tab.url()}});
    return {true, "Went back to " + tab.url()};
}

EnvResult SimEnvironment::browser_list_tabs() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < tabs_.size(); ++i) {
        const std::string& url = tabs_[i].history.back();
        auto it = pages_.find(url);
        out << "[" << (i + 1) << "]" << (i == active_tab_ ? "*" : " ") << " "
            << (it == pages_.end() ? "(blank)" : it->second.title) << " (" << url << ")\n";
    }
    return {true, out.str()};
}

EnvResult SimEnvironment::browser_switch_tab(int tab_index) {
    if (tab_index < 1 || tab_index > static_cast<int>(tabs_.size())) {
        return {false, "browser_switch_tab: no tab [" + std::to_string(tab_index) + "]"};
    }
    active_tab_ = static_cast<std::size_t>(tab_index - 1);
    focused_element_ = -1;
    log_mutation(Json{{"op", "browser_switch_tab"}, {"tab", tab_index}});
    return {true, "Switched to tab " + std::to_string(tab_index)};
}

std::string SimEnvironment::screenshot_description() const {
    const std::string& url = tabs_[active_tab_].url();
    const Page* page = active_page();
    if (page == nullptr) return "Screenshot: blank browser window at " + url;
    std::ostringstream out;
    out << "Screenshot of '" << page->title << "' at " << url << ": ";
    bool first = true;
    for (const auto& el : page->elements) {
        if (!first) out << ", ";
        out << el.role << " '" << el.text << "'";
        if (el.role == "textbox") out << (el.value.empty() ? " (empty)" : " (filled)");
        first = false;
    }
    if (page->elements.empty()) out << "no visible elements";
    return out.str();
}

std::string SimEnvironment::describe() const {
    std::ostringstream out;
    out << "Files (" << files_.size() << "):";
    std::size_t shown = 0;
    for (const auto& [path, _] : files_) {
        if (shown++ == 20) {
            out << " ...";
            break;
        }
        out << " " << path;
    }
    out << "\nChannels (" << channels_.size() << "):";
    for (const auto& [name, msgs] : channels_) {
        out << " " << name << "(" << msgs.size() << " msgs)";
    }
    out << "\nProjects (" << projects_.size() << "):";
    for (const auto& [name, records] : projects_) {
        out << " " << name << "(" << records.size() << " issues)";
    }
    out << "\nTabs (" << tabs_.size() << "):";
    for (std::size_t i = 0; i < tabs_.size(); ++i) {
        out << " " << tabs_[i].history.back() << (i == active_tab_ ? "*" : "");
    }
    out << "\n";
    return out.str();
}

Json SimEnvironment::state_json() const {
    Json j;
    Json files = Json::object();
    for (const auto& [k, v] : files_) files[k] = v;
    j["files"] = std::move(files);

    Json channels = Json::object();
    for (const auto& [name, msgs] : channels_) {
        Json list = Json::array();
        for (const auto& m : msgs) list.push_back(Json{{"author", m.author}, {"text", m.text}});
        channels[name] = std::move(list);
    }
    j["channels"] = std::move(channels);

    Json projects = Json::object();
    for (const auto& [name, records] : projects_) {
        Json list = Json::array();
        for (const auto& r : records) {
            Json fields = Json::object();
            for (const auto& [k, v] : r.fields) fields[k] = v;
            list.push_back(Json{{"id", r.id}, {"title", r.title}, {"fields", std::move(fields)}});
        }
        projects[name] = std::move(list);
    }
    j["issues"] = std::move(projects);

    Json tabs = Json::array();
    for (const auto& t : tabs_) tabs.push_back(t.history.back());
    j["tabs"] = std::move(tabs);
    j["active_tab"] = static_cast<std::int64_t>(active_tab_ + 1);
    j["mutations"] = static_cast<std::int64_t>(mutation_log_.size());
    return j;
}

}  // namespace playbook
