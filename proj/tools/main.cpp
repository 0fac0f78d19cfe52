#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "playbook/config.hpp"
#include "playbook/harness.hpp"
#include "playbook/memory.hpp"

namespace {

using namespace playbook;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPlanning = 3;
constexpr int kExitGateway = 4;
constexpr int kExitUsage = 64;

std::string pct(double fraction) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << fraction * 100.0 << "%";
    return out.str();
}

void print_scores(const Scores& scores) {
    std::cout << "S_ckpt: " << pct(scores.s_ckpt) << "\n"
              << "avg_S_partial: " << pct(scores.avg_s_partial) << "\n"
              << "PCR: " << pct(scores.pcr) << "\n";
}

int exit_code_for_status(const std::string& status) {
    if (status.rfind("planning_error", 0) == 0) return kExitPlanning;
    if (status.rfind("gateway_error", 0) == 0) return kExitGateway;
    if (status.rfind("error", 0) == 0) return kExitInternal;
    return kExitOk;
}

EngineConfig load_engine_config(const std::string& config_path) {
    return load_config(config_path, env_overrides_from_process());
}

std::vector<TaskSpec> collect_tasks(const std::vector<std::string>& task_files,
                                    const std::string& task_dir) {
    std::vector<std::string> paths = task_files;
    if (!task_dir.empty()) {
        if (!fs::is_directory(task_dir)) {
            throw ConfigError("task directory does not exist: " + task_dir);
        }
        std::vector<std::string> found;
        for (const auto& entry : fs::directory_iterator(task_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                found.push_back(entry.path().string());
            }
        }
        std::sort(found.begin(), found.end());
        paths.insert(paths.end(), found.begin(), found.end());
    }
    if (paths.empty()) throw ConfigError("no task specs given (use --task or --task-dir)");
    std::vector<TaskSpec> tasks;
    tasks.reserve(paths.size());
    for (const auto& p : paths) tasks.push_back(load_task_spec(p));
    return tasks;
}

// --- subcommand bodies ---------------------------------------------------------

int cmd_run(const std::string& config_path, const std::string& task_path,
            const std::string& out_dir, const std::string& label) {
    const EngineConfig config = load_engine_config(config_path);
    const TaskSpec spec = load_task_spec(task_path);
    MemoryStore store = load_memory(config.memory_path, /*create_if_missing=*/true);

    const RunArtifacts artifacts = execute_task_run(spec, store, config, label);
    save_memory(store, config.memory_path);

    const fs::path run_dir =
        out_dir.empty() ? fs::path(config.log_dir) / spec.id : fs::path(out_dir);
    write_run_dir(artifacts, run_dir);

    const TaskResult& r = artifacts.result;
    std::cout << "task: " << r.task_id << "\n"
              << "status: " << r.status << "\n"
              << "checkpoints: " << r.completed_ckpt << "/" << r.total_ckpt << "\n"
              << "s_full: " << r.s_full << "\n"
              << "s_partial: " << pct(r.s_partial) << "\n"
              << "actions: " << r.total_actions << "\n"
              << "memory_revision: " << r.memory_revision_before << " -> "
              << r.memory_revision_after << "\n"
              << "run_dir: " << run_dir.string() << "\n";
    return exit_code_for_status(r.status);
}

int cmd_iterate(const std::string& config_path, const std::vector<std::string>& task_files,
                const std::string& task_dir, int iterations, const std::string& out_dir,
                bool no_memory) {
    const EngineConfig config = load_engine_config(config_path);
    const std::vector<TaskSpec> tasks = collect_tasks(task_files, task_dir);
    const fs::path out =
        out_dir.empty() ? fs::path(config.log_dir) / "iterations" : fs::path(out_dir);

    const auto series = run_iterations(tasks, iterations, config.memory_path, config, out,
                                       /*memory_enabled=*/!no_memory);
    for (const auto& stats : series) {
        std::cout << "iteration " << stats.iteration << ": S_ckpt " << pct(stats.scores.s_ckpt)
                  << ", avg_S_partial " << pct(stats.scores.avg_s_partial) << ", PCR "
                  << pct(stats.scores.pcr) << ", actions " << stats.total_actions
                  << ", memory_revision " << stats.memory_revision << " (strategic "
                  << stats.strategic_entries << ", sops " << stats.sop_entries << ", tools "
                  << stats.tool_entries << ")\n";
    }
    std::cout << "out_dir: " << out.string() << "\n";
    return kExitOk;
}

int cmd_score(const std::string& results_path, const std::string& runs_dir, bool as_json) {
    std::vector<TaskResult> results;
    if (!results_path.empty()) {
        std::ifstream in(results_path, std::ios::binary);
        if (!in) throw ConfigError("cannot open results file: " + results_path);
        Json j;
        try {
            j = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("results file: ") + e.what());
        }
        if (!j.contains("results") || !j.at("results").is_array()) {
            throw ParseError("results file needs a 'results' array");
        }
        for (const auto& row : j.at("results")) {
            TaskResult r;
            r.task_id = row.value("task_id", std::string{});
            r.completed_ckpt = row.value("completed_ckpt", 0);
            r.total_ckpt = row.value("total_ckpt", 0);
            r.s_full = row.value("s_full", 0);
            r.s_partial = score_partial(r.completed_ckpt, r.total_ckpt, r.s_full);
            results.push_back(std::move(r));
        }
    }
    if (!runs_dir.empty()) {
        if (!fs::is_directory(runs_dir)) {
            throw ConfigError("runs directory does not exist: " + runs_dir);
        }
        std::vector<std::string> files;
        for (const auto& entry : fs::recursive_directory_iterator(runs_dir)) {
            if (entry.is_regular_file() && entry.path().filename() == "result.json") {
                files.push_back(entry.path().string());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            std::ifstream in(file, std::ios::binary);
            Json j;
            try {
                j = Json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(file + ": " + e.what());
            }
            results.push_back(TaskResult::from_json(j));
        }
    }
    if (results.empty()) {
        throw ConfigError("nothing to score (use --results and/or --runs)");
    }

    const Scores scores = score_aggregate(results);
    long long completed = 0;
    long long total = 0;
    for (const auto& r : results) {
        completed += r.completed_ckpt;
        total += r.total_ckpt;
    }
    if (as_json) {
        Json j = scores.to_json();
        j["tasks"] = results.size();
        j["completed_ckpt"] = completed;
        j["total_ckpt"] = total;
        std::cout << j.dump(2) << "\n";
    } else {
        print_scores(scores);
        std::cout << "tasks: " << results.size() << "\n"
                  << "checkpoints: " << completed << "/" << total << "\n";
    }
    return kExitOk;
}

int cmd_memory_inspect(const std::string& memory_path) {
    const MemoryStore store = load_memory(memory_path, /*create_if_missing=*/false);
    std::cout << "revision: " << store.revision() << "\n"
              << "strategic entries: " << store.strategic().size() << "\n"
              << "procedural guides: " << store.sop_index().size() << "\n"
              << "tool entries: " << store.tool_entries().size() << "\n";
    const StartupContext startup = store.render_startup_context();
    if (!startup.strategic_text.empty()) {
        std::cout << "\nStrategic principles:\n" << startup.strategic_text;
    }
    if (!startup.sop_index_text.empty()) {
        std::cout << "\nGuide index:\n" << startup.sop_index_text;
    }
    if (!startup.tool_static_text.empty()) {
        std::cout << "\nTool notes:\n" << startup.tool_static_text;
    }
    return kExitOk;
}

int cmd_memory_export(const std::string& memory_path, const std::string& out_path) {
    const MemoryStore store = load_memory(memory_path, /*create_if_missing=*/false);
    const std::string bytes = serialize_memory(store);
    if (out_path.empty() || out_path == "-") {
        std::cout << bytes;
    } else {
        save_memory(store, out_path);
        std::cout << "exported " << memory_path << " -> " << out_path << "\n";
    }
    return kExitOk;
}

int cmd_memory_import(const std::string& in_path, const std::string& memory_path) {
    const MemoryStore store = load_memory(in_path, /*create_if_missing=*/false);
    save_memory(store, memory_path);
    std::cout << "imported " << in_path << " -> " << memory_path << " (revision "
              << store.revision() << ")\n";
    return kExitOk;
}

int cmd_memory_consolidate(const std::string& config_path, const std::string& memory_path) {
    const EngineConfig config = load_engine_config(config_path);
    const std::string path = memory_path.empty() ? config.memory_path : memory_path;
    MemoryStore store = load_memory(path, /*create_if_missing=*/false);
    const auto backend =
        make_backend(config.backend_for("reflector"), "reflector", "consolidate");
    const ConsolidationReport report =
        consolidate(store, *backend, config.caps.strategic_cap);
    if (!report.error.empty()) {
        std::cerr << "consolidation failed, store unchanged: " << report.error << "\n";
        return kExitGateway;
    }
    save_memory(store, path);
    std::cout << "changed: " << (report.changed ? "yes" : "no") << "\n";
    for (const auto& m : report.merged) std::cout << "merged: " << m << "\n";
    for (const auto& d : report.dropped) std::cout << "dropped: " << d << "\n";
    for (const auto& r : report.rewritten) std::cout << "rewritten: " << r << "\n";
    for (const auto& e : report.evicted) std::cout << "evicted: " << e << "\n";
    std::cout << "revision: " << store.revision() << "\n";
    return kExitOk;
}

int cmd_replay(const std::string& run_dir_arg) {
    const fs::path run_dir(run_dir_arg);
    const RunArtifacts replayed = replay_run(run_dir);

    auto slurp = [&](const char* name) {
        std::ifstream in(run_dir / name, std::ios::binary);
        if (!in) throw ParseError("cannot open file: " + (run_dir / name).string());
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    };

    struct Comparison {
        const char* name;
        std::string recorded;
        std::string replayed;
    };
    const Comparison comparisons[] = {
        {"trajectory.jsonl", slurp("trajectory.jsonl"), replayed.trajectory_bytes},
        {"result.json", slurp("result.json"), replayed.result.to_json().dump(2) + "\n"},
        {"memory_after.json", slurp("memory_after.json"), replayed.memory_after_bytes},
    };

    bool identical = true;
    for (const auto& c : comparisons) {
        if (c.recorded == c.replayed) {
            std::cout << c.name << ": identical (" << c.recorded.size() << " bytes)\n";
        } else {
            identical = false;
            std::cout << c.name << ": MISMATCH (recorded " << c.recorded.size()
                      << " bytes, replayed " << c.replayed.size() << " bytes)\n";
        }
    }
    std::cout << (identical ? "replay: identical\n" : "replay: diverged\n");
    return identical ? kExitOk : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experience-driven agent orchestration engine"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run one task end to end");
    std::string run_config, run_task_path, run_out, run_label = "run";
    run->add_option("--config", run_config, "Engine config file")->required();
    run->add_option("--task", run_task_path, "Task spec file")->required();
    run->add_option("--out", run_out, "Run directory (default: <log_dir>/<task id>)");
    run->add_option("--label", run_label, "Label recorded in run_meta.json");

    // iterate
    auto* iterate = app.add_subcommand("iterate", "Run a task set for several iterations");
    std::string it_config, it_task_dir, it_out;
    std::vector<std::string> it_tasks;
    int it_iterations = 3;
    bool it_no_memory = false;
    iterate->add_option("--config", it_config, "Engine config file")->required();
    iterate->add_option("--task", it_tasks, "Task spec file (repeatable, in order)");
    iterate->add_option("--task-dir", it_task_dir, "Directory of task spec .json files");
    iterate->add_option("--iterations", it_iterations, "Iteration count (default 3)");
    iterate->add_option("--out", it_out, "Output directory (default: <log_dir>/iterations)");
    iterate->add_flag("--no-memory", it_no_memory,
                      "Baseline mode: every task starts from an empty store");

    // score
    auto* score = app.add_subcommand("score", "Aggregate scores from results");
    std::string score_results, score_runs;
    bool score_json = false;
    score->add_option("--results", score_results,
                      "JSON file with a 'results' array of checkpoint counts");
    score->add_option("--runs", score_runs, "Directory tree containing result.json files");
    score->add_flag("--json", score_json, "Print machine-readable scores");

    // memory
    auto* memory = app.add_subcommand("memory", "Memory store utilities");
    memory->require_subcommand(1);
    auto* mem_inspect = memory->add_subcommand("inspect", "Summarize a memory file");
    std::string mi_path;
    mem_inspect->add_option("--memory", mi_path, "Memory file")->required();
    auto* mem_export = memory->add_subcommand("export", "Write canonical memory bytes");
    std::string me_path, me_out;
    mem_export->add_option("--memory", me_path, "Memory file")->required();
    mem_export->add_option("--out", me_out, "Destination file ('-' or empty: stdout)");
    auto* mem_import = memory->add_subcommand("import", "Import a memory file");
    std::string mim_in, mim_path;
    mem_import->add_option("--in", mim_in, "Source memory file")->required();
    mem_import->add_option("--memory", mim_path, "Destination memory file")->required();
    auto* mem_consolidate =
        memory->add_subcommand("consolidate", "Run one consolidation pass");
    std::string mc_config, mc_path;
    mem_consolidate->add_option("--config", mc_config, "Engine config file")->required();
    mem_consolidate->add_option("--memory", mc_path,
                                "Memory file (default: config memory_path)");

    // replay
    auto* replay = app.add_subcommand("replay", "Re-drive a logged run and compare artifacts");
    std::string rp_dir;
    replay->add_option("--run", rp_dir, "Run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_config, run_task_path, run_out, run_label);
        if (iterate->parsed()) {
            return cmd_iterate(it_config, it_tasks, it_task_dir, it_iterations, it_out,
                               it_no_memory);
        }
        if (score->parsed()) return cmd_score(score_results, score_runs, score_json);
        if (memory->parsed()) {
            if (mem_inspect->parsed()) return cmd_memory_inspect(mi_path);
            if (mem_export->parsed()) return cmd_memory_export(me_path, me_out);
            if (mem_import->parsed()) return cmd_memory_import(mim_in, mim_path);
            if (mem_consolidate->parsed()) return cmd_memory_consolidate(mc_config, mc_path);
        }
        if (replay->parsed()) return cmd_replay(rp_dir);
        std::cerr << "no subcommand selected\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const PlanningError& e) {
        std::cerr << "planning error: " << e.what() << "\n";
        return kExitPlanning;
    } catch (const GatewayError& e) {
        std::cerr << "gateway error: " << e.what() << "\n";
        return kExitGateway;
    } catch (const FixtureError& e) {
        std::cerr << "fixture error: " << e.what() << "\n";
        return kExitGateway;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
