#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "scatter/errors.hpp"
#include "scatter/gateway.hpp"
#include "scatter/harness.hpp"
#include "scatter/json_io.hpp"
#include "scatter/pipeline.hpp"
#include "scatter/prompts.hpp"
#include "scatter/stats.hpp"
#include "scatter/version.hpp"

namespace fs = std::filesystem;
using namespace scatter;

namespace {

struct CommonOpts {
    std::string process_path;
    std::string innovation_path;
    std::string backend = "mock";
    std::string cassette_path;
    std::string templates_dir;
    std::string out_dir;
    std::string base_url;
    std::string model = "gpt-4o";
    double temperature = 0.7;
    int max_tokens = 1024;
    std::optional<std::int64_t> seed;
    double tau = 0.5;
    int max_attempts = 3;
    std::size_t variant = 0;
    int rounds = 20;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--process", o.process_path, "process definition JSON file");
    cmd->add_option("--innovation", o.innovation_path, "innovation JSON file");
    cmd->add_option("--backend", o.backend, "backend: http, mock or replay")
        ->check(CLI::IsMember({"http", "mock", "replay"}));
    cmd->add_option("--cassette", o.cassette_path, "cassette file (required for replay)");
    cmd->add_option("--templates", o.templates_dir, "prompt template directory");
    cmd->add_option("--base-url", o.base_url, "OpenAI-compatible base URL (or LLM_BASE_URL)");
    cmd->add_option("--model", o.model, "model identifier");
    cmd->add_option("--temperature", o.temperature, "sampling temperature");
    cmd->add_option("--max-tokens", o.max_tokens, "completion token budget");
    cmd->add_option("--seed", [&o](const std::vector<std::string>& v) {
        o.seed = std::stoll(v.front());
        return true;
    }, "decoding seed");
    cmd->add_option("--tau", o.tau, "spatial-mode similarity threshold");
    cmd->add_option("--max-attempts", o.max_attempts, "generalization retry bound");
    cmd->add_option("--variant", o.variant, "prompt variant for single runs");
    cmd->add_option("--out", o.out_dir, "run directory");
}

std::string timestamp_slug() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
    return buf;
}

// One writer per run directory; released on scope exit.
class DirLock {
public:
    explicit DirLock(const fs::path& dir) : path_(dir / ".lock") {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (fs::exists(path_))
            throw ValidationError("run directory is locked by another owner: " + dir.string());
        std::ofstream out(path_);
        out << "locked\n";
        if (!out) throw ValidationError("cannot create lock file in " + dir.string());
    }
    ~DirLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    fs::path path_;
};

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? v : fallback;
}

ProcessSpec resolve_process(const CommonOpts& o) {
    if (o.process_path.empty()) return builtin_lifecycle_fixture();
    return load_process_file(o.process_path);
}

InnovationInput resolve_innovation(const CommonOpts& o) {
    if (o.innovation_path.empty()) return builtin_embedded_innovation();
    return load_innovation_file(o.innovation_path);
}

PromptRegistry resolve_registry(const CommonOpts& o) {
    if (o.templates_dir.empty()) return PromptRegistry::with_defaults();
    return PromptRegistry::load_directory(o.templates_dir);
}

Gateway make_gateway(const CommonOpts& o) {
    if (o.backend == "mock") return Gateway::mock(default_mock_rulebook(), /*record=*/true);
    if (o.backend == "replay") {
        if (o.cassette_path.empty())
            throw ValidationError("replay backend requires --cassette");
        if (!fs::exists(o.cassette_path)) throw CassetteMiss(o.cassette_path);
        return Gateway::replay(Cassette::load_file(o.cassette_path));
    }
    HttpConfig http;
    http.base_url = !o.base_url.empty() ? o.base_url
                                        : env_or("LLM_BASE_URL", "https://api.openai.com/v1");
    http.api_key = env_or("LLM_API_KEY", "");
    return Gateway::http(std::move(http), /*record=*/true);
}

PipelineConfig make_config(const CommonOpts& o) {
    PipelineConfig c;
    c.prompt_variant = o.variant;
    c.max_attempts = o.max_attempts;
    c.tau = o.tau;
    c.model = o.model;
    c.temperature = o.temperature;
    c.max_tokens = o.max_tokens;
    c.seed = o.seed;
    return c;
}

fs::path prepare_run_dir(const CommonOpts& o, const std::string& fallback_prefix,
                         std::string& run_id) {
    fs::path dir;
    if (!o.out_dir.empty()) {
        dir = o.out_dir;
        run_id = dir.filename().string();
    } else {
        run_id = fallback_prefix + "-" + timestamp_slug();
        dir = fs::path("runs") / run_id;
    }
    fs::create_directories(dir);
    if (fs::exists(dir / "manifest.json"))
        throw ValidationError("run directory already holds a run (append-only): " + dir.string());
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw ValidationError("cannot write " + path.string());
}

json manifest_json(const CommonOpts& o, const std::string& run_id, const std::string& command,
                   const PromptRegistry& registry) {
    json decoding = {{"model", o.model},
                     {"temperature", o.temperature},
                     {"max_tokens", o.max_tokens},
                     {"seed", o.seed ? json(*o.seed) : json(nullptr)}};
    json m = {{"run_id", run_id},
              {"command", command},
              {"process", o.process_path.empty() ? "(builtin lifecycle)" : o.process_path},
              {"innovation",
               o.innovation_path.empty() ? "(builtin embedded contract)" : o.innovation_path},
              {"backend", o.backend},
              {"decoding", decoding},
              {"templates_digest", registry.content_digest()},
              {"cassette", o.backend == "replay" ? o.cassette_path : "cassette.json"},
              {"tau", o.tau},
              {"max_attempts", o.max_attempts},
              {"tool_version", kToolVersion}};
    if (command == "eval") m["rounds"] = o.rounds;
    if (command == "run") m["variant"] = o.variant;
    return m;
}

int cmd_run(const CommonOpts& o) {
    ProcessSpec spec = resolve_process(o);
    InnovationInput input = resolve_innovation(o);
    PromptRegistry registry = resolve_registry(o);

    std::string run_id;
    fs::path dir = prepare_run_dir(o, "run", run_id);
    DirLock lock(dir);

    Gateway gateway = make_gateway(o);
    ScatterResult result = run_scatter(input, spec, gateway, registry, make_config(o));

    write_file(dir / "result.json", pretty(json(result)));
    write_file(dir / "manifest.json", pretty(manifest_json(o, run_id, "run", registry)));
    if (gateway.recording()) gateway.recorded().save_file((dir / "cassette.json").string());

    std::cout << "run " << run_id << ": verdict "
              << (result.verdict.is_global() ? "GLOBAL" : "LOCAL(" + result.verdict.segment + ")")
              << ", " << result.applications.size() << " applications, coupling "
              << result.local.coupling_before << " -> " << result.generalized.coupling_after
              << (result.generalized.reduced ? " (reduced)" : " (not reduced)") << "\n";
    std::cout << "results in " << dir.string() << "\n";
    return 0;
}

int cmd_eval(const CommonOpts& o) {
    if (o.rounds < 1) throw ValidationError("rounds must be >= 1");
    ProcessSpec spec = resolve_process(o);
    InnovationInput input = resolve_innovation(o);
    PromptRegistry registry = resolve_registry(o);

    std::string run_id;
    fs::path dir = prepare_run_dir(o, "eval", run_id);
    DirLock lock(dir);

    Gateway gateway = make_gateway(o);

    std::ofstream rounds_out(dir / "rounds.jsonl", std::ios::binary);
    if (!rounds_out) throw ValidationError("cannot write rounds.jsonl in " + dir.string());
    auto persist = [&rounds_out](const RoundRecord& rec) {
        rounds_out << round_record_line(rec);
        rounds_out.flush(); // keep partial progress on abort
    };

    ExperimentTable table;
    try {
        table = run_experiment(o.rounds, input, spec, gateway, registry, make_config(o), persist);
    } catch (...) {
        if (gateway.recording())
            gateway.recorded().save_file((dir / "cassette.json").string());
        throw;
    }

    write_file(dir / "table.json", pretty(json(table)));
    write_file(dir / "manifest.json", pretty(manifest_json(o, run_id, "eval", registry)));
    if (gateway.recording()) gateway.recorded().save_file((dir / "cassette.json").string());

    char avg[128];
    std::snprintf(avg, sizeof(avg), "A(%.2f items, %.2f stages) B(%.2f items, %.2f stages)",
                  table.avg_a.items, table.avg_a.stages, table.avg_b.items, table.avg_b.stages);
    std::cout << "eval " << run_id << ": " << o.rounds << " rounds, averages " << avg << "\n";
    std::cout << "results in " << dir.string() << "\n";
    return 0;
}

ExperimentTable load_table(const CommonOpts& o) {
    if (o.out_dir.empty()) throw ValidationError("--out must name an existing run directory");
    fs::path rounds_path = fs::path(o.out_dir) / "rounds.jsonl";
    return ExperimentTable::from_rounds(load_rounds_jsonl(rounds_path));
}

int cmd_stats(const CommonOpts& o) {
    ExperimentTable table = load_table(o);
    stats::SignificanceReport report = stats::summarize(table);
    fs::path dir(o.out_dir);
    write_file(dir / "stats.md", report.to_markdown());
    write_file(dir / "stats.csv", report.to_csv());
    std::cout << "stats over " << report.rounds << " rounds written to " << (dir / "stats.md")
              << " and " << (dir / "stats.csv") << "\n";
    return 0;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

int cmd_report(const CommonOpts& o) {
    ExperimentTable table = load_table(o);
    if (table.rows.empty()) throw ValidationError("experiment table is empty");

    std::ostringstream md;
    md << "# Experiment table\n\n";
    md << "| Round | A items | A stages | B items | B stages |\n";
    md << "|---|---|---|---|---|\n";
    std::ostringstream csv;
    csv << "round,a_items,a_stages,b_items,b_stages\n";
    for (const auto& row : table.rows) {
        md << "| " << row.a.round << " | " << row.a.metrics.items_count << " | "
           << row.a.metrics.stages_covered << " | " << row.b.metrics.items_count << " | "
           << row.b.metrics.stages_covered << " |\n";
        csv << row.a.round << "," << row.a.metrics.items_count << ","
            << row.a.metrics.stages_covered << "," << row.b.metrics.items_count << ","
            << row.b.metrics.stages_covered << "\n";
    }
    md << "| **Avg** | **" << fixed2(table.avg_a.items) << "** | **" << fixed2(table.avg_a.stages)
       << "** | **" << fixed2(table.avg_b.items) << "** | **" << fixed2(table.avg_b.stages)
       << "** |\n";

    fs::path dir(o.out_dir);
    write_file(dir / "report.md", md.str());
    write_file(dir / "report.csv", csv.str());
    std::cout << "report over " << table.rows.size() << " rounds written to "
              << (dir / "report.md") << " and " << (dir / "report.csv") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scatter: propagate a localized innovation across a multi-stage process"};
    app.require_subcommand(1);

    CommonOpts run_opts, eval_opts, stats_opts, report_opts;
    CLI::App* run_cmd = app.add_subcommand("run", "execute one scatter expansion");
    add_common_flags(run_cmd, run_opts);
    CLI::App* eval_cmd = app.add_subcommand("eval", "run the A/B round experiment");
    add_common_flags(eval_cmd, eval_opts);
    eval_cmd->add_option("--rounds", eval_opts.rounds, "number of rounds (default 20)");
    CLI::App* stats_cmd = app.add_subcommand("stats", "significance report for a run directory");
    stats_cmd->add_option("--out", stats_opts.out_dir, "run directory holding rounds.jsonl");
    CLI::App* report_cmd = app.add_subcommand("report", "round table as markdown + CSV");
    report_cmd->add_option("--out", report_opts.out_dir, "run directory holding rounds.jsonl");

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed()) return cmd_run(run_opts);
        if (eval_cmd->parsed()) return cmd_eval(eval_opts);
        if (stats_cmd->parsed()) return cmd_stats(stats_opts);
        if (report_cmd->parsed()) return cmd_report(report_opts);
        return 1;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const BackendError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
