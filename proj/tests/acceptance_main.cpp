// Acceptance suite: one criterion per numbered check, one PASS/FAIL line
// each. Exits nonzero if any criterion fails. CLI-facing criteria execute
// the real binary; the rest go through the library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "scatter/core.hpp"
#include "scatter/errors.hpp"
#include "scatter/gateway.hpp"
#include "scatter/harness.hpp"
#include "scatter/json_io.hpp"
#include "scatter/pipeline.hpp"
#include "scatter/prompts.hpp"
#include "scatter/reference.hpp"
#include "scatter/stats.hpp"

namespace fs = std::filesystem;
using namespace scatter;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kDataDir = SCATTER_DATA_DIR;
const std::string kCli = SCATTER_CLI_PATH;
fs::path g_tmp;

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw CheckFailure(what);
}

int run_cli(const std::string& args, const fs::path& stderr_to = {}) {
    std::string cmd = kCli + " " + args + " > /dev/null";
    cmd += stderr_to.empty() ? " 2> /dev/null" : " 2> " + stderr_to.string();
    int status = std::system(cmd.c_str());
    if (status < 0) throw CheckFailure("could not launch CLI");
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- criterion 1: replayed CLI eval reproduces all 40 reference pairs ----

void criterion_table_ingestion() {
    fs::path out = g_tmp / "c1";
    auto t0 = Clock::now();
    int code = run_cli("eval --backend replay --cassette " +
                       (kDataDir / "cassettes" / "table1.json").string() +
                       " --rounds 20 --out " + out.string());
    double elapsed = seconds_since(t0);
    require(code == 0, "eval exited with code " + std::to_string(code));

    auto table = ExperimentTable::from_rounds(load_rounds_jsonl(out / "rounds.jsonl"));
    require(table.rows.size() == 20, "expected 20 rows");
    const auto& ref = reference_rounds();
    for (std::size_t i = 0; i < 20; ++i) {
        const auto& row = table.rows[i];
        bool ok = row.a.metrics == MetricPair{ref[i].a_items, ref[i].a_stages} &&
                  row.b.metrics == MetricPair{ref[i].b_items, ref[i].b_stages};
        require(ok, "round " + std::to_string(i + 1) + " metrics diverge");
    }
    require(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s exceeds 5s");
}

// ---- criterion 2: statistics oracle over the reference data ----

void criterion_statistics() {
    std::vector<double> items_a, items_b, stages_a, stages_b;
    for (const auto& r : reference_rounds()) {
        items_a.push_back(r.a_items);
        items_b.push_back(r.b_items);
        stages_a.push_back(r.a_stages);
        stages_b.push_back(r.b_stages);
    }
    auto items = stats::paired_t_test(stats::PairedSample::make(items_a, items_b));
    auto stages = stats::paired_t_test(stats::PairedSample::make(stages_a, stages_b));

    require(std::fabs(items.mean_x - 6.00) < 1e-9, "mean items A");
    require(std::fabs(stages.mean_x - 1.85) < 1e-9, "mean stages A");
    require(std::fabs(items.mean_y - 6.30) < 1e-9, "mean items B");
    require(std::fabs(stages.mean_y - 4.10) < 1e-9, "mean stages B");

    require(stages.df == 19, "stages df");
    require(std::fabs(stages.t - 9.87) < 1e-2, "stages t vs oracle value 9.87");
    require(stages.p < 1e-6, "stages p below 1e-6");
    require(std::fabs(items.t - 0.97) < 1e-2, "items t vs oracle value 0.97");
    require(std::fabs(items.p - 0.34) < 1e-2, "items p vs oracle value 0.34");

    // p recomputed through the independent quadrature oracle
    double p_oracle = 2.0 * (1.0 - oracle::student_cdf(std::fabs(stages.t), 19));
    require(std::fabs(stages.p - p_oracle) < 1e-9, "stages p vs quadrature oracle");
    p_oracle = 2.0 * (1.0 - oracle::student_cdf(std::fabs(items.t), 19));
    require(std::fabs(items.p - p_oracle) < 1e-9, "items p vs quadrature oracle");

    // the report shows the published figures in a divergence section
    ProcessSpec spec = builtin_lifecycle_fixture();
    std::vector<RoundRecord> records;
    int round = 0;
    for (const auto& r : reference_rounds()) {
        ++round;
        auto make = [&](Method m, int n_items, int n_stages) {
            RoundRecord rec;
            rec.round = round;
            rec.method = m;
            for (int j = 0; j < n_items; ++j) {
                OptimizationItem item;
                item.description = "item";
                item.stages = {spec.segments[static_cast<std::size_t>(j < n_stages ? j : 0)].id};
                rec.items.push_back(item);
            }
            rec.metrics = count_metrics(rec.items, spec);
            return rec;
        };
        records.push_back(make(Method::A, r.a_items, r.a_stages));
        records.push_back(make(Method::B, r.b_items, r.b_stages));
    }
    auto report = stats::summarize(ExperimentTable::from_rounds(std::move(records)));
    auto md = report.to_markdown();
    for (const char* needle :
         {"5.85", "1.95", "6.35", "4.20", "0.043", "2.34e-06", "0.42", "1.95"}) {
        require(md.find(needle) != std::string::npos,
                std::string("report lacks published value ") + needle);
    }
}

// ---- criterion 3: SAT reduction invariant over generated fixtures ----

void criterion_sat_invariants() {
    auto t0 = Clock::now();
    std::mt19937 rng(20260809);
    const char* vocab[] = {"merge", "cache", "batch", "sign",  "verify", "retry", "queue",
                           "log",   "audit", "split", "pack",  "route",  "hash",  "prune"};
    auto registry = PromptRegistry::with_defaults();
    int reduced_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::set<std::string> markers;
        while (markers.size() < 2 + rng() % 4) markers.insert(vocab[rng() % 14]);
        Segment origin;
        origin.id = "origin";
        origin.name = "origin";
        origin.markers = markers;
        Segment other;
        other.id = "other";
        other.name = "other";
        other.markers = {"elsewhere"};
        ProcessSpec spec;
        spec.name = "fuzz";
        spec.mode = ProcessMode::Temporal;
        spec.segments = {origin, other};

        auto sentence = [&](int words) {
            std::string out;
            for (int w = 0; w < words; ++w) out += std::string(vocab[rng() % 14]) + " ";
            return out;
        };
        std::string summary = sentence(3 + static_cast<int>(rng() % 5));
        Gateway gw = Gateway::mock({{"gen", "", sentence(2 + static_cast<int>(rng() % 5))}});
        double before = coupling_strength(summary, spec.segments[0]);
        require(before >= 0.0 && before <= 1.0, "coupling_before out of range");

        LocalInnovation local{summary, "origin", before};
        PipelineConfig config;
        auto gen = generalize(local, spec, gw, registry, config);

        double after = coupling_strength(gen.text, spec.segments[0]);
        require(after >= 0.0 && after <= 1.0, "coupling_after out of range");
        require(gen.coupling_after == after, "stored coupling differs from recomputation");
        if (gen.reduced) {
            ++reduced_seen;
            require(after < before, "reduced=true without strict reduction");
        } else {
            require(!(after < before), "reduced=false despite strict reduction");
        }
    }
    require(reduced_seen > 0, "fixture set never exercised the reduced branch");
    require(reduced_seen < 200, "fixture set never exercised the non-reduced branch");
    double elapsed = seconds_since(t0);
    require(elapsed < 2.0, "runtime " + std::to_string(elapsed) + "s exceeds 2s");
}

// ---- criterion 4: Algorithm-1 shape over process sizes 2..6 ----

void criterion_algorithm_shape() {
    auto registry = PromptRegistry::with_defaults();
    for (std::size_t n = 2; n <= 6; ++n) {
        ProcessSpec spec;
        spec.name = "shape";
        spec.mode = ProcessMode::Temporal;
        for (std::size_t i = 0; i < n; ++i) {
            Segment s;
            s.id = "step" + std::to_string(i);
            s.name = s.id;
            s.markers = {s.id};
            spec.segments.push_back(s);
        }
        MockRulebook local_rules = {
            {"diff", "", "SUMMARY: tune step0 handling\nORIGIN: step0"},
            {"gen", "", "tune handling generally"},
            {"scope", "", "LOCAL: step0"},
            {"apply", "", "tuned for this step"},
        };
        Gateway gw = Gateway::mock(local_rules);
        PipelineConfig config;
        auto result = run_scatter({"inn", "ctx", std::nullopt}, spec, gw, registry, config);
        require(!result.verdict.is_global(), "expected LOCAL verdict");
        require(result.applications.size() == n - 1,
                "n=" + std::to_string(n) + ": expected n-1 applications");
        for (const auto& app : result.applications)
            require(app.segment != "step0", "application targets the origin");

        MockRulebook global_rules = local_rules;
        global_rules[2].response = "GLOBAL";
        Gateway gw2 = Gateway::mock(global_rules);
        auto early = run_scatter({"inn", "ctx", std::nullopt}, spec, gw2, registry, config);
        require(early.verdict.is_global(), "expected GLOBAL verdict");
        require(early.applications.empty(), "GLOBAL verdict must return no applications");
    }
}

// ---- criterion 5: Student-t CDF vs the quadrature oracle ----

void criterion_student_cdf() {
    auto t0 = Clock::now();
    int points = 0;
    double worst = 0.0;
    for (int df = 1; df <= 40; ++df) {
        auto row = oracle::student_cdf_row(df, 50); // CDF at t = 0..50
        for (int t = 0; t <= 50; ++t) {
            double err = std::fabs(stats::student_t_cdf(t, df) - row[t]);
            worst = std::max(worst, err);
            ++points;
            if (t > 0) { // symmetric tail: CDF(-t) = 1 - CDF(t)
                err = std::fabs(stats::student_t_cdf(-t, df) - (1.0 - row[t]));
                worst = std::max(worst, err);
                ++points;
            }
        }
    }
    require(points >= 2000, "grid too small");
    require(worst < 1e-9, "max CDF error " + std::to_string(worst) + " exceeds 1e-9");
    double elapsed = seconds_since(t0);
    require(elapsed < 2.0, "runtime " + std::to_string(elapsed) + "s exceeds 2s");
}

// ---- criterion 6: byte-identical replayed output trees ----

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file())
            out[fs::relative(entry.path(), root).string()] = slurp(entry.path());
    }
    return out;
}

void criterion_determinism() {
    std::string cassette = (kDataDir / "cassettes" / "table1.json").string();
    for (const char* leg : {"d1", "d2"}) {
        fs::path base = g_tmp / "c6" / leg / "demo";
        require(run_cli("run --backend replay --cassette " + cassette + " --out " +
                        (base / "run").string()) == 0,
                "demo run failed");
        require(run_cli("eval --backend replay --cassette " + cassette +
                        " --rounds 20 --out " + (base / "eval").string()) == 0,
                "demo eval failed");
        require(run_cli("stats --out " + (base / "eval").string()) == 0, "demo stats failed");
        require(run_cli("report --out " + (base / "eval").string()) == 0, "demo report failed");
    }
    auto t1 = tree_bytes(g_tmp / "c6" / "d1" / "demo");
    auto t2 = tree_bytes(g_tmp / "c6" / "d2" / "demo");
    require(!t1.empty(), "demo produced no files");
    require(t1.size() == t2.size(), "trees hold different file sets");
    for (const auto& [rel, bytes] : t1) {
        auto it = t2.find(rel);
        require(it != t2.end(), "second tree lacks " + rel);
        require(it->second == bytes, "file differs between runs: " + rel);
    }
}

// ---- criterion 7: malformed output handling and exit codes ----

void criterion_robust_parsing() {
    ProcessSpec spec = builtin_lifecycle_fixture();
    auto fenced = [](const std::string& s) { return "```\n" + s + "\n```\n"; };

    const std::vector<std::string> malformed = {
        "free prose with no block at all",
        fenced("this is not json"),
        fenced(R"({"description": "object, not array"})"),
        fenced(R"(["bare string"])"),
        fenced(R"([{"stages": ["deployment"]}])"),
        fenced(R"([{"description": ""}])"),
        fenced(R"([{"description": 42}])"),
        fenced(R"([{"description": "x", "stages": "deployment"}])"),
        fenced(R"([{"description": "x", "stages": [3]}])"),
        fenced(R"([{"description": "x", "stages": ["deployment"]},  17])"),
        "```\n[{\"description\": \"never closed\"}]",
        "``` \nno newline terminated fence",
    };
    int caught = 0;
    for (const auto& raw : malformed) {
        try {
            parse_items_text(raw, spec);
        } catch (const MalformedOutput&) {
            ++caught;
        }
    }
    require(caught == static_cast<int>(malformed.size()),
            "only " + std::to_string(caught) + " of " + std::to_string(malformed.size()) +
                " malformed fixtures raised MalformedOutput");

    // stage-name normalization keeps items while dropping unknown names
    auto items = parse_items_text(
        fenced(R"([{"description": "k", "stages": ["setup", "Deployment", "terminate"]}])"),
        spec);
    require(items.size() == 1 && items[0].stages ==
                                     std::vector<std::string>{"deployment", "termination"},
            "normalization did not keep known stages and drop unknown ones");

    // repair succeeds through the gateway, then exhausts after two retries
    PipelineConfig config;
    Gateway fixer = Gateway::mock(
        {{"repair", "", fenced(R"([{"description": "repaired", "stages": ["invocation"]}])")}});
    auto repaired = parse_items("prose answer", spec, fixer, config);
    require(repaired.size() == 1 && repaired[0].description == "repaired",
            "repair path did not recover");
    Gateway stubborn = Gateway::mock({{"repair", "", "still prose"}});
    bool exhausted = false;
    std::vector<std::string> keys;
    try {
        parse_items("prose answer", spec, stubborn, config, &keys);
    } catch (const MalformedOutput&) {
        exhausted = true;
    }
    require(exhausted && keys.size() == 2, "repair retries did not exhaust after 2 reissues");

    // CLI exit codes: validation = 1, backend = 2, parse = 3
    fs::path err = g_tmp / "c7_err.txt";
    int code = run_cli("run --backend mock --process no_such_process.json --out " +
                           (g_tmp / "c7_run1").string(),
                       err);
    require(code == 1, "missing process file: expected exit 1, got " + std::to_string(code));
    require(slurp(err).find("process spec not found") != std::string::npos,
            "missing process error text");

    code = run_cli("run --backend replay --cassette missing_cassette.json --out " +
                   (g_tmp / "c7_run2").string());
    require(code == 2, "missing cassette: expected exit 2, got " + std::to_string(code));

    code = run_cli("eval --backend mock --rounds 0 --out " + (g_tmp / "c7_run3").string());
    require(code == 1, "--rounds 0: expected exit 1, got " + std::to_string(code));

    // a cassette whose round-1 direct reply (and both repairs) stay prose
    Gateway prose_mock = Gateway::mock(
        {{"direct", "", "no block here"}, {"repair", "", "still no block"}}, /*record=*/true);
    auto registry = PromptRegistry::with_defaults();
    try {
        run_round_a(1, builtin_embedded_innovation(), spec, prose_mock, registry, config);
    } catch (const MalformedOutput&) {
    }
    fs::path prose_cassette = g_tmp / "c7_prose.json";
    prose_mock.recorded().save_file(prose_cassette.string());
    code = run_cli("eval --backend replay --cassette " + prose_cassette.string() +
                   " --rounds 1 --out " + (g_tmp / "c7_run4").string());
    require(code == 3, "unparseable round: expected exit 3, got " + std::to_string(code));
}

// ---- criterion 8: end-to-end mock demo widens stage coverage ----

void criterion_mock_demo() {
    ProcessSpec spec = builtin_lifecycle_fixture();
    auto registry = PromptRegistry::with_defaults();
    InnovationInput input = builtin_embedded_innovation();
    PipelineConfig config;

    Gateway gw = Gateway::mock(default_mock_rulebook());
    auto result = run_scatter(input, spec, gw, registry, config);
    require(!result.verdict.is_global() && result.verdict.segment == "deployment",
            "expected verdict LOCAL(deployment)");
    require(result.applications.size() == 4, "expected 4 applications");

    Gateway gb = Gateway::mock(default_mock_rulebook());
    auto round_b = run_round_b(1, input, spec, gb, registry, config);
    require(round_b.metrics.stages_covered == 5,
            "Method B stages_covered = " + std::to_string(round_b.metrics.stages_covered) +
                ", expected 5 with the origin item included");
    require(!round_b.items.empty() &&
                round_b.items[0].stages == std::vector<std::string>{"deployment"},
            "origin item missing from Method B");

    Gateway ga = Gateway::mock(default_mock_rulebook());
    auto round_a = run_round_a(1, input, spec, ga, registry, config);
    require(round_a.metrics.stages_covered < round_b.metrics.stages_covered,
            "scatter prompting did not widen stage coverage over the direct baseline");
}

} // namespace

int main() {
    g_tmp = fs::temp_directory_path() / "scatter_acceptance";
    fs::remove_all(g_tmp);
    fs::create_directories(g_tmp);

    struct Criterion {
        int id;
        const char* name;
        std::function<void()> fn;
    };
    const std::vector<Criterion> criteria = {
        {1, "replayed eval reproduces all 40 reference metric pairs", criterion_table_ingestion},
        {2, "statistics match the independent oracle and show published figures",
         criterion_statistics},
        {3, "SAT reduction invariant holds on 200 generated fixtures", criterion_sat_invariants},
        {4, "expansion shape: n-1 applications on LOCAL, none on GLOBAL",
         criterion_algorithm_shape},
        {5, "Student-t CDF matches the quadrature oracle to 1e-9", criterion_student_cdf},
        {6, "replayed demo runs produce byte-identical output trees", criterion_determinism},
        {7, "malformed outputs: repair, normalization, declared exit codes",
         criterion_robust_parsing},
        {8, "mock demo widens stage coverage to all five stages", criterion_mock_demo},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto t0 = Clock::now();
        try {
            c.fn();
            std::printf("PASS %d: %s (%.2fs)\n", c.id, c.name, seconds_since(t0));
        } catch (const std::exception& e) {
            std::printf("FAIL %d: %s — %s\n", c.id, c.name, e.what());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
