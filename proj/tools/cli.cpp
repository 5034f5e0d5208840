#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "kernelcur/analysis.hpp"
#include "kernelcur/curation.hpp"
#include "kernelcur/difficulty.hpp"
#include "kernelcur/error.hpp"
#include "kernelcur/harness.hpp"
#include "kernelcur/metrics.hpp"
#include "kernelcur/records.hpp"
#include "kernelcur/result_cache.hpp"
#include "kernelcur/runner.hpp"
#include "kernelcur/sft.hpp"
#include "report.hpp"

namespace kernelcur::cli {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kCacheEnv = "KERNELCUR_CACHE_DIR";

class UsageError : public Error {
public:
    using Error::Error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Inputs {
    std::vector<GenerationRecord> records;
    std::vector<TaskGroup> groups;
};

Inputs load_inputs(const std::string& records_path, const std::string& evals_path,
                   bool approx_tokens, std::ostream& err) {
    Inputs in;
    in.records = read_records(records_path, {approx_tokens});
    const auto evals = read_evals(evals_path);
    auto grouped = group_by_task(in.records, evals);
    if (!grouped.unevaluated.empty()) {
        err << "warning: " << grouped.unevaluated.size()
            << " records have no eval and are excluded (first: "
            << to_string(grouped.unevaluated.front()) << ")\n";
    }
    in.groups = std::move(grouped.groups);
    return in;
}

// Groups records without evals; only reasoning lengths are meaningful.
std::vector<TaskGroup> groups_from_records(const std::vector<GenerationRecord>& records) {
    std::vector<EvalResult> placeholders;
    placeholders.reserve(records.size());
    for (const auto& r : records) {
        EvalResult e;
        e.task_id = r.task_id;
        e.gen_index = r.gen_index;
        e.status = Status::incorrect;
        placeholders.push_back(std::move(e));
    }
    return group_by_task(records, placeholders).groups;
}

// Groups evals when no record file is given; records carry only their keys.
std::vector<TaskGroup> groups_from_evals(const std::vector<EvalResult>& evals) {
    std::vector<GenerationRecord> stubs;
    stubs.reserve(evals.size());
    for (const auto& e : evals) {
        GenerationRecord r;
        r.task_id = e.task_id;
        r.gen_index = e.gen_index;
        stubs.push_back(std::move(r));
    }
    std::map<RecordKey, std::size_t> seen;
    std::vector<GenerationRecord> unique;
    for (auto& r : stubs) {
        if (seen.emplace(r.key(), unique.size()).second) unique.push_back(std::move(r));
    }
    return group_by_task(unique, evals).groups;
}

std::unique_ptr<Runner> make_runner(const std::string& spec, int retry_budget) {
    constexpr std::string_view kScripted = "mock:scripted:";
    constexpr std::string_view kCmd = "cmd:";
    if (spec == "mock:hashed") return mock_runner(MockMode::hashed);
    if (spec.rfind(kScripted, 0) == 0 && spec.size() > kScripted.size()) {
        return mock_runner(MockMode::scripted,
                           load_scripted_fixture(spec.substr(kScripted.size())));
    }
    if (spec.rfind(kCmd, 0) == 0 && spec.size() > kCmd.size()) {
        ExternalRunnerOptions opts;
        opts.retry_budget = retry_budget;
        return spawn_external_runner(spec.substr(kCmd.size()), opts);
    }
    throw UsageError("unknown runner \"" + spec +
                     "\"; expected mock:hashed, mock:scripted:<fixture>, or cmd:<command>");
}

std::string iso_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
    std::string records;
    std::string runner;
    std::string out;
    std::string cache_dir;
    std::string summary;
    std::size_t workers = 1;
    int retry_budget = 2;
    bool approx_tokens = false;
    RunConfig cfg;
    std::string timing_agg = "median";
    std::string device = "gpu";
};

int cmd_evaluate(EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    auto agg = parse_timing_aggregation(a.timing_agg);
    auto device = parse_device(a.device);
    if (!agg) throw UsageError("--timing-agg must be median or mean");
    if (!device) throw UsageError("--device must be gpu or cpu");
    a.cfg.timing_agg = *agg;
    a.cfg.device = *device;
    a.cfg.validate();
    if (a.workers < 1) throw UsageError("--workers must be >= 1");
    if (const char* env = std::getenv(kCacheEnv); env && *env) a.cache_dir = env;

    const auto started = std::chrono::steady_clock::now();
    const auto records = read_records(a.records, {a.approx_tokens});
    auto runner = make_runner(a.runner, a.retry_budget);

    std::optional<ResultCache> cache;
    if (!a.cache_dir.empty()) cache.emplace(a.cache_dir);
    harness::EvaluateOptions options;
    options.workers = a.workers;
    options.cache = cache ? &*cache : nullptr;

    harness::EvaluateOutput result;
    try {
        result = harness::evaluate(records, *runner, a.cfg, options);
    } catch (const harness::BatchAborted& e) {
        runner->close();
        err << "error: " << e.what() << "\n"
            << "completed " << e.n_completed() << " of " << records.size()
            << " records before the abort; no output written\n";
        return kExitBatchAborted;
    }
    runner->close();
    write_evals(a.out, result.results);

    const auto summary_counts = count_summary(group_by_task(records, result.results).groups);
    OrderedJson summary;
    summary["n_records"] = static_cast<std::int64_t>(records.size());
    summary["n_tasks"] = summary_counts.n_tasks;
    summary["n_generations"] = summary_counts.n_generations;
    summary["n_correct"] = summary_counts.n_correct;
    summary["n_tasks_with_correct"] = summary_counts.n_tasks_with_correct;
    std::vector<Status> statuses;
    for (const auto& e : result.results) statuses.push_back(e.status);
    summary["exec_rate"] =
        statuses.empty() ? OrderedJson(nullptr) : OrderedJson(metrics::exec_rate(statuses));
    summary["cache_hits"] = static_cast<std::int64_t>(result.stats.cache_hits);
    summary["cache_hit_rate"] =
        records.empty() ? 0.0
                        : static_cast<double>(result.stats.cache_hits) /
                              static_cast<double>(records.size());
    summary["runner_invocations"] = static_cast<std::int64_t>(runner->invocations());
    summary["clamped_verdicts"] = static_cast<std::int64_t>(result.stats.inconsistent);
    summary["config_hash"] = a.cfg.hash();
    summary["run_config"] = a.cfg.to_json();
    const std::string summary_line = dump_line(summary) + "\n";
    out << summary_line;
    if (!a.summary.empty()) write_file_atomic(a.summary, summary_line);

    OrderedJson meta;
    meta["tool"] = "kernelcur";
    meta["version"] = kVersion;
    meta["finished_at"] = iso_now();
    meta["elapsed_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    meta["runner"] = a.runner;
    meta["workers"] = static_cast<std::int64_t>(a.workers);
    meta["cache_dir"] = a.cache_dir;
    meta["cache_hits"] = static_cast<std::int64_t>(result.stats.cache_hits);
    meta["runner_invocations"] = static_cast<std::int64_t>(runner->invocations());
    write_file_atomic(a.out + ".meta.json", dump_line(meta) + "\n");
    return kExitOk;
}

// ---- curate ----------------------------------------------------------------

struct CurateArgs {
    std::string records;
    std::string evals;
    std::string out;
    std::string policy = "concur";
    bool approx_tokens = false;
    curation::CurationConfig cfg;
};

int cmd_curate(CurateArgs& a, std::ostream& out, std::ostream& err) {
    auto policy = curation::parse_policy(a.policy);
    if (!policy) throw UsageError("unknown --policy \"" + a.policy + "\"");
    a.cfg.policy = *policy;
    a.cfg.validate();
    const Inputs in = load_inputs(a.records, a.evals, a.approx_tokens, err);
    const auto result = curation::curate(in.groups, a.cfg);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    curation::write_curated(a.out, result, a.cfg);
    out << "curated " << result.samples.size() << " samples (A=" << result.tallies.a
        << " B=" << result.tallies.b << " C=" << result.tallies.c << ") -> " << a.out << "\n";
    return kExitOk;
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    std::string records;
    std::string evals;
    std::string out;
    bool approx_tokens = false;
    analysis::AnalysisConfig cfg;
};

int cmd_analyze(AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
    if (a.cfg.bin_width <= 0) throw UsageError("--bin-width must be > 0");
    const Inputs in = load_inputs(a.records, a.evals, a.approx_tokens, err);
    const auto report = analysis::analysis_report(in.groups, a.cfg);
    write_file_atomic(a.out, dump_line(report) + "\n");
    out << "analysis of " << report["n_generations"].get<std::int64_t>() << " generations -> "
        << a.out << "\n";
    return kExitOk;
}

// ---- difficulty ------------------------------------------------------------

struct DifficultyArgs {
    std::string records;
    std::string evals;
    std::string out;
    bool approx_tokens = false;
    int pass_k = 0;
    bool include_zeros = false;
    difficulty::DifficultyConfig cfg;
};

int cmd_difficulty(DifficultyArgs& a, std::ostream& out, std::ostream& err) {
    a.cfg.validate();
    if (a.pass_k < 0) throw UsageError("--pass-k must be >= 0");
    std::vector<TaskGroup> groups;
    const bool have_evals = !a.evals.empty();
    if (have_evals) {
        groups = load_inputs(a.records, a.evals, a.approx_tokens, err).groups;
    } else {
        groups = groups_from_records(read_records(a.records, {a.approx_tokens}));
    }
    const auto labels = difficulty::classify(groups, a.cfg);

    difficulty::TierReportOptions options;
    options.include_zeros = a.include_zeros;
    if (a.pass_k > 0) {
        options.aggregation = difficulty::TierAggregation::pass_at_k;
        options.k = a.pass_k;
    }
    std::optional<std::array<difficulty::TierStats, 3>> tiers;
    if (have_evals) tiers = difficulty::tier_report(labels, groups, options);

    write_file_atomic(a.out, difficulty::format_difficulty(labels, a.cfg, tiers, options));
    std::array<int, 3> counts{};
    for (const auto& l : labels) ++counts[static_cast<std::size_t>(l.tier)];
    out << "classified " << labels.size() << " tasks (easy=" << counts[0]
        << " medium=" << counts[1] << " hard=" << counts[2] << ") -> " << a.out << "\n";
    return kExitOk;
}

// ---- export-sft ------------------------------------------------------------

struct ExportArgs {
    std::string records;
    std::string curated;
    std::string out;
    std::string template_path;
    std::string few_shot_torch;
    std::string few_shot_kernel;
    bool approx_tokens = false;
    sft::ResponseFormat format;
};

int cmd_export_sft(ExportArgs& a, std::ostream& out, std::ostream&) {
    sft::PromptTemplate tmpl = sft::PromptTemplate::builtin();
    if (!a.template_path.empty()) tmpl.text = slurp(a.template_path);
    if (!a.few_shot_torch.empty()) tmpl.few_shot_torch = slurp(a.few_shot_torch);
    if (!a.few_shot_kernel.empty()) tmpl.few_shot_kernel = slurp(a.few_shot_kernel);
    tmpl.validate();

    const auto records = read_records(a.records, {a.approx_tokens});
    std::map<RecordKey, const GenerationRecord*> lookup;
    for (const auto& r : records) lookup[r.key()] = &r;
    const auto curated = curation::read_curated(a.curated);
    const auto examples = sft::export_sft(curated.samples, lookup, tmpl, a.format);
    write_file_atomic(a.out, sft::format_sft(examples));
    out << "exported " << examples.size() << " examples -> " << a.out << "\n";
    return kExitOk;
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
    std::string evals;
    std::string records;
    std::string out;
    bool approx_tokens = false;
    ReportOptions options;
};

int cmd_report(ReportArgs& a, std::ostream& out, std::ostream& err) {
    metrics::MetricConfig mc{a.options.p_thresholds, a.options.k};
    mc.validate();
    std::vector<TaskGroup> groups;
    if (!a.records.empty()) {
        groups = load_inputs(a.records, a.evals, a.approx_tokens, err).groups;
    } else {
        groups = groups_from_evals(read_evals(a.evals));
    }
    a.options.source = a.evals;
    const std::string text = render_report(groups, a.options);
    if (a.out.empty()) {
        out << text;
    } else {
        write_file_atomic(a.out, text);
        out << "report -> " << a.out << "\n";
    }
    return kExitOk;
}

void add_records_flags(CLI::App* sub, std::string& records, bool& approx, bool required = true) {
    auto* opt = sub->add_option("--records", records, "Generation record file (JSONL)");
    if (required) opt->required();
    sub->add_flag("--approx-tokens", approx,
                  "Count whitespace-separated words when reasoning_tokens is missing "
                  "(marked approximate in output; default: off)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"kernelcur: evaluate, curate, and analyze generated GPU kernels with reasoning traces",
                 "kernelcur"};
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Run every record through a runner and write evals");
    add_records_flags(evaluate, ev.records, ev.approx_tokens);
    evaluate->add_option("--runner", ev.runner,
                         "mock:hashed | mock:scripted:<fixture.jsonl> | cmd:<shell command>")
        ->required();
    evaluate->add_option("--out", ev.out, "Eval file to write (JSONL)")->required();
    evaluate->add_option("--workers", ev.workers, "Concurrent in-flight requests");
    evaluate->add_option("--cache-dir", ev.cache_dir,
                         std::string("Result cache directory (overridden by ") + kCacheEnv + ")");
    evaluate->add_option("--summary", ev.summary, "Also write the summary object to this file");
    evaluate->add_option("--retry-budget", ev.retry_budget, "Restarts allowed per runner process");
    evaluate->add_option("--warmup-iters", ev.cfg.warmup_iters, "Untimed iterations before timing");
    evaluate->add_option("--timed-iters", ev.cfg.timed_iters, "Timed iterations");
    evaluate->add_option("--timing-agg", ev.timing_agg, "median | mean");
    evaluate->add_option("--n-input-seeds", ev.cfg.n_input_seeds, "Random inputs compared per request");
    evaluate->add_option("--atol", ev.cfg.atol, "Absolute tolerance for output comparison");
    evaluate->add_option("--rtol", ev.cfg.rtol, "Relative tolerance for output comparison");
    evaluate->add_option("--timeout-s", ev.cfg.timeout_s, "Per-request timeout in seconds");
    evaluate->add_option("--device", ev.device, "gpu | cpu");

    CurateArgs cu;
    auto* curate = app.add_subcommand("curate", "Select a curated dataset from records and evals");
    add_records_flags(curate, cu.records, cu.approx_tokens);
    curate->add_option("--evals", cu.evals, "Eval file (JSONL)")->required();
    curate->add_option("--out", cu.out, "Curated dataset to write (JSONL)")->required();
    curate->add_option("--policy", cu.policy, "concur | random | max_len | min_len | speedup_first");
    curate->add_option("--speedup-threshold", cu.cfg.speedup_threshold,
                       "Part B admits correct kernels with speedup strictly above this");
    curate->add_option("--single-op-target", cu.cfg.single_op_target,
                       "Part C sample cap (0 takes all)");
    curate->add_option("--target-size", cu.cfg.target_size, "Tasks kept by the ablation policies");
    curate->add_option("--seed", cu.cfg.seed, "Seed for the random policy");
    curate->add_flag("--single-op-heuristic", cu.cfg.single_op_heuristic,
                     "Tag untyped tasks by counting distinct operator calls (default: off)");

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Length/accuracy bins, box stats, length/speedup correlation");
    add_records_flags(analyze, an.records, an.approx_tokens);
    analyze->add_option("--evals", an.evals, "Eval file (JSONL)")->required();
    analyze->add_option("--out", an.out, "Analysis report to write (JSON)")->required();
    analyze->add_option("--bin-width", an.cfg.bin_width, "Reasoning-length bin width in tokens");
    analyze->add_flag("--include-incorrect", an.cfg.include_incorrect,
                      "Make the all-samples correlation primary (zero speedups included; default: off)");

    DifficultyArgs di;
    auto* diff = app.add_subcommand("difficulty", "Classify tasks into easy/medium/hard by average reasoning length");
    add_records_flags(diff, di.records, di.approx_tokens);
    diff->add_option("--evals", di.evals, "Eval file; enables the per-tier metric report");
    diff->add_option("--out", di.out, "Difficulty report to write (JSONL)")->required();
    diff->add_option("--easy-max", di.cfg.easy_max, "Easy when ARL is strictly below this");
    diff->add_option("--hard-min", di.cfg.hard_min, "Hard when ARL is strictly above this");
    diff->add_option("--min-generations", di.cfg.min_generations,
                     "Groups with fewer generations are flagged low_confidence");
    diff->add_option("--pass-k", di.pass_k,
                     "Tier metrics use pass@k over the first k generations (0 = every generation)");
    diff->add_flag("--include-zeros", di.include_zeros, "Geometric mean includes zero speedups (default: off)");

    ExportArgs ex;
    auto* exp = app.add_subcommand("export-sft", "Render curated samples as prompt/response pairs");
    add_records_flags(exp, ex.records, ex.approx_tokens);
    exp->add_option("--curated", ex.curated, "Curated dataset (JSONL)")->required();
    exp->add_option("--out", ex.out, "SFT file to write (JSONL)")->required();
    exp->add_option("--template", ex.template_path,
                    "Prompt template with $ref_arch_torch, $ref_arch_kernel, $code (built-in if empty)");
    exp->add_option("--few-shot-torch", ex.few_shot_torch, "File for $ref_arch_torch (built-in if empty)");
    exp->add_option("--few-shot-kernel", ex.few_shot_kernel, "File for $ref_arch_kernel (built-in if empty)");
    exp->add_option("--think-open", ex.format.think_open, "Text placed before the reasoning trace");
    exp->add_option("--think-close", ex.format.think_close, "Text placed after the reasoning trace");

    ReportArgs re;
    auto* report = app.add_subcommand("report", "Exec / fast_p / pass@k / G_speedup tables over an eval file");
    report->add_option("--evals", re.evals, "Eval file (JSONL)")->required();
    add_records_flags(report, re.records, re.approx_tokens, false);
    report->add_option("--out", re.out, "Write the table here instead of stdout");
    report->add_option("--p", re.options.p_thresholds, "fast_p thresholds (repeatable)")
        ->default_str("1");
    report->add_option("--k", re.options.k, "k for pass@k rows");
    report->add_flag("--include-zeros", re.options.include_zeros, "Geometric mean includes zero speedups (default: off)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (evaluate->parsed()) return cmd_evaluate(ev, out, err);
        if (curate->parsed()) return cmd_curate(cu, out, err);
        if (analyze->parsed()) return cmd_analyze(an, out, err);
        if (diff->parsed()) return cmd_difficulty(di, out, err);
        if (exp->parsed()) return cmd_export_sft(ex, out, err);
        if (report->parsed()) return cmd_report(re, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        for (auto* sub : app.get_subcommands()) err << sub->help();
        return kExitUsage;
    } catch (const HandshakeError& e) {
        err << "error: " << e.what() << "\n";
        return kExitBatchAborted;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitBatchAborted;
    }
    return kExitUsage;
}

}  // namespace kernelcur::cli
