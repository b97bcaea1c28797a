// Command-line front end: trace generation, agent training, evaluation,
// selection-time benchmarking and coherence statistics.

#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "mdsense/harness.hpp"

namespace {

using namespace mdsense;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string methods = "ppo,mcsfs,rmcrs,random";
    std::string checkpoint;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_methods) {
    cmd->add_option("--config", args.config_path, "key=value configuration file");
    cmd->add_option("--out", args.out_dir, "output directory");
    auto* seed_opt = cmd->add_option("--seed", args.seed, "master seed override");
    seed_opt->each([&args](const std::string&) { args.seed_set = true; });
    if (with_methods) {
        cmd->add_option("--method", args.methods, "comma-separated method list");
        cmd->add_option("--checkpoint", args.checkpoint, "policy checkpoint (overrides config)");
    }
}

ExperimentConfig make_config(const CommonArgs& args) {
    ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = load_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.checkpoint.empty()) cfg.policy_checkpoint = args.checkpoint;
    return cfg;
}

// Loads the policy net when the method list asks for it.
std::optional<ConvStack> maybe_load_policy(const ExperimentConfig& cfg,
                                           const std::vector<std::string>& methods) {
    const bool wants_ppo =
        std::find(methods.begin(), methods.end(), "ppo") != methods.end();
    if (!wants_ppo) return std::nullopt;
    if (cfg.policy_checkpoint.empty())
        throw std::runtime_error("method list includes ppo but no policy checkpoint is configured "
                                 "(set policy_checkpoint or pass --checkpoint)");
    return load_checkpoint(cfg.policy_checkpoint, NetKind::kPolicy, cfg.window);
}

int cmd_synth(const CommonArgs& args) {
    const ExperimentConfig cfg = make_config(args);
    std::filesystem::create_directories(args.out_dir);
    for (int s = 0; s < cfg.synth_sequences; ++s) {
        const CirSequence seq =
            generate_sequence(cfg.generator_config(child_seed(cfg.seed, 1000 + s), cfg.synth_windows));
        char name[64];
        std::snprintf(name, sizeof(name), "/trace_%03d.csv", s);
        const std::string path = args.out_dir + name;
        save_trace(seq, path);
        std::cout << "wrote " << path << " (" << seq.num_windows() << " windows of W="
                  << seq.window_size() << ")\n";
    }
    return 0;
}

int cmd_train(const CommonArgs& args) {
    const ExperimentConfig cfg = make_config(args);
    std::cout << "training ppo agent: W=" << cfg.window << " M=" << cfg.budget
              << " b=" << cfg.burstiness << " d=" << cfg.density
              << " episodes=" << cfg.train_episodes << "\n";
    const TrainingResult res = run_training(cfg, args.out_dir, [](long ep, double ret, double m) {
        std::printf("episode %6ld  mean return %.6f  mean final mse %.6f\n", ep, ret, m);
    });
    std::cout << "policy checkpoint: " << res.policy_path << "\n"
              << "value checkpoint:  " << res.value_path << "\n"
              << "learning curve:    " << res.curve_path << "\n";
    return 0;
}

int cmd_eval(const CommonArgs& args) {
    const ExperimentConfig cfg = make_config(args);
    const std::vector<std::string> methods = parse_method_list(args.methods);
    const std::optional<ConvStack> policy = maybe_load_policy(cfg, methods);
    const std::vector<ResultRecord> records =
        run_evaluation(cfg, methods, policy ? &*policy : nullptr);
    emit_metrics(records, args.out_dir);
    std::cout << "wrote " << records.size() << " records to " << args.out_dir
              << "/records.csv and summary.json\n";
    return 0;
}

int cmd_bench(const CommonArgs& args) {
    const ExperimentConfig cfg = make_config(args);
    const std::vector<std::string> methods = parse_method_list(args.methods);
    const std::optional<ConvStack> policy = maybe_load_policy(cfg, methods);
    const std::vector<BenchResult> rows = run_timing_bench(cfg, methods, policy ? &*policy : nullptr);

    std::filesystem::create_directories(args.out_dir);
    std::ofstream csv(args.out_dir + "/bench.csv");
    csv << "method,median_ms_per_sample,selection_calls,samples_added,reference_ms\n";
    std::printf("%-8s %18s %14s %14s\n", "method", "median ms/sample", "calls", "reference ms");
    for (const auto& r : rows) {
        std::printf("%-8s %18.4f %14ld %14.2f\n", r.method.c_str(), r.median_ms_per_sample,
                    r.selection_calls, reference_timing_ms(r.method));
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s,%.6g,%ld,%ld,%.2f\n", r.method.c_str(),
                      r.median_ms_per_sample, r.selection_calls, r.samples_added,
                      reference_timing_ms(r.method));
        csv << buf;
    }
    std::cout << "wrote " << args.out_dir << "/bench.csv\n";
    return 0;
}

int cmd_mc_stats(const CommonArgs& args) {
    const ExperimentConfig cfg = make_config(args);
    const std::vector<std::string> methods = parse_method_list(args.methods);
    const std::optional<ConvStack> policy = maybe_load_policy(cfg, methods);
    const std::vector<ResultRecord> records =
        run_evaluation(cfg, methods, policy ? &*policy : nullptr);
    emit_metrics(records, args.out_dir);

    // Coherence medians to stdout, one line per method.
    std::map<std::string, std::vector<double>> mcs;
    for (const auto& r : records) mcs[r.method].push_back(r.mc);
    for (const auto& [method, values] : mcs)
        std::printf("%-8s median mc %.6f over %zu windows\n", method.c_str(),
                    percentile(values, 50.0), values.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"micro-Doppler sensing-slot scheduling toolkit"};
    app.require_subcommand(1);

    CommonArgs synth_args, train_args, eval_args, bench_args, mc_args;
    auto* synth = app.add_subcommand("synth", "generate synthetic CIR trace files");
    add_common(synth, synth_args, false);
    auto* train = app.add_subcommand("train", "train a PPO agent for one (M, b, d) configuration");
    add_common(train, train_args, false);
    auto* eval = app.add_subcommand("eval", "evaluate selection methods over test sequences");
    add_common(eval, eval_args, true);
    auto* bench = app.add_subcommand("bench", "measure per-sample selection time per method");
    add_common(bench, bench_args, true);
    auto* mc_stats = app.add_subcommand("mc-stats", "mutual-coherence statistics per method");
    add_common(mc_stats, mc_args, true);
    mc_args.methods = "mcsfs,rmcrs,random";

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(synth_args);
        if (train->parsed()) return cmd_train(train_args);
        if (eval->parsed()) return cmd_eval(eval_args);
        if (bench->parsed()) return cmd_bench(bench_args);
        if (mc_stats->parsed()) return cmd_mc_stats(mc_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
