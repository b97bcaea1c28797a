#ifndef MDSENSE_CONFIG_HPP
#define MDSENSE_CONFIG_HPP

// Experiment configuration: every tunable of the toolkit with the desk-scale
// defaults, a key=value config-file reader, and the paper-style (M, b, d)
// grid expansion.

#include <fstream>
#include <sstream>

#include "mdsense/env.hpp"
#include "mdsense/synth.hpp"

namespace mdsense {

struct ExperimentConfig {
    // problem geometry
    int window = 64;   // W
    int budget = 8;    // M
    double burstiness = 4.0;  // b
    double density = 1.0;     // d
    int omega = 8;
    double t_c = 0.27e-3;

    // synthetic generator
    int gen_scatterers = 3;
    double gen_snr_db = 15.0;
    bool gen_on_grid = true;
    double gen_drift_hz = 60.0;
    double gen_amp_jitter = 0.05;
    int synth_windows = 250;
    int synth_sequences = 1;

    // solver
    double iht_tol = 1e-6;
    int iht_max_iter = 200;

    // training
    long train_episodes = 5000;
    int train_chunk = 256;  // windows per generated training sequence
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double lr_policy = 1e-3;
    double lr_value = 5e-5;
    double clip = 0.1;
    double entropy_coef = 0.01;
    double value_coef = 0.5;
    double grad_clip = 0.5;
    int horizon = 512;
    int ppo_epochs = 4;
    int minibatch = 64;
    long checkpoint_interval = 1000;

    // evaluation
    int test_sequences = 10;
    int test_windows = 250;
    bool greedy_eval = true;
    int rmcrs_candidates = 100;
    long bench_calls = 1000;

    std::uint64_t seed = 1;
    RewardSign reward_sign = RewardSign::kTextConsistent;
    BurstConvention burst_convention = BurstConvention::kAsPrinted;

    std::string policy_checkpoint;
    std::string value_checkpoint;

    TrafficModel traffic_model() const {
        return TrafficModel(window, burstiness, density, burst_convention);
    }
    EnvConfig env_config() const {
        EnvConfig e;
        e.window = window;
        e.budget = budget;
        e.omega = SparsityBudget(omega);
        e.iht_tol = iht_tol;
        e.iht_max_iter = iht_max_iter;
        e.reward_sign = reward_sign;
        return e;
    }
    GeneratorConfig generator_config(std::uint64_t gen_seed, int num_windows) const {
        GeneratorConfig g;
        g.num_windows = num_windows;
        g.window = window;
        g.scatterers = gen_scatterers;
        g.t_c = t_c;
        g.noise.snr_db = gen_snr_db;
        g.seed = gen_seed;
        g.on_grid = gen_on_grid;
        g.drift_hz_per_window = gen_drift_hz;
        g.amp_jitter = gen_amp_jitter;
        return g;
    }
};

namespace detail {

inline bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: expected a boolean, got '" + v + "'");
}

inline double parse_double(const std::string& v) {
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("config: expected a number, got '" + v + "'");
    return d;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_bool;
    using detail::parse_double;
    if (key == "W" || key == "window") cfg.window = static_cast<int>(parse_double(value));
    else if (key == "M" || key == "budget") cfg.budget = static_cast<int>(parse_double(value));
    else if (key == "b" || key == "burstiness") cfg.burstiness = parse_double(value);
    else if (key == "d" || key == "density") cfg.density = parse_double(value);
    else if (key == "omega") cfg.omega = static_cast<int>(parse_double(value));
    else if (key == "t_c") cfg.t_c = parse_double(value);
    else if (key == "gen_scatterers" || key == "Q") cfg.gen_scatterers = static_cast<int>(parse_double(value));
    else if (key == "gen_snr_db") cfg.gen_snr_db = parse_double(value);
    else if (key == "gen_on_grid") cfg.gen_on_grid = parse_bool(value);
    else if (key == "gen_drift_hz") cfg.gen_drift_hz = parse_double(value);
    else if (key == "gen_amp_jitter") cfg.gen_amp_jitter = parse_double(value);
    else if (key == "synth_windows") cfg.synth_windows = static_cast<int>(parse_double(value));
    else if (key == "synth_sequences") cfg.synth_sequences = static_cast<int>(parse_double(value));
    else if (key == "iht_tol") cfg.iht_tol = parse_double(value);
    else if (key == "iht_max_iter") cfg.iht_max_iter = static_cast<int>(parse_double(value));
    else if (key == "train_episodes") cfg.train_episodes = static_cast<long>(parse_double(value));
    else if (key == "train_chunk") cfg.train_chunk = static_cast<int>(parse_double(value));
    else if (key == "gamma") cfg.gamma = parse_double(value);
    else if (key == "gae_lambda") cfg.gae_lambda = parse_double(value);
    else if (key == "lr_policy") cfg.lr_policy = parse_double(value);
    else if (key == "lr_value") cfg.lr_value = parse_double(value);
    else if (key == "clip") cfg.clip = parse_double(value);
    else if (key == "entropy_coef") cfg.entropy_coef = parse_double(value);
    else if (key == "value_coef") cfg.value_coef = parse_double(value);
    else if (key == "grad_clip") cfg.grad_clip = parse_double(value);
    else if (key == "horizon") cfg.horizon = static_cast<int>(parse_double(value));
    else if (key == "ppo_epochs") cfg.ppo_epochs = static_cast<int>(parse_double(value));
    else if (key == "minibatch") cfg.minibatch = static_cast<int>(parse_double(value));
    else if (key == "checkpoint_interval") cfg.checkpoint_interval = static_cast<long>(parse_double(value));
    else if (key == "test_sequences") cfg.test_sequences = static_cast<int>(parse_double(value));
    else if (key == "test_windows") cfg.test_windows = static_cast<int>(parse_double(value));
    else if (key == "greedy_eval") cfg.greedy_eval = parse_bool(value);
    else if (key == "rmcrs_candidates") cfg.rmcrs_candidates = static_cast<int>(parse_double(value));
    else if (key == "bench_calls") cfg.bench_calls = static_cast<long>(parse_double(value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_double(value));
    else if (key == "reward_sign") {
        if (value == "text-consistent") cfg.reward_sign = RewardSign::kTextConsistent;
        else if (value == "as-printed") cfg.reward_sign = RewardSign::kAsPrinted;
        else throw std::invalid_argument("config: reward_sign must be text-consistent or as-printed");
    } else if (key == "burst_convention") {
        if (value == "as-printed") cfg.burst_convention = BurstConvention::kAsPrinted;
        else if (value == "mean-length-b") cfg.burst_convention = BurstConvention::kMeanLengthB;
        else throw std::invalid_argument("config: burst_convention must be as-printed or mean-length-b");
    } else if (key == "policy_checkpoint") cfg.policy_checkpoint = value;
    else if (key == "value_checkpoint") cfg.value_checkpoint = value;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

// key=value file, '#' starts a comment, blank lines ignored.
inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open '" + path + "'");
    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("load_config: line " + std::to_string(line_no) +
                                     " is not of the form key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            apply_config_entry(cfg, key, value);
        } catch (const std::exception& e) {
            throw std::runtime_error("load_config: line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

// The experiment grid: for each M, b spans {M/2, M, 2M} and d spans
// {M/8, M/4, M/2}; one configuration (and one agent) per combination.
inline std::vector<ExperimentConfig> paper_grid(const ExperimentConfig& base,
                                                const std::vector<int>& budgets = {8, 16, 32}) {
    std::vector<ExperimentConfig> grid;
    for (int m : budgets) {
        for (double b : {m / 2.0, static_cast<double>(m), 2.0 * m}) {
            for (double d : {m / 8.0, m / 4.0, m / 2.0}) {
                ExperimentConfig c = base;
                c.budget = m;
                c.burstiness = b;
                c.density = d;
                grid.push_back(c);
            }
        }
    }
    return grid;
}

}  // namespace mdsense

#endif  // MDSENSE_CONFIG_HPP
