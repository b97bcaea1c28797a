#ifndef MDSENSE_PPO_HPP
#define MDSENSE_PPO_HPP

// Proximal policy optimization on the conv-stack networks: Adam with
// bias correction, rollout storage, discounted returns plus generalized
// advantage estimation, and the clipped-surrogate update with an entropy
// bonus. Parameters change only through adam_step.

#include <numeric>

#include "mdsense/nn.hpp"

namespace mdsense {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    explicit AdamState(std::size_t param_count)
        : m(param_count, 0.0), v(param_count, 0.0) {}
};

inline void adam_step(AdamState& state, std::vector<float>& params,
                      std::span<const double> grads, double lr) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: parameter/gradient/moment shapes disagree");
    ++state.step;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] = static_cast<float>(static_cast<double>(params[i]) -
                                       lr * m_hat / (std::sqrt(v_hat) + state.epsilon));
    }
}

// Linear decay from the maximum rate to zero at the end of training.
inline double linear_lr(double lr_max, long done, long total) {
    if (total <= 0) return lr_max;
    const double frac = 1.0 - static_cast<double>(done) / static_cast<double>(total);
    return lr_max * std::max(0.0, frac);
}

// Per-step rollout records plus the derived returns and advantages.
struct RolloutBuffer {
    int horizon = 0;

    std::vector<std::vector<double>> states;        // encoded 3 x W tensors
    std::vector<std::vector<std::uint8_t>> masks;   // legal-action masks at collection
    std::vector<int> actions;
    std::vector<double> log_probs;                  // log pi_old(a | s)
    std::vector<double> rewards;
    std::vector<double> values;                     // V(s) at collection
    std::vector<std::uint8_t> dones;
    std::vector<double> returns;
    std::vector<double> advantages;

    explicit RolloutBuffer(int horizon_steps = 0) : horizon(horizon_steps) {}

    std::size_t size() const { return actions.size(); }
    bool full() const { return horizon > 0 && size() >= static_cast<std::size_t>(horizon); }

    void push(std::vector<double> state, std::vector<std::uint8_t> mask, int action,
              double log_prob, double reward, double value, bool done) {
        states.push_back(std::move(state));
        masks.push_back(std::move(mask));
        actions.push_back(action);
        log_probs.push_back(log_prob);
        rewards.push_back(reward);
        values.push_back(value);
        dones.push_back(done ? 1 : 0);
    }

    void clear() {
        states.clear();
        masks.clear();
        actions.clear();
        log_probs.clear();
        rewards.clear();
        values.clear();
        dones.clear();
        returns.clear();
        advantages.clear();
    }
};

/**
 * Fills returns and advantages. Returns are plain discounted sums within each
 * episode (no bootstrapping across a done flag); if the buffer ends inside an
 * unfinished episode, `last_value` bootstraps the truncated tail. Advantages
 * use generalized advantage estimation with the same episode boundaries.
 */
inline void compute_returns_advantages(RolloutBuffer& buf, double gamma, double lambda,
                                       double last_value = 0.0) {
    const std::size_t n = buf.size();
    if (n == 0) throw std::invalid_argument("compute_returns_advantages: empty buffer");
    buf.returns.assign(n, 0.0);
    buf.advantages.assign(n, 0.0);

    double next_return = last_value;
    double next_value = last_value;
    double next_advantage = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const bool terminal = buf.dones[i] != 0;
        if (terminal) {
            next_return = 0.0;
            next_value = 0.0;
            next_advantage = 0.0;
        }
        buf.returns[i] = buf.rewards[i] + gamma * next_return;
        const double delta = buf.rewards[i] + gamma * next_value - buf.values[i];
        buf.advantages[i] = delta + gamma * lambda * next_advantage;
        next_return = buf.returns[i];
        next_value = buf.values[i];
        next_advantage = buf.advantages[i];
    }
    for (double a : buf.advantages)
        if (!std::isfinite(a))
            throw std::runtime_error("compute_returns_advantages: non-finite advantage");
}

struct PpoConfig {
    double clip = 0.1;
    double entropy_coef = 0.01;
    double value_coef = 0.5;
    double grad_clip = 0.5;  // global L2 norm bound per update, 0 disables
    int epochs = 4;
    int minibatch = 64;
};

struct PpoStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
    int minibatches = 0;
};

namespace detail {

inline void clip_global_norm(std::vector<double>& grads, double max_norm) {
    if (max_norm <= 0.0) return;
    double sq = 0.0;
    for (double g : grads) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        for (double& g : grads) g *= scale;
    }
}

// Entropy of the masked distribution; masked entries have p = 0 and are
// skipped (0 log 0 = 0).
inline double policy_entropy(const PolicyOutput& po) {
    double h = 0.0;
    for (std::size_t i = 0; i < po.probs.size(); ++i)
        if (po.probs[i] > 0.0) h -= po.probs[i] * po.log_probs[i];
    return h;
}

}  // namespace detail

/**
 * One PPO update over the collected buffer: `epochs` passes of shuffled
 * minibatches maximizing the clipped surrogate plus an entropy bonus, while
 * the value net regresses the discounted returns. Advantages are normalized
 * to zero mean and unit variance over the whole batch. A non-finite loss
 * aborts with a diagnostic before any parameter is touched by it.
 */
inline PpoStats ppo_update(ConvStack& policy, AdamState& policy_opt, double policy_lr,
                           ConvStack& value, AdamState& value_opt, double value_lr,
                           const RolloutBuffer& buf, const PpoConfig& cfg, Rng& rng) {
    const std::size_t n = buf.size();
    if (n == 0) throw std::invalid_argument("ppo_update: empty buffer");
    if (buf.returns.size() != n || buf.advantages.size() != n)
        throw std::invalid_argument("ppo_update: returns/advantages not computed");

    // Batch-level advantage normalization.
    double mean = 0.0;
    for (double a : buf.advantages) mean += a;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double a : buf.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(n);
    const double inv_std = 1.0 / std::sqrt(var + 1e-8);
    std::vector<double> adv(n);
    for (std::size_t i = 0; i < n; ++i) adv[i] = (buf.advantages[i] - mean) * inv_std;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    PpoStats stats;
    long clipped = 0, ratio_count = 0;
    const int batch = std::max(1, cfg.minibatch);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(n, start + batch);
            const double inv_b = 1.0 / static_cast<double>(stop - start);

            std::vector<double> policy_grads(policy.param_count(), 0.0);
            std::vector<double> value_grads(value.param_count(), 0.0);
            double batch_policy_loss = 0.0, batch_value_loss = 0.0, batch_entropy = 0.0;

            for (std::size_t bi = start; bi < stop; ++bi) {
                const std::size_t i = order[bi];
                ForwardCache pc;
                const PolicyOutput po = policy_forward(policy, buf.states[i], buf.masks[i], &pc);
                const int a = buf.actions[i];
                const double ratio = std::exp(po.log_probs[a] - buf.log_probs[i]);
                const double advantage = adv[i];

                const double unclipped = ratio * advantage;
                const double clipped_ratio = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
                const double surrogate = std::min(unclipped, clipped_ratio * advantage);
                const double entropy = detail::policy_entropy(po);
                batch_policy_loss += -surrogate;
                batch_entropy += entropy;
                ++ratio_count;
                if (ratio < 1.0 - cfg.clip || ratio > 1.0 + cfg.clip) ++clipped;

                // d(-surrogate)/d ratio: zero where the clip saturates.
                const bool clip_active = (advantage >= 0.0 && ratio > 1.0 + cfg.clip) ||
                                         (advantage < 0.0 && ratio < 1.0 - cfg.clip);
                const double d_ratio = clip_active ? 0.0 : advantage;

                // Gradient w.r.t. the raw logits of legal slots:
                //   d logpi(a)/d z_j = [j == a] - p_j
                //   dH/d z_j        = -p_j (log p_j + H)
                std::vector<double> d_logits(po.probs.size(), 0.0);
                const double g_logp_a = -d_ratio * ratio;  // d loss / d logpi(a)
                for (std::size_t j = 0; j < po.probs.size(); ++j) {
                    if (!buf.masks[i][j]) continue;
                    const double p = po.probs[j];
                    double g = g_logp_a * ((static_cast<int>(j) == a ? 1.0 : 0.0) - p);
                    if (p > 0.0) g += cfg.entropy_coef * p * (po.log_probs[j] + entropy);
                    d_logits[j] = g * inv_b;
                }
                const std::vector<double> pg = stack_backward(policy, pc, d_logits);
                for (std::size_t k = 0; k < policy_grads.size(); ++k) policy_grads[k] += pg[k];

                ForwardCache vc;
                const double v = value_forward(value, buf.states[i], &vc);
                const double err = v - buf.returns[i];
                batch_value_loss += cfg.value_coef * err * err;
                const double d_v = cfg.value_coef * 2.0 * err * inv_b;
                const std::vector<double> vg = stack_backward(value, vc, std::span(&d_v, 1));
                for (std::size_t k = 0; k < value_grads.size(); ++k) value_grads[k] += vg[k];
            }

            batch_policy_loss *= inv_b;
            batch_value_loss *= inv_b;
            batch_entropy *= inv_b;
            if (!std::isfinite(batch_policy_loss) || !std::isfinite(batch_value_loss))
                throw std::runtime_error(
                    "ppo_update: non-finite loss (policy=" + std::to_string(batch_policy_loss) +
                    ", value=" + std::to_string(batch_value_loss) + "), update aborted");

            detail::clip_global_norm(policy_grads, cfg.grad_clip);
            detail::clip_global_norm(value_grads, cfg.grad_clip);
            adam_step(policy_opt, policy.params, policy_grads, policy_lr);
            adam_step(value_opt, value.params, value_grads, value_lr);

            stats.policy_loss += batch_policy_loss;
            stats.value_loss += batch_value_loss;
            stats.entropy += batch_entropy;
            ++stats.minibatches;
        }
    }
    if (stats.minibatches > 0) {
        stats.policy_loss /= stats.minibatches;
        stats.value_loss /= stats.minibatches;
        stats.entropy /= stats.minibatches;
    }
    stats.clip_fraction = ratio_count > 0 ? static_cast<double>(clipped) / ratio_count : 0.0;
    return stats;
}

}  // namespace mdsense

#endif  // MDSENSE_PPO_HPP
