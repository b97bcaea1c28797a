#ifndef MDSENSE_ENV_HPP
#define MDSENSE_ENV_HPP

// Episodic environment for sequential sensing-slot insertion. One episode
// processes one CIR window: starting from the fixed communication slots, each
// action claims an idle slot, the window is re-reconstructed from the grown
// pattern, and the reward is the normalized MSE reduction of that step.

#include "mdsense/recovery.hpp"
#include "mdsense/traffic.hpp"

namespace mdsense {

// Printed-form of the reward flips the sign of the MSE difference; the
// text-consistent form (default) rewards MSE reduction.
enum class RewardSign { kTextConsistent, kAsPrinted };

struct EnvConfig {
    int window = 64;  // W
    int budget = 8;   // M, total samples per window
    SparsityBudget omega{8};
    double iht_tol = 1e-6;
    int iht_max_iter = 200;
    RewardSign reward_sign = RewardSign::kTextConsistent;
};

struct EpisodeState {
    CplxVec prev_spectrum;            // H_prev observed by the agent
    std::vector<std::uint8_t> occupied;  // membership mask of M[k]
    int step = 0;                     // k, agent decisions taken so far
    int horizon = 0;                  // K = M - |M_c|
    std::vector<int> comm;            // M_c
    std::vector<int> sensing;         // sensing slots chosen so far
    CplxVec recon;                    // cached IHT output for M[k]
    double recon_mse = 0.0;           // MSE(recon, truth)
    double truth_sq_norm = 0.0;       // ||H||_2^2 of the episode's window

    bool done() const { return step >= horizon; }
};

struct EncodedState {
    int window = 0;
    std::vector<double> tensor;  // 3 x W, channel-major: Re/s, Im/s, occupancy

    const double* channel(int c) const { return tensor.data() + static_cast<std::size_t>(c) * window; }
};

struct StepOutcome {
    EpisodeState next;
    double reward = 0.0;
    bool done = false;
};

class SensingEnv {
public:
    SensingEnv(EnvConfig cfg, const FourierMatrix& f) : cfg_(cfg), fourier_(&f) {
        if (f.size() != cfg.window)
            throw std::invalid_argument("SensingEnv: Fourier dimension does not match window");
        if (cfg.budget < 1 || cfg.budget > cfg.window)
            throw std::invalid_argument("SensingEnv: budget must lie in [1, W]");
    }

    const EnvConfig& config() const { return cfg_; }

    /**
     * Starts an episode for one window. `truth` is the window's Doppler-domain
     * channel; the simulator derives the observed CIR samples from it, and in
     * training mode it also drives the rewards. All-zero truth is rejected
     * (the normalized reward would be undefined), callers skip such windows.
     */
    EpisodeState reset(const CommPattern& comm, const CplxVec& prev_spectrum,
                       const CplxVec& truth) const {
        if (static_cast<int>(prev_spectrum.size()) != cfg_.window)
            throw std::invalid_argument("SensingEnv::reset: prev_spectrum length mismatch");
        if (static_cast<int>(truth.size()) != cfg_.window)
            throw std::invalid_argument("SensingEnv::reset: truth length mismatch");

        EpisodeState st;
        st.prev_spectrum = prev_spectrum;
        st.truth_sq_norm = squared_norm(truth);
        if (st.truth_sq_norm <= 0.0)
            throw std::invalid_argument("SensingEnv::reset: all-zero truth window (episode must be skipped)");
        st.comm = comm.slots;
        st.occupied.assign(cfg_.window, 0);
        for (int s : st.comm) {
            if (s < 0 || s >= cfg_.window)
                throw std::invalid_argument("SensingEnv::reset: communication slot out of range");
            st.occupied[s] = 1;
        }
        st.step = 0;
        st.horizon = std::max(0, cfg_.budget - static_cast<int>(st.comm.size()));
        st.recon = reconstruct(st.comm, st.sensing, truth);
        st.recon_mse = mse(st.recon, truth);
        return st;
    }

    // Indices of all idle slots; the action space at step k.
    std::vector<int> legal_actions(const EpisodeState& st) const {
        if (st.done()) throw std::logic_error("SensingEnv::legal_actions: episode is done");
        std::vector<int> actions;
        actions.reserve(cfg_.window - st.comm.size() - st.step);
        for (int s = 0; s < cfg_.window; ++s)
            if (!st.occupied[s]) actions.push_back(s);
        return actions;
    }

    StepOutcome step(const EpisodeState& st, int action, const CplxVec& truth) const {
        if (st.done()) throw std::logic_error("SensingEnv::step: episode is done");
        if (action < 0 || action >= cfg_.window || st.occupied[action])
            throw std::logic_error("SensingEnv::step: illegal action " + std::to_string(action));
        if (static_cast<int>(truth.size()) != cfg_.window)
            throw std::invalid_argument("SensingEnv::step: truth length mismatch");

        StepOutcome out;
        out.next = st;
        out.next.occupied[action] = 1;
        out.next.sensing.insert(
            std::lower_bound(out.next.sensing.begin(), out.next.sensing.end(), action), action);
        out.next.step = st.step + 1;
        out.next.recon = reconstruct(out.next.comm, out.next.sensing, truth);
        out.next.recon_mse = mse(out.next.recon, truth);

        const double delta = (st.recon_mse - out.next.recon_mse) / st.truth_sq_norm;
        out.reward = cfg_.reward_sign == RewardSign::kTextConsistent ? delta : -delta;
        out.done = out.next.done();
        return out;
    }

    // 3 x W real tensor: scaled real part, scaled imaginary part, occupancy.
    // The scale is the peak magnitude of H_prev (floored at 1e-9), which makes
    // the encoding invariant to positive rescaling of the spectrum.
    EncodedState encode(const EpisodeState& st) const {
        EncodedState enc;
        enc.window = cfg_.window;
        enc.tensor.assign(3 * static_cast<std::size_t>(cfg_.window), 0.0);
        const double scale = std::max(linf_norm(st.prev_spectrum), 1e-9);
        for (int i = 0; i < cfg_.window; ++i) {
            enc.tensor[i] = st.prev_spectrum[i].real() / scale;
            enc.tensor[cfg_.window + i] = st.prev_spectrum[i].imag() / scale;
            enc.tensor[2 * cfg_.window + i] = st.occupied[i] ? 1.0 : 0.0;
        }
        return enc;
    }

    // IHT reconstruction from the observed samples of the current pattern;
    // an empty pattern yields the all-zero spectrum.
    CplxVec reconstruct(const std::vector<int>& comm, const std::vector<int>& sensing,
                        const CplxVec& truth) const {
        if (comm.empty() && sensing.empty()) return CplxVec(cfg_.window, Cplx(0.0, 0.0));
        const auto pattern = SamplingPattern::create(comm, sensing, cfg_.window);
        const auto psi = build_sensing_matrix(pattern, *fourier_);
        const CplxVec g = fourier_->apply(truth);  // full-window CIR samples
        CplxVec h;
        h.reserve(psi.rows);
        for (int idx : pattern.merged()) h.push_back(g[idx]);
        return iht_reconstruct(h, psi, cfg_.omega, cfg_.iht_tol, cfg_.iht_max_iter);
    }

private:
    EnvConfig cfg_;
    const FourierMatrix* fourier_;
};

}  // namespace mdsense

#endif  // MDSENSE_ENV_HPP
