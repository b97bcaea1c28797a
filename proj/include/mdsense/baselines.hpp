#ifndef MDSENSE_BASELINES_HPP
#define MDSENSE_BASELINES_HPP

// Non-learning sensing-slot selectors: uniform random completion, greedy
// sequential forward selection on mutual coherence (MC-SFS), and random
// search scored by support-restricted coherence (RMC-RS). All start from the
// fixed communication slots and only choose the remaining sensing slots.

#include "mdsense/recovery.hpp"
#include "mdsense/traffic.hpp"

namespace mdsense {

struct SelectorBudget {
    int total = 0;   // M, target |M_c u M_s|
    int window = 0;  // W

    SelectorBudget(int m, int w) : total(m), window(w) {
        if (m < 1 || m > w) throw std::invalid_argument("SelectorBudget: need 0 < M <= W");
    }
};

namespace detail {

inline std::vector<int> idle_slots(const CommPattern& comm, int window) {
    std::vector<int> idle;
    idle.reserve(window - comm.size());
    for (int s = 0; s < window; ++s)
        if (!comm.contains(s)) idle.push_back(s);
    return idle;
}

}  // namespace detail

// Uniform draw without replacement over the idle slots. When the
// communication slots already exhaust the budget, the sensing set is empty.
inline SamplingPattern random_select(const CommPattern& comm, const SelectorBudget& budget, Rng& rng) {
    const int missing = std::max(0, budget.total - comm.size());
    std::vector<int> idle = detail::idle_slots(comm, budget.window);
    std::vector<int> sensing;
    if (missing > 0 && !idle.empty()) {
        const int take = std::min<int>(missing, static_cast<int>(idle.size()));
        for (int k = 0; k < take; ++k) {
            std::uniform_int_distribution<int> pick(k, static_cast<int>(idle.size()) - 1);
            std::swap(idle[k], idle[pick(rng)]);
        }
        sensing.assign(idle.begin(), idle.begin() + take);
        std::sort(sensing.begin(), sensing.end());
    }
    return SamplingPattern::create(comm.slots, std::move(sensing), budget.window);
}

// Greedy forward selection: repeatedly add the idle slot whose inclusion
// minimizes the mutual coherence of the resulting sensing matrix. Ties go to
// the lowest index, so the result is deterministic.
inline SamplingPattern mcsfs_select(const CommPattern& comm, const SelectorBudget& budget,
                                    const FourierMatrix& f) {
    std::vector<int> sensing;
    int have = comm.size();
    while (have < budget.total) {
        int best_slot = -1;
        double best_mc = std::numeric_limits<double>::infinity();
        for (int cand = 0; cand < budget.window; ++cand) {
            if (comm.contains(cand)) continue;
            if (std::binary_search(sensing.begin(), sensing.end(), cand)) continue;
            std::vector<int> trial(sensing);
            trial.insert(std::lower_bound(trial.begin(), trial.end(), cand), cand);
            const auto psi = build_sensing_matrix(
                SamplingPattern::create(comm.slots, std::move(trial), budget.window), f);
            const double mc = mutual_coherence(psi);
            if (mc < best_mc) {
                best_mc = mc;
                best_slot = cand;
            }
        }
        if (best_slot < 0) break;  // no idle slot left
        sensing.insert(std::lower_bound(sensing.begin(), sensing.end(), best_slot), best_slot);
        ++have;
    }
    return SamplingPattern::create(comm.slots, std::move(sensing), budget.window);
}

// Spectral support of a reconstruction: entries above 1e-9 of the peak.
// The hard-thresholded solver emits exact zeros, so this only strips dust.
inline std::vector<int> spectral_support(const CplxVec& spectrum) {
    std::vector<int> support;
    const double peak = linf_norm(spectrum);
    if (peak <= 0.0) return support;
    const double floor_mag = 1e-9 * peak;
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        if (std::abs(spectrum[i]) > floor_mag) support.push_back(static_cast<int>(i));
    return support;
}

/**
 * Random search over pattern completions, scored by the mutual coherence
 * restricted to the support of the previous reconstruction. With fewer than
 * two support bins the score falls back to the full mutual coherence. A
 * single candidate degenerates to random_select with the same rng.
 */
inline SamplingPattern rmcrs_select(const CommPattern& comm, const SelectorBudget& budget,
                                    const CplxVec& prev_spectrum, int num_candidates,
                                    const FourierMatrix& f, Rng& rng) {
    if (num_candidates < 1)
        throw std::invalid_argument("rmcrs_select: need at least one candidate");
    const std::vector<int> support = spectral_support(prev_spectrum);
    const bool restricted = support.size() >= 2;

    SamplingPattern best;
    double best_score = std::numeric_limits<double>::infinity();
    for (int c = 0; c < num_candidates; ++c) {
        SamplingPattern cand = random_select(comm, budget, rng);
        const auto psi = build_sensing_matrix(cand, f);
        const double score = restricted ? restricted_mutual_coherence(psi, support)
                                        : mutual_coherence(psi);
        if (score < best_score) {
            best_score = score;
            best = std::move(cand);
        }
    }
    return best;
}

}  // namespace mdsense

#endif  // MDSENSE_BASELINES_HPP
