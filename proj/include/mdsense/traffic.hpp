#ifndef MDSENSE_TRAFFIC_HPP
#define MDSENSE_TRAFFIC_HPP

// Two-state Markov chain that decides, slot by slot, whether a window position
// carries a communication packet (state t) or stays idle (state i).

#include "mdsense/common.hpp"

namespace mdsense {

// The printed transition rule p_ti = 1 - 1/b yields mean burst length
// b / (b - 1), which shrinks toward 1 as b grows; the alternative convention
// p_ti = 1/b gives mean burst length b. Both are supported, as-printed is the
// default.
enum class BurstConvention { kAsPrinted, kMeanLengthB };

struct TrafficModel {
    int window = 0;       // W, slots per window
    double burstiness = 0.0;  // b
    double density = 0.0;     // d, expected communication slots per window
    BurstConvention convention = BurstConvention::kAsPrinted;

    TrafficModel(int w, double b, double d,
                 BurstConvention conv = BurstConvention::kAsPrinted)
        : window(w), burstiness(b), density(d), convention(conv) {
        if (w < 1) throw std::invalid_argument("TrafficModel: window must be positive");
        if (!(b > 1.0))
            throw std::invalid_argument("TrafficModel: burstiness must exceed 1 (b = 1 makes the transmit state absorbing)");
        if (!(d > 0.0) || !(d < static_cast<double>(w)))
            throw std::invalid_argument("TrafficModel: density must satisfy 0 < d < W");
        const double pti = p_transmit_to_idle();
        const double pit = p_idle_to_transmit();
        if (pit < 0.0 || pit > 1.0 || pti < 0.0 || pti > 1.0)
            throw std::invalid_argument("TrafficModel: derived transition probabilities fall outside [0,1]");
    }

    double p_transmit_to_idle() const {
        return convention == BurstConvention::kAsPrinted ? 1.0 - 1.0 / burstiness
                                                         : 1.0 / burstiness;
    }
    double p_idle_to_transmit() const {
        return density * p_transmit_to_idle() / (static_cast<double>(window) - density);
    }
    double p_idle_to_idle() const { return 1.0 - p_idle_to_transmit(); }
    double p_transmit_to_transmit() const { return 1.0 - p_transmit_to_idle(); }
};

// Slot indices assigned to communication packets (the fixed part of the
// sampling pattern). Always sorted and unique.
struct CommPattern {
    std::vector<int> slots;

    int size() const { return static_cast<int>(slots.size()); }
    bool contains(int s) const {
        return std::binary_search(slots.begin(), slots.end(), s);
    }
};

// Steady-state probability of the transmit state. The chain algebra
// simplifies to d / W independent of the burst convention.
inline double stationary_transmit_prob(const TrafficModel& model) {
    const double pit = model.p_idle_to_transmit();
    const double pti = model.p_transmit_to_idle();
    return pit / (pit + pti);
}

// Draws one window of slot states: slot 0 from the stationary distribution,
// the rest by chain evolution. Bursts never wrap across window edges.
inline CommPattern sample_comm_pattern(const TrafficModel& model, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CommPattern out;
    bool transmitting = unit(rng) < stationary_transmit_prob(model);
    for (int s = 0; s < model.window; ++s) {
        if (s > 0) {
            const double flip = transmitting ? model.p_transmit_to_idle()
                                             : model.p_idle_to_transmit();
            if (unit(rng) < flip) transmitting = !transmitting;
        }
        if (transmitting) out.slots.push_back(s);
    }
    return out;
}

}  // namespace mdsense

#endif  // MDSENSE_TRAFFIC_HPP
