#ifndef MDSENSE_SYNTH_HPP
#define MDSENSE_SYNTH_HPP

// Synthetic multi-window CIR generator. Each window is a superposition of Q
// complex exponentials whose frequencies and amplitudes evolve across windows
// by a bounded random walk, so consecutive Doppler spectra stay correlated.
// Stands in for recorded CIR traces; the trace file loader accepts real data
// in the same format.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "mdsense/signal.hpp"

namespace mdsense {

struct Scatterer {
    Cplx amplitude;                  // alpha_q
    double doppler_hz = 0.0;         // f_q, |f| < 1/(2 T_c)
    double drift_hz_per_window = 0.0;
};

struct TraceMeta {
    std::uint64_t seed = 0;
    int scatterers = 0;  // Q
};

struct CirSequence {
    std::vector<CplxVec> windows;
    double t_c = 0.0;  // timestep duration in seconds
    TraceMeta meta;

    int window_size() const { return windows.empty() ? 0 : static_cast<int>(windows.front().size()); }
    int num_windows() const { return static_cast<int>(windows.size()); }
};

// Per-sample SNR of the additive noise; an infinite SNR disables noise.
struct NoiseSpec {
    double snr_db = std::numeric_limits<double>::infinity();

    bool enabled() const { return std::isfinite(snr_db); }
};

struct GeneratorConfig {
    int num_windows = 1;
    int window = 64;  // W
    int scatterers = 2;  // Q, must satisfy Q < W/4
    double t_c = 0.27e-3;
    NoiseSpec noise;
    std::uint64_t seed = 1;
    bool on_grid = true;                  // snap tones to DFT bins
    double drift_hz_per_window = 0.0;     // random-walk bound on each f_q
    double amp_jitter = 0.0;              // bounded multiplicative amplitude jitter, in [0, 1)
    std::vector<int> pinned_bins;         // optional fixed initial bins (on-grid mode)
};

namespace detail {

// Signed bin <-> frequency mapping; bin n covers f = n / (W T_c).
inline double bin_to_hz(int bin, int w, double t_c) {
    return static_cast<double>(bin) / (static_cast<double>(w) * t_c);
}

inline int wrap_bin(int bin, int w) {
    int m = bin % w;
    if (m < 0) m += w;
    return m;
}

}  // namespace detail

inline CirSequence generate_sequence(const GeneratorConfig& cfg) {
    if (cfg.window < 2) throw std::invalid_argument("generate_sequence: window must be >= 2");
    if (cfg.num_windows < 1) throw std::invalid_argument("generate_sequence: need at least one window");
    if (!(cfg.t_c > 0.0)) throw std::invalid_argument("generate_sequence: T_c must be positive");
    if (cfg.scatterers < 1 || 4 * cfg.scatterers >= cfg.window)
        throw std::invalid_argument("generate_sequence: scatterer count violates Doppler sparsity (need Q < W/4)");
    if (cfg.amp_jitter < 0.0 || cfg.amp_jitter >= 1.0)
        throw std::invalid_argument("generate_sequence: amp_jitter must lie in [0, 1)");
    if (!cfg.pinned_bins.empty() && static_cast<int>(cfg.pinned_bins.size()) != cfg.scatterers)
        throw std::invalid_argument("generate_sequence: pinned_bins size must equal the scatterer count");

    const int w = cfg.window;
    const double f_max = 1.0 / (2.0 * cfg.t_c);
    const double bin_hz = 1.0 / (w * cfg.t_c);
    Rng rng(cfg.seed);
    // separate noise stream: disabling noise must not alter the tone trajectory
    Rng noise_rng(child_seed(cfg.seed, 0xA001));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Signed bins in (-W/2, W/2); the Nyquist bin is excluded to keep
    // |f| strictly inside the unambiguous range.
    const int half = w / 2 - 1;

    std::vector<Scatterer> scat(cfg.scatterers);
    std::vector<int> bins(cfg.scatterers, 0);  // signed bins, on-grid mode only
    for (int q = 0; q < cfg.scatterers; ++q) {
        const double mag = 0.5 + unit(rng);
        const double phase = 2.0 * kPi * unit(rng);
        scat[q].amplitude = std::polar(mag, phase);
        scat[q].drift_hz_per_window = cfg.drift_hz_per_window;
        if (cfg.on_grid) {
            if (!cfg.pinned_bins.empty()) {
                bins[q] = cfg.pinned_bins[q];
                if (bins[q] > w / 2) bins[q] -= w;  // accept {0..W-1} style input
            } else {
                // distinct bins so every window exposes exactly Q spectral lines
                int candidate;
                do {
                    candidate = static_cast<int>(unit(rng) * (2 * half + 1)) - half;
                } while (std::find(bins.begin(), bins.begin() + q, candidate) != bins.begin() + q);
                bins[q] = candidate;
            }
            scat[q].doppler_hz = detail::bin_to_hz(bins[q], w, cfg.t_c);
        } else {
            scat[q].doppler_hz = (2.0 * unit(rng) - 1.0) * 0.98 * f_max;
        }
    }

    CirSequence seq;
    seq.t_c = cfg.t_c;
    seq.meta.seed = cfg.seed;
    seq.meta.scatterers = cfg.scatterers;
    seq.windows.reserve(cfg.num_windows);

    const int drift_bins = static_cast<int>(std::floor(cfg.drift_hz_per_window / bin_hz));
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int wi = 0; wi < cfg.num_windows; ++wi) {
        if (wi > 0) {
            for (int q = 0; q < cfg.scatterers; ++q) {
                const double step = (2.0 * unit(rng) - 1.0) * cfg.drift_hz_per_window;
                if (cfg.on_grid) {
                    int delta = static_cast<int>(std::llround(step / bin_hz));
                    delta = std::clamp(delta, -drift_bins, drift_bins);
                    int target = bins[q] + delta;
                    if (target > half) target = half;
                    if (target < -half) target = -half;
                    // skip moves that would collide with another tone's bin
                    bool taken = false;
                    for (int p = 0; p < cfg.scatterers; ++p)
                        if (p != q && bins[p] == target) taken = true;
                    if (!taken) bins[q] = target;
                    scat[q].doppler_hz = detail::bin_to_hz(bins[q], w, cfg.t_c);
                } else {
                    double f = scat[q].doppler_hz + step;
                    const double lim = 0.99 * f_max;
                    if (f > lim) f = lim;
                    if (f < -lim) f = -lim;
                    scat[q].doppler_hz = f;
                }
                if (cfg.amp_jitter > 0.0) {
                    const double jit = 1.0 + (2.0 * unit(rng) - 1.0) * cfg.amp_jitter;
                    scat[q].amplitude *= jit;
                }
            }
        }

        CplxVec window_samples(w, Cplx(0.0, 0.0));
        for (int q = 0; q < cfg.scatterers; ++q) {
            const double omega = 2.0 * kPi * scat[q].doppler_hz * cfg.t_c;
            for (int t = 0; t < w; ++t)
                window_samples[t] += scat[q].amplitude * Cplx(std::cos(omega * t), std::sin(omega * t));
        }

        if (cfg.noise.enabled()) {
            double power = 0.0;
            for (const auto& v : window_samples) power += std::norm(v);
            power /= w;
            const double noise_power = power * std::pow(10.0, -cfg.noise.snr_db / 10.0);
            const double sigma = std::sqrt(noise_power / 2.0);
            for (auto& v : window_samples)
                v += Cplx(sigma * gauss(noise_rng), sigma * gauss(noise_rng));
        }
        seq.windows.push_back(std::move(window_samples));
    }
    return seq;
}

// --- trace file I/O -------------------------------------------------------
//
// UTF-8 CSV, header `# cir-trace v1 W=<int> T_c=<float> windows=<int>`, then
// one `re,im` row per timestep with all windows concatenated in order.

inline void save_trace(const CirSequence& seq, const std::string& path) {
    if (seq.windows.empty()) throw std::invalid_argument("save_trace: sequence has no windows");
    const int w = seq.window_size();
    for (const auto& win : seq.windows)
        if (static_cast<int>(win.size()) != w)
            throw std::invalid_argument("save_trace: windows have inconsistent lengths");

    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_trace: cannot open '" + path + "' for writing");
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# cir-trace v1 W=%d T_c=%.17g windows=%d\n", w, seq.t_c,
                  seq.num_windows());
    out << buf;
    for (const auto& win : seq.windows) {
        for (const auto& v : win) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", v.real(), v.imag());
            out << buf;
        }
    }
    if (!out) throw std::runtime_error("save_trace: write to '" + path + "' failed");
}

inline CirSequence load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_trace: cannot open '" + path + "'");

    std::string header;
    if (!std::getline(in, header) || header.empty())
        throw std::runtime_error("load_trace: '" + path + "' is empty (no trace header)");

    int w = 0, windows = 0;
    double t_c = 0.0;
    if (std::sscanf(header.c_str(), "# cir-trace v1 W=%d T_c=%lf windows=%d", &w, &t_c, &windows) != 3)
        throw std::runtime_error("load_trace: malformed header '" + header + "'");
    if (w < 1 || windows < 1 || !(t_c > 0.0))
        throw std::runtime_error("load_trace: header carries invalid dimensions");

    CirSequence seq;
    seq.t_c = t_c;
    seq.windows.assign(windows, CplxVec());
    for (auto& win : seq.windows) win.reserve(w);

    std::string line;
    long row = 0;
    const long expected = static_cast<long>(w) * windows;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw std::runtime_error("load_trace: line " + std::to_string(line_no) +
                                     " must have exactly two columns (re,im)");
        char* end = nullptr;
        const std::string re_s = line.substr(0, comma);
        const std::string im_s = line.substr(comma + 1);
        const double re = std::strtod(re_s.c_str(), &end);
        if (end == re_s.c_str() || *end != '\0')
            throw std::runtime_error("load_trace: non-numeric re field at line " + std::to_string(line_no));
        const double im = std::strtod(im_s.c_str(), &end);
        if (end == im_s.c_str() || *end != '\0')
            throw std::runtime_error("load_trace: non-numeric im field at line " + std::to_string(line_no));
        if (row >= expected)
            throw std::runtime_error("load_trace: more rows than the header's W x windows");
        seq.windows[row / w].emplace_back(re, im);
        ++row;
    }
    if (row != expected)
        throw std::runtime_error("load_trace: inconsistent window count (" + std::to_string(row) +
                                 " rows, expected " + std::to_string(expected) + ")");
    return seq;
}

}  // namespace mdsense

#endif  // MDSENSE_SYNTH_HPP
