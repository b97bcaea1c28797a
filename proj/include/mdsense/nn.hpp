#ifndef MDSENSE_NN_HPP
#define MDSENSE_NN_HPP

// Policy and value networks: four 1-D convolution layers (kernel 5, stride 1,
// zero padding 2, channels 3 -> 4 -> 8 -> 16 -> 32, ReLU after each) feeding a
// dense head of width W (policy) or 1 (value). Parameters live in one flat
// 32-bit-float store in manifest order; all arithmetic runs in double and
// gradients are hand-derived for this fixed architecture.

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>

#include "mdsense/common.hpp"

namespace mdsense {

enum class NetKind { kPolicy, kValue };

inline const char* net_kind_name(NetKind k) { return k == NetKind::kPolicy ? "policy" : "value"; }

struct ConvLayerShape {
    int in_ch = 0;
    int out_ch = 0;
    int kernel = 0;

    std::size_t weight_count() const {
        return static_cast<std::size_t>(out_ch) * in_ch * kernel;
    }
};

inline constexpr int kConvKernel = 5;
inline constexpr int kConvPad = 2;
inline constexpr int kInputChannels = 3;
inline constexpr int kConvWidths[4] = {4, 8, 16, 32};

class ConvStack {
public:
    NetKind kind = NetKind::kPolicy;
    int window = 0;  // W, sequence length
    std::vector<ConvLayerShape> convs;
    int head_in = 0;
    int head_out = 0;
    std::vector<float> params;

    static ConvStack make(NetKind kind, int window) {
        if (window < 1) throw std::invalid_argument("ConvStack: window must be positive");
        ConvStack s;
        s.kind = kind;
        s.window = window;
        int in_ch = kInputChannels;
        for (int w : kConvWidths) {
            s.convs.push_back({in_ch, w, kConvKernel});
            in_ch = w;
        }
        s.head_in = in_ch * window;
        s.head_out = kind == NetKind::kPolicy ? window : 1;
        s.params.assign(s.param_count(), 0.0f);
        return s;
    }

    // Uniform +-sqrt(1/fan_in) per layer; the policy head is shrunk by 0.01
    // so the initial distribution over actions is near-uniform.
    static ConvStack init(NetKind kind, int window, Rng& rng) {
        ConvStack s = make(kind, window);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (std::size_t l = 0; l < s.convs.size(); ++l) {
            const auto& c = s.convs[l];
            const double bound = std::sqrt(1.0 / (c.in_ch * c.kernel));
            float* w = s.params.data() + s.conv_weight_offset(l);
            for (std::size_t i = 0; i < c.weight_count(); ++i) w[i] = static_cast<float>(bound * unit(rng));
            float* b = s.params.data() + s.conv_bias_offset(l);
            for (int i = 0; i < c.out_ch; ++i) b[i] = static_cast<float>(bound * unit(rng));
        }
        const double bound = std::sqrt(1.0 / s.head_in);
        const double head_scale = kind == NetKind::kPolicy ? 0.01 : 1.0;
        float* w = s.params.data() + s.dense_weight_offset();
        for (std::size_t i = 0; i < static_cast<std::size_t>(s.head_out) * s.head_in; ++i)
            w[i] = static_cast<float>(head_scale * bound * unit(rng));
        float* b = s.params.data() + s.dense_bias_offset();
        for (int i = 0; i < s.head_out; ++i) b[i] = static_cast<float>(head_scale * bound * unit(rng));
        return s;
    }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto& c : convs) n += c.weight_count() + c.out_ch;
        n += static_cast<std::size_t>(head_out) * head_in + head_out;
        return n;
    }

    std::size_t conv_weight_offset(std::size_t layer) const {
        std::size_t off = 0;
        for (std::size_t l = 0; l < layer; ++l) off += convs[l].weight_count() + convs[l].out_ch;
        return off;
    }
    std::size_t conv_bias_offset(std::size_t layer) const {
        return conv_weight_offset(layer) + convs[layer].weight_count();
    }
    std::size_t dense_weight_offset() const { return conv_weight_offset(convs.size()); }
    std::size_t dense_bias_offset() const {
        return dense_weight_offset() + static_cast<std::size_t>(head_out) * head_in;
    }

    bool same_shape(const ConvStack& other) const {
        if (kind != other.kind || window != other.window || head_in != other.head_in ||
            head_out != other.head_out || convs.size() != other.convs.size())
            return false;
        for (std::size_t l = 0; l < convs.size(); ++l)
            if (convs[l].in_ch != other.convs[l].in_ch || convs[l].out_ch != other.convs[l].out_ch ||
                convs[l].kernel != other.convs[l].kernel)
                return false;
        return true;
    }
};

// Intermediate activations kept for backpropagation.
struct ForwardCache {
    std::vector<std::vector<double>> layer_in;   // input of each conv layer (ch x W)
    std::vector<std::vector<double>> layer_pre;  // pre-activation of each conv layer
    std::vector<double> flat;                    // dense-head input (post-ReLU of last conv)
};

/**
 * Runs the stack on a 3 x W input (channel-major) and returns the head
 * outputs (length W for a policy net, 1 for a value net). When `cache` is
 * non-null the per-layer tensors needed by stack_backward are recorded.
 */
inline std::vector<double> stack_forward(const ConvStack& net, std::span<const double> x,
                                         ForwardCache* cache = nullptr) {
    if (x.size() != static_cast<std::size_t>(kInputChannels) * net.window)
        throw std::invalid_argument("stack_forward: input must have shape 3 x W");
    const int w = net.window;

    std::vector<double> act(x.begin(), x.end());
    if (cache) {
        cache->layer_in.clear();
        cache->layer_pre.clear();
    }

    for (std::size_t l = 0; l < net.convs.size(); ++l) {
        const auto& c = net.convs[l];
        const float* weights = net.params.data() + net.conv_weight_offset(l);
        const float* bias = net.params.data() + net.conv_bias_offset(l);
        std::vector<double> pre(static_cast<std::size_t>(c.out_ch) * w);
        for (int oc = 0; oc < c.out_ch; ++oc) {
            for (int t = 0; t < w; ++t) {
                double acc = bias[oc];
                for (int ic = 0; ic < c.in_ch; ++ic) {
                    const double* in_row = act.data() + static_cast<std::size_t>(ic) * w;
                    const float* w_row =
                        weights + (static_cast<std::size_t>(oc) * c.in_ch + ic) * c.kernel;
                    for (int k = 0; k < c.kernel; ++k) {
                        const int src = t + k - kConvPad;
                        if (src >= 0 && src < w) acc += static_cast<double>(w_row[k]) * in_row[src];
                    }
                }
                pre[static_cast<std::size_t>(oc) * w + t] = acc;
            }
        }
        if (cache) {
            cache->layer_in.push_back(act);
            cache->layer_pre.push_back(pre);
        }
        act.resize(pre.size());
        for (std::size_t i = 0; i < pre.size(); ++i) act[i] = pre[i] > 0.0 ? pre[i] : 0.0;
    }

    if (cache) cache->flat = act;

    const float* dw = net.params.data() + net.dense_weight_offset();
    const float* db = net.params.data() + net.dense_bias_offset();
    std::vector<double> out(net.head_out);
    for (int o = 0; o < net.head_out; ++o) {
        double acc = db[o];
        const float* w_row = dw + static_cast<std::size_t>(o) * net.head_in;
        for (int f = 0; f < net.head_in; ++f) acc += static_cast<double>(w_row[f]) * act[f];
        out[o] = acc;
    }
    return out;
}

/**
 * Exact gradients of sum_o d_out[o] * output_o with respect to every
 * parameter, using the tensors recorded by stack_forward. The ReLU
 * subgradient at zero is taken as zero. Returns gradients in param order.
 */
inline std::vector<double> stack_backward(const ConvStack& net, const ForwardCache& cache,
                                          std::span<const double> d_out) {
    if (d_out.size() != static_cast<std::size_t>(net.head_out))
        throw std::invalid_argument("stack_backward: upstream gradient has wrong length");
    if (cache.layer_pre.size() != net.convs.size())
        throw std::invalid_argument("stack_backward: cache does not match this network");
    const int w = net.window;
    std::vector<double> grads(net.param_count(), 0.0);

    // Dense head.
    double* g_dw = grads.data() + net.dense_weight_offset();
    double* g_db = grads.data() + net.dense_bias_offset();
    const float* dw = net.params.data() + net.dense_weight_offset();
    std::vector<double> d_flat(net.head_in, 0.0);
    for (int o = 0; o < net.head_out; ++o) {
        const double g = d_out[o];
        if (g == 0.0) continue;
        g_db[o] += g;
        const float* w_row = dw + static_cast<std::size_t>(o) * net.head_in;
        double* gw_row = g_dw + static_cast<std::size_t>(o) * net.head_in;
        for (int f = 0; f < net.head_in; ++f) {
            gw_row[f] += g * cache.flat[f];
            d_flat[f] += g * static_cast<double>(w_row[f]);
        }
    }

    // Conv layers in reverse.
    std::vector<double> d_act = std::move(d_flat);
    for (int li = static_cast<int>(net.convs.size()) - 1; li >= 0; --li) {
        const auto& c = net.convs[li];
        const auto& pre = cache.layer_pre[li];
        const auto& in = cache.layer_in[li];
        const float* weights = net.params.data() + net.conv_weight_offset(li);
        double* g_w = grads.data() + net.conv_weight_offset(li);
        double* g_b = grads.data() + net.conv_bias_offset(li);

        // ReLU gate.
        std::vector<double> d_pre(d_act.size());
        for (std::size_t i = 0; i < d_act.size(); ++i) d_pre[i] = pre[i] > 0.0 ? d_act[i] : 0.0;

        std::vector<double> d_in(static_cast<std::size_t>(c.in_ch) * w, 0.0);
        for (int oc = 0; oc < c.out_ch; ++oc) {
            const double* dp_row = d_pre.data() + static_cast<std::size_t>(oc) * w;
            for (int t = 0; t < w; ++t) g_b[oc] += dp_row[t];
            for (int ic = 0; ic < c.in_ch; ++ic) {
                const double* in_row = in.data() + static_cast<std::size_t>(ic) * w;
                double* di_row = d_in.data() + static_cast<std::size_t>(ic) * w;
                const float* w_row = weights + (static_cast<std::size_t>(oc) * c.in_ch + ic) * c.kernel;
                double* gw_row = g_w + (static_cast<std::size_t>(oc) * c.in_ch + ic) * c.kernel;
                for (int k = 0; k < c.kernel; ++k) {
                    const int shift = k - kConvPad;
                    double acc = 0.0;
                    for (int t = 0; t < w; ++t) {
                        const int src = t + shift;
                        if (src < 0 || src >= w) continue;
                        acc += dp_row[t] * in_row[src];
                        di_row[src] += dp_row[t] * static_cast<double>(w_row[k]);
                    }
                    gw_row[k] += acc;
                }
            }
        }
        d_act = std::move(d_in);
    }
    return grads;
}

struct PolicyOutput {
    std::vector<double> probs;      // zero on non-legal slots
    std::vector<double> log_probs;  // log-softmax of masked logits
    std::vector<double> logits;     // raw head outputs, pre-mask
};

inline constexpr double kMaskLogit = -1e9;

// Masked softmax over the raw logits: non-legal slots are pushed to -1e9,
// which underflows to exactly zero probability.
inline PolicyOutput masked_policy(const std::vector<double>& logits,
                                  const std::vector<std::uint8_t>& legal) {
    if (legal.size() != logits.size())
        throw std::invalid_argument("masked_policy: mask length mismatch");
    bool any = false;
    for (auto m : legal) any = any || (m != 0);
    if (!any) throw std::invalid_argument("masked_policy: no legal action");

    PolicyOutput out;
    out.logits = logits;
    const std::size_t n = logits.size();
    std::vector<double> masked(n);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        masked[i] = legal[i] ? logits[i] : kMaskLogit;
        peak = std::max(peak, masked[i]);
    }
    double z = 0.0;
    out.probs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.probs[i] = std::exp(masked[i] - peak);
        z += out.probs[i];
    }
    const double log_z = std::log(z);
    out.log_probs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.log_probs[i] = masked[i] - peak - log_z;
        out.probs[i] /= z;
    }
    return out;
}

inline PolicyOutput policy_forward(const ConvStack& net, std::span<const double> x,
                                   const std::vector<std::uint8_t>& legal,
                                   ForwardCache* cache = nullptr) {
    if (net.kind != NetKind::kPolicy)
        throw std::invalid_argument("policy_forward: network is not a policy net");
    return masked_policy(stack_forward(net, x, cache), legal);
}

inline double value_forward(const ConvStack& net, std::span<const double> x,
                            ForwardCache* cache = nullptr) {
    if (net.kind != NetKind::kValue)
        throw std::invalid_argument("value_forward: network is not a value net");
    return stack_forward(net, x, cache)[0];
}

// --- checkpoints ------------------------------------------------------------
//
// Text manifest followed by the raw little-endian float32 parameter blob:
//
//   mdsense-net v1
//   kind policy
//   W 64
//   conv 3 4 5        (one line per conv layer)
//   dense 2048 64
//   params 140676
//   byte_order little
//   data
//   <blob>

inline void save_checkpoint(const ConvStack& net, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "checkpoint writer assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open '" + path + "'");
    out << "mdsense-net v1\n";
    out << "kind " << net_kind_name(net.kind) << "\n";
    out << "W " << net.window << "\n";
    for (const auto& c : net.convs)
        out << "conv " << c.in_ch << " " << c.out_ch << " " << c.kernel << "\n";
    out << "dense " << net.head_in << " " << net.head_out << "\n";
    out << "params " << net.params.size() << "\n";
    out << "byte_order little\n";
    out << "data\n";
    out.write(reinterpret_cast<const char*>(net.params.data()),
              static_cast<std::streamsize>(net.params.size() * sizeof(float)));
    if (!out) throw std::runtime_error("save_checkpoint: write to '" + path + "' failed");
}

inline ConvStack load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open '" + path + "'");

    auto next_line = [&in, &path]() {
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error("load_checkpoint: truncated manifest in '" + path + "'");
        return line;
    };

    if (next_line() != "mdsense-net v1")
        throw std::runtime_error("load_checkpoint: version mismatch or unrecognized file '" + path + "'");

    ConvStack net;
    std::size_t declared_params = 0;
    bool have_dense = false;
    std::string line;
    while ((line = next_line()) != "data") {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "kind") {
            std::string kind;
            ls >> kind;
            if (kind == "policy") net.kind = NetKind::kPolicy;
            else if (kind == "value") net.kind = NetKind::kValue;
            else throw std::runtime_error("load_checkpoint: unknown network kind '" + kind + "'");
        } else if (tag == "W") {
            ls >> net.window;
        } else if (tag == "conv") {
            ConvLayerShape c;
            ls >> c.in_ch >> c.out_ch >> c.kernel;
            net.convs.push_back(c);
        } else if (tag == "dense") {
            ls >> net.head_in >> net.head_out;
            have_dense = true;
        } else if (tag == "params") {
            ls >> declared_params;
        } else if (tag == "byte_order") {
            std::string order;
            ls >> order;
            if (order != "little")
                throw std::runtime_error("load_checkpoint: unsupported byte order '" + order + "'");
        } else {
            throw std::runtime_error("load_checkpoint: unknown manifest field '" + tag + "'");
        }
        if (ls.fail())
            throw std::runtime_error("load_checkpoint: malformed manifest line '" + line + "'");
    }
    if (net.window < 1 || net.convs.empty() || !have_dense)
        throw std::runtime_error("load_checkpoint: incomplete manifest in '" + path + "'");
    if (declared_params != net.param_count())
        throw std::runtime_error("load_checkpoint: manifest parameter count disagrees with layer shapes");

    net.params.assign(declared_params, 0.0f);
    in.read(reinterpret_cast<char*>(net.params.data()),
            static_cast<std::streamsize>(declared_params * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != declared_params * sizeof(float))
        throw std::runtime_error("load_checkpoint: truncated parameter blob in '" + path + "'");
    return net;
}

// Loads and validates against the network the caller expects to fill.
inline ConvStack load_checkpoint(const std::string& path, NetKind expected_kind, int expected_window) {
    ConvStack net = load_checkpoint(path);
    const ConvStack reference = ConvStack::make(expected_kind, expected_window);
    if (!net.same_shape(reference))
        throw std::runtime_error("load_checkpoint: manifest mismatch, '" + path + "' holds a " +
                                 std::string(net_kind_name(net.kind)) + " net of W=" +
                                 std::to_string(net.window) + " but a " +
                                 net_kind_name(expected_kind) + " net of W=" +
                                 std::to_string(expected_window) + " was requested");
    return net;
}

}  // namespace mdsense

#endif  // MDSENSE_NN_HPP
