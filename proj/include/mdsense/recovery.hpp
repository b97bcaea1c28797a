#ifndef MDSENSE_RECOVERY_HPP
#define MDSENSE_RECOVERY_HPP

// Sensing-matrix construction, the iterative-hard-thresholding solver for the
// sparsity-constrained least-squares problem, and mutual-coherence metrics.

#include <numeric>
#include <utility>

#include "mdsense/signal.hpp"

namespace mdsense {

// Union of the fixed communication slots and the chosen sensing slots.
// Both sets are kept sorted; they must be disjoint and within [0, W).
struct SamplingPattern {
    std::vector<int> comm;     // M_c
    std::vector<int> sensing;  // M_s
    int window = 0;            // W

    static SamplingPattern create(std::vector<int> comm, std::vector<int> sensing, int w) {
        SamplingPattern p;
        p.comm = std::move(comm);
        p.sensing = std::move(sensing);
        p.window = w;
        p.validate();
        return p;
    }

    void validate() const {
        if (window < 1) throw std::invalid_argument("SamplingPattern: window must be positive");
        auto check_sorted = [this](const std::vector<int>& v, const char* name) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v[i] < 0 || v[i] >= window)
                    throw std::invalid_argument(std::string("SamplingPattern: ") + name + " index out of range");
                if (i > 0 && v[i] <= v[i - 1])
                    throw std::invalid_argument(std::string("SamplingPattern: ") + name + " must be sorted and unique");
            }
        };
        check_sorted(comm, "comm");
        check_sorted(sensing, "sensing");
        for (int s : sensing)
            if (std::binary_search(comm.begin(), comm.end(), s))
                throw std::invalid_argument("SamplingPattern: comm and sensing sets overlap");
    }

    // Sorted union M = M_c u M_s.
    std::vector<int> merged() const {
        std::vector<int> m;
        m.reserve(comm.size() + sensing.size());
        std::merge(comm.begin(), comm.end(), sensing.begin(), sensing.end(), std::back_inserter(m));
        return m;
    }

    int sample_count() const { return static_cast<int>(comm.size() + sensing.size()); }
};

// Row-selected Fourier matrix Psi. Row m is row i_m of F for the m-th smallest
// sampled index; every column therefore has squared norm |M| / W.
struct SensingMatrix {
    CplxVec entries;  // row-major, rows x window
    int rows = 0;
    int window = 0;
    SamplingPattern pattern;

    Cplx at(int r, int c) const { return entries[static_cast<std::size_t>(r) * window + c]; }
    const Cplx* row(int r) const { return entries.data() + static_cast<std::size_t>(r) * window; }
};

struct SparsityBudget {
    int omega = 0;  // maximum number of nonzero Doppler bins

    SparsityBudget() = default;
    explicit SparsityBudget(int om) : omega(om) {}
};

inline SensingMatrix build_sensing_matrix(const SamplingPattern& pattern, const FourierMatrix& f) {
    pattern.validate();
    if (pattern.window != f.size())
        throw std::invalid_argument("build_sensing_matrix: pattern window does not match Fourier dimension");
    const std::vector<int> merged = pattern.merged();
    if (merged.empty()) throw std::invalid_argument("build_sensing_matrix: empty sampling pattern");

    SensingMatrix psi;
    psi.rows = static_cast<int>(merged.size());
    psi.window = f.size();
    psi.pattern = pattern;
    psi.entries.resize(static_cast<std::size_t>(psi.rows) * psi.window);
    for (int r = 0; r < psi.rows; ++r)
        std::copy_n(f.row(merged[r]), psi.window, psi.entries.begin() + static_cast<std::size_t>(r) * psi.window);
    return psi;
}

namespace detail {

// Keeps the omega largest-magnitude entries; on ties the lower index wins.
inline void hard_threshold(CplxVec& x, int omega) {
    const int n = static_cast<int>(x.size());
    if (omega >= n) return;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&x](int a, int b) {
        const double ma = std::norm(x[a]), mb = std::norm(x[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    });
    std::vector<char> keep(n, 0);
    for (int k = 0; k < omega; ++k) keep[idx[k]] = 1;
    for (int i = 0; i < n; ++i)
        if (!keep[i]) x[i] = Cplx(0.0, 0.0);
}

inline CplxVec apply(const SensingMatrix& psi, const CplxVec& x) {
    CplxVec y(psi.rows, Cplx(0.0, 0.0));
    for (int r = 0; r < psi.rows; ++r) {
        const Cplx* row = psi.row(r);
        Cplx acc(0.0, 0.0);
        for (int c = 0; c < psi.window; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

inline CplxVec apply_adjoint(const SensingMatrix& psi, const CplxVec& y) {
    CplxVec x(psi.window, Cplx(0.0, 0.0));
    for (int r = 0; r < psi.rows; ++r) {
        const Cplx* row = psi.row(r);
        const Cplx v = y[r];
        for (int c = 0; c < psi.window; ++c) x[c] += std::conj(row[c]) * v;
    }
    return x;
}

}  // namespace detail

/**
 * Iterative hard thresholding for  min ||h - Psi x||_2^2  s.t.  ||x||_0 <= omega.
 *
 * Iterates x <- T_omega(x + mu Psi^H (h - Psi x)) from x = 0 with the
 * normalized step mu = ||g_S||^2 / ||Psi g_S||^2 computed on the active
 * support S (the fixed step mu = 1 stalls on imbalanced-amplitude supports at
 * moderate sampling rates; for a fully sampled unitary system the normalized
 * step reduces to 1). The step is halved until the residual norm does not
 * increase, so ||h - Psi x||_2 is non-increasing across accepted iterates.
 * Stops when the relative residual change drops below tol or after max_iter
 * iterations.
 */
inline CplxVec iht_reconstruct(const CplxVec& h, const SensingMatrix& psi,
                               SparsityBudget budget, double tol = 1e-6,
                               int max_iter = 200) {
    if (static_cast<int>(h.size()) != psi.rows)
        throw std::invalid_argument("iht_reconstruct: observation length does not match sensing-matrix rows");
    if (budget.omega < 1 || budget.omega > psi.window)
        throw std::invalid_argument("iht_reconstruct: sparsity level must lie in [1, W]");
    if (!(tol > 0.0)) throw std::invalid_argument("iht_reconstruct: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("iht_reconstruct: max_iter must be positive");

    const int w = psi.window;
    CplxVec x(w, Cplx(0.0, 0.0));
    double res = l2_norm(h);
    for (int it = 0; it < max_iter; ++it) {
        CplxVec residual(h);
        const CplxVec px = detail::apply(psi, x);
        for (int r = 0; r < psi.rows; ++r) residual[r] -= px[r];
        const CplxVec grad = detail::apply_adjoint(psi, residual);

        // Active support: the support of x, or the omega largest gradient
        // entries while x is still empty.
        std::vector<char> active(w, 0);
        int active_count = 0;
        for (int i = 0; i < w; ++i)
            if (std::norm(x[i]) > 0.0) {
                active[i] = 1;
                ++active_count;
            }
        if (active_count == 0) {
            CplxVec proxy = grad;
            detail::hard_threshold(proxy, budget.omega);
            for (int i = 0; i < w; ++i)
                if (std::norm(proxy[i]) > 0.0) active[i] = 1;
        }

        CplxVec grad_active(w, Cplx(0.0, 0.0));
        double grad_sq = 0.0;
        for (int i = 0; i < w; ++i)
            if (active[i]) {
                grad_active[i] = grad[i];
                grad_sq += std::norm(grad[i]);
            }
        const CplxVec proj = detail::apply(psi, grad_active);
        double proj_sq = 0.0;
        for (const auto& v : proj) proj_sq += std::norm(v);
        double mu = proj_sq > 0.0 ? grad_sq / proj_sq : 1.0;

        bool accepted = false;
        for (int tries = 0; tries < 10 && !accepted; ++tries) {
            CplxVec next(w);
            for (int i = 0; i < w; ++i) next[i] = x[i] + mu * grad[i];
            detail::hard_threshold(next, budget.omega);

            CplxVec next_residual(h);
            const CplxVec pn = detail::apply(psi, next);
            for (int r = 0; r < psi.rows; ++r) next_residual[r] -= pn[r];
            const double next_res = l2_norm(next_residual);

            if (next_res <= res * (1.0 + 1e-12)) {
                const double change = std::abs(res - next_res) / std::max(res, 1e-300);
                x = std::move(next);
                res = next_res;
                accepted = true;
                if (change < tol) return x;
            } else {
                mu *= 0.5;
            }
        }
        if (!accepted) break;  // no non-increasing step found
    }
    return x;
}

/**
 * Mutual coherence: the largest |Psi_i^H Psi_l| over distinct column pairs,
 * on raw (unnormalized) columns. Plain pairwise evaluation; this cost is what
 * makes greedy coherence minimization expensive.
 */
inline double mutual_coherence(const SensingMatrix& psi) {
    if (psi.window < 2) throw std::invalid_argument("mutual_coherence: need at least two columns");
    double best = 0.0;
    for (int i = 0; i < psi.window; ++i) {
        for (int l = i + 1; l < psi.window; ++l) {
            Cplx acc(0.0, 0.0);
            for (int r = 0; r < psi.rows; ++r)
                acc += std::conj(psi.at(r, i)) * psi.at(r, l);
            best = std::max(best, std::abs(acc));
        }
    }
    return best;
}

// Same maximization restricted to column pairs inside `support`.
inline double restricted_mutual_coherence(const SensingMatrix& psi,
                                          const std::vector<int>& support) {
    if (support.size() < 2)
        throw std::invalid_argument("restricted_mutual_coherence: support must contain at least two columns");
    for (int c : support)
        if (c < 0 || c >= psi.window)
            throw std::invalid_argument("restricted_mutual_coherence: support index out of range");
    double best = 0.0;
    for (std::size_t a = 0; a < support.size(); ++a) {
        for (std::size_t b = a + 1; b < support.size(); ++b) {
            const int i = support[a], l = support[b];
            if (i == l) continue;
            Cplx acc(0.0, 0.0);
            for (int r = 0; r < psi.rows; ++r)
                acc += std::conj(psi.at(r, i)) * psi.at(r, l);
            best = std::max(best, std::abs(acc));
        }
    }
    return best;
}

// Diagnostic variant with columns scaled to unit norm. For a row-selected
// Fourier matrix this differs from the raw value by the factor W / |M|.
inline double normalized_mutual_coherence(const SensingMatrix& psi) {
    const double col_sq = static_cast<double>(psi.rows) / psi.window;
    return mutual_coherence(psi) / col_sq;
}

}  // namespace mdsense

#endif  // MDSENSE_RECOVERY_HPP
