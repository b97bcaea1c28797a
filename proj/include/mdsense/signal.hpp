#ifndef MDSENSE_SIGNAL_HPP
#define MDSENSE_SIGNAL_HPP

// Complex linear-algebra primitives shared by every other module: the unitary
// Fourier matrix, Doppler-domain ground-truth spectra, micro-Doppler power
// conversion and the MSE metric.

#include <cstddef>

#include "mdsense/common.hpp"

namespace mdsense {

using DopplerSpectrum = std::vector<double>;

/**
 * Dense W x W unitary matrix with element (n, w) = exp(j 2 pi n w / W) / sqrt(W).
 *
 * The matrix is symmetric and unitary, so its inverse equals its conjugate.
 * W = 64 keeps the dense representation cheap and makes row slicing for the
 * sensing matrix a plain copy.
 */
class FourierMatrix {
public:
    explicit FourierMatrix(int w) : w_(w) {
        if (w < 2) throw std::invalid_argument("FourierMatrix: dimension must be >= 2");
        entries_.resize(static_cast<std::size_t>(w) * w);
        const double scale = 1.0 / std::sqrt(static_cast<double>(w));
        for (int n = 0; n < w; ++n) {
            for (int m = 0; m < w; ++m) {
                const long long prod = static_cast<long long>(n) * m % w;
                const double angle = 2.0 * kPi * static_cast<double>(prod) / w;
                entries_[static_cast<std::size_t>(n) * w + m] =
                    Cplx(scale * std::cos(angle), scale * std::sin(angle));
            }
        }
    }

    int size() const { return w_; }

    Cplx entry(int n, int m) const { return entries_[static_cast<std::size_t>(n) * w_ + m]; }

    const Cplx* row(int n) const { return entries_.data() + static_cast<std::size_t>(n) * w_; }

    // y = F x
    CplxVec apply(const CplxVec& x) const {
        check_length(x);
        CplxVec y(w_, Cplx(0.0, 0.0));
        for (int n = 0; n < w_; ++n) {
            const Cplx* r = row(n);
            Cplx acc(0.0, 0.0);
            for (int m = 0; m < w_; ++m) acc += r[m] * x[m];
            y[n] = acc;
        }
        return y;
    }

    // y = F^{-1} x = F^H x (conjugate of the symmetric unitary matrix).
    CplxVec apply_inverse(const CplxVec& x) const {
        check_length(x);
        CplxVec y(w_, Cplx(0.0, 0.0));
        for (int n = 0; n < w_; ++n) {
            const Cplx* r = row(n);
            Cplx acc(0.0, 0.0);
            for (int m = 0; m < w_; ++m) acc += std::conj(r[m]) * x[m];
            y[n] = acc;
        }
        return y;
    }

private:
    void check_length(const CplxVec& x) const {
        if (static_cast<int>(x.size()) != w_)
            throw std::invalid_argument("FourierMatrix: vector length does not match dimension");
    }

    int w_;
    CplxVec entries_;
};

// Doppler-domain channel of a fully sampled CIR window: H = F^{-1} g.
inline CplxVec ground_truth_spectrum(const FourierMatrix& f, const CplxVec& g) {
    return f.apply_inverse(g);
}

// Micro-Doppler power spectrum: elementwise squared modulus.
inline DopplerSpectrum md_spectrum(const CplxVec& h) {
    DopplerSpectrum d(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) d[i] = std::norm(h[i]);
    return d;
}

// Mean squared error with the squared-modulus convention for complex entries.
inline double mse(const CplxVec& x, const CplxVec& y) {
    if (x.empty() || x.size() != y.size())
        throw std::invalid_argument("mse: vectors must be non-empty and of equal length");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::norm(x[i] - y[i]);
    return s / static_cast<double>(x.size());
}

}  // namespace mdsense

#endif  // MDSENSE_SIGNAL_HPP
