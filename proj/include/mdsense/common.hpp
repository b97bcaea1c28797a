#ifndef MDSENSE_COMMON_HPP
#define MDSENSE_COMMON_HPP

// Shared aliases and small numeric helpers used across the toolkit.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdsense {

using Cplx = std::complex<double>;
using CplxVec = std::vector<Cplx>;
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

inline double squared_norm(const CplxVec& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return s;
}

inline double l2_norm(const CplxVec& x) { return std::sqrt(squared_norm(x)); }

inline double linf_norm(const CplxVec& x) {
    double m = 0.0;
    for (const auto& v : x) m = std::max(m, std::abs(v));
    return m;
}

inline bool all_finite(const CplxVec& x) {
    for (const auto& v : x)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

// Derives an independent child seed from a master seed; used to keep the
// generator, traffic, network-init and rollout streams decoupled.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t stream) {
    Rng rng(master ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    rng.discard(7);
    return rng();
}

}  // namespace mdsense

#endif  // MDSENSE_COMMON_HPP
