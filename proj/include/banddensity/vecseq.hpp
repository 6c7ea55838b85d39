#ifndef BANDDENSITY_VECSEQ_HPP_
#define BANDDENSITY_VECSEQ_HPP_

#include "banddensity/scalar.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace banddensity {

enum class VecRole { r, u, v, u_star, v_star, w, w_star };

inline const char* role_name(VecRole r) {
    switch (r) {
        case VecRole::r: return "r";
        case VecRole::u: return "u";
        case VecRole::v: return "v";
        case VecRole::u_star: return "u_star";
        case VecRole::v_star: return "v_star";
        case VecRole::w: return "w";
        case VecRole::w_star: return "w_star";
    }
    return "?";
}

// A sequence of R^k vectors, k in {1, 2}. The second coordinate is kept
// at zero for k = 1 so dot products work uniformly.
template <typename S>
struct VecSeq {
    int dim = 1;
    VecRole role = VecRole::r;
    std::vector<std::array<S, 2>> vectors;

    long long size() const { return static_cast<long long>(vectors.size()); }

    const std::array<S, 2>& at(long long n) const {
        return vectors.at(static_cast<std::size_t>(n));
    }

    void push(S x) { vectors.push_back({std::move(x), S(0)}); }
    void push(S x, S y) { vectors.push_back({std::move(x), std::move(y)}); }

    bool is_zero_at(long long n) const {
        const auto& w = at(n);
        return is_zero(w[0]) && is_zero(w[1]);
    }
};

template <typename S>
S dot(const std::array<S, 2>& x, const std::array<S, 2>& y) {
    return x[0] * y[0] + x[1] * y[1];
}

template <typename S>
S norm_sq(const std::array<S, 2>& x) {
    return x[0] * x[0] + x[1] * x[1];
}

inline double norm(const std::array<double, 2>& x) {
    return std::hypot(x[0], x[1]);
}

}  // namespace banddensity

#endif  // BANDDENSITY_VECSEQ_HPP_
