#ifndef BANDDENSITY_XI_HPP_
#define BANDDENSITY_XI_HPP_

#include "banddensity/scalar.hpp"
#include "banddensity/systems.hpp"
#include "banddensity/vecseq.hpp"

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

namespace banddensity {

// A finitely supported operator, T_{ij} = <T e_j, e_i> with row i, col j.
// That orientation is used everywhere in this library.
template <typename S>
class SparseOperator {
public:
    using Key = std::pair<long long, long long>;  // (row, col)

    void set(long long i, long long j, S v) {
        if (is_zero(v))
            entries_.erase({i, j});
        else
            entries_[{i, j}] = std::move(v);
    }

    void add(long long i, long long j, const S& v) {
        if (is_zero(v)) return;
        auto it = entries_.find({i, j});
        if (it == entries_.end()) {
            entries_[{i, j}] = v;
        } else {
            it->second += v;
            if (is_zero(it->second)) entries_.erase(it);
        }
    }

    S at(long long i, long long j) const {
        auto it = entries_.find({i, j});
        return it == entries_.end() ? S(0) : it->second;
    }

    S trace() const {
        S t(0);
        for (const auto& [k, v] : entries_)
            if (k.first == k.second) t += v;
        return t;
    }

    // l^1 mass of the stored entries; the computable stand-in for the
    // trace norm of a banded operator.
    S abs_entry_sum() const {
        S t(0);
        for (const auto& [k, v] : entries_) t += abs_val(v);
        return t;
    }

    long long max_index() const {
        long long m = -1;
        for (const auto& [k, v] : entries_)
            m = std::max({m, k.first, k.second});
        return m;
    }

    std::size_t size() const { return entries_.size(); }
    const std::map<Key, S>& entries() const { return entries_; }

private:
    std::map<Key, S> entries_;
};

template <typename S>
SparseOperator<S> linear_combination(const S& alpha, const SparseOperator<S>& A,
                                     const S& beta, const SparseOperator<S>& B) {
    SparseOperator<S> out;
    for (const auto& [k, v] : A.entries()) out.add(k.first, k.second, alpha * v);
    for (const auto& [k, v] : B.entries()) out.add(k.first, k.second, beta * v);
    return out;
}

enum class XiProvenance { definitional, closed_form_lw, closed_form_penta };

inline const char* provenance_name(XiProvenance p) {
    switch (p) {
        case XiProvenance::definitional: return "definitional";
        case XiProvenance::closed_form_lw: return "closed_form_lw";
        case XiProvenance::closed_form_penta: return "closed_form_penta";
    }
    return "?";
}

template <typename S>
struct XiSeq {
    std::vector<S> values;  // Xi_0 .. Xi_N
    XiProvenance provenance = XiProvenance::definitional;
};

// <T u, w> expanded over the band entries of u and w.
template <typename S>
S band_inner(const SparseOperator<S>& T, const BandVector<S>& u,
             const BandVector<S>& w) {
    S acc(0);
    for (const auto& [alpha, cu] : u.entries)
        for (const auto& [beta, cw] : w.entries) {
            S t = T.at(beta, alpha);
            if (!is_zero(t)) acc += cu * cw * t;
        }
    return acc;
}

// Xi_n straight from its definition: the difference between the partial
// sums of the two Fourier traces, accumulated incrementally. Each step
// adds one band-local correction, so the whole run is O(N L^2).
template <typename S>
XiSeq<S> xi_definitional(const SparseOperator<S>& T, const BandSystem<S>& system,
                         long long N) {
    if (T.max_index() > N + system.L)
        throw WindowError("operator support exceeds window N + L");
    XiSeq<S> xi;
    xi.provenance = XiProvenance::definitional;
    xi.values.reserve(static_cast<std::size_t>(N + 1));
    S running(0);
    for (long long m = 0; m <= N; ++m) {
        running += band_inner(T, system.f(m), system.f_star(m)) - T.at(m, m);
        xi.values.push_back(running);
    }
    return xi;
}

// Closed form for the tridiagonal system:
//   Xi_{2n}   = a_{2n+1} T_{2n+1,2n}
//   Xi_{2n-1} = a_{2n}   T_{2n-1,2n}
template <typename S>
XiSeq<S> xi_closed_lw(const SparseOperator<S>& T, const CoefficientFamily& family,
                      long long N) {
    if (family.kind != FamilyKind::lw)
        throw ConstraintError("xi_closed_lw needs an lw family");
    XiSeq<S> xi;
    xi.provenance = XiProvenance::closed_form_lw;
    xi.values.reserve(static_cast<std::size_t>(N + 1));
    for (long long i = 0; i <= N; ++i) {
        S v = (i % 2 == 0) ? family.template a<S>(i + 1) * T.at(i + 1, i)
                           : family.template a<S>(i + 1) * T.at(i, i + 1);
        xi.values.push_back(std::move(v));
    }
    return xi;
}

// Closed form for the pentadiagonal system, four formulas per block of
// four indices.
template <typename S>
XiSeq<S> xi_closed_penta(const SparseOperator<S>& T,
                         const CoefficientFamily& family, long long N) {
    if (family.kind != FamilyKind::penta)
        throw ConstraintError("xi_closed_penta needs a penta family");
    XiSeq<S> xi;
    xi.provenance = XiProvenance::closed_form_penta;
    xi.values.reserve(static_cast<std::size_t>(N + 1));
    for (long long i = 0; i <= N; ++i) {
        long long j = i / 4;
        S v(0);
        switch (i % 4) {
            case 0: {
                auto q = family.template penta<S>(2 * j);
                v = q.a * T.at(4 * j + 1, 4 * j) + q.c * T.at(4 * j + 2, 4 * j);
                break;
            }
            case 1: {
                auto q = family.template penta<S>(2 * j);
                v = -q.d * T.at(4 * j + 2, 4 * j) + q.b * T.at(4 * j + 2, 4 * j + 1);
                break;
            }
            case 2: {
                auto q = family.template penta<S>(2 * j + 1);
                v = q.a * T.at(4 * j + 2, 4 * j + 3) +
                    q.c * T.at(4 * j + 2, 4 * j + 4);
                break;
            }
            case 3: {
                auto q = family.template penta<S>(2 * j + 1);
                v = -q.d * T.at(4 * j + 2, 4 * j + 4) +
                    q.b * T.at(4 * j + 3, 4 * j + 4);
                break;
            }
        }
        xi.values.push_back(std::move(v));
    }
    return xi;
}

template <typename S>
XiSeq<S> xi_closed(const SparseOperator<S>& T, const CoefficientFamily& family,
                   long long N) {
    return family.kind == FamilyKind::lw ? xi_closed_lw(T, family, N)
                                         : xi_closed_penta(T, family, N);
}

// The trace identity: for T assembled from the coordinate sequences as
// T_{ij} = <u_j, v_i>, the operator trace equals sum_n <u_n, v_n>. Both
// sides are computed literally and returned.
template <typename S>
std::pair<S, S> trace_two_ways(const VecSeq<S>& u, const VecSeq<S>& v,
                               long long N) {
    if (u.dim != v.dim)
        throw ConstraintError("trace_two_ways: dimension mismatch");
    if (u.size() <= N || v.size() <= N)
        throw ConstraintError("trace_two_ways: sequences shorter than window");
    SparseOperator<S> T;
    for (long long j = 0; j <= N; ++j)
        for (long long i = 0; i <= N; ++i)
            T.set(i, j, dot(u.at(j), v.at(i)));
    S direct(0);
    for (long long n = 0; n <= N; ++n) direct += dot(u.at(n), v.at(n));
    return {T.trace(), direct};
}

}  // namespace banddensity

#endif  // BANDDENSITY_XI_HPP_
