#ifndef BANDDENSITY_SYSTEMS_HPP_
#define BANDDENSITY_SYSTEMS_HPP_

#include "banddensity/family.hpp"
#include "banddensity/scalar.hpp"

#include <algorithm>
#include <type_traits>
#include <utility>
#include <vector>

namespace banddensity {

// One vector of the system, supported on a few consecutive basis indices.
// Entries are sorted by index; explicit zeros are never stored.
template <typename S>
struct BandVector {
    long long center = 0;
    std::vector<std::pair<long long, S>> entries;

    S coeff(long long k) const {
        for (const auto& [idx, val] : entries)
            if (idx == k) return val;
        return S(0);
    }

    void push(long long k, S v) {
        if (k < 0 || is_zero(v)) return;
        entries.emplace_back(k, std::move(v));
    }

    void sort() {
        std::sort(entries.begin(), entries.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
    }
};

template <typename S>
S dot(const BandVector<S>& x, const BandVector<S>& y) {
    S acc(0);
    auto it = y.entries.begin();
    for (const auto& [idx, val] : x.entries) {
        while (it != y.entries.end() && it->first < idx) ++it;
        if (it != y.entries.end() && it->first == idx) acc += val * it->second;
    }
    return acc;
}

// The paired system f_t, f*_t generated lazily from its coefficient family.
// Generation is pure, so a BandSystem can be shared across threads freely.
template <typename S>
class BandSystem {
public:
    BandSystem(FamilyKind k, CoefficientFamily fam, int bandwidth)
        : kind(k), family(std::move(fam)), L(bandwidth) {}

    FamilyKind kind;
    CoefficientFamily family;
    int L;

    BandVector<S> f(long long t) const {
        return kind == FamilyKind::lw ? lw_f(t) : penta_f(t);
    }
    BandVector<S> f_star(long long t) const {
        return kind == FamilyKind::lw ? lw_f_star(t) : penta_f_star(t);
    }

private:
    S a(long long n) const { return family.template a<S>(n); }

    PentaCoeffs<S> pc(long long n) const {
        auto coeffs = family.template penta<S>(n);
        if (n >= 0) check_constraint(coeffs, n);
        return coeffs;
    }

    void check_constraint(const PentaCoeffs<S>& q, long long n) const {
        S resid = q.c + q.d - q.a * q.b;
        if constexpr (std::is_same_v<S, Rational>) {
            if (!is_zero(resid))
                throw ConstraintError(
                    "penta constraint c_n + d_n = a_n*b_n violated at n=" +
                    std::to_string(n));
        } else {
            double scale = std::max(1.0, std::abs(to_double(q.a * q.b)));
            if (std::abs(to_double(resid)) > 1e-12 * scale)
                throw ConstraintError(
                    "penta constraint c_n + d_n = a_n*b_n violated at n=" +
                    std::to_string(n));
        }
    }

    BandVector<S> lw_f(long long t) const {
        BandVector<S> v;
        v.center = t;
        if (t % 2 == 0) {
            v.push(t, S(1));
        } else {
            long long j = t / 2;
            v.push(2 * j, -a(2 * j + 1));
            v.push(2 * j + 1, S(1));
            v.push(2 * j + 2, a(2 * j + 2));
        }
        v.sort();
        return v;
    }

    BandVector<S> lw_f_star(long long t) const {
        BandVector<S> v;
        v.center = t;
        if (t % 2 == 0) {
            long long j = t / 2;
            v.push(2 * j - 1, -a(2 * j));
            v.push(2 * j, S(1));
            v.push(2 * j + 1, a(2 * j + 1));
        } else {
            v.push(t, S(1));
        }
        v.sort();
        return v;
    }

    BandVector<S> penta_f(long long t) const {
        BandVector<S> v;
        v.center = t;
        long long j = t / 4;
        switch (t % 4) {
            case 0:
                v.push(4 * j, S(1));
                break;
            case 1: {
                auto q = pc(2 * j);
                v.push(4 * j, -q.a);
                v.push(4 * j + 1, S(1));
                break;
            }
            case 2: {
                auto q0 = pc(2 * j);
                auto q1 = pc(2 * j + 1);
                v.push(4 * j, q0.d);
                v.push(4 * j + 1, -q0.b);
                v.push(4 * j + 2, S(1));
                v.push(4 * j + 3, q1.a);
                v.push(4 * j + 4, q1.c);
                break;
            }
            case 3: {
                auto q1 = pc(2 * j + 1);
                v.push(4 * j + 3, S(1));
                v.push(4 * j + 4, q1.b);
                break;
            }
        }
        v.sort();
        return v;
    }

    BandVector<S> penta_f_star(long long t) const {
        BandVector<S> v;
        v.center = t;
        long long j = t / 4;
        switch (t % 4) {
            case 0: {
                auto q0 = pc(2 * j);
                if (j > 0) {
                    auto qm = pc(2 * j - 1);
                    v.push(4 * j - 2, qm.d);
                    v.push(4 * j - 1, -qm.b);
                }
                v.push(4 * j, S(1));
                v.push(4 * j + 1, q0.a);
                v.push(4 * j + 2, q0.c);
                break;
            }
            case 1: {
                auto q0 = pc(2 * j);
                v.push(4 * j + 1, S(1));
                v.push(4 * j + 2, q0.b);
                break;
            }
            case 2:
                v.push(4 * j + 2, S(1));
                break;
            case 3: {
                auto q1 = pc(2 * j + 1);
                v.push(4 * j + 2, -q1.a);
                v.push(4 * j + 3, S(1));
                break;
            }
        }
        v.sort();
        return v;
    }
};

template <typename S>
BandSystem<S> build_lw_system(const CoefficientFamily& family) {
    if (family.kind != FamilyKind::lw)
        throw ConstraintError("build_lw_system needs an lw family");
    return BandSystem<S>(FamilyKind::lw, family, 1);
}

template <typename S>
BandSystem<S> build_penta_system(const CoefficientFamily& family) {
    if (family.kind != FamilyKind::penta)
        throw ConstraintError("build_penta_system needs a penta family");
    return BandSystem<S>(FamilyKind::penta, family, 2);
}

template <typename S>
BandSystem<S> build_system(const CoefficientFamily& family) {
    return family.kind == FamilyKind::lw ? build_lw_system<S>(family)
                                         : build_penta_system<S>(family);
}

// Max over 0 <= t,l <= N of |<f_t, f*_l> - delta_{tl}|. Zero exactly in
// rational mode for any valid family; only |t - l| <= 2L pairs can be
// nonzero, so the scan is linear in N.
template <typename S>
S check_biorthogonality(const BandSystem<S>& system, long long N) {
    S worst(0);
    for (long long t = 0; t <= N; ++t) {
        BandVector<S> ft = system.f(t);
        long long lo = std::max<long long>(0, t - 2 * system.L);
        long long hi = std::min<long long>(N, t + 2 * system.L);
        for (long long l = lo; l <= hi; ++l) {
            S ip = dot(ft, system.f_star(l));
            if (t == l) ip -= S(1);
            S r = abs_val(ip);
            if (worst < r) worst = r;
        }
    }
    return worst;
}

}  // namespace banddensity

#endif  // BANDDENSITY_SYSTEMS_HPP_
