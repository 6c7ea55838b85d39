#ifndef BANDDENSITY_CLASSIFY_HPP_
#define BANDDENSITY_CLASSIFY_HPP_

#include "banddensity/family.hpp"
#include "banddensity/scalar.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace banddensity {

enum class MuKind { lw_one_point, lw_recip_a, penta_min };

// Criterion sequence. `infinite[n]` marks a +infinity value (possible only
// for penta families where all three ratios degenerate at once).
template <typename S>
struct MuSeq {
    MuKind kind = MuKind::lw_one_point;
    std::vector<S> values;       // mu_0 .. mu_N, absolute values
    std::vector<char> infinite;  // parallel to values

    bool is_infinite(long long n) const {
        return infinite[static_cast<std::size_t>(n)];
    }
    const S& at(long long n) const {
        return values[static_cast<std::size_t>(n)];
    }
};

// mu_n for the tridiagonal system: the alternating coefficient products,
// with both chains terminating at the smallest positive index (a_0 = 0 is
// excluded). mu_0 is the empty product 1, and the telescoping identity
// a_{n+1} mu_n mu_{n+1} = 1 holds from n = 0 on.
template <typename S>
MuSeq<S> mu_lw(const CoefficientFamily& family, long long N) {
    if (family.kind != FamilyKind::lw)
        throw ConstraintError("mu_lw needs an lw family");
    MuSeq<S> mu;
    mu.kind = MuKind::lw_one_point;
    mu.values.reserve(static_cast<std::size_t>(N + 1));
    S cur(1);
    mu.values.push_back(cur);
    for (long long n = 1; n <= N; ++n) {
        S an = abs_val(family.template a<S>(n));
        if (is_zero(an))
            throw ConstraintError("zero coefficient a_" + std::to_string(n) +
                                  " at positive index");
        cur = S(1) / (an * cur);
        mu.values.push_back(cur);
    }
    mu.infinite.assign(mu.values.size(), 0);
    return mu;
}

// The sequence {1/|a_n|} whose l^1 membership decides k point density for
// k >= 2 on the tridiagonal system.
template <typename S>
MuSeq<S> recip_a_lw(const CoefficientFamily& family, long long N) {
    if (family.kind != FamilyKind::lw)
        throw ConstraintError("recip_a_lw needs an lw family");
    MuSeq<S> mu;
    mu.kind = MuKind::lw_recip_a;
    mu.values.reserve(static_cast<std::size_t>(N + 1));
    mu.values.push_back(S(0));  // index 0 carries no term
    for (long long n = 1; n <= N; ++n) {
        S an = abs_val(family.template a<S>(n));
        if (is_zero(an))
            throw ConstraintError("zero coefficient a_" + std::to_string(n) +
                                  " at positive index");
        mu.values.push_back(S(1) / an);
    }
    mu.infinite.assign(mu.values.size(), 0);
    return mu;
}

// Which of the three ratios attains the pentadiagonal mu_n.
//   1: 1/|a_n| + 1/|b_n|
//   2: (1 + |b_n|) / |d_n|
//   3: (1 + |a_n|) / |c_n|
// Ties break toward the lowest number. A zero coefficient makes its ratio
// +infinity and drops it from the min.
template <typename S>
struct PentaMuChoice {
    ExtScalar<S> mu;
    int which = 0;  // 0 when all three ratios are infinite
};

template <typename S>
PentaMuChoice<S> penta_mu_at(const CoefficientFamily& family, long long n) {
    auto q = family.template penta<S>(n);
    S a = abs_val(q.a), b = abs_val(q.b), c = abs_val(q.c), d = abs_val(q.d);
    ExtScalar<S> r1 = (!is_zero(a) && !is_zero(b))
                          ? ExtScalar<S>::finite(S(1) / a + S(1) / b)
                          : ExtScalar<S>::inf();
    ExtScalar<S> r2 = !is_zero(d) ? ExtScalar<S>::finite((S(1) + b) / d)
                                  : ExtScalar<S>::inf();
    ExtScalar<S> r3 = !is_zero(c) ? ExtScalar<S>::finite((S(1) + a) / c)
                                  : ExtScalar<S>::inf();
    PentaMuChoice<S> out;
    out.mu = r1;
    out.which = 1;
    if (r2 < out.mu) { out.mu = r2; out.which = 2; }
    if (r3 < out.mu) { out.mu = r3; out.which = 3; }
    if (out.mu.infinite) out.which = 0;
    return out;
}

template <typename S>
MuSeq<S> mu_penta(const CoefficientFamily& family, long long N) {
    if (family.kind != FamilyKind::penta)
        throw ConstraintError("mu_penta needs a penta family");
    MuSeq<S> mu;
    mu.kind = MuKind::penta_min;
    mu.values.reserve(static_cast<std::size_t>(N + 1));
    mu.infinite.reserve(static_cast<std::size_t>(N + 1));
    for (long long n = 0; n <= N; ++n) {
        auto ch = penta_mu_at<S>(family, n);
        mu.values.push_back(ch.mu.infinite ? S(0) : ch.mu.value);
        mu.infinite.push_back(ch.mu.infinite ? 1 : 0);
    }
    return mu;
}

// ---------------------------------------------------------------------------
// Numeric series diagnostics. Summability is undecidable from finitely many
// terms, so the result is a three-valued verdict plus the evidence that
// produced it.
// ---------------------------------------------------------------------------

enum class SeriesCall { converges, diverges, inconclusive };

inline const char* series_call_name(SeriesCall c) {
    switch (c) {
        case SeriesCall::converges: return "converges";
        case SeriesCall::diverges: return "diverges";
        case SeriesCall::inconclusive: return "inconclusive";
    }
    return "?";
}

struct SeriesEvidence {
    double partial_sum = 0.0;
    long long horizon = 0;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double last_decade_increment = 0.0;
};

struct SeriesDiagnostic {
    SeriesCall call = SeriesCall::inconclusive;
    SeriesEvidence evidence;
};

inline long long default_series_horizon() {
    if (const char* env = std::getenv("BANDDENSITY_HORIZON")) {
        char* end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end && *end == '\0' && v >= 10) return v;
        throw Error("BANDDENSITY_HORIZON must be an integer >= 10");
    }
    return 100000;
}

// Heuristic verdict on sum(values). Terms are indexed from 1. The tail
// slope s is a least-squares fit of log v against log n over the last
// decade of indices; delta = 0.1 is the dead band around the critical
// slope -1, and increments below `tol` count as a flat tail.
inline SeriesDiagnostic series_diagnostic(const std::vector<double>& values,
                                          double delta = 0.1,
                                          double tol = 1e-12) {
    SeriesDiagnostic out;
    const long long N = static_cast<long long>(values.size());
    double total = 0.0;
    for (long long i = 0; i < N; ++i) {
        if (values[static_cast<std::size_t>(i)] < 0.0)
            throw ConstraintError("series_diagnostic: negative term at index " +
                                  std::to_string(i + 1));
        total += values[static_cast<std::size_t>(i)];
    }
    out.evidence.partial_sum = total;
    out.evidence.horizon = N;
    if (N < 10) return out;

    auto range_sum = [&](long long lo, long long hi) {  // terms with lo < n <= hi
        double s = 0.0;
        for (long long n = lo + 1; n <= hi; ++n)
            s += values[static_cast<std::size_t>(n - 1)];
        return s;
    };
    const long long d1 = N / 10, d2 = N / 100;
    const double inc_last = range_sum(d1, N);
    const double inc_prev = d2 >= 1 ? range_sum(d2, d1) : range_sum(0, d1);
    out.evidence.last_decade_increment = inc_last;

    if (inc_last < tol) {
        out.call = SeriesCall::converges;
        return out;
    }

    const double ratio = inc_prev > 0
                             ? inc_last / inc_prev
                             : std::numeric_limits<double>::infinity();
    if (ratio >= 2.0) {
        // Decade increments are growing outright; a log-log slope fit can
        // be fooled by oscillating terms, the increments cannot.
        out.call = SeriesCall::diverges;
        return out;
    }

    // Least-squares slope over the last decade, skipping zero terms.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long long count = 0;
    for (long long n = d1 + 1; n <= N; ++n) {
        double v = values[static_cast<std::size_t>(n - 1)];
        if (!(v > 0.0) || !std::isfinite(v)) continue;
        double x = std::log(static_cast<double>(n));
        double y = std::log(v);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++count;
    }
    if (count >= 2) {
        double denom = count * sxx - sx * sx;
        if (denom > 0) out.evidence.slope = (count * sxy - sx * sy) / denom;
    }
    const double s = out.evidence.slope;

    if (std::isfinite(s) && s <= -1.0 - delta) {
        out.call = SeriesCall::converges;
    } else if (std::isfinite(s) && s >= -1.0 + delta) {
        out.call = out.evidence.partial_sum > 0 ? SeriesCall::diverges
                                                : SeriesCall::inconclusive;
    } else if (ratio >= 0.95) {
        // Slope sits in the dead band but the decade increments are not
        // decaying: the harmonic boundary case.
        out.call = SeriesCall::diverges;
    } else {
        out.call = SeriesCall::inconclusive;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

enum class Property { one_point_dense, k_point_dense_k_ge_2, rank_one_dense };
enum class Answer { yes, no, inconclusive };
enum class Basis { symbolic_fact, partial_sum_heuristic };

inline const char* property_name(Property p) {
    switch (p) {
        case Property::one_point_dense: return "one_point_dense";
        case Property::k_point_dense_k_ge_2: return "k_point_dense_k_ge_2";
        case Property::rank_one_dense: return "rank_one_dense";
    }
    return "?";
}
inline const char* answer_name(Answer a) {
    switch (a) {
        case Answer::yes: return "yes";
        case Answer::no: return "no";
        case Answer::inconclusive: return "inconclusive";
    }
    return "?";
}
inline const char* basis_name(Basis b) {
    return b == Basis::symbolic_fact ? "symbolic_fact" : "partial_sum_heuristic";
}

struct Verdict {
    Property property = Property::one_point_dense;
    Answer answer = Answer::inconclusive;
    Basis basis = Basis::partial_sum_heuristic;
    SeriesEvidence evidence;
};

namespace detail {

// a_n evaluated as doubles can overflow for fast-growing families; the mu
// recursion is run in log space and the horizon is clamped to the last
// index where the coefficient is still finite.
inline std::vector<double> mu_lw_squared_terms(const CoefficientFamily& family,
                                               long long N) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(N));
    double log_mu = 0.0;  // mu_0 = 1
    for (long long n = 1; n <= N; ++n) {
        double a = std::fabs(family.a<double>(n));
        if (!std::isfinite(a) || a == 0.0) break;
        log_mu = -std::log(a) - log_mu;
        out.push_back(std::exp(2.0 * log_mu));
    }
    return out;
}

inline std::vector<double> recip_a_terms(const CoefficientFamily& family,
                                         long long N) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(N));
    for (long long n = 1; n <= N; ++n) {
        double a = std::fabs(family.a<double>(n));
        if (a == 0.0) throw ConstraintError("zero coefficient a_" + std::to_string(n));
        out.push_back(std::isinf(a) ? 0.0 : 1.0 / a);
    }
    return out;
}

inline std::vector<double> mu_penta_terms(const CoefficientFamily& family,
                                          long long N) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(N));
    for (long long n = 1; n <= N; ++n) {
        auto ch = penta_mu_at<double>(family, n);
        if (ch.mu.infinite || !std::isfinite(ch.mu.value)) break;
        out.push_back(ch.mu.value);
    }
    return out;
}

inline Verdict verdict_from_series(Property prop, const std::vector<double>& terms) {
    Verdict v;
    v.property = prop;
    v.basis = Basis::partial_sum_heuristic;
    SeriesDiagnostic diag = series_diagnostic(terms);
    v.evidence = diag.evidence;
    switch (diag.call) {
        case SeriesCall::diverges: v.answer = Answer::yes; break;
        case SeriesCall::converges: v.answer = Answer::no; break;
        case SeriesCall::inconclusive: v.answer = Answer::inconclusive; break;
    }
    return v;
}

}  // namespace detail

// Density verdict for the tridiagonal system. k = 1 asks whether {mu_n}
// escapes l^2; k >= 2 asks whether {1/a_n} escapes l^1. "yes" means dense.
// Exact facts on built-in families take precedence; otherwise the partial
// sum heuristic decides at horizon N.
inline Verdict classify_lw(const CoefficientFamily& family, long long N, int k) {
    if (family.kind != FamilyKind::lw)
        throw ConstraintError("classify_lw needs an lw family");
    if (k < 1) throw ConstraintError("k must be >= 1");
    const Property prop =
        k == 1 ? Property::one_point_dense : Property::k_point_dense_k_ge_2;

    if (family.facts) {
        std::optional<bool> fact = k == 1 ? family.facts->mu_in_l2
                                          : family.facts->recip_a_in_l1;
        if (fact) {
            Verdict v;
            v.property = prop;
            v.basis = Basis::symbolic_fact;
            v.answer = *fact ? Answer::no : Answer::yes;
            auto terms = k == 1 ? detail::mu_lw_squared_terms(family, std::min<long long>(N, 10000))
                                : detail::recip_a_terms(family, std::min<long long>(N, 10000));
            SeriesDiagnostic diag = series_diagnostic(terms);
            v.evidence = diag.evidence;
            return v;
        }
    }
    auto terms = k == 1 ? detail::mu_lw_squared_terms(family, N)
                        : detail::recip_a_terms(family, N);
    return detail::verdict_from_series(prop, terms);
}

// Rank one density for the pentadiagonal system, equivalently k point
// density for every k > 1: decided by divergence of sum(mu_n).
inline Verdict classify_penta(const CoefficientFamily& family, long long N) {
    if (family.kind != FamilyKind::penta)
        throw ConstraintError("classify_penta needs a penta family");
    if (family.facts && family.facts->mu_penta_in_l1) {
        Verdict v;
        v.property = Property::rank_one_dense;
        v.basis = Basis::symbolic_fact;
        v.answer = *family.facts->mu_penta_in_l1 ? Answer::no : Answer::yes;
        SeriesDiagnostic diag = series_diagnostic(
            detail::mu_penta_terms(family, std::min<long long>(N, 10000)));
        v.evidence = diag.evidence;
        return v;
    }
    return detail::verdict_from_series(Property::rank_one_dense,
                                       detail::mu_penta_terms(family, N));
}

inline Verdict classify(const CoefficientFamily& family, long long N, int k) {
    return family.kind == FamilyKind::lw ? classify_lw(family, N, k)
                                         : classify_penta(family, N);
}

}  // namespace banddensity

#endif  // BANDDENSITY_CLASSIFY_HPP_
