#ifndef BANDDENSITY_SCALAR_HPP_
#define BANDDENSITY_SCALAR_HPP_

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace banddensity {

// Exact arithmetic backend. All identities of the band systems are pure
// algebra over Q, so an arbitrary-precision rational closes them exactly.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed DSL input; `offset` points at the offending character.
struct ParseError : Error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off)
        : Error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

// Arithmetic failure while evaluating a family at a concrete index.
struct EvalError : Error {
    using Error::Error;
};

// Violated structural invariant (biorthogonality constraint, zero
// coefficient at a positive index, degenerate witness input).
struct ConstraintError : Error {
    using Error::Error;
};

// Operator support reaches outside the requested window.
struct WindowError : Error {
    using Error::Error;
};

// Planar construction cannot proceed (infeasible triangle, bad radicand).
struct GeometryError : Error {
    using Error::Error;
};

template <typename S>
inline S abs_val(const S& x) {
    return x < S(0) ? S(-x) : x;
}

inline int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }
inline int sign_of(const Rational& x) {
    return x > 0 ? 1 : (x < 0 ? -1 : 0);
}

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) {
    return x.template convert_to<double>();
}

template <typename S>
inline S scalar_from_int(long long v) {
    return S(v);
}

template <typename S>
inline bool is_zero(const S& x) {
    return x == S(0);
}

// Shortest-ish fixed formatting: exact "p/q" for rationals, 17 significant
// digits for doubles so that output bytes are reproducible and re-readable.
inline std::string format_scalar(const Rational& x) {
    const BigInt num = boost::multiprecision::numerator(x);
    const BigInt den = boost::multiprecision::denominator(x);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline std::string format_scalar(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void parse_scalar(const std::string& text, Rational& out) {
    try {
        out = Rational(text);
    } catch (const std::exception&) {
        throw ParseError("invalid rational literal '" + text + "'", 0);
    }
}

inline void parse_scalar(const std::string& text, double& out) {
    std::size_t pos = 0;
    out = std::stod(text, &pos);
    if (pos != text.size())
        throw ParseError("invalid numeric literal '" + text + "'", pos);
}

// Integer power with negative exponents mapped to reciprocals.
template <typename S>
inline S int_pow(S base, long long e) {
    if (e < 0) {
        if (is_zero(base)) throw EvalError("zero raised to a negative power");
        base = S(1) / base;
        e = -e;
    }
    S acc(1);
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

// A scalar extended with +infinity, used where a vanishing coefficient
// turns one of the criterion ratios infinite.
template <typename S>
struct ExtScalar {
    S value{};
    bool infinite = false;

    static ExtScalar inf() { return ExtScalar{S(0), true}; }
    static ExtScalar finite(S v) { return ExtScalar{std::move(v), false}; }

    bool operator<(const ExtScalar& o) const {
        if (infinite) return false;
        if (o.infinite) return true;
        return value < o.value;
    }
};

}  // namespace banddensity

#endif  // BANDDENSITY_SCALAR_HPP_
