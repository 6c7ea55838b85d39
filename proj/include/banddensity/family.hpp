#ifndef BANDDENSITY_FAMILY_HPP_
#define BANDDENSITY_FAMILY_HPP_

#include "banddensity/scalar.hpp"

#include <cctype>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace banddensity {

enum class FamilyKind { lw, penta };

inline const char* kind_name(FamilyKind k) {
    return k == FamilyKind::lw ? "lw" : "penta";
}

// Exact summability knowledge attached to the built-in families only;
// a DSL-defined family carries none and falls back to the numeric
// diagnostics in `classify`.
struct SummabilityFacts {
    std::optional<bool> recip_a_in_l1;   // lw: {1/a_n} in l^1
    std::optional<bool> mu_in_l2;        // lw: {mu_n} in l^2
    std::optional<bool> mu_penta_in_l1;  // penta: {mu_n} in l^1
};

// ---------------------------------------------------------------------------
// Expression DSL over the index variable n.
//
//   expr     := term (('+'|'-') term)*
//   term     := factor (('*'|'/') factor)*
//   factor   := base ('^' exponent)?
//   exponent := base
//   base     := 'n' | integer | '(' expr ')'
//
// Exponents must evaluate to integers at every index so that exact-rational
// evaluation stays closed.
// ---------------------------------------------------------------------------

class FamilyExpr {
public:
    enum class Node { add, sub, mul, div, pow, var_n, literal };

    static FamilyExpr make_literal(BigInt v) {
        FamilyExpr e(Node::literal);
        e.literal_ = std::move(v);
        return e;
    }
    static FamilyExpr make_var() { return FamilyExpr(Node::var_n); }
    static FamilyExpr make_binary(Node op, FamilyExpr lhs, FamilyExpr rhs) {
        FamilyExpr e(op);
        e.lhs_ = std::make_unique<FamilyExpr>(std::move(lhs));
        e.rhs_ = std::make_unique<FamilyExpr>(std::move(rhs));
        return e;
    }

    FamilyExpr(const FamilyExpr& o) { *this = o; }
    FamilyExpr& operator=(const FamilyExpr& o) {
        node_ = o.node_;
        literal_ = o.literal_;
        lhs_ = o.lhs_ ? std::make_unique<FamilyExpr>(*o.lhs_) : nullptr;
        rhs_ = o.rhs_ ? std::make_unique<FamilyExpr>(*o.rhs_) : nullptr;
        return *this;
    }
    FamilyExpr(FamilyExpr&&) noexcept = default;
    FamilyExpr& operator=(FamilyExpr&&) noexcept = default;

    Node node() const { return node_; }

    template <typename S>
    S eval(long long n) const {
        switch (node_) {
            case Node::literal:
                return S(Rational(literal_));
            case Node::var_n:
                return scalar_from_int<S>(n);
            case Node::add:
                return lhs_->eval<S>(n) + rhs_->eval<S>(n);
            case Node::sub:
                return lhs_->eval<S>(n) - rhs_->eval<S>(n);
            case Node::mul:
                return lhs_->eval<S>(n) * rhs_->eval<S>(n);
            case Node::div: {
                S d = rhs_->eval<S>(n);
                if (is_zero(d))
                    throw EvalError("division by zero at n=" + std::to_string(n));
                return lhs_->eval<S>(n) / d;
            }
            case Node::pow: {
                // The exponent subtree is evaluated exactly regardless of
                // the requested scalar mode; it must land on an integer.
                Rational ev = rhs_->eval<Rational>(n);
                if (boost::multiprecision::denominator(ev) != 1)
                    throw EvalError("non-integer exponent at n=" + std::to_string(n));
                BigInt ei = boost::multiprecision::numerator(ev);
                if (ei > 1000000 || ei < -1000000)
                    throw EvalError("exponent out of range at n=" + std::to_string(n));
                return int_pow(lhs_->eval<S>(n), ei.template convert_to<long long>());
            }
        }
        throw EvalError("corrupt expression node");
    }

    std::string str() const { return print(0); }

    bool equals(const FamilyExpr& o) const {
        if (node_ != o.node_) return false;
        if (node_ == Node::literal) return literal_ == o.literal_;
        if (node_ == Node::var_n) return true;
        return lhs_->equals(*o.lhs_) && rhs_->equals(*o.rhs_);
    }

private:
    explicit FamilyExpr(Node n) : node_(n) {}

    static int precedence(Node n) {
        switch (n) {
            case Node::add:
            case Node::sub: return 1;
            case Node::mul:
            case Node::div: return 2;
            case Node::pow: return 3;
            default: return 4;
        }
    }

    std::string print(int parent_prec) const {
        std::string out;
        switch (node_) {
            case Node::literal: out = literal_.str(); break;
            case Node::var_n: out = "n"; break;
            case Node::add: out = lhs_->print(1) + "+" + rhs_->print(2); break;
            case Node::sub: out = lhs_->print(1) + "-" + rhs_->print(2); break;
            case Node::mul: out = lhs_->print(2) + "*" + rhs_->print(3); break;
            case Node::div: out = lhs_->print(2) + "/" + rhs_->print(3); break;
            case Node::pow:
                // The grammar only admits an atom on either side of '^'.
                out = lhs_->print(4) + "^" + rhs_->print(4);
                break;
        }
        if (precedence(node_) < parent_prec) return "(" + out + ")";
        return out;
    }

    Node node_;
    BigInt literal_;
    std::unique_ptr<FamilyExpr> lhs_, rhs_;
};

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    FamilyExpr parse() {
        FamilyExpr e = expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    FamilyExpr expr() {
        FamilyExpr e = term();
        for (;;) {
            char c = peek();
            if (c != '+' && c != '-') return e;
            ++pos_;
            e = FamilyExpr::make_binary(
                c == '+' ? FamilyExpr::Node::add : FamilyExpr::Node::sub,
                std::move(e), term());
        }
    }

    FamilyExpr term() {
        FamilyExpr e = factor();
        for (;;) {
            char c = peek();
            if (c != '*' && c != '/') return e;
            ++pos_;
            e = FamilyExpr::make_binary(
                c == '*' ? FamilyExpr::Node::mul : FamilyExpr::Node::div,
                std::move(e), factor());
        }
    }

    FamilyExpr factor() {
        FamilyExpr e = base();
        if (peek() == '^') {
            ++pos_;
            FamilyExpr exponent = base();
            e = FamilyExpr::make_binary(FamilyExpr::Node::pow, std::move(e),
                                        std::move(exponent));
        }
        return e;
    }

    FamilyExpr base() {
        char c = peek();
        if (c == 'n') {
            ++pos_;
            return FamilyExpr::make_var();
        }
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            bool neg = false;
            if (c == '-') {
                neg = true;
                ++pos_;
            }
            std::size_t digits = 0;
            std::string lit;
            while (pos_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                lit += text_[pos_++];
                ++digits;
            }
            if (digits == 0) throw ParseError("expected integer literal", start);
            BigInt v(lit);
            if (neg) v = -v;
            return FamilyExpr::make_literal(std::move(v));
        }
        if (c == '(') {
            ++pos_;
            FamilyExpr e = expr();
            if (peek() != ')') throw ParseError("expected ')'", pos_);
            ++pos_;
            return e;
        }
        throw ParseError(std::string("expected 'n', integer or '('"), pos_);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline FamilyExpr parse_expr(std::string_view text) {
    return detail::ExprParser(text).parse();
}

template <typename S>
struct PentaCoeffs {
    S a, b, c, d;
};

// A coefficient family. Evaluation is pure: both the exact and the double
// evaluators are stored side by side, and the object is immutable after
// construction, so concurrent use is safe.
class CoefficientFamily {
public:
    struct ScalarFn {
        std::function<Rational(long long)> exact;  // may be empty
        std::function<double(long long)> approx;
    };

    FamilyKind kind;
    std::string label;
    std::optional<SummabilityFacts> facts;

    // lw: coefficient a_n. Forces a_0 = 0; indices below zero are zero.
    template <typename S>
    S a(long long n) const {
        if (kind != FamilyKind::lw)
            throw ConstraintError("a(n) requested from a non-lw family");
        if (n <= 0) return S(0);
        return call<S>(fn_[0], n);
    }

    // penta: the quadruple (a_n, b_n, c_n, d_n); zero for n < 0.
    template <typename S>
    PentaCoeffs<S> penta(long long n) const {
        if (kind != FamilyKind::penta)
            throw ConstraintError("penta(n) requested from a non-penta family");
        if (n < 0) return {S(0), S(0), S(0), S(0)};
        return {call<S>(fn_[0], n), call<S>(fn_[1], n), call<S>(fn_[2], n),
                call<S>(fn_[3], n)};
    }

    bool exact_capable() const {
        for (const auto& f : fn_)
            if (f.approx && !f.exact) return false;
        return true;
    }

    // Source expressions when the family came from the DSL (used for
    // round-tripping through config files and witness exports).
    const std::vector<std::string>& source_exprs() const { return sources_; }
    bool is_builtin() const { return builtin_; }

    static CoefficientFamily lw_from_fn(ScalarFn a_fn, std::string label,
                                        std::optional<SummabilityFacts> facts,
                                        std::vector<std::string> sources,
                                        bool builtin) {
        CoefficientFamily f;
        f.kind = FamilyKind::lw;
        f.label = std::move(label);
        f.facts = std::move(facts);
        f.fn_.push_back(std::move(a_fn));
        f.sources_ = std::move(sources);
        f.builtin_ = builtin;
        return f;
    }

    static CoefficientFamily penta_from_fn(ScalarFn a_fn, ScalarFn b_fn,
                                           ScalarFn c_fn, ScalarFn d_fn,
                                           std::string label,
                                           std::optional<SummabilityFacts> facts,
                                           std::vector<std::string> sources,
                                           bool builtin) {
        CoefficientFamily f;
        f.kind = FamilyKind::penta;
        f.label = std::move(label);
        f.facts = std::move(facts);
        f.fn_.push_back(std::move(a_fn));
        f.fn_.push_back(std::move(b_fn));
        f.fn_.push_back(std::move(c_fn));
        f.fn_.push_back(std::move(d_fn));
        f.sources_ = std::move(sources);
        f.builtin_ = builtin;
        return f;
    }

private:
    CoefficientFamily() : kind(FamilyKind::lw) {}

    template <typename S>
    static S call(const ScalarFn& fn, long long n);

    std::vector<ScalarFn> fn_;
    std::vector<std::string> sources_;
    bool builtin_ = false;
};

template <>
inline Rational CoefficientFamily::call<Rational>(const ScalarFn& fn, long long n) {
    if (!fn.exact)
        throw EvalError("family has no exact evaluator for rational mode");
    return fn.exact(n);
}

template <>
inline double CoefficientFamily::call<double>(const ScalarFn& fn, long long n) {
    return fn.approx(n);
}

namespace detail {

inline CoefficientFamily::ScalarFn fn_from_expr(const FamilyExpr& e) {
    auto shared = std::make_shared<FamilyExpr>(e);
    return {
        [shared](long long n) { return shared->eval<Rational>(n); },
        [shared](long long n) { return shared->eval<double>(n); },
    };
}

// Probe window used to validate structural constraints at parse time.
inline constexpr long long kProbeWindow = 32;

inline void probe_lw_nonzero(const CoefficientFamily& f) {
    for (long long n = 1; n <= kProbeWindow; ++n) {
        if (f.a<double>(n) == 0.0)
            throw ConstraintError("lw coefficient a_" + std::to_string(n) +
                                  " is zero; a_n must be nonzero for n >= 1");
    }
}

inline void probe_penta_constraint(const CoefficientFamily& f) {
    for (long long n = 0; n <= kProbeWindow; ++n) {
        auto [a, b, c, d] = f.penta<Rational>(n);
        if (c + d != a * b)
            throw ConstraintError("penta constraint c_n + d_n = a_n*b_n violated at n=" +
                                  std::to_string(n));
    }
}

}  // namespace detail

// Parses a family from DSL text. For penta the text holds the expressions
// for a, b, c and optionally d separated by ';'. When d is omitted it is
// derived as d_n = a_n*b_n - c_n, which makes the biorthogonality identity
// hold by construction; when all four are given the identity is validated
// on a probe window.
inline CoefficientFamily parse_family(const std::string& text, FamilyKind kind) {
    if (kind == FamilyKind::lw) {
        FamilyExpr e = parse_expr(text);
        auto fam = CoefficientFamily::lw_from_fn(detail::fn_from_expr(e),
                                                 "lw:" + e.str(), std::nullopt,
                                                 {e.str()}, false);
        detail::probe_lw_nonzero(fam);
        return fam;
    }

    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t sep = text.find(';', start);
        if (sep == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, sep - start));
        start = sep + 1;
    }
    if (parts.size() != 3 && parts.size() != 4)
        throw ParseError("penta family needs 3 or 4 ';'-separated expressions", 0);

    std::vector<FamilyExpr> exprs;
    for (const auto& p : parts) exprs.push_back(parse_expr(p));

    bool derived_d = parts.size() == 3;
    if (derived_d) {
        // d := a*b - c
        exprs.push_back(FamilyExpr::make_binary(
            FamilyExpr::Node::sub,
            FamilyExpr::make_binary(FamilyExpr::Node::mul, exprs[0], exprs[1]),
            exprs[2]));
    }

    std::vector<std::string> sources;
    for (const auto& e : exprs) sources.push_back(e.str());
    std::string label = "penta:" + sources[0] + ";" + sources[1] + ";" + sources[2];

    auto fam = CoefficientFamily::penta_from_fn(
        detail::fn_from_expr(exprs[0]), detail::fn_from_expr(exprs[1]),
        detail::fn_from_expr(exprs[2]), detail::fn_from_expr(exprs[3]),
        std::move(label), std::nullopt, std::move(sources), false);
    if (!derived_d) detail::probe_penta_constraint(fam);
    return fam;
}

inline CoefficientFamily make_penta_family(const std::string& a, const std::string& b,
                                           const std::string& c,
                                           const std::optional<std::string>& d = std::nullopt) {
    std::string text = a + ";" + b + ";" + c;
    if (d) text += ";" + *d;
    return parse_family(text, FamilyKind::penta);
}

// Built-in families with exact summability facts attached.
//   lw_linear          a_n = n
//   lw_geometric2      a_n = 2^n
//   lw_paired_squares  a_{2k-1} = a_{2k} = k^2
//   penta_unit         a = b = 1, c = d = 1/2
//   penta_geometric    a = b = 2^n, c = d = 2^(2n-1)
inline CoefficientFamily builtin_family(const std::string& name) {
    if (name == "lw_linear") {
        SummabilityFacts facts;
        facts.recip_a_in_l1 = false;  // harmonic series diverges
        facts.mu_in_l2 = false;       // mu_n^2 ~ c/n
        return CoefficientFamily::lw_from_fn(
            detail::fn_from_expr(parse_expr("n")), "lw_linear", facts, {"n"}, true);
    }
    if (name == "lw_geometric2") {
        SummabilityFacts facts;
        facts.recip_a_in_l1 = true;  // geometric series
        facts.mu_in_l2 = true;       // mu_n = 2^{-ceil(n/2)}
        return CoefficientFamily::lw_from_fn(
            detail::fn_from_expr(parse_expr("2^n")), "lw_geometric2", facts,
            {"2^n"}, true);
    }
    if (name == "lw_paired_squares") {
        SummabilityFacts facts;
        facts.recip_a_in_l1 = true;  // 2 * sum 1/k^2
        facts.mu_in_l2 = false;      // mu_{2m} = 1 for all m
        CoefficientFamily::ScalarFn fn{
            [](long long n) -> Rational {
                long long k = (n + 1) / 2;
                return Rational(BigInt(k) * BigInt(k));
            },
            [](long long n) -> double {
                double k = static_cast<double>((n + 1) / 2);
                return k * k;
            },
        };
        return CoefficientFamily::lw_from_fn(std::move(fn), "lw_paired_squares",
                                             facts, {}, true);
    }
    if (name == "penta_unit") {
        SummabilityFacts facts;
        facts.mu_penta_in_l1 = false;  // mu_n = 2 for all n
        return CoefficientFamily::penta_from_fn(
            detail::fn_from_expr(parse_expr("1")), detail::fn_from_expr(parse_expr("1")),
            detail::fn_from_expr(parse_expr("1/2")), detail::fn_from_expr(parse_expr("1/2")),
            "penta_unit", facts, {"1", "1", "1/2", "1/2"}, true);
    }
    if (name == "penta_geometric") {
        SummabilityFacts facts;
        facts.mu_penta_in_l1 = true;  // mu_n = 2^{1-n} for n >= 1
        return CoefficientFamily::penta_from_fn(
            detail::fn_from_expr(parse_expr("2^n")),
            detail::fn_from_expr(parse_expr("2^n")),
            detail::fn_from_expr(parse_expr("2^(2*n-1)")),
            detail::fn_from_expr(parse_expr("2^(2*n-1)")),
            "penta_geometric", facts, {"2^n", "2^n", "2^(2*n-1)", "2^(2*n-1)"},
            true);
    }
    throw Error("unknown builtin family '" + name + "'");
}

inline const std::vector<std::string>& builtin_family_names() {
    static const std::vector<std::string> names = {
        "lw_linear", "lw_geometric2", "lw_paired_squares", "penta_unit",
        "penta_geometric"};
    return names;
}

// a_n = n^p over doubles; exact evaluation only exists for integer p.
// Used by the CLI parameter sweep.
inline CoefficientFamily power_family(double p) {
    CoefficientFamily::ScalarFn fn;
    fn.approx = [p](long long n) { return std::pow(static_cast<double>(n), p); };
    if (p == static_cast<long long>(p)) {
        long long pi = static_cast<long long>(p);
        fn.exact = [pi](long long n) { return int_pow(Rational(n), pi); };
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", p);
    return CoefficientFamily::lw_from_fn(std::move(fn), std::string("lw_pow_p=") + buf,
                                         std::nullopt, {}, false);
}

}  // namespace banddensity

#endif  // BANDDENSITY_FAMILY_HPP_
