#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sturmslater/errors.hpp"

namespace sturmslater {

// ---------------------------------------------------------------------------
// Expression trees for the potential q(x).
//
// Grammar (whitespace ignored, '+'/'-' and '*'/'/' left-associative):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' uint)?
//   atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
//   func   := 'sin' | 'cos' | 'exp'
// ---------------------------------------------------------------------------

enum class ExprKind {
    Constant,
    Variable,
    Negate,
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // integer exponent >= 0
    Sin,
    Cos,
    Exp,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node. Children are shared, so derivative towers reuse
/// subtrees instead of copying them.
struct Expr {
    ExprKind kind;
    double value = 0.0;  // Constant payload
    int exponent = 0;    // Pow payload
    ExprPtr a, b;

    static ExprPtr constant(double v) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Constant;
        e->value = v;
        return e;
    }
    static ExprPtr variable() {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Variable;
        return e;
    }
    static ExprPtr unary(ExprKind k, ExprPtr child) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->a = std::move(child);
        return e;
    }
    static ExprPtr binary(ExprKind k, ExprPtr lhs, ExprPtr rhs) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->a = std::move(lhs);
        e->b = std::move(rhs);
        return e;
    }
    static ExprPtr power(ExprPtr base, int n) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Pow;
        e->a = std::move(base);
        e->exponent = n;
        return e;
    }
};

/// Recursive 64-bit float evaluation. Throws EvalDomainError on division by
/// zero or any non-finite intermediate.
inline double evaluate(const Expr& e, double x) {
    double r = 0.0;
    switch (e.kind) {
        case ExprKind::Constant: r = e.value; break;
        case ExprKind::Variable: r = x; break;
        case ExprKind::Negate: r = -evaluate(*e.a, x); break;
        case ExprKind::Add: r = evaluate(*e.a, x) + evaluate(*e.b, x); break;
        case ExprKind::Sub: r = evaluate(*e.a, x) - evaluate(*e.b, x); break;
        case ExprKind::Mul: r = evaluate(*e.a, x) * evaluate(*e.b, x); break;
        case ExprKind::Div: {
            const double den = evaluate(*e.b, x);
            if (den == 0.0) throw EvalDomainError("division by zero");
            r = evaluate(*e.a, x) / den;
            break;
        }
        case ExprKind::Pow: {
            const double base = evaluate(*e.a, x);
            if (e.exponent <= 64) {
                r = 1.0;
                for (int i = 0; i < e.exponent; ++i) r *= base;
            } else {
                r = std::pow(base, static_cast<double>(e.exponent));
            }
            break;
        }
        case ExprKind::Sin: r = std::sin(evaluate(*e.a, x)); break;
        case ExprKind::Cos: r = std::cos(evaluate(*e.a, x)); break;
        case ExprKind::Exp: r = std::exp(evaluate(*e.a, x)); break;
    }
    if (!std::isfinite(r)) throw EvalDomainError("non-finite intermediate value");
    return r;
}

inline double evaluate(const ExprPtr& e, double x) { return evaluate(*e, x); }

namespace detail {

inline bool is_const(const ExprPtr& e, double v) {
    return e->kind == ExprKind::Constant && e->value == v;
}

/// Builders with literal folding: a node whose children are all constants is
/// collapsed to a constant, provided the collapsed value is finite.
inline ExprPtr fold(ExprPtr e) {
    const bool a_const = !e->a || e->a->kind == ExprKind::Constant;
    const bool b_const = !e->b || e->b->kind == ExprKind::Constant;
    if (e->kind != ExprKind::Constant && e->kind != ExprKind::Variable && a_const && b_const) {
        try {
            return Expr::constant(evaluate(*e, 0.0));
        } catch (const EvalDomainError&) {
            return e;  // keep the tree; evaluation will report the fault
        }
    }
    return e;
}

inline ExprPtr neg(ExprPtr a) {
    if (is_const(a, 0.0)) return a;
    return fold(Expr::unary(ExprKind::Negate, std::move(a)));
}
inline ExprPtr add(ExprPtr a, ExprPtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return fold(Expr::binary(ExprKind::Add, std::move(a), std::move(b)));
}
inline ExprPtr sub(ExprPtr a, ExprPtr b) {
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(std::move(b));
    return fold(Expr::binary(ExprKind::Sub, std::move(a), std::move(b)));
}
inline ExprPtr mul(ExprPtr a, ExprPtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return fold(Expr::binary(ExprKind::Mul, std::move(a), std::move(b)));
}
inline ExprPtr div(ExprPtr a, ExprPtr b) {
    if (is_const(a, 0.0)) return a;
    if (is_const(b, 1.0)) return a;
    return fold(Expr::binary(ExprKind::Div, std::move(a), std::move(b)));
}
inline ExprPtr pow(ExprPtr a, int n) {
    if (n == 0) return Expr::constant(1.0);
    if (n == 1) return a;
    return fold(Expr::power(std::move(a), n));
}

}  // namespace detail

/// Exact symbolic derivative. No simplification guarantees beyond constant
/// folding of literal subtrees.
inline ExprPtr differentiate(const ExprPtr& e) {
    using namespace detail;
    switch (e->kind) {
        case ExprKind::Constant: return Expr::constant(0.0);
        case ExprKind::Variable: return Expr::constant(1.0);
        case ExprKind::Negate: return neg(differentiate(e->a));
        case ExprKind::Add: return add(differentiate(e->a), differentiate(e->b));
        case ExprKind::Sub: return sub(differentiate(e->a), differentiate(e->b));
        case ExprKind::Mul:
            return add(mul(differentiate(e->a), e->b), mul(e->a, differentiate(e->b)));
        case ExprKind::Div:
            // (u/v)' = (u'v - uv') / v^2
            return div(sub(mul(differentiate(e->a), e->b), mul(e->a, differentiate(e->b))),
                       pow(e->b, 2));
        case ExprKind::Pow:
            if (e->exponent == 0) return Expr::constant(0.0);
            return mul(mul(Expr::constant(static_cast<double>(e->exponent)),
                           pow(e->a, e->exponent - 1)),
                       differentiate(e->a));
        case ExprKind::Sin: return mul(Expr::unary(ExprKind::Cos, e->a), differentiate(e->a));
        case ExprKind::Cos:
            return neg(mul(Expr::unary(ExprKind::Sin, e->a), differentiate(e->a)));
        case ExprKind::Exp: return mul(Expr::unary(ExprKind::Exp, e->a), differentiate(e->a));
    }
    throw std::logic_error("unreachable expression kind");
}

/// Round-trippable printer: parse(to_string(e)) evaluates identically to e.
inline std::string to_string(const ExprPtr& e) {
    auto paren = [](const std::string& s) { return "(" + s + ")"; };
    switch (e->kind) {
        case ExprKind::Constant: {
            // A leading '-' re-parses as unary minus; evaluation is unchanged.
            char buf[40];
            auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), e->value,
                                         std::chars_format::general, 17);
            return std::string(buf, p);
        }
        case ExprKind::Variable: return "x";
        case ExprKind::Negate: return "-" + paren(to_string(e->a));
        case ExprKind::Add: return paren(to_string(e->a) + " + " + to_string(e->b));
        case ExprKind::Sub: return paren(to_string(e->a) + " - " + to_string(e->b));
        case ExprKind::Mul: return paren(to_string(e->a) + " * " + to_string(e->b));
        case ExprKind::Div: return paren(to_string(e->a) + " / " + to_string(e->b));
        case ExprKind::Pow: return paren(to_string(e->a)) + "^" + std::to_string(e->exponent);
        case ExprKind::Sin: return "sin" + paren(to_string(e->a));
        case ExprKind::Cos: return "cos" + paren(to_string(e->a));
        case ExprKind::Exp: return "exp" + paren(to_string(e->a));
    }
    throw std::logic_error("unreachable expression kind");
}

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprPtr parse() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError(pos_, "an expression");
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ < src_.size()) throw SyntaxError(pos_, "end of input or an operator");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        for (;;) {
            const char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            ExprPtr rhs = parse_term();
            lhs = Expr::binary(c == '+' ? ExprKind::Add : ExprKind::Sub, std::move(lhs),
                               std::move(rhs));
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_factor();
        for (;;) {
            const char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            ExprPtr rhs = parse_factor();
            lhs = Expr::binary(c == '*' ? ExprKind::Mul : ExprKind::Div, std::move(lhs),
                               std::move(rhs));
        }
    }

    ExprPtr parse_factor() {
        if (peek() == '-') {
            ++pos_;
            return Expr::unary(ExprKind::Negate, parse_factor());
        }
        ExprPtr base = parse_atom();
        if (peek() == '^') {
            ++pos_;
            return Expr::power(std::move(base), parse_uint());
        }
        return base;
    }

    int parse_uint() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ == start) throw SyntaxError(start, "a nonnegative integer exponent");
        int n = 0;
        auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, n);
        if (ec != std::errc{}) throw SyntaxError(start, "an exponent within int range");
        return n;
    }

    ExprPtr parse_atom() {
        const char c = peek();
        if (c == '\0') throw SyntaxError(pos_, "a number, 'x', a function, or '('");
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            const std::string_view name = src_.substr(start, pos_ - start);
            if (name == "x") return Expr::variable();
            ExprKind k;
            if (name == "sin") k = ExprKind::Sin;
            else if (name == "cos") k = ExprKind::Cos;
            else if (name == "exp") k = ExprKind::Exp;
            else throw SyntaxError(start, "'x', 'sin', 'cos', or 'exp'");
            expect('(');
            ExprPtr arg = parse_expr();
            expect(')');
            return Expr::unary(k, std::move(arg));
        }
        throw SyntaxError(pos_, "a number, 'x', a function, or '('");
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        double v = 0.0;
        auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + src_.size(), v);
        if (ec != std::errc{} || p == src_.data() + start)
            throw SyntaxError(start, "a numeric literal");
        pos_ = static_cast<std::size_t>(p - src_.data());
        return Expr::constant(v);
    }

    void expect(char c) {
        if (peek() != c) throw SyntaxError(pos_, std::string("'") + c + "'");
        ++pos_;
    }
};

}  // namespace detail

inline ExprPtr parse_expression(std::string_view src) { return detail::Parser(src).parse(); }

/// A parsed potential q(x) together with its symbolic derivatives. Derivative
/// order m is built on first request and cached; the cache is shared between
/// copies and guarded by a mutex, so a Potential behaves as an immutable value
/// that is safe to evaluate from multiple threads.
class Potential {
public:
    /// Parses src and probes q on 257 uniform points spanning [-0.05, 1.05];
    /// a pole or overflow near the working interval fails fast here.
    static Potential parse(std::string src) {
        if (src.empty()) throw SyntaxError(0, "a nonempty expression");
        Potential p;
        p.cache_ = std::make_shared<Cache>();
        p.cache_->source = std::move(src);
        p.cache_->derivatives.push_back(parse_expression(p.cache_->source));
        for (int i = 0; i <= 256; ++i) {
            const double x = -0.05 + 1.1 * static_cast<double>(i) / 256.0;
            evaluate(p.cache_->derivatives[0], x);  // throws EvalDomainError at a probe fault
        }
        return p;
    }

    const std::string& source() const { return cache_->source; }

    double operator()(double x) const { return evaluate(cache_->derivatives[0], x); }

    /// Evaluates the m-th symbolic derivative q^{(m)} at x.
    double derivative(int order, double x) const { return evaluate(ast(order), x); }

    /// The m-th derivative tree (order 0 is q itself).
    ExprPtr ast(int order = 0) const {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto& d = cache_->derivatives;
        while (static_cast<int>(d.size()) <= order) d.push_back(differentiate(d.back()));
        return d[static_cast<std::size_t>(order)];
    }

private:
    struct Cache {
        std::string source;
        std::mutex mu;
        std::vector<ExprPtr> derivatives;
    };
    std::shared_ptr<Cache> cache_;
};

}  // namespace sturmslater
