#pragma once

// Small arithmetic expression language for right-hand sides, delays and
// exact solutions supplied in config files.
//
//   expr    := term   { ('+' | '-') term }
//   term    := unary  { ('*' | '/') unary }
//   unary   := '-' unary | power
//   power   := primary [ '^' unary ]          (right-associative)
//   primary := number | constant | variable | call | '(' expr ')'
//   call    := function '(' expr { ',' expr } ')'

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fbvp/error.hpp"

namespace fbvp {

/// Argument slots of the right-hand side f(t, u, ubar, y, ybar, v, vbar, z, zbar).
enum class Var : int { t = 0, u, ubar, y, ybar, v, vbar, z, zbar };

inline constexpr std::size_t kVarCount = 9;

inline constexpr std::array<std::string_view, kVarCount> kVarNames = {
    "t", "u", "ubar", "y", "ybar", "v", "vbar", "z", "zbar"};

/// Values in Var order.
using Arguments = std::array<double, kVarCount>;

inline constexpr std::array<std::string_view, 2> kConstantNames = {"e", "pi"};

enum class Func { Sin, Cos, Tan, Exp, Ln, Sqrt, Abs, Pow, Min, Max };

struct FuncInfo {
    std::string_view name;
    Func func;
    int arity;
};

inline constexpr std::array<FuncInfo, 10> kFunctions = {{
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
    {"tan", Func::Tan, 1},
    {"exp", Func::Exp, 1},
    {"ln", Func::Ln, 1},
    {"sqrt", Func::Sqrt, 1},
    {"abs", Func::Abs, 1},
    {"pow", Func::Pow, 2},
    {"min", Func::Min, 2},
    {"max", Func::Max, 2},
}};

/// Syntax error at a byte offset, with the set of tokens that would have been accepted.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset, std::vector<std::string> expected)
        : Error(format(what, offset, expected)), message_(what), offset_(offset),
          expected_(std::move(expected)) {}

    /// The same error with `context` prepended to the description.
    ParseError with_context(const std::string& context) const {
        return ParseError(context + message_, offset_, expected_);
    }

    const std::string& message() const noexcept { return message_; }
    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    static std::string format(const std::string& what, std::size_t offset,
                              const std::vector<std::string>& expected) {
        std::string msg = what + " at offset " + std::to_string(offset);
        if (!expected.empty()) {
            msg += "; expected one of:";
            for (const auto& e : expected) msg += " " + e;
        }
        return msg;
    }

    std::string message_;
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(const std::string& name, std::size_t offset, std::vector<std::string> allowed)
        : Error(format(name, offset, allowed)), name_(name), offset_(offset),
          allowed_(std::move(allowed)) {}

    const std::string& name() const noexcept { return name_; }
    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& allowed() const noexcept { return allowed_; }

private:
    static std::string format(const std::string& name, std::size_t offset,
                              const std::vector<std::string>& allowed) {
        std::string msg = "unknown identifier '" + name + "' at offset " + std::to_string(offset) +
                          "; allowed:";
        for (const auto& a : allowed) msg += " " + a;
        return msg;
    }

    std::string name_;
    std::size_t offset_;
    std::vector<std::string> allowed_;
};

/// Variable bindings for Expr::evaluate.
class EvalContext {
public:
    EvalContext() = default;

    /// All nine slots bound.
    explicit EvalContext(const Arguments& values) : values_(values) { bound_.fill(true); }

    /// Only t bound; used for delays and exact solutions.
    static EvalContext time(double t) {
        EvalContext ctx;
        ctx.bind(Var::t, t);
        return ctx;
    }

    EvalContext& bind(Var var, double value) {
        values_[static_cast<std::size_t>(var)] = value;
        bound_[static_cast<std::size_t>(var)] = true;
        return *this;
    }

    bool is_bound(Var var) const { return bound_[static_cast<std::size_t>(var)]; }
    double value(Var var) const { return values_[static_cast<std::size_t>(var)]; }

private:
    Arguments values_{};
    std::array<bool, kVarCount> bound_{};
};

/// Immutable expression tree; copies share nodes.
class Expr {
public:
    struct Constant {
        double value;
        std::string_view name; // empty for literals
    };
    struct Variable {
        Var var;
    };
    struct Negate {
        std::shared_ptr<const Expr> operand;
    };
    struct Binary {
        char op; // one of + - * / ^
        std::shared_ptr<const Expr> lhs, rhs;
    };
    struct Call {
        Func func;
        std::string_view name;
        std::vector<std::shared_ptr<const Expr>> args;
    };
    using Node = std::variant<Constant, Variable, Negate, Binary, Call>;

    explicit Expr(Node node) : node_(std::move(node)) {}

    static Expr parse(std::string_view source);

    const Node& node() const noexcept { return node_; }

    double evaluate(const EvalContext& ctx) const;

    double evaluate(const Arguments& args) const { return evaluate(EvalContext(args)); }

    std::set<std::string> free_variables() const {
        std::set<std::string> out;
        collect(out);
        return out;
    }

    /// Dependency mask in Var order.
    std::array<bool, kVarCount> dependency_mask() const {
        std::array<bool, kVarCount> mask{};
        for (const auto& name : free_variables()) {
            for (std::size_t i = 0; i < kVarCount; ++i) {
                if (kVarNames[i] == name) mask[i] = true;
            }
        }
        return mask;
    }

    /// Canonical text: minimal parentheses, literals at 17 significant digits.
    std::string to_string() const { return print(0); }

private:
    // binding strength used by the printer
    enum Prec { kAdd = 1, kMul = 2, kUnary = 3, kPow = 4, kAtom = 5 };

    int precedence() const {
        if (const auto* b = std::get_if<Binary>(&node_)) {
            switch (b->op) {
            case '+':
            case '-': return kAdd;
            case '*':
            case '/': return kMul;
            default: return kPow;
            }
        }
        if (std::holds_alternative<Negate>(node_)) return kUnary;
        return kAtom;
    }

    std::string print(int min_prec) const;
    void collect(std::set<std::string>& out) const;

    Node node_;
};

namespace detail {

inline std::string format_literal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class ExprParser {
public:
    explicit ExprParser(std::string_view src) : src_(src) {}

    Expr parse_all() {
        skip_ws();
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) {
            throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_,
                             {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
        }
        return e;
    }

private:
    static constexpr int kMaxDepth = 200;

    using Ptr = std::shared_ptr<const Expr>;

    static Ptr share(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    struct DepthGuard {
        explicit DepthGuard(ExprParser& p) : p(p) {
            if (++p.depth_ > kMaxDepth) {
                throw ParseError("expression nested too deeply", p.pos_, {});
            }
        }
        ~DepthGuard() { --p.depth_; }
        ExprParser& p;
    };

    Expr parse_expr() {
        DepthGuard guard(*this);
        Expr lhs = parse_term();
        for (;;) {
            char op = 0;
            if (accept('+')) op = '+';
            else if (accept('-')) op = '-';
            else return lhs;
            Expr rhs = parse_term();
            lhs = Expr(Expr::Binary{op, share(std::move(lhs)), share(std::move(rhs))});
        }
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        for (;;) {
            char op = 0;
            if (accept('*')) op = '*';
            else if (accept('/')) op = '/';
            else return lhs;
            Expr rhs = parse_unary();
            lhs = Expr(Expr::Binary{op, share(std::move(lhs)), share(std::move(rhs))});
        }
    }

    Expr parse_unary() {
        DepthGuard guard(*this);
        if (accept('-')) return Expr(Expr::Negate{share(parse_unary())});
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (accept('^')) {
            Expr exponent = parse_unary();
            return Expr(Expr::Binary{'^', share(std::move(base)), share(std::move(exponent))});
        }
        return base;
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) {
            throw ParseError("unexpected end of input", pos_, primary_expected());
        }
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = parse_expr();
            if (!accept(')')) throw ParseError("missing ')'", pos_, {"')'"});
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_, primary_expected());
    }

    static std::vector<std::string> primary_expected() {
        return {"number", "identifier", "'('", "'-'"};
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t n = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) throw ParseError("malformed number", start, {"digit"});
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            // only an exponent if digits follow; otherwise leave 'e' for the next token
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                digits();
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        const double value = std::strtod(text.c_str(), nullptr);
        if (!std::isfinite(value)) throw ParseError("numeric literal out of range", start, {});
        return Expr(Expr::Constant{value, {}});
    }

    static std::vector<std::string> allowed_names() {
        std::vector<std::string> out;
        for (auto n : kVarNames) out.emplace_back(n);
        for (auto n : kConstantNames) out.emplace_back(n);
        for (const auto& f : kFunctions) out.emplace_back(f.name);
        return out;
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = src_.substr(start, pos_ - start);

        for (const auto& f : kFunctions) {
            if (f.name != name) continue;
            if (!accept('(')) throw ParseError("function '" + std::string(name) + "' needs arguments", pos_, {"'('"});
            Expr::Call call{f.func, f.name, {}};
            call.args.push_back(share(parse_expr()));
            while (accept(',')) call.args.push_back(share(parse_expr()));
            if (!accept(')')) throw ParseError("missing ')' after arguments", pos_, {"','", "')'"});
            if (static_cast<int>(call.args.size()) != f.arity) {
                throw ParseError("function '" + std::string(name) + "' takes " +
                                     std::to_string(f.arity) + " argument(s), got " +
                                     std::to_string(call.args.size()),
                                 start, {});
            }
            return Expr(std::move(call));
        }
        for (std::size_t i = 0; i < kVarCount; ++i) {
            if (kVarNames[i] == name) return Expr(Expr::Variable{static_cast<Var>(i)});
        }
        if (name == "e") return Expr(Expr::Constant{std::numbers::e, kConstantNames[0]});
        if (name == "pi") return Expr(Expr::Constant{std::numbers::pi, kConstantNames[1]});
        throw UnknownIdentifier(std::string(name), start, allowed_names());
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

} // namespace detail

inline Expr Expr::parse(std::string_view source) { return detail::ExprParser(source).parse_all(); }

inline std::string Expr::print(int min_prec) const {
    const int prec = precedence();
    std::string body = std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return n.name.empty() ? detail::format_literal(n.value) : std::string(n.name);
            } else if constexpr (std::is_same_v<T, Variable>) {
                return std::string(kVarNames[static_cast<std::size_t>(n.var)]);
            } else if constexpr (std::is_same_v<T, Negate>) {
                return "-" + n.operand->print(kUnary);
            } else if constexpr (std::is_same_v<T, Binary>) {
                if (n.op == '^') return n.lhs->print(kAtom) + "^" + n.rhs->print(kUnary);
                const int p = (n.op == '+' || n.op == '-') ? kAdd : kMul;
                return n.lhs->print(p) + " " + n.op + " " + n.rhs->print(p + 1);
            } else {
                std::string s(n.name);
                s += "(";
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i) s += ", ";
                    s += n.args[i]->print(0);
                }
                return s + ")";
            }
        },
        node_);
    return prec < min_prec ? "(" + body + ")" : body;
}

inline void Expr::collect(std::set<std::string>& out) const {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Variable>) {
                out.emplace(kVarNames[static_cast<std::size_t>(n.var)]);
            } else if constexpr (std::is_same_v<T, Negate>) {
                n.operand->collect(out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                n.lhs->collect(out);
                n.rhs->collect(out);
            } else if constexpr (std::is_same_v<T, Call>) {
                for (const auto& a : n.args) a->collect(out);
            }
        },
        node_);
}

inline double Expr::evaluate(const EvalContext& ctx) const {
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                if (!ctx.is_bound(n.var)) {
                    throw UnboundVariable(std::string(kVarNames[static_cast<std::size_t>(n.var)]));
                }
                return ctx.value(n.var);
            } else if constexpr (std::is_same_v<T, Negate>) {
                return -n.operand->evaluate(ctx);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const double a = n.lhs->evaluate(ctx);
                const double b = n.rhs->evaluate(ctx);
                switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/':
                    if (b == 0.0) throw MathDomainError("division by zero", to_string());
                    return a / b;
                default:
                    if (a < 0.0 && b != std::floor(b)) {
                        throw MathDomainError("negative base " + detail::format_literal(a) +
                                                  " with non-integer exponent",
                                              to_string());
                    }
                    if (a == 0.0 && b < 0.0) throw MathDomainError("zero to a negative power", to_string());
                    return std::pow(a, b);
                }
            } else {
                const double x = n.args[0]->evaluate(ctx);
                switch (n.func) {
                case Func::Sin: return std::sin(x);
                case Func::Cos: return std::cos(x);
                case Func::Tan: return std::tan(x);
                case Func::Exp: return std::exp(x);
                case Func::Ln:
                    if (x <= 0.0) throw MathDomainError("logarithm of non-positive value", to_string());
                    return std::log(x);
                case Func::Sqrt:
                    if (x < 0.0) throw MathDomainError("square root of negative value", to_string());
                    return std::sqrt(x);
                case Func::Abs: return std::abs(x);
                case Func::Pow: {
                    const double y = n.args[1]->evaluate(ctx);
                    if (x < 0.0 && y != std::floor(y)) {
                        throw MathDomainError("negative base with non-integer exponent", to_string());
                    }
                    if (x == 0.0 && y < 0.0) throw MathDomainError("zero to a negative power", to_string());
                    return std::pow(x, y);
                }
                case Func::Min: return std::min(x, n.args[1]->evaluate(ctx));
                case Func::Max: return std::max(x, n.args[1]->evaluate(ctx));
                }
                return x;
            }
        },
        node_);
}

} // namespace fbvp
