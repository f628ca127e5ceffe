#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "fbvp/expr.hpp"
#include "fbvp/registry.hpp"

using namespace fbvp;

namespace {

Arguments args_of(double t, double u = 0, double ubar = 0, double y = 0, double ybar = 0, double v = 0,
                  double vbar = 0, double z = 0, double zbar = 0) {
    return {t, u, ubar, y, ybar, v, vbar, z, zbar};
}

// Random expression text over the full grammar.
class ExprGen {
public:
    explicit ExprGen(std::uint64_t seed) : rng_(seed) {}

    std::string operator()(int depth = 0) {
        const int pick = depth > 5 ? int(roll(3)) : int(roll(9));
        switch (pick) {
        case 0: return std::to_string(roll(100));
        case 1: return std::string(kVarNames[roll(kVarCount)]);
        case 2: return roll(2) ? "e" : "pi";
        case 3: return "-" + (*this)(depth + 1);
        case 4: return "(" + (*this)(depth + 1) + ")";
        case 5: {
            static constexpr const char* ops[] = {" + ", " - ", " * ", " / ", "^"};
            return (*this)(depth + 1) + ops[roll(5)] + (*this)(depth + 1);
        }
        case 6: {
            const auto& f = kFunctions[roll(kFunctions.size())];
            std::string s(f.name);
            s += "(" + (*this)(depth + 1);
            for (int i = 1; i < f.arity; ++i) s += ", " + (*this)(depth + 1);
            return s + ")";
        }
        case 7: return std::to_string(roll(1000)) + "." + std::to_string(roll(1000)) + "e-" + std::to_string(roll(5));
        default: return (*this)(depth + 1) + " * " + (*this)(depth + 1);
        }
    }

private:
    std::size_t roll(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    std::mt19937_64 rng_;
};

} // namespace

TEST(Expr, ExampleFourTerms) {
    const Expr e = Expr::parse("t^2 - u/4 + ubar^2/4");
    EXPECT_EQ(e.to_string(), "t^2 - u / 4 + ubar^2 / 4");
    EXPECT_DOUBLE_EQ(e.evaluate(args_of(0.5, 2, 3)), 0.25 - 0.5 + 2.25);
}

TEST(Expr, Zero) {
    const Expr e = Expr::parse("0");
    EXPECT_EQ(e.evaluate(EvalContext{}), 0.0);
    EXPECT_TRUE(e.free_variables().empty());
}

TEST(Expr, PowerIsRightAssociative) { EXPECT_EQ(Expr::parse("2^3^2").evaluate(EvalContext{}), 512.0); }

TEST(Expr, UnaryMinusBindsLooserThanPower) {
    EXPECT_EQ(Expr::parse("-t^2").evaluate(EvalContext::time(3)), -9.0);
    EXPECT_EQ(Expr::parse("(-t)^2").evaluate(EvalContext::time(3)), 9.0);
    EXPECT_EQ(Expr::parse("2^-1").evaluate(EvalContext{}), 0.5);
    EXPECT_EQ(Expr::parse("- 2 * 3").evaluate(EvalContext{}), -6.0);
    EXPECT_EQ(Expr::parse("8 / 2 / 2").evaluate(EvalContext{}), 2.0);
    EXPECT_EQ(Expr::parse("8 - 2 - 2").evaluate(EvalContext{}), 4.0);
}

TEST(Expr, ExampleTwoAtOrigin) {
    const Expr e = Expr::parse("exp(-t) * u^(3/2) * ubar");
    EXPECT_EQ(e.evaluate(args_of(0, 1, 1)), 1.0);
}

TEST(Expr, NamedConstants) {
    EXPECT_EQ(Expr::parse("pi").evaluate(EvalContext{}), std::numbers::pi);
    EXPECT_EQ(Expr::parse("e").evaluate(EvalContext{}), std::numbers::e);
    EXPECT_EQ(Expr::parse("2*e").evaluate(EvalContext{}), 2 * std::numbers::e);
    // no implicit multiplication
    EXPECT_THROW(Expr::parse("2e"), ParseError);
    EXPECT_EQ(Expr::parse("2e3").evaluate(EvalContext{}), 2000.0);
}

TEST(Expr, DelayExpression) { EXPECT_EQ(Expr::parse("t/2").evaluate(EvalContext::time(1)), 0.5); }

TEST(Expr, Functions) {
    const EvalContext c;
    EXPECT_DOUBLE_EQ(Expr::parse("sin(pi/2) + cos(0) + tan(0)").evaluate(c), 2.0);
    EXPECT_DOUBLE_EQ(Expr::parse("ln(exp(2))").evaluate(c), 2.0);
    EXPECT_DOUBLE_EQ(Expr::parse("sqrt(16) + abs(-3)").evaluate(c), 7.0);
    EXPECT_DOUBLE_EQ(Expr::parse("pow(2, 10) - max(1, 4) + min(1, 4)").evaluate(c), 1021.0);
}

TEST(Expr, FreeVariables) {
    using S = std::set<std::string>;
    EXPECT_EQ(Expr::parse("t^2 - u/4").free_variables(), (S{"t", "u"}));
    EXPECT_EQ(Expr::parse("3.5").free_variables(), S{});
    EXPECT_EQ(Expr::parse("ubar^2 * zbar - y*vbar + u*z - v^2").free_variables(),
              (S{"ubar", "zbar", "y", "vbar", "u", "z", "v"}));
}

TEST(Expr, DependencyMask) {
    const auto m = Expr::parse("u + zbar").dependency_mask();
    for (std::size_t i = 0; i < kVarCount; ++i) EXPECT_EQ(m[i], i == 1 || i == 8) << i;
}

TEST(ExprErrors, SyntaxErrorsCarryOffsetAndExpectedTokens) {
    try {
        Expr::parse("1 + * 2");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 4u);
        EXPECT_FALSE(e.expected().empty());
    }
    EXPECT_THROW(Expr::parse(""), ParseError);
    EXPECT_THROW(Expr::parse("(t"), ParseError);
    EXPECT_THROW(Expr::parse("t)"), ParseError);
    EXPECT_THROW(Expr::parse("sin t"), ParseError);
    EXPECT_THROW(Expr::parse("pow(1)"), ParseError);
    EXPECT_THROW(Expr::parse("1e999"), ParseError);
    EXPECT_THROW(Expr::parse(std::string(500, '(') + "1" + std::string(500, ')')), ParseError);
}

TEST(ExprErrors, UnknownIdentifierListsAllowedNames) {
    try {
        Expr::parse("w + 1");
        FAIL();
    } catch (const UnknownIdentifier& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("'w'"), std::string::npos) << msg;
        EXPECT_NE(msg.find("zbar"), std::string::npos) << msg;
        EXPECT_NE(msg.find("sqrt"), std::string::npos) << msg;
    }
}

TEST(ExprErrors, MathDomainErrorsNameTheSubexpression) {
    const EvalContext c = EvalContext(args_of(0, -1));
    try {
        Expr::parse("1 + u^(3/2)").evaluate(c);
        FAIL();
    } catch (const MathDomainError& e) {
        EXPECT_EQ(e.expression(), "u^(3 / 2)");
    }
    EXPECT_THROW(Expr::parse("1/t").evaluate(EvalContext::time(0)), MathDomainError);
    EXPECT_THROW(Expr::parse("ln(t)").evaluate(EvalContext::time(0)), MathDomainError);
    EXPECT_THROW(Expr::parse("sqrt(u)").evaluate(c), MathDomainError);
    EXPECT_THROW(Expr::parse("0^-1").evaluate(c), MathDomainError);
    EXPECT_EQ(Expr::parse("u^2").evaluate(c), 1.0);
}

TEST(ExprErrors, UnboundVariable) {
    EXPECT_THROW(Expr::parse("t + u").evaluate(EvalContext::time(0.5)), UnboundVariable);
}

// Invariants -------------------------------------------------------------

TEST(ExprInvariants, PrintParsePrintIsFixedPoint) {
    ExprGen gen(2024);
    for (int i = 0; i < 3000; ++i) {
        const std::string src = gen();
        const std::string once = Expr::parse(src).to_string();
        const std::string twice = Expr::parse(once).to_string();
        ASSERT_EQ(once, twice) << src;
    }
}

TEST(ExprInvariants, PrintingPreservesValue) {
    ExprGen gen(99);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.1, 2.0);
    for (int i = 0; i < 2000; ++i) {
        const Expr e = Expr::parse(gen());
        const Expr back = Expr::parse(e.to_string());
        Arguments a;
        for (auto& x : a) x = dist(rng);
        double v1 = 0, v2 = 0;
        bool t1 = false, t2 = false;
        try { v1 = e.evaluate(a); } catch (const MathDomainError&) { t1 = true; }
        try { v2 = back.evaluate(a); } catch (const MathDomainError&) { t2 = true; }
        ASSERT_EQ(t1, t2) << e.to_string();
        if (!t1 && !std::isnan(v1)) {
            ASSERT_EQ(v1, v2) << e.to_string();
        }
    }
}

TEST(ExprInvariants, ParserIsTotalOnFuzzedBytes) {
    std::mt19937_64 rng(17);
    const std::string alphabet = "0123456789.eE+-*/^(), tuvyzbarsinpqlxm\t\n#$\x01\xff";
    ExprGen gen(3);
    for (int i = 0; i < 20000; ++i) {
        std::string s;
        if (i % 2) {
            s = gen();
            // mutate a valid expression
            for (int k = 0; k < 3 && !s.empty(); ++k) {
                s[rng() % s.size()] = alphabet[rng() % alphabet.size()];
            }
        } else {
            const std::size_t len = rng() % 40;
            for (std::size_t k = 0; k < len; ++k) s += static_cast<char>(rng() % 256);
        }
        try {
            Expr::parse(s);
        } catch (const ParseError&) {
        } catch (const UnknownIdentifier&) {
        }
    }
}

TEST(ExprInvariants, DelayExpressionsReadOnlyTime) {
    for (const char* phi : {"t/2", "t^2", "t^2/2", "t^2/3", "t/4", "t"}) {
        const auto vars = Expr::parse(phi).free_variables();
        EXPECT_TRUE(vars.empty() || vars == std::set<std::string>{"t"}) << phi;
    }
}

TEST(ExprInvariants, ExpressionAgreesWithBuiltinClosures) {
    std::mt19937_64 rng(42);
    for (const auto& name : builtin_names()) {
        const Problem p = builtin(name);
        const Expr e = Expr::parse(p.f_source);
        EXPECT_EQ(e.dependency_mask(), p.depends) << name;
        std::uniform_real_distribution<double> tdist(0, 1), xdist(name == "example2" ? 0.0 : -3.0, 3.0);
        for (int i = 0; i < 1000; ++i) {
            Arguments a;
            a[0] = tdist(rng);
            for (std::size_t k = 1; k < kVarCount; ++k) a[k] = xdist(rng);
            const double closure = p.f(a);
            const double expr = e.evaluate(a);
            ASSERT_LE(std::abs(closure - expr), 1e-15 * std::max(1.0, std::abs(closure))) << name << " " << i;
        }
    }
}
