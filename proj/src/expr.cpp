#include "templab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace templab {
namespace {

struct Const final : Expr {
    double v;
    explicit Const(double x) : v(x) {}
    double eval(const Eigen::VectorXd&) const override { return v; }
};

struct Var final : Expr {
    int idx; // 0-based
    explicit Var(int i) : idx(i) {}
    double eval(const Eigen::VectorXd& u) const override { return u[idx]; }
};

struct Neg final : Expr {
    ExprPtr a;
    explicit Neg(ExprPtr x) : a(std::move(x)) {}
    double eval(const Eigen::VectorXd& u) const override { return -a->eval(u); }
};

enum class BinOp { Add, Sub, Mul, Div, Pow };

struct Bin final : Expr {
    BinOp op;
    ExprPtr a, b;
    Bin(BinOp o, ExprPtr x, ExprPtr y) : op(o), a(std::move(x)), b(std::move(y)) {}
    double eval(const Eigen::VectorXd& u) const override {
        double x = a->eval(u), y = b->eval(u);
        switch (op) {
            case BinOp::Add: return x + y;
            case BinOp::Sub: return x - y;
            case BinOp::Mul: return x * y;
            case BinOp::Div: return x / y;
            case BinOp::Pow: return std::pow(x, y);
        }
        return 0.0;
    }
};

struct Exp final : Expr {
    ExprPtr a;
    explicit Exp(ExprPtr x) : a(std::move(x)) {}
    double eval(const Eigen::VectorXd& u) const override { return std::exp(a->eval(u)); }
};

class Parser {
public:
    Parser(const std::string& text, int n, const std::string& where)
        : s_(text), n_(n), where_(where) {}

    ExprPtr parse() {
        ExprPtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& s_;
    int n_;
    const std::string& where_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        std::string ctx = where_.empty() ? "" : where_ + ": ";
        throw ParseError(ctx + msg + " at line 1, column " + std::to_string(pos_ + 1) +
                         " in \"" + s_ + "\"");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    ExprPtr expr() {
        ExprPtr e = term();
        for (;;) {
            if (eat('+')) e = std::make_shared<Bin>(BinOp::Add, e, term());
            else if (eat('-')) e = std::make_shared<Bin>(BinOp::Sub, e, term());
            else return e;
        }
    }

    ExprPtr term() {
        ExprPtr e = factor();
        for (;;) {
            if (eat('*')) e = std::make_shared<Bin>(BinOp::Mul, e, factor());
            else if (eat('/')) e = std::make_shared<Bin>(BinOp::Div, e, factor());
            else return e;
        }
    }

    ExprPtr factor() {
        if (eat('-')) return std::make_shared<Neg>(factor());
        if (eat('+')) return factor();
        return power();
    }

    ExprPtr power() {
        ExprPtr base = atom();
        if (eat('^')) return std::make_shared<Bin>(BinOp::Pow, base, factor());
        return base;
    }

    ExprPtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    ExprPtr number() {
        size_t start = pos_;
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) {
            pos_ = start;
            fail("malformed number");
        }
        pos_ += static_cast<size_t>(end - begin);
        return std::make_shared<Const>(v);
    }

    ExprPtr ident() {
        size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (name == "u") {
            size_t dstart = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ == dstart) {
                pos_ = start;
                fail("state component needs an index (u1..u" + std::to_string(n_) + ")");
            }
            int idx = std::atoi(s_.substr(dstart, pos_ - dstart).c_str());
            if (idx < 1 || idx > n_) {
                pos_ = start;
                fail("state component u" + std::to_string(idx) + " out of range (n=" +
                     std::to_string(n_) + ")");
            }
            return std::make_shared<Var>(idx - 1);
        }
        if (name == "exp") {
            if (!eat('(')) fail("expected '(' after exp");
            ExprPtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return std::make_shared<Exp>(e);
        }
        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }
};

} // namespace

ExprPtr parse_expr(const std::string& text, int n, const std::string& where) {
    return Parser(text, n, where).parse();
}

} // namespace templab
