#include "czw/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace czw {

ParseError::ParseError(const std::string& msg, int column)
    : ConfigError("column " + std::to_string(column) + ": " + msg), column_(column) {}

double bump_profile(double x) {
    double q = x * x - 0.25;
    return q < 0 ? std::exp(1.0 / q) : 0.0;
}

struct Expression::Node {
    enum Kind { Number, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
    double value = 0;
    std::string fn;
    std::vector<std::shared_ptr<const Node>> kids;

    double eval(double x, double y) const {
        switch (kind) {
            case Number: return value;
            case VarX: return x;
            case VarY: return y;
            case Neg: return -kids[0]->eval(x, y);
            case Add: return kids[0]->eval(x, y) + kids[1]->eval(x, y);
            case Sub: return kids[0]->eval(x, y) - kids[1]->eval(x, y);
            case Mul: return kids[0]->eval(x, y) * kids[1]->eval(x, y);
            case Div: return kids[0]->eval(x, y) / kids[1]->eval(x, y);
            case Pow: return std::pow(kids[0]->eval(x, y), value);
            case Call: break;
        }
        double a = kids[0]->eval(x, y);
        if (fn == "exp") return std::exp(a);
        if (fn == "log") return std::log(a);
        if (fn == "sqrt") return std::sqrt(a);
        if (fn == "sin") return std::sin(a);
        if (fn == "cos") return std::cos(a);
        if (fn == "tan") return std::tan(a);
        if (fn == "tanh") return std::tanh(a);
        if (fn == "abs") return std::abs(a);
        if (fn == "bump") return bump_profile(a);
        double b = kids[1]->eval(x, y);
        if (fn == "min") return std::min(a, b);
        return std::max(a, b);
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

int arity_of(const std::string& name) {
    static const char* unary[] = {"exp", "log", "sqrt", "sin", "cos", "tan", "tanh", "abs", "bump"};
    for (const char* u : unary)
        if (name == u) return 1;
    if (name == "min" || name == "max") return 2;
    return -1;
}

class Parser {
public:
    Parser(std::string_view s, int dims) : s_(s), dims_(dims) {}

    NodePtr parse() {
        auto e = expr();
        skip();
        if (pos_ < s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
        return e;
    }

private:
    std::string_view s_;
    int dims_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, int(pos_) + 1); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, int(at) + 1); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    static NodePtr make(Expression::Node::Kind k, std::vector<NodePtr> kids = {}, double v = 0) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = k;
        n->kids = std::move(kids);
        n->value = v;
        return n;
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Expression::Node::Add, {lhs, term()});
            else if (accept('-')) lhs = make(Expression::Node::Sub, {lhs, term()});
            else return lhs;
        }
    }

    NodePtr term() {
        auto lhs = factor();
        for (;;) {
            if (accept('*')) lhs = make(Expression::Node::Mul, {lhs, factor()});
            else if (accept('/')) lhs = make(Expression::Node::Div, {lhs, factor()});
            else return lhs;
        }
    }

    NodePtr factor() {
        if (accept('-')) return make(Expression::Node::Neg, {factor()});
        if (accept('+')) return factor();
        auto base = atom();
        if (accept('^')) {
            skip();
            bool neg = false;
            if (accept('-')) neg = true;
            skip();
            double e = number_literal();
            base = make(Expression::Node::Pow, {base}, neg ? -e : e);
        }
        return base;
    }

    double number_literal() {
        skip();
        const char* begin = s_.data() + pos_;
        std::size_t n = 0;
        while (pos_ + n < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_ + n])) || s_[pos_ + n] == '.')) ++n;
        if (n == 0) fail("expected number");
        if (pos_ + n < s_.size() && (s_[pos_ + n] == 'e' || s_[pos_ + n] == 'E')) {
            std::size_t m = n + 1;
            if (pos_ + m < s_.size() && (s_[pos_ + m] == '+' || s_[pos_ + m] == '-')) ++m;
            std::size_t digits = 0;
            while (pos_ + m < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + m]))) ++m, ++digits;
            if (digits > 0) n = m;
        }
        std::string tok(begin, n);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) fail("malformed number '" + tok + "'");
        pos_ += n;
        return v;
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return make(Expression::Node::Number, {}, number_literal());
        if (c == '(') {
            ++pos_;
            auto e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string name(s_.substr(start, pos_ - start));
            skip();
            bool call = pos_ < s_.size() && s_[pos_] == '(';
            if (!call) {
                if (name == "x") return make(Expression::Node::VarX);
                if (name == "y") {
                    if (dims_ < 2) fail_at("unknown variable 'y' in a one-dimensional context", start);
                    return make(Expression::Node::VarY);
                }
                if (name == "pi") return make(Expression::Node::Number, {}, kPi);
                fail_at("unknown variable '" + name + "'", start);
            }
            int arity = arity_of(name);
            if (arity < 0) fail_at("unknown function '" + name + "'", start);
            ++pos_;
            std::vector<NodePtr> args{expr()};
            while (accept(',')) args.push_back(expr());
            expect(')');
            if (int(args.size()) != arity)
                fail_at("function '" + name + "' takes " + std::to_string(arity) + " argument(s), got " +
                            std::to_string(args.size()),
                        start);
            auto n = std::make_shared<Expression::Node>();
            n->kind = Expression::Node::Call;
            n->fn = name;
            n->kids = std::move(args);
            return n;
        }
        fail(std::string("unexpected '") + c + "'");
    }
};

}  // namespace

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

ScalarField Expression::field() const {
    auto root = root_;
    return [root](double x, double y) { return cplx(root->eval(x, y), 0.0); };
}

Expression parse_expression(std::string_view text, int dims) {
    Parser p(text, dims);
    Expression e;
    e.root_ = p.parse();
    e.text_ = std::string(text);
    return e;
}

}  // namespace czw
