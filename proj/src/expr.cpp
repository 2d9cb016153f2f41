#include "expbasis/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <unordered_map>

#include "expbasis/error.hpp"

namespace expbasis {

struct Expression::Node {
    enum class Kind { constant, variable, unary, binary, call1, call2 };
    Kind kind = Kind::constant;
    double value = 0.0;
    std::size_t slot = 0;
    char op = 0;
    double (*fn1)(double) = nullptr;
    double (*fn2)(double, double) = nullptr;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(std::span<const double> vars) const {
        switch (kind) {
            case Kind::constant: return value;
            case Kind::variable: return vars[slot];
            case Kind::unary: return -lhs->eval(vars);
            case Kind::call1: return fn1(lhs->eval(vars));
            case Kind::call2: return fn2(lhs->eval(vars), rhs->eval(vars));
            case Kind::binary: {
                const double a = lhs->eval(vars);
                const double b = rhs->eval(vars);
                switch (op) {
                    case '+': return a + b;
                    case '-': return a - b;
                    case '*': return a * b;
                    case '/': return a / b;
                    default: return std::pow(a, b);
                }
            }
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

double sign_fn(double t) { return t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0); }
double step_fn(double t) { return t >= 0 ? 1.0 : 0.0; }
double min_fn(double a, double b) { return std::min(a, b); }
double max_fn(double a, double b) { return std::max(a, b); }

const std::unordered_map<std::string, double (*)(double)>& unary_functions() {
    static const std::unordered_map<std::string, double (*)(double)> table = {
        {"sin", [](double t) { return std::sin(t); }},
        {"cos", [](double t) { return std::cos(t); }},
        {"tan", [](double t) { return std::tan(t); }},
        {"exp", [](double t) { return std::exp(t); }},
        {"log", [](double t) { return std::log(t); }},
        {"sqrt", [](double t) { return std::sqrt(t); }},
        {"abs", [](double t) { return std::abs(t); }},
        {"tanh", [](double t) { return std::tanh(t); }},
        {"sinh", [](double t) { return std::sinh(t); }},
        {"cosh", [](double t) { return std::cosh(t); }},
        {"atan", [](double t) { return std::atan(t); }},
        {"sign", sign_fn},
        {"step", step_fn},
    };
    return table;
}

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    NodePtr parse() {
        NodePtr n = expression();
        skip();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::schema, "expression '" + std::string(src_) + "': " + what +
                                           " at offset " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr binary(char op, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::binary;
        n->op = op;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

    NodePtr expression() {
        NodePtr n = term();
        for (;;) {
            if (accept('+')) n = binary('+', n, term());
            else if (accept('-')) n = binary('-', n, term());
            else return n;
        }
    }

    NodePtr term() {
        NodePtr n = unary();
        for (;;) {
            if (accept('*')) n = binary('*', n, unary());
            else if (accept('/')) n = binary('/', n, unary());
            else return n;
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::unary;
            n->lhs = unary();
            return n;
        }
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return binary('^', base, unary());
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= src_.size()) fail("unexpected end");
        const char c = src_[pos_];
        if (accept('(')) {
            NodePtr n = expression();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::string rest(src_.substr(pos_));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(rest, &used);
        } catch (...) {
            fail("malformed number");
        }
        pos_ += used;
        auto n = std::make_shared<Node>();
        n->value = v;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));

        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i] == name) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::variable;
                n->slot = i;
                return n;
            }
        }
        if (name == "pi" || name == "e") {
            auto n = std::make_shared<Node>();
            n->value = name == "pi" ? std::numbers::pi : std::numbers::e;
            return n;
        }
        if (name == "min" || name == "max") {
            if (!accept('(')) fail("expected '(' after " + name);
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::call2;
            n->fn2 = name == "min" ? min_fn : max_fn;
            n->lhs = expression();
            if (!accept(',')) fail("expected ','");
            n->rhs = expression();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        const auto& fns = unary_functions();
        auto it = fns.find(name);
        if (it == fns.end()) fail("unknown identifier '" + name + "'");
        if (!accept('(')) fail("expected '(' after " + name);
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::call1;
        n->fn1 = it->second;
        n->lhs = expression();
        if (!accept(')')) fail("expected ')'");
        return n;
    }

    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view source, std::vector<std::string> variables) {
    Expression e;
    e.source_ = std::string(source);
    e.variables_ = std::move(variables);
    e.root_ = Parser(e.source_, e.variables_).parse();
    return e;
}

double Expression::operator()(std::span<const double> values) const {
    if (values.size() != variables_.size())
        throw Error(ErrorCode::invalid_argument, "expression arity mismatch");
    return root_->eval(values);
}

}  // namespace expbasis
