#include "hjbtk/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace hjbtk {

class ExprParser {
public:
    explicit ExprParser(const std::string& src) : src_(src) {}

    Expression run() {
        Expression e;
        e.source_ = src_;
        out_ = &e;
        e.root_ = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& src_;
    std::size_t pos_ = 0;
    Expression* out_ = nullptr;

    [[noreturn]] void fail(const std::string& what) const {
        throw SpecError("expression error at position " +
                        std::to_string(pos_) + ": " + what + " in '" + src_ +
                        "'");
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int add(Expression::Node n) {
        out_->nodes_.push_back(n);
        return static_cast<int>(out_->nodes_.size()) - 1;
    }

    int parse_sum() {
        int lhs = parse_product();
        for (;;) {
            if (eat('+'))
                lhs = add({Expression::Node::Op::Add, 0, 0, lhs, parse_product()});
            else if (eat('-'))
                lhs = add({Expression::Node::Op::Sub, 0, 0, lhs, parse_product()});
            else
                return lhs;
        }
    }

    int parse_product() {
        int lhs = parse_unary();
        for (;;) {
            if (eat('*'))
                lhs = add({Expression::Node::Op::Mul, 0, 0, lhs, parse_unary()});
            else if (eat('/'))
                lhs = add({Expression::Node::Op::Div, 0, 0, lhs, parse_unary()});
            else
                return lhs;
        }
    }

    int parse_unary() {
        if (eat('-'))
            return add({Expression::Node::Op::Neg, 0, 0, parse_unary(), -1});
        return parse_atom();
    }

    int parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("expected an operand");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            const int e = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(src_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos_ += used;
            return add({Expression::Node::Op::Num, v, 0, -1, -1});
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
        fail("unexpected character");
    }

    int parse_name() {
        std::size_t end = pos_;
        while (end < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[end])) ||
                src_[end] == '_'))
            ++end;
        const std::string name = src_.substr(pos_, end - pos_);
        pos_ = end;

        // variables x<k> / a<k>, 1-based
        if ((name[0] == 'x' || name[0] == 'a') && name.size() > 1 &&
            std::all_of(name.begin() + 1, name.end(), [](char d) {
                return std::isdigit(static_cast<unsigned char>(d));
            })) {
            const int k = std::stoi(name.substr(1));
            if (k < 1) fail("variable indices are 1-based");
            if (name[0] == 'x') {
                out_->max_x_ = std::max(out_->max_x_, k);
                return add({Expression::Node::Op::VarX, 0, k - 1, -1, -1});
            }
            out_->max_a_ = std::max(out_->max_a_, k);
            return add({Expression::Node::Op::VarA, 0, k - 1, -1, -1});
        }

        using Op = Expression::Node::Op;
        Op op;
        int arity;
        if (name == "abs") { op = Op::Abs; arity = 1; }
        else if (name == "sin") { op = Op::Sin; arity = 1; }
        else if (name == "cos") { op = Op::Cos; arity = 1; }
        else if (name == "min") { op = Op::Min; arity = 2; }
        else if (name == "max") { op = Op::Max; arity = 2; }
        else if (name == "pow") { op = Op::Pow; arity = 2; }
        else fail("unknown identifier '" + name + "'");

        if (!eat('(')) fail("expected '(' after function name");
        const int a0 = parse_sum();
        int a1 = -1;
        if (arity == 2) {
            if (!eat(',')) fail("expected ',' in two-argument function");
            a1 = parse_sum();
        }
        if (!eat(')')) fail("expected ')'");
        return add({op, 0, 0, a0, a1});
    }
};

Expression Expression::parse(const std::string& src) {
    return ExprParser(src).run();
}

double Expression::eval_node(int id, ConstSpan x, ConstSpan a) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    using Op = Node::Op;
    switch (n.op) {
        case Op::Num: return n.num;
        case Op::VarX:
            if (n.index >= static_cast<int>(x.size()))
                throw SpecError("expression references x" +
                                std::to_string(n.index + 1) +
                                " beyond the state dimension");
            return x[static_cast<std::size_t>(n.index)];
        case Op::VarA:
            if (n.index >= static_cast<int>(a.size()))
                throw SpecError("expression references a" +
                                std::to_string(n.index + 1) +
                                " beyond the control dimension");
            return a[static_cast<std::size_t>(n.index)];
        case Op::Add: return eval_node(n.lhs, x, a) + eval_node(n.rhs, x, a);
        case Op::Sub: return eval_node(n.lhs, x, a) - eval_node(n.rhs, x, a);
        case Op::Mul: return eval_node(n.lhs, x, a) * eval_node(n.rhs, x, a);
        case Op::Div: return eval_node(n.lhs, x, a) / eval_node(n.rhs, x, a);
        case Op::Neg: return -eval_node(n.lhs, x, a);
        case Op::Abs: return std::abs(eval_node(n.lhs, x, a));
        case Op::Sin: return std::sin(eval_node(n.lhs, x, a));
        case Op::Cos: return std::cos(eval_node(n.lhs, x, a));
        case Op::Min:
            return std::min(eval_node(n.lhs, x, a), eval_node(n.rhs, x, a));
        case Op::Max:
            return std::max(eval_node(n.lhs, x, a), eval_node(n.rhs, x, a));
        case Op::Pow:
            return std::pow(eval_node(n.lhs, x, a), eval_node(n.rhs, x, a));
    }
    throw EvaluationError("corrupt expression tree");
}

double Expression::eval(ConstSpan x, ConstSpan a) const {
    if (root_ < 0) throw EvaluationError("empty expression");
    return eval_node(root_, x, a);
}

}  // namespace hjbtk
