#pragma once

#include <string>

#include "hjbtk/types.hpp"

namespace hjbtk {

/// Closed-form scalar expression in state variables x1..xn and control
/// variables a1..am. Grammar: numbers, + - * /, unary minus, parentheses,
/// and the functions abs, min, max, sin, cos, pow.
class Expression {
public:
    /// Throws SpecError with a character position on malformed input.
    static Expression parse(const std::string& src);

    double eval(ConstSpan x, ConstSpan a) const;

    /// Highest variable indices referenced (0 when unused).
    int max_x() const { return max_x_; }
    int max_a() const { return max_a_; }
    const std::string& source() const { return source_; }

private:
    struct Node {
        enum class Op {
            Num, VarX, VarA, Add, Sub, Mul, Div, Neg,
            Abs, Min, Max, Sin, Cos, Pow
        } op;
        double num = 0.0;
        int index = 0;      // 0-based variable index
        int lhs = -1, rhs = -1;
    };
    std::vector<Node> nodes_;
    int root_ = -1;
    int max_x_ = 0, max_a_ = 0;
    std::string source_;

    double eval_node(int id, ConstSpan x, ConstSpan a) const;
    friend class ExprParser;
};

}  // namespace hjbtk
