#pragma once

#include <string>

#include "hjbtk/types.hpp"

namespace hjbtk {

/// Discounted LQR coefficient for scalar dynamics y' = a and running cost
/// Q y^2 + R a^2: the nonnegative root of P^2/R + delta P - Q = 0.
double riccati_p(double Q, double R, double delta);

/// Value x' P x of the same problem, 1-D.
double riccati_value(double Q, double R, double delta, double x);

/// Row-major n x n matrix.
using Mat = std::vector<double>;

/// n-dimensional version for y' = a, cost y'Qy + a'Ra: solves
/// Q - delta P - P R^{-1} P = 0 by integrating the matrix Riccati flow from
/// P = 0 to stationarity. R must be positive definite, Q symmetric psd.
Mat riccati_matrix(const Mat& Q, const Mat& R, int n, double delta);

double riccati_value(const Mat& Q, const Mat& R, int n, double delta,
                     ConstSpan x);

/// Machine-readable ground-truth assertion about a built-in example.
struct TruthAssertion {
    std::string id;  // what is being asserted, e.g. "extended-value-upper"
    Vec point;       // query state (may be empty for global statements)
    enum class Cmp { LE, GE, EQ } cmp = Cmp::EQ;
    double expected = 0.0;
    double tol = 0.0;
};

/// Ground truths for "example-3-3", "example-4-1", "lqr-1d",
/// "ergodic-torus-1d". Unknown names throw LookupError.
std::vector<TruthAssertion> example_truth(const std::string& name);

}  // namespace hjbtk
