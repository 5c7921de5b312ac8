#pragma once

#include <functional>
#include <vector>

namespace kahler {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evals = 0;
};

/** One application of the 15-point Kronrod rule with embedded 7-point Gauss error estimate. */
QuadResult gk15(const std::function<double(double)>& f, double a, double b);

/**
 * Adaptive bisection driven by the Gauss-Kronrod error estimate.
 * Stops when the local estimate drops below max(abs_tol, rel_tol*|value|).
 */
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-12, int max_depth = 48);

/**
 * Prefix integrals of f over a fixed sorted node grid (front node is the lower
 * limit of integration).  Queries between nodes are finished off with a fresh
 * adaptive pass from the bracketing node, so no interpolation error enters.
 */
class CumulativeIntegral {
public:
    CumulativeIntegral() = default;
    CumulativeIntegral(std::function<double(double)> f, std::vector<double> nodes,
                       double abs_tol = 1e-13, double rel_tol = 1e-12);

    double operator()(double x) const;
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& prefix() const { return prefix_; }
    double back() const { return prefix_.back(); }

private:
    std::function<double(double)> f_;
    std::vector<double> nodes_;
    std::vector<double> prefix_;
    double abs_tol_ = 1e-13;
    double rel_tol_ = 1e-12;
};

/** n log-spaced values on [lo, hi] (inclusive endpoints). */
std::vector<double> log_grid(double lo, double hi, int n);

/** n linearly spaced values on [lo, hi] (inclusive endpoints). */
std::vector<double> linear_grid(double lo, double hi, int n);

} // namespace kahler
