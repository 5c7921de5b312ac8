#include "kahler/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kahler {

namespace {

// 15-point Kronrod abscissae (nonnegative half) and weights, 7-point Gauss weights.
const double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

struct Weights {
    double wgk[8];
    double wg[4];
    Weights() {
        const double kr[8] = {
            0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
        const double g[4] = {
            0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
            0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
        for (int i = 0; i < 8; ++i) wgk[i] = kr[i];
        for (int i = 0; i < 4; ++i) wg[i] = g[i];
        // Renormalize the centre weights so a constant integrand is integrated
        // exactly in floating point (weight sums become exactly 2).
        double s = 0.0;
        for (int i = 0; i < 7; ++i) s += 2.0 * wgk[i];
        wgk[7] = 2.0 - s;
        s = 2.0 * (wg[0] + wg[1] + wg[2]);
        wg[3] = 2.0 - s;
    }
};

const Weights W;

QuadResult gk15_impl(const std::function<double(double)>& f, double a, double b) {
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);

    const double fc = f(centr);
    double resg = fc * W.wg[3];
    double resk = fc * W.wgk[7];

    // Gauss points (Kronrod indices 1, 3, 5) ...
    for (int j = 0; j < 3; ++j) {
        const int k = 2 * j + 1;
        const double absc = hlgth * xgk[k];
        const double fsum = f(centr - absc) + f(centr + absc);
        resg += W.wg[j] * fsum;
        resk += W.wgk[k] * fsum;
    }
    // ... and the Kronrod-only points (indices 0, 2, 4, 6).
    for (int j = 0; j < 4; ++j) {
        const int k = 2 * j;
        const double absc = hlgth * xgk[k];
        const double fsum = f(centr - absc) + f(centr + absc);
        resk += W.wgk[k] * fsum;
    }

    QuadResult r;
    r.value = resk * hlgth;
    r.error = std::abs((resk - resg) * hlgth);
    r.evals = 15;
    return r;
}

void adapt(const std::function<double(double)>& f, double a, double b, double abs_tol,
           double rel_tol, int depth, QuadResult& total) {
    const QuadResult r = gk15_impl(f, a, b);
    total.evals += r.evals;
    const double goal = std::max(abs_tol, rel_tol * std::abs(r.value));
    if (r.error <= goal || depth <= 0 || !(b - a > 0.0)) {
        total.value += r.value;
        total.error += r.error;
        return;
    }
    const double mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * abs_tol, rel_tol, depth - 1, total);
    adapt(f, mid, b, 0.5 * abs_tol, rel_tol, depth - 1, total);
}

} // namespace

QuadResult gk15(const std::function<double(double)>& f, double a, double b) {
    return gk15_impl(f, a, b);
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, int max_depth) {
    QuadResult total;
    if (a == b) return total;
    adapt(f, a, b, abs_tol, rel_tol, max_depth, total);
    return total;
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f, std::vector<double> nodes,
                                       double abs_tol, double rel_tol)
    : f_(std::move(f)), nodes_(std::move(nodes)), abs_tol_(abs_tol), rel_tol_(rel_tol) {
    if (nodes_.size() < 2) throw std::invalid_argument("CumulativeIntegral: need at least two nodes");
    if (!std::is_sorted(nodes_.begin(), nodes_.end()))
        throw std::invalid_argument("CumulativeIntegral: nodes must be sorted");
    prefix_.resize(nodes_.size(), 0.0);
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
        const QuadResult r = integrate(f_, nodes_[k - 1], nodes_[k], abs_tol_, rel_tol_);
        prefix_[k] = prefix_[k - 1] + r.value;
    }
}

double CumulativeIntegral::operator()(double x) const {
    if (x <= nodes_.front()) {
        if (x == nodes_.front()) return 0.0;
        throw std::out_of_range("CumulativeIntegral: query below the lower limit");
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    if (k + 1 >= nodes_.size() && x > nodes_.back()) {
        // Tail query beyond the grid: integrate onward adaptively.
        return prefix_.back() + integrate(f_, nodes_.back(), x, abs_tol_, rel_tol_).value;
    }
    if (x == nodes_[k]) return prefix_[k];
    return prefix_[k] + integrate(f_, nodes_[k], x, abs_tol_, rel_tol_).value;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw std::invalid_argument("log_grid: bad parameters");
    std::vector<double> g(static_cast<std::size_t>(n));
    const double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
    if (!(hi > lo) || n < 2) throw std::invalid_argument("linear_grid: bad parameters");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    g.front() = lo;
    g.back() = hi;
    return g;
}

} // namespace kahler
