#include "kahler/geodesic.hpp"

#include "kahler/kappa.hpp"
#include "kahler/profile_library.hpp"
#include "kahler/quadrature.hpp"
#include "kahler/rng.hpp"
#include "kahler/sphere_extrema.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace kahler {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <std::size_t N>
using State = std::array<double, N>;

// Dormand-Prince 5(4) pair, FSAL.  Integrates rhs from t0 through the sorted
// stop list, landing on every stop exactly; on_stop(i, t, y) fires at stop i,
// on_step(ta, ya, tb, yb) after every accepted internal step.
template <std::size_t N, class Rhs, class OnStop, class OnStep>
void integrate_dp5(const Rhs& rhs, State<N>& y, double t0, const std::vector<double>& stops,
                   double tol, const OnStop& on_stop, const OnStep& on_step) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b(5th) - b(4th): error estimator weights
    static constexpr double d1 = 71.0 / 57600, d3 = -71.0 / 16695, d4 = 71.0 / 1920,
                            d5 = -17253.0 / 339200, d6 = 22.0 / 525, d7 = -1.0 / 40;

    if (stops.empty()) return;
    const double span = stops.back() - t0;
    if (!(span > 0.0)) throw std::invalid_argument("integrate_dp5: empty range");

    double t = t0;
    double h = std::min(0.01 * span, 0.1);
    State<N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    rhs(t, y, k1);
    long steps = 0;

    for (std::size_t si = 0; si < stops.size(); ++si) {
        const double stop = stops[si];
        if (!(stop > t) && si == 0 && stop == t0) {
            on_stop(si, t, y);
            continue;
        }
        while (t < stop) {
            if (++steps > 2000000) throw std::runtime_error("integrate_dp5: step budget exhausted");
            bool clamped = false;
            double hs = h;
            if (t + hs >= stop) {
                hs = stop - t;
                clamped = true;
            }
            if (hs < 1e-13 * std::max(1.0, std::abs(t)))
                throw std::runtime_error("integrate_dp5: step size underflow");

            for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
            rhs(t + hs / 5, ytmp, k2);
            for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
            rhs(t + 3 * hs / 10, ytmp, k3);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            rhs(t + 4 * hs / 5, ytmp, k4);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            rhs(t + 8 * hs / 9, ytmp, k5);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                       a65 * k5[i]);
            rhs(t + hs, ytmp, k6);
            for (std::size_t i = 0; i < N; ++i)
                ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                       b6 * k6[i]);
            rhs(t + hs, ynew, k7);

            double err = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double e = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                       d6 * k6[i] + d7 * k7[i]);
                const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                const double q = e / sc;
                err += q * q;
            }
            err = std::sqrt(err / N);

            if (err <= 1.0) {
                const double ta = t;
                const State<N> ya = y;
                t = clamped ? stop : t + hs;
                y = ynew;
                k1 = k7;
                on_step(ta, ya, t, y);
                const double grow = (err == 0.0) ? 5.0
                                                 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                h = hs * grow;
            } else {
                h = hs * std::max(0.2, 0.9 * std::pow(err, -0.2));
            }
        }
        on_stop(si, t, y);
    }
}

// re-integrates from a recorded step start; used by the zero bisection
template <std::size_t N, class Rhs>
State<N> dp5_value_at(const Rhs& rhs, double ta, State<N> ya, double tq, double tol) {
    if (tq <= ta) return ya;
    integrate_dp5<N>(
        rhs, ya, ta, std::vector<double>{tq}, tol,
        [](std::size_t, double, const State<N>&) {},
        [](double, const State<N>&, double, const State<N>&) {});
    return ya;
}

// locates a sign change of component `comp` inside an accepted step to 1e-10
template <std::size_t N, class Rhs>
std::optional<double> refine_zero(const Rhs& rhs, int comp, double ta, const State<N>& ya,
                                  double tb, const State<N>& yb, double tol) {
    const double fa = ya[static_cast<std::size_t>(comp)];
    const double fb = yb[static_cast<std::size_t>(comp)];
    if (fa == 0.0) return std::nullopt; // only fires at the initial point of a point-bc solve
    if (fb == 0.0) return tb;
    if (std::signbit(fa) == std::signbit(fb)) return std::nullopt;
    double lo = ta, hi = tb;
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = dp5_value_at<N>(rhs, ta, ya, mid, tol)[static_cast<std::size_t>(comp)];
        if (fm == 0.0) return mid;
        if (std::signbit(fm) == std::signbit(fa))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void check_queries(const std::vector<double>& q, const char* who) {
    if (q.empty()) throw std::invalid_argument(std::string(who) + ": no query points");
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!std::isfinite(q[i]) || q[i] < 0.0)
            throw std::invalid_argument(std::string(who) + ": queries must be finite and >= 0");
        if (i > 0 && !(q[i] > q[i - 1]))
            throw std::invalid_argument(std::string(who) + ": queries must be strictly increasing");
    }
    if (!(q.back() > 0.0)) throw std::invalid_argument(std::string(who) + ": empty range");
}

std::vector<double> fd_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    if (n == 2) {
        d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
        d[i] = (hl * hl * (y[i + 1] - y[i]) + hr * hr * (y[i] - y[i - 1])) /
               (hl * hr * (hl + hr));
    }
    const double h0 = x[1] - x[0], h1 = x[2] - x[1];
    d[0] = -(2 * h0 + h1) / (h0 * (h0 + h1)) * y[0] + (h0 + h1) / (h0 * h1) * y[1] -
           h0 / (h1 * (h0 + h1)) * y[2];
    const double g0 = x[n - 1] - x[n - 2], g1 = x[n - 2] - x[n - 3];
    d[n - 1] = (2 * g0 + g1) / (g0 * (g0 + g1)) * y[n - 1] -
               (g0 + g1) / (g0 * g1) * y[n - 2] + g0 / (g1 * (g0 + g1)) * y[n - 3];
    return d;
}

} // namespace

double JacobiSolution::log_derivative(std::size_t i) const {
    if (i >= eta.size()) throw std::out_of_range("JacobiSolution: query index");
    if (j[i] == 0.0) throw std::domain_error("JacobiSolution: J vanishes at the query");
    return jp[i] / j[i];
}

JacobiSolution jacobi_solve(const std::function<double(double)>& K, JacobiBc bc,
                            const std::vector<double>& queries, double tol) {
    check_queries(queries, "jacobi_solve");
    if (!(tol > 0.0)) throw std::invalid_argument("jacobi_solve: tolerance must be positive");

    JacobiSolution out;
    out.eta = queries;
    out.j.resize(queries.size());
    out.jp.resize(queries.size());

    auto rhs = [&K](double t, const State<2>& y, State<2>& d) {
        d[0] = y[1];
        d[1] = -K(t) * y[0];
    };
    State<2> y = (bc == JacobiBc::Point) ? State<2>{0.0, 1.0} : State<2>{1.0, 0.0};

    integrate_dp5<2>(
        rhs, y, 0.0, queries, tol,
        [&out](std::size_t i, double, const State<2>& ys) {
            out.j[i] = ys[0];
            out.jp[i] = ys[1];
        },
        [&out, &rhs, tol](double ta, const State<2>& ya, double tb, const State<2>& yb) {
            if (out.first_zero) return;
            out.first_zero = refine_zero<2>(rhs, 0, ta, ya, tb, yb, tol);
        });
    return out;
}

double HermiteTable::operator()(double t) const {
    if (x.size() < 2) throw std::logic_error("HermiteTable: not built");
    const double lo = x.front(), hi = x.back();
    const double slack = 1e-9 * (hi - lo);
    if (t < lo - slack || t > hi + slack)
        throw std::out_of_range("HermiteTable: query outside the table");
    t = std::clamp(t, lo, hi);
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = (it == x.begin()) ? 0 : static_cast<std::size_t>(it - x.begin() - 1);
    if (i >= x.size() - 1) i = x.size() - 2;
    const double h = x[i + 1] - x[i];
    const double s = (t - x[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1];
}

double GeodesicSolution::eta_of_r(double r) const {
    if (!(r >= 0.0) || r > r_max_ * (1.0 + 1e-12))
        throw std::out_of_range("GeodesicSolution: r outside [0, r_max]");
    return profile_.arc_length(std::min(r, r_max_));
}

double GeodesicSolution::r_of_eta(double eta) const { return std::max(0.0, r_of_eta_(eta)); }

double GeodesicSolution::radial_curvature(double eta) const { return kc_(eta); }

double GeodesicSolution::transverse_curvature(double eta) const { return kperp_(eta); }

GeodesicSolution radial_geodesic(const RadialProfile& profile, double r_max) {
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw std::invalid_argument("radial_geodesic: r_max must be positive");
    if (r_max > profile.param_max() * (1.0 + 1e-12))
        throw std::out_of_range("radial_geodesic: r_max beyond the tabulated range");
    r_max = std::min(r_max, profile.param_max());

    std::vector<double> rs;
    rs.reserve(profile.params().size() + 2);
    rs.push_back(0.0);
    for (double p : profile.params())
        if (p < r_max * (1.0 - 1e-12)) rs.push_back(p);
    rs.push_back(r_max);

    const std::size_t n = rs.size();
    std::vector<double> etas(n), kc(n), kp(n), drs(n);
    for (std::size_t i = 0; i < n; ++i) {
        etas[i] = profile.arc_length(rs[i]);
        const CurvatureABC c = profile.abc(rs[i]);
        kc[i] = c.A;
        kp[i] = 0.5 * c.B;
        drs[i] = (i == 0) ? 0.0 : 1.0 / profile.arc_length_derivative(rs[i]);
        if (i > 0 && !(etas[i] > etas[i - 1]))
            throw std::runtime_error("radial_geodesic: arc length failed to increase");
    }

    GeodesicSolution sol(profile);
    sol.m_ = profile.dim();
    sol.r_max_ = r_max;
    sol.eta_max_ = etas.back();
    sol.r_of_eta_ = HermiteTable{etas, rs, drs};
    sol.kc_ = HermiteTable{etas, kc, fd_slopes(etas, kc)};
    sol.kperp_ = HermiteTable{etas, kp, fd_slopes(etas, kp)};
    return sol;
}

RadialHessians radial_hessians(const GeodesicSolution& sol, const std::vector<double>& ell) {
    check_queries(ell, "radial_hessians");
    if (!(ell.front() > 0.0))
        throw std::invalid_argument("radial_hessians: arc lengths must be positive");
    if (ell.back() > sol.eta_max() * (1.0 + 1e-12))
        throw std::out_of_range("radial_hessians: arc length beyond the geodesic range");

    const std::function<double(double)> kc = [&sol](double e) { return sol.radial_curvature(e); };
    const std::function<double(double)> kp = [&sol](double e) {
        return sol.transverse_curvature(e);
    };
    const JacobiSolution jc = jacobi_solve(kc, JacobiBc::Point, ell);
    const JacobiSolution jperp = jacobi_solve(kp, JacobiBc::Point, ell);
    const JacobiSolution jtube = jacobi_solve(kp, JacobiBc::Submanifold, ell);
    if (jc.first_zero && *jc.first_zero <= ell.back())
        throw std::domain_error("radial_hessians: conjugate point at eta = " +
                                fmt(*jc.first_zero));
    if (jperp.first_zero && *jperp.first_zero <= ell.back())
        throw std::domain_error("radial_hessians: conjugate point at eta = " +
                                fmt(*jperp.first_zero));
    if (jtube.first_zero && *jtube.first_zero <= ell.back())
        throw std::domain_error("radial_hessians: focal point at eta = " + fmt(*jtube.first_zero));

    RadialHessians out;
    out.ell = ell;
    const double mm1 = sol.dim() - 1;
    for (std::size_t i = 0; i < ell.size(); ++i) {
        out.laplacian_perp.push_back(mm1 * jperp.log_derivative(i));
        out.holomorphic_hessian.push_back(0.5 * jc.log_derivative(i));
        out.orthogonal_hessian.push_back(0.5 * jperp.log_derivative(i));
        out.tube_laplacian_perp.push_back(mm1 * jtube.log_derivative(i));
    }
    return out;
}

double laplacian_perp(const GeodesicSolution& sol, double ell) {
    return radial_hessians(sol, {ell}).laplacian_perp[0];
}

double holomorphic_hessian(const GeodesicSolution& sol, double ell) {
    return radial_hessians(sol, {ell}).holomorphic_hessian[0];
}

double orthogonal_hessian(const GeodesicSolution& sol, double ell) {
    return radial_hessians(sol, {ell}).orthogonal_hessian[0];
}

double tube_laplacian_perp(const GeodesicSolution& sol, double ell) {
    return radial_hessians(sol, {ell}).tube_laplacian_perp[0];
}

double index_form(const std::function<double(double)>& K, double ell,
                  const std::function<double(double)>& field,
                  const std::function<double(double)>& field_derivative) {
    if (!(ell > 0.0)) throw std::invalid_argument("index_form: ell must be positive");
    auto f = [&](double e) {
        const double x = field(e), xp = field_derivative(e);
        return xp * xp - K(e) * x * x;
    };
    return integrate(f, 0.0, ell, 1e-13, 1e-12).value;
}

double sine_index_form(const std::function<double(double)>& K, double ell) {
    const double w = M_PI / ell;
    return index_form(
        K, ell, [w](double e) { return std::sin(w * e); },
        [w](double e) { return w * std::cos(w * e); });
}

namespace {

struct VolumeRun {
    std::vector<double> v;
    std::optional<double> zero; // first vanishing of J_C or J_perp
};

VolumeRun volume_integrate(const GeodesicSolution& sol, const std::vector<double>& stops,
                           double tol) {
    const int m = sol.dim();
    auto rhs = [&sol, m](double e, const State<5>& y, State<5>& d) {
        d[0] = y[1];
        d[1] = -sol.radial_curvature(e) * y[0];
        d[2] = y[3];
        d[3] = -sol.transverse_curvature(e) * y[2];
        double w = 1.0;
        for (int k = 0; k < 2 * m - 2; ++k) w *= y[2];
        d[4] = y[0] * w;
    };
    VolumeRun run;
    run.v.resize(stops.size());
    State<5> y{0.0, 1.0, 0.0, 1.0, 0.0};
    integrate_dp5<5>(
        rhs, y, 0.0, stops, tol,
        [&run](std::size_t i, double, const State<5>& ys) { run.v[i] = ys[4]; },
        [&run, &rhs, tol](double ta, const State<5>& ya, double tb, const State<5>& yb) {
            if (run.zero) return;
            for (int comp : {0, 2}) {
                auto z = refine_zero<5>(rhs, comp, ta, ya, tb, yb, tol);
                if (z && (!run.zero || *z < *run.zero)) run.zero = z;
            }
        });
    return run;
}

} // namespace

double ball_volume(const GeodesicSolution& sol, double ell) {
    if (!(ell > 0.0) || ell > sol.eta_max() * (1.0 + 1e-12))
        throw std::out_of_range("ball_volume: ell outside (0, eta_max]");
    const VolumeRun run = volume_integrate(sol, {std::min(ell, sol.eta_max())}, 1e-11);
    if (run.zero && *run.zero <= ell)
        throw std::domain_error("ball_volume: conjugate point at eta = " + fmt(*run.zero));
    return run.v[0];
}

double model_ball_volume(int m, double lambda, double ell) {
    if (m < 2) throw std::invalid_argument("model_ball_volume: need m >= 2");
    if (!(ell > 0.0)) throw std::invalid_argument("model_ball_volume: ell must be positive");
    if (lambda == 0.0) return std::pow(ell, 2 * m) / (2 * m);
    auto f = [m, lambda](double e) {
        const double sp = s_kappa(0.5 * lambda, e);
        double w = 1.0;
        for (int k = 0; k < 2 * m - 2; ++k) w *= sp;
        return s_kappa(2.0 * lambda, e) * w;
    };
    return integrate(f, 0.0, ell, 1e-14, 1e-12).value;
}

VolumeRatioTable volume_ratio_table(const GeodesicSolution& sol, double lambda,
                                    const std::vector<double>& ell) {
    check_queries(ell, "volume_ratio_table");
    if (!(ell.front() > 0.0))
        throw std::invalid_argument("volume_ratio_table: arc lengths must be positive");
    if (ell.back() > sol.eta_max() * (1.0 + 1e-12))
        throw std::out_of_range("volume_ratio_table: arc length beyond the geodesic range");

    std::vector<double> stops = ell;
    stops.back() = std::min(stops.back(), sol.eta_max());
    const VolumeRun run = volume_integrate(sol, stops, 1e-11);
    if (run.zero && *run.zero <= stops.back())
        throw std::domain_error("volume_ratio_table: conjugate point at eta = " + fmt(*run.zero));

    VolumeRatioTable out;
    out.m = sol.dim();
    out.lambda = lambda;
    out.ell = ell;
    out.ratio.resize(ell.size());
    for (std::size_t i = 0; i < ell.size(); ++i)
        out.ratio[i] = run.v[i] / model_ball_volume(out.m, lambda, ell[i]);
    out.nonincreasing = true;
    for (std::size_t i = 1; i < out.ratio.size(); ++i)
        if (out.ratio[i] > out.ratio[i - 1] + 1e-9) out.nonincreasing = false;
    return out;
}

nlohmann::ordered_json VolumeRatioTable::to_json() const {
    nlohmann::ordered_json j;
    j["m"] = m;
    j["lambda"] = lambda;
    j["ell"] = ell;
    j["ratio"] = ratio;
    j["nonincreasing"] = nonincreasing;
    return j;
}

DiameterReport diameter_estimate(const RadialProfile& profile, double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("diameter_estimate: lambda must be positive");
    // tail extrapolation: eta(u^2) = eta_inf - c/u + O(1/u^2) for the compact
    // profiles this bound applies to, so eliminate c with two far samples
    const double u1 = 1e5, u2 = 1e6;
    const double e1 = profile.arc_length(u1 * u1);
    const double e2 = profile.arc_length(u2 * u2);
    DiameterReport rep;
    rep.lambda = lambda;
    rep.length = (u2 * e2 - u1 * e1) / (u2 - u1);
    rep.bound = std::sqrt(2.0 / lambda) * M_PI;
    rep.verdict = rep.length <= rep.bound + 1e-9;
    return rep;
}

nlohmann::ordered_json DiameterReport::to_json() const {
    nlohmann::ordered_json j;
    j["length"] = length;
    j["lambda"] = lambda;
    j["bound"] = bound;
    j["verdict"] = verdict;
    return j;
}

HypothesisCertificate certify_hypotheses(const RadialProfile& profile, double r_max, int nodes,
                                         int restarts, std::uint64_t seed) {
    if (!(r_max > 0.0) || r_max > profile.param_max() * (1.0 + 1e-12))
        throw std::out_of_range("certify_hypotheses: r_max outside the profile range");
    r_max = std::min(r_max, profile.param_max());
    if (nodes < 2) throw std::invalid_argument("certify_hypotheses: need at least two nodes");

    std::vector<double> radii{0.0};
    for (double r : log_grid(profile.param_min(), r_max, nodes - 1)) radii.push_back(r);

    HypothesisCertificate cert;
    cert.min_hol = cert.min_ric_perp = cert.min_orth_bis =
        std::numeric_limits<double>::infinity();
    cert.r_lo = 0.0;
    cert.r_hi = r_max;
    cert.nodes = static_cast<int>(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const CurvatureTensor t = profile.tensor_at(radii[i]);
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
        cert.min_hol = std::min(
            cert.min_hol,
            extremize_over_sphere(t, SphereFunctional::HolSectional, false, rng, restarts).value);
        cert.min_ric_perp = std::min(
            cert.min_ric_perp,
            extremize_over_sphere(t, SphereFunctional::RicPerp, false, rng, restarts).value);
        cert.min_orth_bis =
            std::min(cert.min_orth_bis, orthogonal_bisectional_min(t, rng, restarts).value);
    }
    return cert;
}

namespace {

// 2m x 2m finite-difference Hessian of euclidean distance, and its reading
// through the complex structure J(x1,x2,...) = (-x2,x1,...)
struct FdDictionary {
    double laplacian_perp = 0.0;
    double holomorphic_hessian = 0.0;
};

FdDictionary fd_flat_dictionary(double ell) {
    constexpr int n = 4; // m = 2
    const std::array<double, n> x0{0.36 * ell, 0.48 * ell, 0.8 * ell, 0.0};
    auto rho = [](std::array<double, n> p) {
        double s = 0.0;
        for (double v : p) s += v * v;
        return std::sqrt(s);
    };
    const double h = 1e-4 * std::max(1.0, ell);
    double H[n][n];
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            if (i == k) {
                auto p = x0, q = x0;
                p[i] += h;
                q[i] -= h;
                H[i][i] = (rho(p) - 2.0 * rho(x0) + rho(q)) / (h * h);
            } else {
                auto pp = x0, pm = x0, mp = x0, mm = x0;
                pp[i] += h; pp[k] += h;
                pm[i] += h; pm[k] -= h;
                mp[i] -= h; mp[k] += h;
                mm[i] -= h; mm[k] -= h;
                H[i][k] = (rho(pp) - rho(pm) - rho(mp) + rho(mm)) / (4.0 * h * h);
            }
        }
    }
    auto quad = [&H](const std::array<double, n>& v) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) s += v[i] * H[i][k] * v[k];
        return s;
    };
    // unit radial direction e, its rotation Je, and an orthonormal pair
    // spanning the orthogonal complex line
    const std::array<double, n> je{-0.48, 0.36, 0.0, 0.8};
    const std::array<double, n> f1{-0.48, -0.64, 0.6, 0.0};
    const std::array<double, n> f2{0.64, -0.48, 0.0, 0.6};
    FdDictionary out;
    out.holomorphic_hessian = 0.5 * quad(je); // H(e,e) = 0 on the radial line
    out.laplacian_perp = 0.5 * (quad(f1) + quad(f2));
    return out;
}

const CalibrationReport& cached_gate() {
    static const CalibrationReport rep = calibration_gate();
    return rep;
}

} // namespace

CalibrationReport calibration_gate() {
    CalibrationReport rep;
    std::string bad;

    const RadialProfile flat = flat_profile(2);
    const GeodesicSolution fsol = radial_geodesic(flat, 100.0);
    for (double r : log_grid(1e-4, 100.0, 41))
        rep.flat_eta_error =
            std::max(rep.flat_eta_error, std::abs(fsol.eta_of_r(r) - std::sqrt(r)));
    for (double e : linear_grid(0.1, 9.9, 33))
        rep.flat_r_roundtrip_error =
            std::max(rep.flat_r_roundtrip_error, std::abs(fsol.r_of_eta(e) - e * e));

    const std::vector<double> ells = linear_grid(0.05, 2.0, 40);
    const RadialHessians fh = radial_hessians(fsol, ells);
    for (std::size_t i = 0; i < ells.size(); ++i) {
        rep.flat_laplacian_error = std::max(
            rep.flat_laplacian_error, std::abs(fh.laplacian_perp[i] - 1.0 / ells[i]));
        rep.flat_hessian_error = std::max(
            rep.flat_hessian_error, std::abs(fh.holomorphic_hessian[i] - 0.5 / ells[i]));
    }
    for (double e : {0.7, 1.3}) {
        const FdDictionary fd = fd_flat_dictionary(e);
        rep.flat_fd_dictionary_error =
            std::max(rep.flat_fd_dictionary_error,
                     std::abs(fd.laplacian_perp - laplacian_perp(fsol, e)));
        rep.flat_fd_dictionary_error =
            std::max(rep.flat_fd_dictionary_error,
                     std::abs(fd.holomorphic_hessian - holomorphic_hessian(fsol, e)));
    }

    const RadialProfile fs = fubini_study_profile(2);
    const GeodesicSolution ssol = radial_geodesic(fs, fs.param_max());
    for (double e : linear_grid(0.0, ssol.eta_max() * 0.999, 65)) {
        rep.fs_radial_curvature_error =
            std::max(rep.fs_radial_curvature_error, std::abs(ssol.radial_curvature(e) - 2.0));
        rep.fs_transverse_curvature_error = std::max(
            rep.fs_transverse_curvature_error, std::abs(ssol.transverse_curvature(e) - 0.5));
    }
    const std::vector<double> fells = linear_grid(0.05, 1.45, 29);
    const RadialHessians sh = radial_hessians(ssol, fells);
    for (std::size_t i = 0; i < fells.size(); ++i)
        rep.fs_laplacian_error = std::max(
            rep.fs_laplacian_error, std::abs(sh.laplacian_perp[i] - cot_kappa(0.5, fells[i])));

    if (rep.flat_eta_error > 1e-10) bad += " flat-arc-length";
    if (rep.flat_r_roundtrip_error > 1e-10) bad += " flat-inverse-map";
    if (rep.flat_laplacian_error > 1e-8) bad += " flat-laplacian";
    if (rep.flat_hessian_error > 1e-8) bad += " flat-hessian";
    if (rep.flat_fd_dictionary_error > 1e-6) bad += " flat-fd-dictionary";
    if (rep.fs_radial_curvature_error > 1e-9) bad += " fs-radial-curvature";
    if (rep.fs_transverse_curvature_error > 1e-9) bad += " fs-transverse-curvature";
    if (rep.fs_laplacian_error > 1e-7) bad += " fs-laplacian";
    rep.pass = bad.empty();
    if (!rep.pass)
        rep.diagnostic =
            "failed gates:" + bad +
            "; convention reminder: K_C = A(r(eta)), K_perp = B(r(eta))/2, eta(r) = "
            "int_0^sqrt(r) sqrt(h(u^2)) du, and Hessian readings pair the real directions "
            "{X, JX} with a factor 1/2";
    return rep;
}

nlohmann::ordered_json CalibrationReport::to_json() const {
    nlohmann::ordered_json j;
    j["flat_eta_error"] = flat_eta_error;
    j["flat_r_roundtrip_error"] = flat_r_roundtrip_error;
    j["flat_laplacian_error"] = flat_laplacian_error;
    j["flat_hessian_error"] = flat_hessian_error;
    j["flat_fd_dictionary_error"] = flat_fd_dictionary_error;
    j["fs_radial_curvature_error"] = fs_radial_curvature_error;
    j["fs_transverse_curvature_error"] = fs_transverse_curvature_error;
    j["fs_laplacian_error"] = fs_laplacian_error;
    j["pass"] = pass;
    j["diagnostic"] = diagnostic;
    return j;
}

nlohmann::ordered_json ComparisonReport::to_json() const {
    nlohmann::ordered_json j;
    j["theorem"] = theorem;
    j["model"] = model;
    j["grid"] = grid;
    j["lhs"] = lhs;
    j["rhs"] = rhs;
    j["max_violation"] = max_violation;
    j["tolerance"] = tolerance;
    j["verdict"] = verdict;
    j["note"] = note;
    return j;
}

ComparisonReport comparison_check(const RadialProfile& profile, const std::string& theorem,
                                  const std::string& model, const ComparisonOptions& opt) {
    const CalibrationReport& gate = cached_gate();
    if (!gate.pass) throw std::runtime_error("calibration gate failed: " + gate.diagnostic);

    const double r_max = (opt.r_max > 0.0) ? opt.r_max : profile.param_max();
    const int m = profile.dim();
    const HypothesisCertificate cert =
        opt.certificate ? *opt.certificate
                        : certify_hypotheses(profile, r_max, opt.certify_nodes, opt.restarts,
                                             opt.seed);

    ComparisonReport rep;
    rep.theorem = theorem;
    rep.model = model;
    rep.tolerance = opt.tolerance;

    if (theorem == "diameter") {
        const double lambda = cert.min_ric_perp / (m - 1);
        if (!(lambda > 0.0))
            throw std::domain_error(
                "diameter check needs a positive certified orthogonal Ricci lower bound, got " +
                fmt(cert.min_ric_perp));
        const DiameterReport d = diameter_estimate(profile, lambda);
        rep.lhs = {d.length};
        rep.rhs = {d.bound};
        rep.max_violation = d.length - d.bound;
        rep.verdict = rep.max_violation <= rep.tolerance;
        rep.note = "total radial length vs sqrt(2/lambda) pi with lambda = min Ric_perp/(m-1) = " +
                   fmt(lambda) + " certified on " + std::to_string(cert.nodes) + " nodes";
        return rep;
    }

    if (theorem == "3.2") {
        const double kappa = cert.min_hol; // = 2 lambda
        if (!(kappa > 0.0))
            throw std::domain_error(
                "index-form check needs a positive certified holomorphic lower bound, got " +
                fmt(cert.min_hol));
        const double crit = M_PI / std::sqrt(kappa);
        const std::function<double(double)> K = [kappa](double) { return kappa; };
        rep.tolerance = 0.0;
        for (double c : {1.02, 1.1, 1.25, 1.5, 2.0, 3.0}) {
            rep.grid.push_back(c * crit);
            rep.lhs.push_back(sine_index_form(K, c * crit));
            rep.rhs.push_back(0.0);
        }
        rep.max_violation = *std::max_element(rep.lhs.begin(), rep.lhs.end());
        rep.verdict = rep.max_violation <= rep.tolerance;
        rep.note = "sine-field index form for K = certified min H = " + fmt(kappa) +
                   "; negative beyond ell = pi/sqrt(K) = " + fmt(crit) +
                   " certifies geodesic instability";
        return rep;
    }

    GeodesicSolution sol = radial_geodesic(profile, r_max);

    if (theorem == "volume") {
        if (cert.min_ric_perp < -1e-8 || cert.min_hol < -1e-8)
            throw std::domain_error("volume comparison vs the flat model needs min Ric_perp >= 0 "
                                    "and min H >= 0; certified " +
                                    fmt(cert.min_ric_perp) + " and " + fmt(cert.min_hol));
        double hi = 0.98 * sol.eta_max();
        const std::function<double(double)> kc = [&sol](double e) {
            return sol.radial_curvature(e);
        };
        const std::function<double(double)> kp = [&sol](double e) {
            return sol.transverse_curvature(e);
        };
        for (const auto& probe : {jacobi_solve(kc, JacobiBc::Point, {hi}),
                                  jacobi_solve(kp, JacobiBc::Point, {hi})})
            if (probe.first_zero) hi = std::min(hi, 0.95 * *probe.first_zero);
        const std::vector<double> ells =
            opt.ell.empty() ? linear_grid(hi / 32, hi, 32) : opt.ell;
        const VolumeRatioTable table = volume_ratio_table(sol, 0.0, ells);
        rep.grid = table.ell;
        rep.lhs = table.ratio;
        rep.rhs.push_back(table.ratio.front());
        for (std::size_t i = 0; i + 1 < table.ratio.size(); ++i)
            rep.rhs.push_back(table.ratio[i]);
        rep.tolerance = 1e-9;
        rep.max_violation = 0.0;
        for (std::size_t i = 1; i < table.ratio.size(); ++i)
            rep.max_violation = std::max(rep.max_violation, table.ratio[i] - table.ratio[i - 1]);
        rep.verdict = rep.max_violation <= rep.tolerance;
        rep.note = "ball-volume ratio vs the flat model; certified min Ric_perp = " +
                   fmt(cert.min_ric_perp) + ", min H = " + fmt(cert.min_hol);
        return rep;
    }

    bool radial_k = false;
    JacobiBc bc = JacobiBc::Point;
    double lambda = 0.0, kappa = 0.0, factor = 1.0;
    std::string desc;
    if (theorem == "1.2i") {
        lambda = cert.min_ric_perp / (m - 1);
        kappa = 0.5 * lambda;
        factor = m - 1;
        desc = "laplacian_perp vs (m-1) cot_{lambda/2}, lambda = min Ric_perp/(m-1) = ";
    } else if (theorem == "1.2ii") {
        lambda = 0.5 * cert.min_hol;
        kappa = 2.0 * lambda;
        radial_k = true;
        factor = 0.5;
        desc = "holomorphic hessian vs (1/2) cot_{2 lambda}, lambda = min H/2 = ";
    } else if (theorem == "1.5") {
        lambda = cert.min_orth_bis;
        kappa = 0.5 * lambda;
        factor = 1.0;
        desc = "transverse log derivative vs cot_{lambda/2}, lambda = min orth. bisectional = ";
    } else if (theorem == "1.3") {
        lambda = cert.min_ric_perp / (m - 1);
        kappa = 0.5 * lambda;
        bc = JacobiBc::Submanifold;
        factor = m - 1;
        desc = "tube laplacian_perp vs (m-1) tan_{lambda/2}, lambda = min Ric_perp/(m-1) = ";
    } else {
        throw std::invalid_argument("comparison_check: unknown theorem id \"" + theorem +
                                    "\"; expected one of 1.2i, 1.2ii, 1.5, 1.3, 3.2, volume, "
                                    "diameter");
    }

    const std::function<double(double)> K = [&sol, radial_k](double e) {
        return radial_k ? sol.radial_curvature(e) : sol.transverse_curvature(e);
    };

    std::vector<double> grid = opt.ell;
    if (grid.empty()) {
        double hi = 0.95 * sol.eta_max();
        if (kappa > 0.0) {
            const double pole =
                (bc == JacobiBc::Point) ? M_PI / std::sqrt(kappa) : 0.5 * M_PI / std::sqrt(kappa);
            hi = std::min(hi, 0.95 * pole);
        }
        const JacobiSolution probe = jacobi_solve(K, bc, {hi});
        if (probe.first_zero) hi = std::min(hi, 0.95 * *probe.first_zero);
        const int n = std::max(2, opt.grid_n);
        grid = linear_grid(hi / n, hi, n);
    }

    const JacobiSolution sol_j = jacobi_solve(K, bc, grid);
    if (sol_j.first_zero && *sol_j.first_zero <= grid.back())
        throw std::domain_error("comparison_check: Jacobi field vanishes at eta = " +
                                fmt(*sol_j.first_zero) + " inside the requested grid");

    rep.grid = grid;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double lhs = factor * sol_j.log_derivative(i);
        const double rhs = (bc == JacobiBc::Point) ? factor * cot_kappa(kappa, grid[i])
                                                   : factor * tan_kappa(kappa, grid[i]);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.max_violation = std::max(rep.max_violation, lhs - rhs);
    }
    rep.verdict = rep.max_violation <= rep.tolerance;
    rep.note = desc + fmt(lambda) + ", certified on " + std::to_string(cert.nodes) +
               " nodes over r in [0, " + fmt(cert.r_hi) + "]";
    return rep;
}

std::string geodesic_csv(const GeodesicSolution& sol, const std::vector<double>& eta) {
    check_queries(eta, "geodesic_csv");
    if (eta.back() > sol.eta_max() * (1.0 + 1e-12))
        throw std::out_of_range("geodesic_csv: arc length beyond the geodesic range");
    const std::function<double(double)> kc = [&sol](double e) { return sol.radial_curvature(e); };
    const std::function<double(double)> kp = [&sol](double e) {
        return sol.transverse_curvature(e);
    };
    const JacobiSolution jc = jacobi_solve(kc, JacobiBc::Point, eta);
    const JacobiSolution jp = jacobi_solve(kp, JacobiBc::Point, eta);
    std::string out = "eta,K_C,K_perp,J_C,J_C_prime,J_perp,J_perp_prime\n";
    for (std::size_t i = 0; i < eta.size(); ++i) {
        out += fmt(eta[i]) + ',' + fmt(sol.radial_curvature(eta[i])) + ',' +
               fmt(sol.transverse_curvature(eta[i])) + ',' + fmt(jc.j[i]) + ',' + fmt(jc.jp[i]) +
               ',' + fmt(jp.j[i]) + ',' + fmt(jp.jp[i]) + '\n';
    }
    return out;
}

} // namespace kahler
