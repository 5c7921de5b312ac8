#include "kahler/blowup_surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kahler/parallel.hpp"

namespace kahler {

namespace {

using Vec2 = Eigen::Vector2cd;

// ---------------------------------------------------------------------------
// Wirtinger derivatives by Richardson-extrapolated 4th-order central stencils.
//
// A product of Wirtinger factors d/dz_k = (d/dx_k - i d/dy_k)/2 (conjugated:
// + i) expands into <= 2^n real mixed partials on the four real axes
// (x1, y1, x2, y2); each of those is a tensor product of one-dimensional
// central stencils.  Formally cancelling cross terms cancel exactly in the
// accumulation map, so only genuine partials are evaluated.
// ---------------------------------------------------------------------------

struct Tap {
    int off;
    double w;
};

const std::vector<Tap>& stencil_taps(int order) {
    static const std::vector<Tap> s1 = {{-2, 1.0 / 12}, {-1, -8.0 / 12}, {1, 8.0 / 12}, {2, -1.0 / 12}};
    static const std::vector<Tap> s2 = {
        {-2, -1.0 / 12}, {-1, 16.0 / 12}, {0, -30.0 / 12}, {1, 16.0 / 12}, {2, -1.0 / 12}};
    static const std::vector<Tap> s3 = {
        {-3, 1.0 / 8}, {-2, -1.0}, {-1, 13.0 / 8}, {1, -13.0 / 8}, {2, 1.0}, {3, -1.0 / 8}};
    static const std::vector<Tap> s4 = {
        {-3, -1.0 / 6}, {-2, 2.0}, {-1, -13.0 / 2}, {0, 28.0 / 3}, {1, -13.0 / 2}, {2, 2.0}, {3, -1.0 / 6}};
    switch (order) {
        case 1: return s1;
        case 2: return s2;
        case 3: return s3;
        case 4: return s4;
        default: throw std::logic_error("unsupported finite-difference order");
    }
}

struct WirtingerFactor {
    int axis;  // complex axis 0 or 1
    bool bar;  // conjugated derivative
};

using MultiIndex = std::array<int, 4>;

std::map<MultiIndex, cplx> expand_factors(const std::vector<WirtingerFactor>& factors) {
    std::map<MultiIndex, cplx> acc{{MultiIndex{0, 0, 0, 0}, cplx(1.0, 0.0)}};
    for (const auto& f : factors) {
        const cplx yw = f.bar ? cplx(0.0, 0.5) : cplx(0.0, -0.5);
        std::map<MultiIndex, cplx> next;
        for (const auto& [mi, w] : acc) {
            MultiIndex mx = mi, my = mi;
            mx[2 * f.axis] += 1;
            my[2 * f.axis + 1] += 1;
            next[mx] += 0.5 * w;
            next[my] += yw * w;
        }
        acc = std::move(next);
    }
    return acc;
}

cplx wirtinger_at_step(const std::function<cplx(const Vec2&)>& f, const Vec2& z,
                       const std::map<MultiIndex, cplx>& partials, const std::array<double, 4>& h) {
    std::map<MultiIndex, cplx> taps;
    for (const auto& [mi, w] : partials) {
        if (std::abs(w) == 0.0) continue;
        std::vector<std::pair<MultiIndex, cplx>> pts{{MultiIndex{0, 0, 0, 0}, w}};
        for (int axis = 0; axis < 4; ++axis) {
            if (mi[axis] == 0) continue;
            const auto& st = stencil_taps(mi[axis]);
            const double hp = std::pow(h[axis], mi[axis]);
            std::vector<std::pair<MultiIndex, cplx>> grown;
            grown.reserve(pts.size() * st.size());
            for (const auto& [off, cw] : pts)
                for (const auto& tap : st) {
                    MultiIndex o = off;
                    o[axis] += tap.off;
                    grown.emplace_back(o, cw * (tap.w / hp));
                }
            pts = std::move(grown);
        }
        for (const auto& [off, cw] : pts) taps[off] += cw;
    }
    cplx sum(0.0, 0.0);
    for (const auto& [off, cw] : taps) {
        if (std::abs(cw) == 0.0) continue;
        Vec2 p = z;
        p[0] += cplx(off[0] * h[0], off[1] * h[1]);
        p[1] += cplx(off[2] * h[2], off[3] * h[3]);
        sum += cw * f(p);
    }
    return sum;
}

/** One Wirtinger derivative with per-axis step h_rel * max(1, |z_k|), once Richardson-extrapolated. */
cplx wirtinger(const std::function<cplx(const Vec2&)>& f, const Vec2& z,
               const std::vector<WirtingerFactor>& factors, double h_rel) {
    const auto partials = expand_factors(factors);
    std::array<double, 4> h{}, h_half{};
    for (int k = 0; k < 2; ++k) {
        const double step = h_rel * std::max(1.0, std::abs(z[k]));
        h[2 * k] = h[2 * k + 1] = step;
        h_half[2 * k] = h_half[2 * k + 1] = 0.5 * step;
    }
    const cplx coarse = wirtinger_at_step(f, z, partials, h);
    const cplx fine = wirtinger_at_step(f, z, partials, h_half);
    return (16.0 * fine - coarse) / 15.0;
}

// relative steps: large enough that roundoff in the high-order differences
// stays below the truncation error they remove (the fourth difference of an
// O(1) potential loses ~eps/h^4, so h must not be small)
constexpr double kPotentialStep2 = 5e-3;
constexpr double kPotentialStep3 = 1.5e-2;
constexpr double kPotentialStep4 = 3e-2;
constexpr double kMetricStep1 = 1e-3;
constexpr double kMetricStep2 = 2e-3;

double golden_min(const std::function<double(double)>& f, double lo, double hi, double* arg) {
    constexpr double gr = 0.61803398874989484820;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 72; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    if (arg) *arg = f1 <= f2 ? x1 : x2;
    return std::min(f1, f2);
}

double point_min(const BlowupSurfaceMetric& metric, const ChartPoint& pt, SurfaceFunctional functional,
                 double* s_arg) {
    const ClosedFormCurvature cf = curvature_closed_form(metric, pt);
    if (functional == SurfaceFunctional::hsc) return cf.frame.h_min(s_arg);
    int which = 0;
    const double v = cf.frame.ric_min(&which);
    if (s_arg) *s_arg = which == 0 ? 1.0 : 0.0;
    return v;
}

ThresholdReport threshold_impl(SurfaceFunctional functional, const char* name, double lo, double hi,
                               double tol, int jobs) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("threshold bracket must satisfy 0 < lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("threshold tolerance must be positive");
    const auto scan = [&](double lambda) {
        return surface_scan(BlowupSurfaceMetric(lambda), functional, 512, 1e3, jobs);
    };
    const SurfaceScan lo_scan = scan(lo);
    const SurfaceScan hi_scan = scan(hi);
    if (lo_scan.min_value > 0.0 || hi_scan.min_value <= 0.0)
        throw std::runtime_error("threshold bracket does not straddle the positivity change");
    ThresholdReport rep;
    rep.functional = name;
    rep.witness = lo_scan;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const SurfaceScan s = scan(mid);
        if (s.min_value > 0.0) {
            hi = mid;
        } else {
            lo = mid;
            rep.witness = s;
        }
    }
    rep.lo = lo;
    rep.hi = hi;
    rep.lambda_star = 0.5 * (lo + hi);
    return rep;
}

}  // namespace

BlowupSurfaceMetric::BlowupSurfaceMetric(double l) : lambda(l) {
    if (!(l > 0.0)) throw std::invalid_argument("factor weight lambda must be positive");
}

double UnitaryFrameCurvature::h(double s) const {
    const double u = 1.0 - s;
    return r1111 * s * s + r2222 * u * u + 4.0 * r1122 * s * u;
}

double UnitaryFrameCurvature::h_min(double* arg) const {
    double best = h(1.0), best_s = 1.0;
    const double at0 = h(0.0);
    if (at0 < best) {
        best = at0;
        best_s = 0.0;
    }
    const double c2 = r1111 + r2222 - 4.0 * r1122;  // h(s) = c2 s^2 + c1 s + c0
    const double c1 = 4.0 * r1122 - 2.0 * r2222;
    if (c2 > 0.0) {
        const double vertex = -c1 / (2.0 * c2);
        if (vertex > 0.0 && vertex < 1.0) {
            const double hv = h(vertex);
            if (hv < best) {
                best = hv;
                best_s = vertex;
            }
        }
    }
    if (arg) *arg = best_s;
    return best;
}

double UnitaryFrameCurvature::ric_min(int* which) const {
    const double a = ric1(), b = ric2();
    if (which) *which = a <= b ? 0 : 1;
    return std::min(a, b);
}

CurvatureTensor UnitaryFrameCurvature::tensor() const {
    return diagonal_type_tensor(2, r1111, r1122, r2222);
}

double ClosedFormCurvature::quartic(const cplx& x1, const cplx& x2) const {
    const double s1 = std::norm(x1), s2 = std::norm(x2);
    return s1 * s1 * r1111 + s2 * s2 * r2222 + 4.0 * s1 * s2 * r1122;
}

ClosedFormCurvature curvature_closed_form(const BlowupSurfaceMetric& metric, const ChartPoint& point) {
    if (!(point.a >= 0.0)) throw std::invalid_argument("chart radius must be nonnegative");
    const double lambda = metric.lambda;
    ClosedFormCurvature out;
    if (point.chart == SurfaceChart::affine) {
        const double t = point.a * point.a;  // |z1|^2 of the representative (a, 0)
        const double eta = 1.0 + t;
        const double w = t + lambda * eta;
        out.g11 = 1.0 / (eta * eta);
        out.g22 = w / eta;
        out.r1111 = 2.0 / (eta * eta * eta * eta);
        out.r2222 = 2.0 * t * t / (eta * eta) + 2.0 * lambda;
        out.r1122 = (t - 1.0) / (eta * eta * eta) + t / (eta * eta * eta * w);
        out.ric11 = 2.0 / (eta * eta) + (t - 1.0) / (eta * eta * w) + t / (eta * eta * w * w);
        out.ric22 = (t - 1.0) / eta + (t + 2.0 * t * t + 2.0 * lambda * eta * eta) / (eta * w);
    } else {
        out.g11 = 1.0;
        out.g22 = 1.0 + lambda;
        out.r1111 = 2.0;
        out.r2222 = 2.0 + 2.0 * lambda;
        out.r1122 = 1.0;
        out.ric11 = 2.0 + 1.0 / (1.0 + lambda);
        out.ric22 = 3.0;
    }
    out.frame.r1111 = out.r1111 / (out.g11 * out.g11);
    out.frame.r2222 = out.r2222 / (out.g22 * out.g22);
    out.frame.r1122 = out.r1122 / (out.g11 * out.g22);
    return out;
}

PotentialChart affine_chart(const BlowupSurfaceMetric& metric, const cplx& z1, const cplx& z2,
                            bool exact_metric) {
    const double lambda = metric.lambda;
    PotentialChart chart;
    chart.point = Vec2(z1, z2);
    chart.potential = [lambda](const cplx& w1, const cplx& w2) {
        const double sigma = 1.0 + std::norm(w2);
        const double eta = 1.0 + std::norm(w1) * sigma;
        return std::log(eta) + lambda * std::log(sigma);
    };
    if (exact_metric) {
        chart.metric_fn = [lambda](const cplx& w1, const cplx& w2) {
            const double sigma = 1.0 + std::norm(w2);
            const double eta = 1.0 + std::norm(w1) * sigma;
            Eigen::Matrix2cd g;
            g(0, 0) = sigma / (eta * eta);
            g(0, 1) = std::conj(w1) * w2 / (eta * eta);
            g(1, 0) = std::conj(g(0, 1));
            g(1, 1) = std::norm(w1) * (std::norm(w1) + 1.0) / (eta * eta) + lambda / (sigma * sigma);
            return g;
        };
    }
    return chart;
}

PotentialChart infinity_chart(const BlowupSurfaceMetric& metric, const cplx& z1, const cplx& z2,
                              bool exact_metric) {
    const double lambda = metric.lambda;
    PotentialChart chart;
    chart.point = Vec2(z1, z2);
    chart.potential = [lambda](const cplx& w1, const cplx& w2) {
        const double sigma = 1.0 + std::norm(w2);
        const double eta = 1.0 + std::norm(w1) + std::norm(w2);
        return std::log(eta) + lambda * std::log(sigma);
    };
    if (exact_metric) {
        chart.metric_fn = [lambda](const cplx& w1, const cplx& w2) {
            const double sigma = 1.0 + std::norm(w2);
            const double eta = 1.0 + std::norm(w1) + std::norm(w2);
            Eigen::Matrix2cd g;
            g(0, 0) = 1.0 / eta - std::norm(w1) / (eta * eta);
            g(0, 1) = -std::conj(w1) * w2 / (eta * eta);
            g(1, 0) = std::conj(g(0, 1));
            g(1, 1) = 1.0 / eta - std::norm(w2) / (eta * eta) + lambda / (sigma * sigma);
            return g;
        };
    }
    return chart;
}

double PotentialCurvature::mixed_component_max() const {
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    if ((i == j && k == l) || (i == l && k == j)) continue;
                    worst = std::max(worst, std::abs(r[i][j][k][l]));
                }
    return worst;
}

PotentialCurvature curvature_from_potential(const PotentialChart& chart) {
    if (!chart.potential && !chart.metric_fn)
        throw std::invalid_argument("potential chart carries neither a potential nor a metric");

    const Vec2 z = chart.point;
    Eigen::Matrix2cd g;
    cplx d1[2][2][2];     // g_{i jbar, k}
    cplx d2[2][2][2][2];  // g_{i jbar, k lbar}

    if (chart.metric_fn) {
        g = chart.metric_fn(z[0], z[1]);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const std::function<cplx(const Vec2&)> entry = [&chart, i, j](const Vec2& p) {
                    return cplx(chart.metric_fn(p[0], p[1])(i, j));
                };
                for (int k = 0; k < 2; ++k) {
                    d1[i][j][k] = wirtinger(entry, z, {{k, false}}, kMetricStep1);
                    for (int l = 0; l < 2; ++l)
                        d2[i][j][k][l] = wirtinger(entry, z, {{k, false}, {l, true}}, kMetricStep2);
                }
            }
    } else {
        const std::function<cplx(const Vec2&)> f = [&chart](const Vec2& p) {
            return cplx(chart.potential(p[0], p[1]), 0.0);
        };
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                g(i, j) = wirtinger(f, z, {{i, false}, {j, true}}, kPotentialStep2);
                for (int k = 0; k < 2; ++k) {
                    d1[i][j][k] = wirtinger(f, z, {{i, false}, {j, true}, {k, false}}, kPotentialStep3);
                    for (int l = 0; l < 2; ++l)
                        d2[i][j][k][l] =
                            wirtinger(f, z, {{i, false}, {j, true}, {k, false}, {l, true}}, kPotentialStep4);
                }
            }
    }

    PotentialCurvature out;
    out.g = 0.5 * (g + g.adjoint().eval());  // clean finite-difference hermiticity noise

    Eigen::LLT<Eigen::Matrix2cd> llt(out.g);
    if (llt.info() != Eigen::Success || !(out.g.determinant().real() > 0.0))
        throw std::runtime_error("metric is not positive definite at the evaluation point");

    const Eigen::Matrix2cd ginv = out.g.inverse();

    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    cplx sum = -d2[i][j][k][l];
                    for (int p = 0; p < 2; ++p)
                        for (int q = 0; q < 2; ++q) sum += d1[i][p][k] * std::conj(d1[j][q][l]) * ginv(p, q);
                    out.r[i][j][k][l] = sum;
                }

    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            cplx sum(0.0, 0.0);
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) sum += out.r[i][j][k][l] * ginv(l, k);
            out.ricci(i, j) = sum;
        }

    // orthonormal (1,0)-frame: columns of S = (L^-1)^T give S^T g conj(S) = id
    const Eigen::Matrix2cd lower = llt.matrixL();
    const Eigen::Matrix2cd s = lower.inverse().transpose();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    cplx sum(0.0, 0.0);
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j)
                            for (int k = 0; k < 2; ++k)
                                for (int l = 0; l < 2; ++l)
                                    sum += out.r[i][j][k][l] * s(i, a) * std::conj(s(j, b)) * s(k, c) *
                                           std::conj(s(l, d));
                    out.frame.set_raw(a, b, c, d, sum);
                }
    out.symmetry_residual = validate(out.frame).max_violation();
    out.frame.symmetrize();
    return out;
}

SurfaceScan surface_scan(const BlowupSurfaceMetric& metric, SurfaceFunctional functional, int grid_nodes,
                         double a_max, int jobs) {
    if (grid_nodes < 8) throw std::invalid_argument("radius grid needs at least 8 nodes");
    if (!(a_max > 1e-3)) throw std::invalid_argument("radius sweep cap must exceed 1e-3");

    std::vector<double> radii(static_cast<std::size_t>(grid_nodes));
    radii[0] = 0.0;
    const int n = grid_nodes - 1;
    const double lo_exp = -3.0, hi_exp = std::log10(a_max);
    for (int i = 0; i < n; ++i)
        radii[static_cast<std::size_t>(i) + 1] = std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (n - 1.0));

    std::vector<double> val(radii.size()), sarg(radii.size());
    parallel_for(radii.size(), jobs, [&](std::size_t i) {
        val[i] = point_min(metric, ChartPoint{SurfaceChart::affine, radii[i]}, functional, &sarg[i]);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (val[i] < val[best]) best = i;

    SurfaceScan out;
    out.chart = SurfaceChart::affine;
    out.a = radii[best];
    out.min_value = val[best];
    out.s = sarg[best];

    // polish between the neighbors of the grid argmin
    const double lo_a = best == 0 ? 0.0 : radii[best - 1];
    const double hi_a = best + 1 < radii.size() ? radii[best + 1] : radii[best];
    if (hi_a > lo_a) {
        double arg = out.a;
        const double refined = golden_min(
            [&](double a) { return point_min(metric, ChartPoint{SurfaceChart::affine, a}, functional, nullptr); },
            lo_a, hi_a, &arg);
        if (refined < out.min_value) {
            out.min_value = refined;
            out.a = arg;
            point_min(metric, ChartPoint{SurfaceChart::affine, arg}, functional, &out.s);
        }
    }

    double s_inf = 0.0;
    const double v_inf = point_min(metric, ChartPoint{SurfaceChart::infinity, 0.0}, functional, &s_inf);
    if (v_inf < out.min_value) {
        out.chart = SurfaceChart::infinity;
        out.min_value = v_inf;
        out.a = 0.0;
        out.s = s_inf;
    }

    out.direction = Eigen::Vector2d(std::sqrt(out.s), std::sqrt(std::max(0.0, 1.0 - out.s)));
    return out;
}

std::string ThresholdReport::to_json() const {
    nlohmann::ordered_json j;
    j["functional"] = functional;
    j["lambda_star"] = lambda_star;
    j["bracket"] = {lo, hi};
    j["witness"] = nlohmann::ordered_json{
        {"a", witness.chart == SurfaceChart::affine ? witness.a : -1.0},
        {"direction", {witness.direction[0], witness.direction[1]}},
    };
    return j.dump();
}

ThresholdReport threshold_ricci(double lo, double hi, double tol, int jobs) {
    return threshold_impl(SurfaceFunctional::ricci, "ricci", lo, hi, tol, jobs);
}

ThresholdReport threshold_hsc(double lo, double hi, double tol, int jobs) {
    return threshold_impl(SurfaceFunctional::hsc, "hsc", lo, hi, tol, jobs);
}

} // namespace kahler
