#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>

#include "kahler/curvature_tensor.hpp"

namespace kahler {

/**
 * Hermitian surface obtained by blowing up one point of the projective plane,
 * realized as the hypersurface {u1 v2 = u2 v1} in P^2 x P^1 carrying the
 * restriction of the product metric
 *
 *   omega = i ddbar log |u|^2 + lambda * i ddbar log |v|^2,   lambda > 0.
 *
 * The simultaneous U(2) action on (u1,u2) and (v1,v2) moves every point either
 * to (a, 0) in the chart (z1,z2) -> ([1 : z1 : z1 z2], [1 : z2]) with a >= 0,
 * or to the single representative ([0:1:0], [1:0]) on the curve u0 = 0.  All
 * global curvature questions therefore reduce to a one-parameter family of
 * pointwise computations plus one extra point.
 */
struct BlowupSurfaceMetric {
    double lambda = 1.0;
    explicit BlowupSurfaceMetric(double l);
};

enum class SurfaceChart { affine, infinity };

/** Representative point: radius a of (a, 0) in the affine chart; a is ignored at infinity. */
struct ChartPoint {
    SurfaceChart chart = SurfaceChart::affine;
    double a = 0.0;
};

/**
 * Curvature numbers in an orthonormal (1,0)-frame aligned with the chart axes
 * at a representative point.  Only the two diagonals and the mixed (1,1,2,2)
 * component survive there, so the holomorphic sectional curvature of a unit
 * direction depends on s = |x1|^2 alone and is an explicit quadratic in s.
 */
struct UnitaryFrameCurvature {
    double r1111 = 0.0; // H of the first axis
    double r2222 = 0.0; // H of the second axis
    double r1122 = 0.0; // orthogonal bisectional curvature of the axis pair

    /** H of the unit direction with |x1|^2 = s, s in [0,1]. */
    double h(double s) const;

    /** Exact minimum of h over s in [0,1] (vertex of the quadratic vs endpoints). */
    double h_min(double* arg = nullptr) const;

    double ric1() const { return r1111 + r1122; }
    double ric2() const { return r2222 + r1122; }
    double ric_min(int* which = nullptr) const;

    /** Diagonal tensor with these components, for the generic extremizers. */
    CurvatureTensor tensor() const;
};

/** Closed-form curvature data at a representative point. */
struct ClosedFormCurvature {
    double g11 = 0.0, g22 = 0.0;                     // metric diagonal
    double r1111 = 0.0, r2222 = 0.0, r1122 = 0.0;    // coordinate components; mixed ones vanish
    double ric11 = 0.0, ric22 = 0.0;                 // coordinate Ricci diagonal; off-diagonal vanishes
    UnitaryFrameCurvature frame;                     // after rescaling by the diagonal metric

    /** Raw quartic R(X, Xbar, X, Xbar) of the coordinate direction (x1, x2). */
    double quartic(const cplx& x1, const cplx& x2) const;
};

ClosedFormCurvature curvature_closed_form(const BlowupSurfaceMetric& metric, const ChartPoint& point);

/**
 * A Kaehler potential of two complex variables and the point where curvature
 * is wanted.  When metric_fn is supplied the differentiation starts from the
 * exact metric entries (two orders of finite differences instead of four),
 * which is the high-accuracy path; otherwise every derivative comes from the
 * potential itself.
 */
struct PotentialChart {
    std::function<double(const cplx&, const cplx&)> potential;
    Eigen::Vector2cd point = Eigen::Vector2cd::Zero();
    std::function<Eigen::Matrix2cd(const cplx&, const cplx&)> metric_fn;
};

/** Chart potentials of the blow-up surface at an arbitrary chart point. */
PotentialChart affine_chart(const BlowupSurfaceMetric& metric, const cplx& z1, const cplx& z2,
                            bool exact_metric = false);
PotentialChart infinity_chart(const BlowupSurfaceMetric& metric, const cplx& z1, const cplx& z2,
                              bool exact_metric = false);

/** Full numeric curvature output at one point. */
struct PotentialCurvature {
    Eigen::Matrix2cd g;              // metric at the point
    Eigen::Matrix2cd ricci;          // coordinate Ricci R_{i jbar}
    cplx r[2][2][2][2];              // coordinate components R_{i jbar k lbar}
    CurvatureTensor frame{2};        // tensor in an orthonormal (1,0)-frame
    double symmetry_residual = 0.0;  // worst pair-swap/conjugation defect before symmetrization

    cplx component(int i, int j, int k, int l) const { return r[i][j][k][l]; }

    /** Largest |R_{i jbar k lbar}| over the components outside the diagonal families. */
    double mixed_component_max() const;
};

/**
 * Curvature from the displayed second-derivative formula
 *
 *   R_{i jbar k lbar} = -g_{i jbar, k lbar}
 *                       + sum_{p,q} g_{i pbar, k} conj(g_{j qbar, l}) g^{pbar q},
 *
 * with all derivatives taken by Richardson-extrapolated fourth-order central
 * differences (of the potential, or of the exact metric when supplied).
 * Throws std::runtime_error when g fails to be positive definite at the point.
 */
PotentialCurvature curvature_from_potential(const PotentialChart& chart);

enum class SurfaceFunctional { ricci, hsc };

/** Global minimum of a curvature functional over the surface. */
struct SurfaceScan {
    double min_value = 0.0;
    SurfaceChart chart = SurfaceChart::affine;
    double a = 0.0;                                   // argmin radius when chart == affine
    double s = 1.0;                                   // |x1|^2 of the minimizing unit direction
    Eigen::Vector2d direction = Eigen::Vector2d(1.0, 0.0); // real by phase invariance
};

/**
 * Minimize Ricci (over unit directions) or H (over unit directions) over all
 * representative points: a log-spaced radius grid joined with a = 0 and the
 * point at infinity, followed by a golden-section polish around the grid
 * argmin.  Direction minimization is the exact quadratic-in-s reduction.
 */
SurfaceScan surface_scan(const BlowupSurfaceMetric& metric, SurfaceFunctional functional,
                         int grid_nodes = 512, double a_max = 1e3, int jobs = 0);

/** Bisection output for the positivity threshold in lambda. */
struct ThresholdReport {
    std::string functional;       // "ricci" | "hsc"
    double lambda_star = 0.0;
    double lo = 0.0, hi = 0.0;    // final bracket
    SurfaceScan witness;          // scan at the largest lambda seen to fail

    std::string to_json() const;
};

/**
 * Smallest lambda with everywhere-positive Ricci (resp. holomorphic sectional)
 * curvature, located by bisection of the scan predicate on [lo, hi].  Throws
 * std::runtime_error when the bracket does not straddle the sign change.
 */
ThresholdReport threshold_ricci(double lo = 0.1, double hi = 2.0, double tol = 1e-3, int jobs = 0);
ThresholdReport threshold_hsc(double lo = 0.1, double hi = 2.0, double tol = 1e-3, int jobs = 0);

} // namespace kahler
