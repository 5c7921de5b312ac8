#pragma once

#include "kahler/radial_profile.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kahler {

/**
 * Scalar Jacobi equation J'' + K J = 0 along a unit-speed radial geodesic.
 *
 *   Point:        J(0) = 0, J'(0) = 1  (distance from a point)
 *   Submanifold:  J(0) = 1, J'(0) = 0  (distance from a totally geodesic
 *                                       complex hypersurface, cosine type)
 */
enum class JacobiBc { Point, Submanifold };

struct JacobiSolution {
    std::vector<double> eta; // query abscissae, strictly increasing
    std::vector<double> j;   // J at the queries
    std::vector<double> jp;  // J' at the queries
    std::optional<double> first_zero; // first vanishing of J in (0, back], if any

    /** J'/J at query i; throws std::domain_error if J vanished there. */
    double log_derivative(std::size_t i) const;
};

/**
 * Integrates J'' + K(eta) J = 0 from 0 to queries.back() with an adaptive
 * embedded Runge-Kutta 5(4) pair, stopping exactly at each query.  Zeros of
 * J are detected by sign change and refined by bisection to 1e-10.
 */
JacobiSolution jacobi_solve(const std::function<double(double)>& K, JacobiBc bc,
                            const std::vector<double>& queries, double tol = 1e-11);

/** Cubic Hermite interpolation table over strictly increasing nodes. */
struct HermiteTable {
    std::vector<double> x, y, dy;

    double operator()(double t) const;
    bool empty() const { return x.empty(); }
};

/**
 * Radial geodesic of a rotationally invariant metric profile: the arc-length
 * parameterization eta(r) = int_0^sqrt(r) sqrt(h(u^2)) du together with the
 * two curvature coefficients seen by Jacobi fields along it,
 *
 *   K_C(eta)    = A(r(eta))     (the J-rotated radial direction)
 *   K_perp(eta) = B(r(eta))/2   (each of the 2m-2 orthogonal real directions).
 *
 * Normalized so the flat profile gives eta = sqrt(r), K_C = K_perp = 0.
 */
class GeodesicSolution {
public:
    int dim() const { return m_; }
    double r_max() const { return r_max_; }
    double eta_max() const { return eta_max_; }

    double eta_of_r(double r) const;
    double r_of_eta(double eta) const;

    double radial_curvature(double eta) const;     // K_C
    double transverse_curvature(double eta) const; // K_perp

    const RadialProfile& profile() const { return profile_; }

private:
    friend GeodesicSolution radial_geodesic(const RadialProfile&, double);
    explicit GeodesicSolution(RadialProfile p) : profile_(std::move(p)) {}

    RadialProfile profile_;
    int m_ = 0;
    double r_max_ = 0.0;
    double eta_max_ = 0.0;
    HermiteTable r_of_eta_, kc_, kperp_;
};

/** Builds the geodesic data on [0, r_max]; r_max must lie in the profile range. */
GeodesicSolution radial_geodesic(const RadialProfile& profile, double r_max);

/**
 * Hessian-type quantities of the distance function at arc length ell,
 * expressed through scalar Jacobi fields:
 *
 *   laplacian_perp      = (m-1) J'/J, point bc on K_perp
 *   holomorphic_hessian = (1/2) J'/J, point bc on K_C
 *   orthogonal_hessian  = (1/2) J'/J, point bc on K_perp (per real direction)
 *   tube_laplacian_perp = (m-1) J'/J, submanifold bc on K_perp
 *
 * Each throws std::domain_error when a conjugate (resp. focal) point occurs
 * at or before the largest requested ell.
 */
struct RadialHessians {
    std::vector<double> ell;
    std::vector<double> laplacian_perp;
    std::vector<double> holomorphic_hessian;
    std::vector<double> orthogonal_hessian;
    std::vector<double> tube_laplacian_perp;
};

RadialHessians radial_hessians(const GeodesicSolution& sol, const std::vector<double>& ell);

double laplacian_perp(const GeodesicSolution& sol, double ell);
double holomorphic_hessian(const GeodesicSolution& sol, double ell);
double orthogonal_hessian(const GeodesicSolution& sol, double ell);
double tube_laplacian_perp(const GeodesicSolution& sol, double ell);

/**
 * Index form I(X) = int_0^ell (X'^2 - K X^2) deta of a scalar test field with
 * X(0) = 0 (boundary terms vanish for the supported cases).
 */
double index_form(const std::function<double(double)>& K, double ell,
                  const std::function<double(double)>& field,
                  const std::function<double(double)>& field_derivative);

/** index_form with the test field X = sin(pi eta / ell). */
double sine_index_form(const std::function<double(double)>& K, double ell);

/**
 * Geodesic-ball volume via Vol(ell) = int_0^ell J_C J_perp^(2m-2) deta with
 * both Jacobi factors in point normalization (the dimensional constant is
 * dropped: it cancels in every ratio; the flat value is ell^(2m)/(2m)).
 */
double ball_volume(const GeodesicSolution& sol, double ell);

/** Same quantity in the space form of constant holomorphic curvature 2*lambda. */
double model_ball_volume(int m, double lambda, double ell);

struct VolumeRatioTable {
    int m = 0;
    double lambda = 0.0;            // model holomorphic curvature / 2
    std::vector<double> ell, ratio; // Vol_g / Vol_model at each ell
    bool nonincreasing = false;     // discrete monotonicity with 1e-9 slack

    nlohmann::ordered_json to_json() const;
};

VolumeRatioTable volume_ratio_table(const GeodesicSolution& sol, double lambda,
                                    const std::vector<double>& ell);

struct DiameterReport {
    double length = 0.0; // total radial arc length, tail-extrapolated
    double lambda = 0.0;
    double bound = 0.0;  // sqrt(2/lambda) * pi
    bool verdict = false;

    nlohmann::ordered_json to_json() const;
};

/** Total radial length versus the sqrt(2/lambda)*pi bound; needs lambda > 0. */
DiameterReport diameter_estimate(const RadialProfile& profile, double lambda);

/**
 * Lower curvature bounds along the geodesic, certified by running the sphere
 * extremizers on the curvature tensor at sampled radii.
 */
struct HypothesisCertificate {
    double min_hol = 0.0;      // min over unit Z of H(Z)
    double min_ric_perp = 0.0; // min over unit Z of Ric_perp(Z, Zbar)
    double min_orth_bis = 0.0; // min over orthonormal pairs of R(Z,Zbar,W,Wbar)
    double r_lo = 0.0, r_hi = 0.0;
    int nodes = 0;
};

HypothesisCertificate certify_hypotheses(const RadialProfile& profile, double r_max,
                                         int nodes = 33, int restarts = 16,
                                         std::uint64_t seed = 42);

/**
 * Convention self-test.  Checks the flat profile against eta = sqrt(r),
 * (m-1)/ell and 1/(2 ell), cross-checks both against a finite-difference
 * Hessian of euclidean distance in R^(2m), and checks the round metric's
 * constant coefficients K_C = 2, K_perp = 1/2.  Every comparison entry point
 * refuses to run while this gate fails.
 */
struct CalibrationReport {
    double flat_eta_error = 0.0;
    double flat_r_roundtrip_error = 0.0;
    double flat_laplacian_error = 0.0;
    double flat_hessian_error = 0.0;
    double flat_fd_dictionary_error = 0.0;
    double fs_radial_curvature_error = 0.0;
    double fs_transverse_curvature_error = 0.0;
    double fs_laplacian_error = 0.0;
    bool pass = false;
    std::string diagnostic;

    nlohmann::ordered_json to_json() const;
};

CalibrationReport calibration_gate();

/**
 * One comparison-inequality verification.  Supported ids:
 *
 *   "1.2i"     laplacian_perp           <= (m-1) cot_{lambda/2},  lambda from min Ric_perp/(m-1)
 *   "1.2ii"    holomorphic_hessian      <= (1/2) cot_{2 lambda},  lambda from min H / 2
 *   "1.5"      J'_perp/J_perp           <= cot_{lambda/2},        lambda from min orth. bisectional
 *   "1.3"      tube laplacian_perp      <= (m-1) tan_{lambda/2},  lambda from min Ric_perp/(m-1)
 *   "3.2"      sine-field index form < 0 for K = 2 lambda, ell > pi/sqrt(2 lambda)
 *   "volume"   ball-volume ratio vs the flat model nonincreasing (needs
 *              certified min Ric_perp >= 0 and min H >= 0)
 *   "diameter" total radial length <= sqrt(2/lambda) pi
 *
 * The bound parameter is always inferred from the certificate, so the
 * hypothesis of the checked statement holds by construction.
 */
struct ComparisonReport {
    std::string theorem;
    std::string model;
    std::vector<double> grid;
    std::vector<double> lhs, rhs;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool verdict = false;
    std::string note;

    nlohmann::ordered_json to_json() const;
};

struct ComparisonOptions {
    double r_max = 0.0;        // 0 = full profile range
    std::vector<double> ell;   // explicit arc-length grid; empty = automatic
    int grid_n = 64;           // automatic grid size
    int certify_nodes = 33;
    int restarts = 16;
    std::uint64_t seed = 42;
    double tolerance = 1e-6;
    std::optional<HypothesisCertificate> certificate; // reuse a precomputed one
};

ComparisonReport comparison_check(const RadialProfile& profile, const std::string& theorem,
                                  const std::string& model, const ComparisonOptions& opt = {});

/** CSV rows (eta, K_C, K_perp, J_C, J_C', J_perp, J_perp'), point bc. */
std::string geodesic_csv(const GeodesicSolution& sol, const std::vector<double>& eta);

} // namespace kahler
