#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "kahler/rng.hpp"

namespace kahler {

using cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

/**
 * Curvature tensor of a Kaehler metric expressed in a unitary frame, stored
 * densely as R(i, jbar, k, lbar) for 0 <= i,j,k,l < m.  A valid tensor obeys
 *
 *   R(i,j,k,l) = R(k,j,i,l) = R(i,l,k,j)          (pair swaps)
 *   R(i,j,k,l) = conj(R(j,i,l,k))                 (conjugation)
 *
 * Mutation goes through set_orbit, which writes a value together with its
 * whole symmetry orbit so stored tensors stay valid by construction.
 */
class CurvatureTensor {
public:
    explicit CurvatureTensor(int m);

    int dim() const { return m_; }

    cplx operator()(int i, int j, int k, int l) const { return a_[idx(i, j, k, l)]; }

    /** Write v at (i,j,k,l) and propagate through the symmetry orbit. */
    void set_orbit(int i, int j, int k, int l, cplx v);

    /** Raw entry write; used by samplers that symmetrize afterwards. */
    void set_raw(int i, int j, int k, int l, cplx v) { a_[idx(i, j, k, l)] = v; }

    /** Project an arbitrary table onto the symmetry class (group average). */
    void symmetrize();

    const std::vector<cplx>& data() const { return a_; }

private:
    std::size_t idx(int i, int j, int k, int l) const {
        return static_cast<std::size_t>(((i * m_ + j) * m_ + k) * m_ + l);
    }
    int m_;
    std::vector<cplx> a_;
};

/** Unit tangent direction in C^m (normalized on construction). */
class TangentDirection {
public:
    explicit TangentDirection(VecC z);
    const VecC& vec() const { return z_; }

private:
    VecC z_;
};

/** k-dimensional complex subspace given by an m x k matrix with orthonormal columns. */
class SubspaceSpec {
public:
    explicit SubspaceSpec(MatC basis, double ortho_tol = 1e-12);
    const MatC& basis() const { return e_; }
    int ambient_dim() const { return static_cast<int>(e_.rows()); }
    int dim() const { return static_cast<int>(e_.cols()); }

private:
    MatC e_;
};

struct SymmetryReport {
    double pair_swap_first = 0.0;  // max |R(i,j,k,l) - R(k,j,i,l)|
    double pair_swap_second = 0.0; // max |R(i,j,k,l) - R(i,l,k,j)|
    double conjugation = 0.0;      // max |R(i,j,k,l) - conj(R(j,i,l,k))|
    double max_violation() const;
    bool ok(double tol = 1e-12) const { return max_violation() <= tol; }
    std::vector<std::string> violations(double tol = 1e-12) const;
};

SymmetryReport validate(const CurvatureTensor& t);

/** Raw quartic form R(Z, Zbar, Z, Zbar) (no normalization). */
double quartic_form(const CurvatureTensor& t, const VecC& z);

/** Raw sesquilinear pair form R(Z, Zbar, W, Wbar). */
double bisectional_form(const CurvatureTensor& t, const VecC& z, const VecC& w);

/** Holomorphic sectional curvature of the line through unit Z. */
double holomorphic_sectional(const CurvatureTensor& t, const TangentDirection& z);

/** Hermitian matrix Ric(i,j) = sum_k R(i,j,k,k). */
MatC ricci_matrix(const CurvatureTensor& t);

/** Ric(Z, Zbar) for unit Z. */
double ricci(const CurvatureTensor& t, const TangentDirection& z);

/** Orthogonal Ricci: Ric(Z,Zbar) - H(Z) for unit Z. */
double ric_perp(const CurvatureTensor& t, const TangentDirection& z);

/** Scalar curvature 2 * sum_{i,j} R(i,i,j,j). */
double scalar_curvature(const CurvatureTensor& t);

/** sum_{i,j} R(i,i,j,j) (a_i - a_j)^2 for real weights a. */
double quadratic_bisectional(const CurvatureTensor& t, const std::vector<double>& a);

/** Hermitian matrix M(k,l) = sum_{i,j} R(i,j,k,l) z_i conj(z_j); bisectional_form(z,w) = w^* M w. */
MatC direction_form_matrix(const CurvatureTensor& t, const VecC& z);

/** Exact averages over the unit sphere (fourth/second moment contractions). */
double sphere_average_h(const CurvatureTensor& t);
double sphere_average_ric(const CurvatureTensor& t);
double sphere_average_ric_perp(const CurvatureTensor& t);

/** |avg RicPerp - (m-1)/(2m(m+1)) * scalar|; vanishes on valid tensors. */
double berger_residual(const CurvatureTensor& t);

/**
 * Average of RicPerp over the unit sphere of a k-dimensional subspace:
 * (1/k) sum_a Ric(E_a) - 2/(k(k+1)) sum_{a,b} R(E_a, E_a, E_b, E_b).
 */
double ric_perp_k(const CurvatureTensor& t, const SubspaceSpec& sigma);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long samples = 0;
};

/** Monte-Carlo estimate of the same subspace average (oracle for ric_perp_k). */
McEstimate ric_perp_k_mc(const CurvatureTensor& t, const SubspaceSpec& sigma, long samples, Rng& rng);

/**
 * Residual of the quartic polarization identity
 *   H(aZ+bW) + H(aZ-bW) + H(aZ+ibW) + H(aZ-ibW)
 *     = 4|a|^4 H(Z) + 4|b|^4 H(W) + 16|a|^2|b|^2 R(Z,Zbar,W,Wbar)
 * evaluated with raw (unnormalized) forms.
 */
double polarization_residual(const CurvatureTensor& t, const VecC& z, const VecC& w, cplx a, cplx b);

/** Random tensor: complex Gaussian table projected onto the symmetry class. */
CurvatureTensor random_curvature_tensor(int m, Rng& rng);

/** Random tensor shifted by `ridge` times the space-form tensor (pushes curvatures positive). */
CurvatureTensor random_curvature_tensor_ridge(int m, double ridge, Rng& rng);

/** Constant holomorphic sectional curvature 2*lambda model. */
CurvatureTensor space_form_tensor(int m, double lambda);

/**
 * U(m)-invariant pattern: R(0,0,0,0)=A, R(0,0,i,i)=B, R(i,i,i,i)=C,
 * R(i,i,j,j)=C/2 for distinct i,j >= 1, zero elsewhere (orbit-completed).
 */
CurvatureTensor diagonal_type_tensor(int m, double A, double B, double C);

nlohmann::ordered_json tensor_to_json(const CurvatureTensor& t);
CurvatureTensor tensor_from_json(const nlohmann::json& j);

} // namespace kahler
