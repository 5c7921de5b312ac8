#pragma once

#include "kahler/curvature_tensor.hpp"
#include "kahler/rng.hpp"

namespace kahler {

enum class SphereFunctional { HolSectional, Ricci, RicPerp };

struct ExtremumResult {
    double value = 0.0;
    VecC direction;
    double grad_norm = 0.0; // Riemannian gradient norm at the returned point
    int restarts = 0;       // restarts actually run
    int agreeing = 0;       // restarts whose best value matches the winner within 1e-9
};

/**
 * Multi-start projected gradient ascent/descent of H, Ric, or RicPerp over the
 * unit sphere of C^m.  Ricci is quadratic, so that case is solved exactly by a
 * Hermitian eigendecomposition.  Nonconvex cases rely on restarts; certified
 * against dense sampling for m <= 4 in the test suite.
 */
ExtremumResult extremize_over_sphere(const CurvatureTensor& t, SphereFunctional f, bool maximize,
                                     Rng& rng, int restarts = 64);

struct PairExtremumResult {
    double value = 0.0;
    VecC z, w;
    int restarts = 0;
};

/** Minimize R(Z,Zbar,W,Wbar) over pairs of unit vectors (no orthogonality constraint). */
PairExtremumResult bisectional_min(const CurvatureTensor& t, Rng& rng, int restarts = 32);

/** Minimize R(Z,Zbar,W,Wbar) over unit pairs with <Z,W> = 0 (Hermitian orthogonality). */
PairExtremumResult orthogonal_bisectional_min(const CurvatureTensor& t, Rng& rng, int restarts = 32);

/**
 * Exact extremum of W -> R(Z,Zbar,W,Wbar) over unit W orthogonal to the fixed
 * direction z: eigenvalue problem of the direction form restricted to z-perp.
 */
double orthogonal_pair_extreme(const CurvatureTensor& t, const VecC& z, bool maximize);

/** Unitary matrix whose first column equals the given unit vector. */
MatC complete_to_unitary(const VecC& z);

} // namespace kahler
