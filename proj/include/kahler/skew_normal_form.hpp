#pragma once

#include "kahler/curvature_tensor.hpp"

namespace kahler {

/**
 * Normal form of a complex skew-symmetric matrix under unitary congruence:
 * transpose(U) * A * U is block diagonal with 2x2 blocks values[i] * E,
 * E = [[0,1],[-1,0]], followed by a zero block.  values are the singular
 * values of A taken once per pair, sorted in nonincreasing order.
 */
struct SkewNormalForm {
    MatC u;                     // unitary congruence transform
    std::vector<double> values; // one value per 2x2 block, descending

    /** The block-diagonal matrix the values describe, at the stored size. */
    MatC block_form() const;
    /** || transpose(u) A u - block_form ||_max, for validation. */
    double residual(const MatC& a) const;
};

/**
 * Computes the normal form by deflation: the top singular pair (sigma, x)
 * of A yields the partner y = conj(A x)/sigma, and the congruence restricted
 * to the orthogonal complement of {x, y} is again skew-symmetric.
 * Throws std::invalid_argument unless A is skew-symmetric to 1e-12 (relative).
 */
SkewNormalForm skew_normal_form(const MatC& a);

/** Random skew-symmetric matrix with unit-variance complex Gaussian entries above the diagonal. */
MatC random_skew_matrix(int k, Rng& rng);

} // namespace kahler
