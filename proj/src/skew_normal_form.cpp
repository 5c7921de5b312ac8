#include "kahler/skew_normal_form.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace kahler {

MatC SkewNormalForm::block_form() const {
    const long k = u.rows();
    MatC b = MatC::Zero(k, k);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const long p = static_cast<long>(2 * i);
        b(p, p + 1) = values[i];
        b(p + 1, p) = -values[i];
    }
    return b;
}

double SkewNormalForm::residual(const MatC& a) const {
    return (u.transpose() * a * u - block_form()).cwiseAbs().maxCoeff();
}

namespace {

// Orthonormal basis of the orthogonal complement of the columns of v (m x 2).
MatC complement_basis(const MatC& v) {
    Eigen::HouseholderQR<MatC> qr(v);
    const MatC q = qr.householderQ();
    return q.rightCols(q.cols() - v.cols());
}

} // namespace

SkewNormalForm skew_normal_form(const MatC& a) {
    const long k = a.rows();
    if (a.cols() != k) throw std::invalid_argument("skew_normal_form: matrix must be square");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("skew_normal_form: matrix is not skew-symmetric");

    SkewNormalForm out;
    out.u = MatC::Identity(k, k);
    MatC b = a;               // current deflated matrix, transpose(W) A W
    MatC w = MatC::Identity(k, k); // columns: basis of the current subspace in original coordinates
    long placed = 0;
    const double tol = 1e-13 * scale * static_cast<double>(k);

    while (k - placed >= 2) {
        Eigen::JacobiSVD<MatC> svd(b, Eigen::ComputeFullV);
        const double sigma = svd.singularValues()[0];
        if (sigma <= tol) break; // remaining block is numerically zero
        const VecC x = svd.matrixV().col(0);
        const VecC y = (b * x).conjugate() / sigma;
        // y is automatically a unit vector orthogonal to x: transpose(x) b x = 0
        // for a skew form, so <x, y> = conj(x^T b x)/sigma = 0.
        MatC pair(k - placed, 2);
        pair.col(0) = y;
        pair.col(1) = x;
        const MatC rest = complement_basis(pair);
        out.u.block(0, placed, k, 2) = w * pair;
        w = (w * rest).eval();
        b = (rest.transpose() * b * rest).eval();
        out.values.push_back(sigma);
        placed += 2;
    }
    if (placed < k) out.u.block(0, placed, k, k - placed) = w;
    // Singular values come in pairs; pad so every 2x2 block has an entry even
    // when the matrix is singular (zero blocks).
    while (static_cast<long>(out.values.size()) < k / 2) out.values.push_back(0.0);
    return out;
}

MatC random_skew_matrix(int k, Rng& rng) {
    MatC a = MatC::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const cplx v = rng.cnormal();
            a(i, j) = v;
            a(j, i) = -v;
        }
    return a;
}

} // namespace kahler
