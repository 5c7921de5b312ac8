#include "kahler/sphere_extrema.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace kahler {

namespace {

VecC to_vec(const std::vector<cplx>& v) {
    VecC z(static_cast<long>(v.size()));
    for (long i = 0; i < z.size(); ++i) z[i] = v[static_cast<std::size_t>(i)];
    return z;
}

VecC random_unit(int m, Rng& rng) { return to_vec(rng.unit_complex_vector(m)); }

struct Objective {
    const CurvatureTensor& t;
    SphereFunctional which;
    MatC ric; // Hermitian form matrix: value contribution z^* ric z

    Objective(const CurvatureTensor& tensor, SphereFunctional f) : t(tensor), which(f) {
        if (which != SphereFunctional::HolSectional) ric = ricci_matrix(t).transpose();
    }

    double value(const VecC& z) const {
        double v = 0.0;
        if (which != SphereFunctional::HolSectional) v += (z.adjoint() * ric * z)(0).real();
        if (which == SphereFunctional::HolSectional) v += quartic_form(t, z);
        if (which == SphereFunctional::RicPerp) v -= quartic_form(t, z);
        return v;
    }

    // Euclidean gradient with respect to the underlying real coordinates,
    // written as a complex vector: G = 2 dF/dzbar.
    VecC gradient(const VecC& z) const {
        const int m = t.dim();
        VecC g = VecC::Zero(m);
        if (which != SphereFunctional::HolSectional) g += 2.0 * (ric * z);
        if (which != SphereFunctional::Ricci) {
            VecC q = VecC::Zero(m);
            for (int p = 0; p < m; ++p) {
                cplx s(0.0, 0.0);
                for (int i = 0; i < m; ++i)
                    for (int k = 0; k < m; ++k)
                        for (int l = 0; l < m; ++l) s += t(i, p, k, l) * z[i] * z[k] * std::conj(z[l]);
                q[p] = 4.0 * s;
            }
            if (which == SphereFunctional::HolSectional)
                g += q;
            else
                g -= q;
        }
        return g;
    }
};

struct LocalResult {
    double value;
    VecC z;
    double grad_norm;
};

LocalResult ascend(const Objective& obj, VecC z, double sign, int max_iter = 400) {
    double fz = sign * obj.value(z);
    double step = 1.0;
    double gnorm = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        VecC g = sign * obj.gradient(z);
        const double radial = (z.adjoint() * g)(0).real();
        VecC p = g - radial * z;
        gnorm = p.norm();
        if (gnorm <= 1e-10) break;
        // Armijo backtracking on the normalized retraction.
        bool accepted = false;
        for (double s = std::min(step * 2.0, 1e2); s > 1e-14; s *= 0.5) {
            VecC cand = z + s * p;
            cand.normalize();
            const double fc = sign * obj.value(cand);
            if (fc >= fz + 1e-4 * s * gnorm * gnorm) {
                z = cand;
                fz = fc;
                step = s;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    return {sign * fz, z, gnorm};
}

} // namespace

ExtremumResult extremize_over_sphere(const CurvatureTensor& t, SphereFunctional f, bool maximize,
                                     Rng& rng, int restarts) {
    ExtremumResult out;
    if (f == SphereFunctional::Ricci) {
        // Quadratic form: exact Hermitian eigenproblem.
        const MatC ric = ricci_matrix(t).transpose();
        Eigen::SelfAdjointEigenSolver<MatC> es(ric);
        const int idx = maximize ? t.dim() - 1 : 0;
        out.value = es.eigenvalues()[idx];
        out.direction = es.eigenvectors().col(idx);
        out.restarts = 0;
        out.agreeing = 1;
        return out;
    }
    if (restarts < 1) throw std::invalid_argument("extremize_over_sphere: need at least one restart");
    const Objective obj(t, f);
    const double sign = maximize ? 1.0 : -1.0;
    std::vector<LocalResult> locals;
    locals.reserve(static_cast<std::size_t>(restarts));
    for (int s = 0; s < restarts; ++s) locals.push_back(ascend(obj, random_unit(t.dim(), rng), sign));
    const LocalResult* best = &locals.front();
    for (const auto& lr : locals)
        if (sign * lr.value > sign * best->value) best = &lr;
    out.value = best->value;
    out.direction = best->z;
    out.grad_norm = best->grad_norm;
    out.restarts = restarts;
    for (const auto& lr : locals)
        if (std::abs(lr.value - best->value) <= 1e-9 * (1.0 + std::abs(best->value))) ++out.agreeing;
    return out;
}

namespace {

MatC orthogonal_complement(const VecC& z) {
    const MatC q = complete_to_unitary(z);
    return q.rightCols(q.cols() - 1);
}

// One exact alternating step: given z, pick the w minimizing the direction
// form, optionally restricted to the orthogonal complement of z.
std::pair<double, VecC> best_partner(const CurvatureTensor& t, const VecC& z, bool orthogonal,
                                     bool maximize) {
    const MatC mz = direction_form_matrix(t, z);
    if (!orthogonal) {
        Eigen::SelfAdjointEigenSolver<MatC> es(mz);
        const int idx = maximize ? t.dim() - 1 : 0;
        return {es.eigenvalues()[idx], es.eigenvectors().col(idx)};
    }
    const MatC q = orthogonal_complement(z);
    Eigen::SelfAdjointEigenSolver<MatC> es(MatC(q.adjoint() * mz * q));
    const int idx = maximize ? static_cast<int>(q.cols()) - 1 : 0;
    return {es.eigenvalues()[idx], VecC(q * es.eigenvectors().col(idx))};
}

PairExtremumResult alternating_pair_min(const CurvatureTensor& t, Rng& rng, int restarts,
                                        bool orthogonal) {
    if (restarts < 1) throw std::invalid_argument("pair minimization: need at least one restart");
    PairExtremumResult out;
    out.restarts = restarts;
    bool have = false;
    for (int s = 0; s < restarts; ++s) {
        VecC z = random_unit(t.dim(), rng);
        VecC w;
        double value = 0.0;
        for (int it = 0; it < 100; ++it) {
            w = best_partner(t, z, orthogonal, false).second;
            const auto [vz, zbest] = best_partner(t, w, orthogonal, false);
            z = zbest;
            if (it > 0 && std::abs(vz - value) <= 1e-13 * (1.0 + std::abs(vz))) {
                value = vz;
                break;
            }
            value = vz;
        }
        if (!have || value < out.value) {
            out.value = value;
            out.z = z;
            out.w = w;
            have = true;
        }
    }
    return out;
}

} // namespace

PairExtremumResult bisectional_min(const CurvatureTensor& t, Rng& rng, int restarts) {
    return alternating_pair_min(t, rng, restarts, false);
}

PairExtremumResult orthogonal_bisectional_min(const CurvatureTensor& t, Rng& rng, int restarts) {
    if (t.dim() < 2) throw std::invalid_argument("orthogonal_bisectional_min: need m >= 2");
    return alternating_pair_min(t, rng, restarts, true);
}

double orthogonal_pair_extreme(const CurvatureTensor& t, const VecC& z, bool maximize) {
    VecC zn = z;
    zn.normalize();
    return best_partner(t, zn, true, maximize).first;
}

MatC complete_to_unitary(const VecC& z) {
    const long m = z.size();
    if (m < 1 || std::abs(z.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("complete_to_unitary: input must be a unit vector");
    Eigen::HouseholderQR<MatC> qr(z);
    MatC q = qr.householderQ();
    // householderQ reproduces z only up to a phase; rotate the whole frame so
    // the first column is exactly z (keeps the matrix unitary).
    const cplx phase = (q.col(0).adjoint() * z)(0);
    q.col(0) *= phase;
    return q;
}

} // namespace kahler
