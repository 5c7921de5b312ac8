#include "kahler/curvature_tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace kahler {

namespace {

constexpr int kMaxDim = 8;

struct OrbitImage {
    int i, j, k, l;
    bool conjugated;
};

// The eight images of an index quadruple under the symmetry group: the pair
// swaps (i<->k), (j<->l), their product, and each composed with conjugation
// (which transposes the barred and unbarred slots pairwise).
std::array<OrbitImage, 8> orbit(int i, int j, int k, int l) {
    return {{{i, j, k, l, false},
             {k, j, i, l, false},
             {i, l, k, j, false},
             {k, l, i, j, false},
             {j, i, l, k, true},
             {j, k, l, i, true},
             {l, i, j, k, true},
             {l, k, j, i, true}}};
}

} // namespace

CurvatureTensor::CurvatureTensor(int m) : m_(m) {
    if (m < 2 || m > kMaxDim)
        throw std::invalid_argument("CurvatureTensor: dimension must be between 2 and 8");
    a_.assign(static_cast<std::size_t>(m) * m * m * m, cplx(0.0, 0.0));
}

void CurvatureTensor::set_orbit(int i, int j, int k, int l, cplx v) {
    for (const auto& im : orbit(i, j, k, l))
        a_[idx(im.i, im.j, im.k, im.l)] = im.conjugated ? std::conj(v) : v;
}

void CurvatureTensor::symmetrize() {
    // Group average: T <- (1/8) sum over the orbit maps.  This is the
    // orthogonal projection onto the space of tensors with the two pair-swap
    // symmetries and the conjugation symmetry.
    std::vector<cplx> out(a_.size());
    for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j)
            for (int k = 0; k < m_; ++k)
                for (int l = 0; l < m_; ++l) {
                    cplx s(0.0, 0.0);
                    for (const auto& im : orbit(i, j, k, l)) {
                        const cplx v = a_[idx(im.i, im.j, im.k, im.l)];
                        s += im.conjugated ? std::conj(v) : v;
                    }
                    out[idx(i, j, k, l)] = s / 8.0;
                }
    a_ = std::move(out);
}

TangentDirection::TangentDirection(VecC z) : z_(std::move(z)) {
    const double n = z_.norm();
    if (!(n > 1e-14)) throw std::invalid_argument("TangentDirection: zero vector");
    z_ /= n;
}

SubspaceSpec::SubspaceSpec(MatC basis, double ortho_tol) : e_(std::move(basis)) {
    if (e_.cols() < 1 || e_.cols() > e_.rows())
        throw std::invalid_argument("SubspaceSpec: need 1 <= k <= m columns");
    const MatC gram = e_.adjoint() * e_;
    const double err = (gram - MatC::Identity(e_.cols(), e_.cols())).cwiseAbs().maxCoeff();
    if (err > ortho_tol)
        throw std::invalid_argument("SubspaceSpec: basis columns are not orthonormal");
}

double SymmetryReport::max_violation() const {
    return std::max({pair_swap_first, pair_swap_second, conjugation});
}

std::vector<std::string> SymmetryReport::violations(double tol) const {
    std::vector<std::string> v;
    if (pair_swap_first > tol) v.push_back("unbarred pair swap");
    if (pair_swap_second > tol) v.push_back("barred pair swap");
    if (conjugation > tol) v.push_back("conjugation symmetry");
    return v;
}

SymmetryReport validate(const CurvatureTensor& t) {
    SymmetryReport rep;
    const int m = t.dim();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    const cplx v = t(i, j, k, l);
                    rep.pair_swap_first = std::max(rep.pair_swap_first, std::abs(v - t(k, j, i, l)));
                    rep.pair_swap_second = std::max(rep.pair_swap_second, std::abs(v - t(i, l, k, j)));
                    rep.conjugation = std::max(rep.conjugation, std::abs(v - std::conj(t(j, i, l, k))));
                }
    return rep;
}

namespace {

void check_dim(const CurvatureTensor& t, const VecC& z, const char* who) {
    if (z.size() != t.dim()) throw std::invalid_argument(std::string(who) + ": direction dimension mismatch");
}

} // namespace

double quartic_form(const CurvatureTensor& t, const VecC& z) {
    check_dim(t, z, "quartic_form");
    const int m = t.dim();
    cplx acc(0.0, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const cplx zij = z[i] * std::conj(z[j]);
            if (zij == cplx(0.0, 0.0)) continue;
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    acc += t(i, j, k, l) * zij * z[k] * std::conj(z[l]);
        }
    return acc.real();
}

double bisectional_form(const CurvatureTensor& t, const VecC& z, const VecC& w) {
    check_dim(t, z, "bisectional_form");
    check_dim(t, w, "bisectional_form");
    const int m = t.dim();
    cplx acc(0.0, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const cplx zij = z[i] * std::conj(z[j]);
            if (zij == cplx(0.0, 0.0)) continue;
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    acc += t(i, j, k, l) * zij * w[k] * std::conj(w[l]);
        }
    return acc.real();
}

double holomorphic_sectional(const CurvatureTensor& t, const TangentDirection& z) {
    return quartic_form(t, z.vec());
}

MatC ricci_matrix(const CurvatureTensor& t) {
    const int m = t.dim();
    MatC ric = MatC::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            cplx s(0.0, 0.0);
            for (int k = 0; k < m; ++k) s += t(i, j, k, k);
            ric(i, j) = s;
        }
    return ric;
}

double ricci(const CurvatureTensor& t, const TangentDirection& z) {
    const MatC ric = ricci_matrix(t);
    const int m = t.dim();
    cplx acc(0.0, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) acc += ric(i, j) * z.vec()[i] * std::conj(z.vec()[j]);
    return acc.real();
}

double ric_perp(const CurvatureTensor& t, const TangentDirection& z) {
    return ricci(t, z) - holomorphic_sectional(t, z);
}

double scalar_curvature(const CurvatureTensor& t) {
    const int m = t.dim();
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) s += t(i, i, j, j).real();
    return 2.0 * s;
}

double quadratic_bisectional(const CurvatureTensor& t, const std::vector<double>& a) {
    const int m = t.dim();
    if (static_cast<int>(a.size()) != m)
        throw std::invalid_argument("quadratic_bisectional: weight vector dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double d = a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(j)];
            s += t(i, i, j, j).real() * d * d;
        }
    return s;
}

MatC direction_form_matrix(const CurvatureTensor& t, const VecC& z) {
    check_dim(t, z, "direction_form_matrix");
    const int m = t.dim();
    MatC mz = MatC::Zero(m, m);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
            cplx s(0.0, 0.0);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) s += t(i, j, k, l) * z[i] * std::conj(z[j]);
            // bisectional_form(z, w) = sum_{k,l} M(k,l) w_k conj(w_l) = w^* M^T w;
            // store the transpose so the matrix acts as w^* mz w.
            mz(l, k) = s;
        }
    return mz;
}

double sphere_average_h(const CurvatureTensor& t) {
    // E[z_i conj(z_j) z_k conj(z_l)] = (d_ij d_kl + d_il d_kj) / (m(m+1))
    const int m = t.dim();
    cplx s(0.0, 0.0);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) s += t(i, i, k, k) + t(i, k, k, i);
    return s.real() / (static_cast<double>(m) * (m + 1));
}

double sphere_average_ric(const CurvatureTensor& t) {
    return ricci_matrix(t).trace().real() / t.dim();
}

double sphere_average_ric_perp(const CurvatureTensor& t) {
    return sphere_average_ric(t) - sphere_average_h(t);
}

double berger_residual(const CurvatureTensor& t) {
    const int m = t.dim();
    const double lhs = sphere_average_ric_perp(t);
    const double rhs = (m - 1) * scalar_curvature(t) / (2.0 * m * (m + 1));
    return std::abs(lhs - rhs);
}

namespace {

/** Restrict the tensor to a subspace basis: Rhat(a,b,c,d) = R(E_a, E_b, E_c, E_d). */
std::vector<cplx> restrict_tensor(const CurvatureTensor& t, const MatC& e) {
    const int m = t.dim();
    const int k = static_cast<int>(e.cols());
    auto id4 = [k](int a, int b, int c, int d) {
        return static_cast<std::size_t>(((a * k + b) * k + c) * k + d);
    };
    // Contract one slot at a time to keep the cost linear in each dimension.
    std::vector<cplx> t1(static_cast<std::size_t>(k) * m * m * m, cplx(0));
    for (int a = 0; a < k; ++a)
        for (int j = 0; j < m; ++j)
            for (int p = 0; p < m; ++p)
                for (int q = 0; q < m; ++q) {
                    cplx s(0);
                    for (int i = 0; i < m; ++i) s += t(i, j, p, q) * e(i, a);
                    t1[static_cast<std::size_t>(((a * m + j) * m + p)) * m + q] = s;
                }
    std::vector<cplx> t2(static_cast<std::size_t>(k) * k * m * m, cplx(0));
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            for (int p = 0; p < m; ++p)
                for (int q = 0; q < m; ++q) {
                    cplx s(0);
                    for (int j = 0; j < m; ++j)
                        s += t1[static_cast<std::size_t>(((a * m + j) * m + p)) * m + q] * std::conj(e(j, b));
                    t2[static_cast<std::size_t>(((a * k + b) * m + p)) * m + q] = s;
                }
    std::vector<cplx> t3(static_cast<std::size_t>(k) * k * k * m, cplx(0));
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            for (int c = 0; c < k; ++c)
                for (int q = 0; q < m; ++q) {
                    cplx s(0);
                    for (int p = 0; p < m; ++p)
                        s += t2[static_cast<std::size_t>(((a * k + b) * m + p)) * m + q] * e(p, c);
                    t3[static_cast<std::size_t>(((a * k + b) * k + c)) * m + q] = s;
                }
    std::vector<cplx> out(static_cast<std::size_t>(k) * k * k * k, cplx(0));
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            for (int c = 0; c < k; ++c)
                for (int d = 0; d < k; ++d) {
                    cplx s(0);
                    for (int q = 0; q < m; ++q)
                        s += t3[static_cast<std::size_t>(((a * k + b) * k + c)) * m + q] * std::conj(e(q, d));
                    out[id4(a, b, c, d)] = s;
                }
    return out;
}

} // namespace

double ric_perp_k(const CurvatureTensor& t, const SubspaceSpec& sigma) {
    if (sigma.ambient_dim() != t.dim())
        throw std::invalid_argument("ric_perp_k: subspace ambient dimension mismatch");
    const MatC& e = sigma.basis();
    const int k = sigma.dim();
    const MatC ric = ricci_matrix(t);
    double term1 = 0.0;
    for (int a = 0; a < k; ++a) term1 += (e.col(a).adjoint() * ric.transpose() * e.col(a))(0).real();
    double sk = 0.0;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) sk += bisectional_form(t, e.col(a), e.col(b));
    return term1 / k - 2.0 * sk / (static_cast<double>(k) * (k + 1));
}

McEstimate ric_perp_k_mc(const CurvatureTensor& t, const SubspaceSpec& sigma, long samples, Rng& rng) {
    if (samples < 2) throw std::invalid_argument("ric_perp_k_mc: need at least two samples");
    const MatC& e = sigma.basis();
    const int k = sigma.dim();
    const std::vector<cplx> rhat = restrict_tensor(t, e);
    // Ricci of the ambient tensor restricted to pairs from the subspace.
    const MatC ric = ricci_matrix(t);
    MatC richat = MatC::Zero(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) richat(a, b) = (e.col(b).adjoint() * ric.transpose() * e.col(a))(0);
    auto id4 = [k](int a, int b, int c, int d) {
        return static_cast<std::size_t>(((a * k + b) * k + c) * k + d);
    };

    double mean = 0.0, msq = 0.0;
    for (long n = 0; n < samples; ++n) {
        const auto c = rng.unit_complex_vector(k);
        cplx ric_v(0.0, 0.0), h_v(0.0, 0.0);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                const cplx cab = c[static_cast<std::size_t>(a)] * std::conj(c[static_cast<std::size_t>(b)]);
                ric_v += richat(a, b) * cab;
                for (int p = 0; p < k; ++p)
                    for (int q = 0; q < k; ++q)
                        h_v += rhat[id4(a, b, p, q)] * cab * c[static_cast<std::size_t>(p)] *
                               std::conj(c[static_cast<std::size_t>(q)]);
            }
        const double x = ric_v.real() - h_v.real();
        const double delta = x - mean;
        mean += delta / (n + 1);
        msq += delta * (x - mean);
    }
    McEstimate est;
    est.mean = mean;
    est.std_error = std::sqrt(msq / (samples - 1) / samples);
    est.samples = samples;
    return est;
}

double polarization_residual(const CurvatureTensor& t, const VecC& z, const VecC& w, cplx a, cplx b) {
    const cplx iu(0.0, 1.0);
    const VecC az = a * z;
    const double lhs = quartic_form(t, az + b * w) + quartic_form(t, az - b * w) +
                       quartic_form(t, az + iu * b * w) + quartic_form(t, az - iu * b * w);
    const double a2 = std::norm(a), b2 = std::norm(b);
    const double rhs = 4.0 * a2 * a2 * quartic_form(t, z) + 4.0 * b2 * b2 * quartic_form(t, w) +
                       16.0 * a2 * b2 * bisectional_form(t, z, w);
    return std::abs(lhs - rhs);
}

CurvatureTensor random_curvature_tensor(int m, Rng& rng) {
    CurvatureTensor t(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) t.set_raw(i, j, k, l, rng.cnormal());
    t.symmetrize();
    return t;
}

CurvatureTensor random_curvature_tensor_ridge(int m, double ridge, Rng& rng) {
    CurvatureTensor t = random_curvature_tensor(m, rng);
    const CurvatureTensor sf = space_form_tensor(m, 1.0);
    CurvatureTensor out(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    out.set_raw(i, j, k, l, t(i, j, k, l) + ridge * sf(i, j, k, l));
    return out;
}

CurvatureTensor space_form_tensor(int m, double lambda) {
    CurvatureTensor t(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    double v = 0.0;
                    if (i == j && k == l) v += lambda;
                    if (i == l && k == j) v += lambda;
                    t.set_raw(i, j, k, l, v);
                }
    return t;
}

CurvatureTensor diagonal_type_tensor(int m, double A, double B, double C) {
    auto pair_value = [&](int i, int k) {
        if (i == 0 && k == 0) return A;
        if (i == 0 || k == 0) return B;
        if (i == k) return C;
        return 0.5 * C;
    };
    CurvatureTensor t(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    double v = 0.0;
                    if (i == j && k == l) v += pair_value(i, k);
                    if (i == l && k == j) v += pair_value(i, k);
                    if (i == j && j == k && k == l) v -= pair_value(i, i);
                    t.set_raw(i, j, k, l, v);
                }
    return t;
}

namespace {

struct CanonicalKey {
    int i, j, k, l;
    bool conjugated;
};

CanonicalKey canonical_key(int i, int j, int k, int l) {
    CanonicalKey best{i, j, k, l, false};
    auto better = [](const OrbitImage& im, const CanonicalKey& cur) {
        const std::array<int, 4> a{im.i, im.j, im.k, im.l};
        const std::array<int, 4> b{cur.i, cur.j, cur.k, cur.l};
        if (a != b) return a < b;
        return !im.conjugated && cur.conjugated;
    };
    for (const auto& im : orbit(i, j, k, l))
        if (better(im, best)) best = {im.i, im.j, im.k, im.l, im.conjugated};
    return best;
}

} // namespace

nlohmann::ordered_json tensor_to_json(const CurvatureTensor& t) {
    const int m = t.dim();
    nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    const CanonicalKey key = canonical_key(i, j, k, l);
                    if (key.i != i || key.j != j || key.k != k || key.l != l || key.conjugated)
                        continue; // not the orbit representative
                    const cplx v = t(i, j, k, l);
                    if (v == cplx(0.0, 0.0)) continue;
                    coeffs.push_back({{"idx", {i, j, k, l}}, {"re", v.real()}, {"im", v.imag()}});
                }
    nlohmann::ordered_json j;
    j["m"] = m;
    j["coeffs"] = std::move(coeffs);
    return j;
}

CurvatureTensor tensor_from_json(const nlohmann::json& j) {
    const int m = j.at("m").get<int>();
    CurvatureTensor t(m);
    for (const auto& c : j.at("coeffs")) {
        const auto idx = c.at("idx");
        if (idx.size() != 4) throw std::invalid_argument("tensor_from_json: idx must have four entries");
        const int i = idx[0].get<int>(), jj = idx[1].get<int>(), k = idx[2].get<int>(), l = idx[3].get<int>();
        if (i < 0 || i >= m || jj < 0 || jj >= m || k < 0 || k >= m || l < 0 || l >= m)
            throw std::invalid_argument("tensor_from_json: index out of range");
        t.set_orbit(i, jj, k, l, cplx(c.at("re").get<double>(), c.at("im").get<double>()));
    }
    return t;
}

} // namespace kahler
