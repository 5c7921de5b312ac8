#include <doctest.h>

#include "kahler/curvature_tensor.hpp"
#include "kahler/kappa.hpp"
#include "kahler/parallel.hpp"
#include "kahler/quadrature.hpp"
#include "kahler/rng.hpp"
#include "kahler/skew_normal_form.hpp"
#include "kahler/sphere_extrema.hpp"

#include <Eigen/SVD>
#include <atomic>
#include <cmath>
#include <complex>
#include <vector>

using namespace kahler;

namespace {

VecC to_vec(const std::vector<cplx>& v) {
    VecC z(static_cast<long>(v.size()));
    for (long i = 0; i < z.size(); ++i) z[i] = v[static_cast<std::size_t>(i)];
    return z;
}

} // namespace

TEST_SUITE_BEGIN("core");

TEST_CASE("rng streams are deterministic and de-correlated") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng s0 = Rng::stream(42, 0), s1 = Rng::stream(42, 1);
    CHECK(s0.next_u64() != s1.next_u64());
    Rng u(7);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    Rng n(3);
    double mean = 0.0, var = 0.0;
    const int cnt = 20000;
    for (int i = 0; i < cnt; ++i) {
        const double x = n.normal();
        mean += x;
        var += x * x;
    }
    mean /= cnt;
    var = var / cnt - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
    auto z = Rng(9).unit_complex_vector(5);
    double nrm = 0.0;
    for (const auto& c : z) nrm += std::norm(c);
    CHECK(std::abs(nrm - 1.0) < 1e-12);
}

TEST_CASE("parallel_for covers every index once") {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
    CHECK(resolve_jobs(3) == 3);
}

TEST_CASE("quadrature basics") {
    auto sq = [](double x) { return x * x; };
    CHECK(gk15(sq, 0.0, 1.0).value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    // constants integrate exactly (weights sum to the interval length)
    CHECK(gk15([](double) { return 1.0; }, 0.0, 1.0).value == doctest::Approx(1.0).epsilon(1e-15));
    const double osc = integrate([](double x) { return std::sin(x); }, 0.0, 10.0).value;
    CHECK(std::abs(osc - (1.0 - std::cos(10.0))) < 1e-12);
    const double gauss = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0).value;
    CHECK(std::abs(gauss - std::sqrt(M_PI)) < 1e-12);
}

TEST_CASE("cumulative integral matches antiderivative and extends past the grid") {
    std::vector<double> nodes;
    for (int i = 0; i <= 20; ++i) nodes.push_back(0.5 * i);
    CumulativeIntegral ci([](double x) { return std::cos(x); }, nodes);
    for (double x : {0.0, 0.3, 1.7, 5.55, 9.999, 10.0, 12.5})
        CHECK(std::abs(ci(x) - std::sin(x)) < 1e-12);
    CHECK_THROWS_AS(ci(-0.1), std::out_of_range);
}

TEST_CASE("model comparison functions") {
    CHECK(s_kappa(0.0, 1.7) == doctest::Approx(1.7));
    CHECK(cot_kappa(0.0, 2.0) == doctest::Approx(0.5));
    // Wronskian-type identity across signs of kappa
    for (double kappa : {-2.3, -1.0, 0.0, 0.7, 2.0})
        for (double t : {0.1, 0.77, 1.9}) {
            const double s = s_kappa(kappa, t), sp = s_kappa_prime(kappa, t);
            CHECK(std::abs(sp * sp + kappa * s * s - 1.0) < 1e-12);
        }
    // c branch: c_kappa(0) = 1/sqrt|kappa|, tangent carries the negative sign
    CHECK(c_kappa(1.0, 0.0) == doctest::Approx(1.0));
    CHECK(c_kappa(4.0, 0.0) == doctest::Approx(0.5));
    CHECK(tan_kappa(1.0, M_PI / 4.0) == doctest::Approx(-1.0));
    CHECK(cot_kappa(-1.0, 0.9) == doctest::Approx(std::cosh(0.9) / std::sinh(0.9)));
    CHECK(cot_kappa(1.0, 0.5) == doctest::Approx(std::cos(0.5) / std::sin(0.5)));
    CHECK_THROWS_AS(cot_kappa(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(tan_kappa(1.0, M_PI / 2.0), std::domain_error);
    // cot solves the Riccati equation of J'' + kJ = 0: u' = -k - u^2
    const double h = 1e-6, k = 0.7, t0 = 0.8;
    const double du = (cot_kappa(k, t0 + h) - cot_kappa(k, t0 - h)) / (2 * h);
    const double u = cot_kappa(k, t0);
    CHECK(std::abs(du + k + u * u) < 1e-6);
}

TEST_CASE("space form tensor has all constant curvature functionals") {
    const int m = 3;
    const double lambda = 0.7;
    const CurvatureTensor t = space_form_tensor(m, lambda);
    CHECK(validate(t).ok());
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const TangentDirection z(to_vec(rng.unit_complex_vector(m)));
        CHECK(holomorphic_sectional(t, z) == doctest::Approx(2 * lambda).epsilon(1e-12));
        CHECK(ricci(t, z) == doctest::Approx((m + 1) * lambda).epsilon(1e-12));
        CHECK(ric_perp(t, z) == doctest::Approx((m - 1) * lambda).epsilon(1e-12));
    }
    CHECK(scalar_curvature(t) == doctest::Approx(2.0 * m * (m + 1) * lambda));
    CHECK(berger_residual(t) < 1e-13);
    CHECK(sphere_average_h(t) == doctest::Approx(2 * lambda));
    // the same tensor in the diagonal-pattern parameterization
    const CurvatureTensor d = diagonal_type_tensor(m, 2 * lambda, lambda, 2 * lambda);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) CHECK(std::abs(t(i, j, k, l) - d(i, j, k, l)) < 1e-15);
}

TEST_CASE("validate flags a deliberately broken entry") {
    CurvatureTensor t = space_form_tensor(2, 1.0);
    t.set_raw(0, 1, 0, 0, cplx(0.3, 0.4)); // breaks conjugation against R(1,0,0,0)
    const auto rep = validate(t);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.violations().empty());
}

TEST_CASE("random tensors satisfy the symmetry class and identities") {
    for (int m : {2, 3, 4}) {
        for (int trial = 0; trial < 20; ++trial) {
            Rng rng = Rng::stream(42, static_cast<std::uint64_t>(100 * m + trial));
            const CurvatureTensor t = random_curvature_tensor(m, rng);
            CHECK(validate(t).max_violation() < 1e-12);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) CHECK(std::abs(t(i, i, j, j).imag()) < 1e-13);
            CHECK(berger_residual(t) < 1e-12);
            const VecC z = to_vec(rng.unit_complex_vector(m));
            const VecC w = to_vec(rng.unit_complex_vector(m));
            const cplx a = rng.cnormal(), b = rng.cnormal();
            CHECK(polarization_residual(t, z, w, a, b) < 1e-10);
            CHECK(polarization_residual(t, z, w, a, cplx(0, 0)) < 1e-12);
        }
    }
}

TEST_CASE("scalar curvature is invariant under unitary frame change") {
    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const int m = 3;
        const CurvatureTensor t = random_curvature_tensor(m, rng);
        // conjugate by a random unitary obtained from a Householder frame
        const MatC u = complete_to_unitary(to_vec(rng.unit_complex_vector(m)));
        CurvatureTensor tu(m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c)
                    for (int d = 0; d < m; ++d) {
                        cplx s(0);
                        for (int i = 0; i < m; ++i)
                            for (int j = 0; j < m; ++j)
                                for (int k = 0; k < m; ++k)
                                    for (int l = 0; l < m; ++l)
                                        s += t(i, j, k, l) * u(i, a) * std::conj(u(j, b)) * u(k, c) *
                                             std::conj(u(l, d));
                        tu.set_raw(a, b, c, d, s);
                    }
        CHECK(validate(tu).max_violation() < 1e-10);
        CHECK(scalar_curvature(tu) == doctest::Approx(scalar_curvature(t)).epsilon(1e-10));
        CHECK(sphere_average_h(tu) == doctest::Approx(sphere_average_h(t)).epsilon(1e-10));
    }
}

TEST_CASE("sphere averages agree with Monte-Carlo sampling") {
    const int m = 3;
    Rng rng(21);
    const CurvatureTensor t = random_curvature_tensor(m, rng);
    const long n = 200000;
    double sum_h = 0.0, sumsq_h = 0.0, sum_rp = 0.0, sumsq_rp = 0.0;
    for (long i = 0; i < n; ++i) {
        const TangentDirection z(to_vec(rng.unit_complex_vector(m)));
        const double h = holomorphic_sectional(t, z);
        const double rp = ric_perp(t, z);
        sum_h += h;
        sumsq_h += h * h;
        sum_rp += rp;
        sumsq_rp += rp * rp;
    }
    const double mh = sum_h / n, sh = std::sqrt((sumsq_h / n - mh * mh) / n);
    const double mr = sum_rp / n, sr = std::sqrt((sumsq_rp / n - mr * mr) / n);
    CHECK(std::abs(mh - sphere_average_h(t)) < 3 * sh);
    CHECK(std::abs(mr - sphere_average_ric_perp(t)) < 3 * sr);
}

TEST_CASE("diagonal pattern reproduces its closed-form functionals") {
    const int m = 4;
    const double A = 1.3, B = -0.4, C = 2.1;
    const CurvatureTensor t = diagonal_type_tensor(m, A, B, C);
    CHECK(validate(t).ok());
    VecC e1 = VecC::Zero(m), e2 = VecC::Zero(m);
    e1[0] = 1;
    e2[1] = 1;
    CHECK(holomorphic_sectional(t, TangentDirection(e1)) == doctest::Approx(A));
    CHECK(holomorphic_sectional(t, TangentDirection(e2)) == doctest::Approx(C));
    CHECK(ricci(t, TangentDirection(e1)) == doctest::Approx(A + (m - 1) * B));
    CHECK(ricci(t, TangentDirection(e2)) == doctest::Approx(B + m * C / 2));
    CHECK(ric_perp(t, TangentDirection(e1)) == doctest::Approx((m - 1) * B));
    CHECK(ric_perp(t, TangentDirection(e2)) == doctest::Approx(B + (m - 2) * C / 2));
    Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const VecC z = to_vec(rng.unit_complex_vector(m));
        const double s = std::norm(z[0]);
        const double expect = A * s * s + 4 * B * s * (1 - s) + C * (1 - s) * (1 - s);
        CHECK(quartic_form(t, z) == doctest::Approx(expect).epsilon(1e-12));
    }
    // quadratic two-index form, m = 2 closed form
    const CurvatureTensor t2 = diagonal_type_tensor(2, A, B, C);
    const std::vector<double> wts{0.7, -0.2};
    CHECK(quadratic_bisectional(t2, wts) == doctest::Approx(2 * B * 0.9 * 0.9));
    CHECK(quadratic_bisectional(t2, {3.0, 3.0}) == doctest::Approx(0.0));
}

TEST_CASE("subspace Ricci average: closed form, space form, Monte-Carlo") {
    const int m = 4;
    // full-space subspace of a space form gives the constant orthogonal Ricci
    const double lambda = 0.9;
    const CurvatureTensor sf = space_form_tensor(m, lambda);
    CHECK(ric_perp_k(sf, SubspaceSpec(MatC::Identity(m, m))) ==
          doctest::Approx((m - 1) * lambda).epsilon(1e-12));
    CHECK(ric_perp_k(CurvatureTensor(m), SubspaceSpec(MatC::Identity(m, m))) == doctest::Approx(0.0));
    // random tensor, random 2-plane, Monte-Carlo oracle
    Rng rng(33);
    const CurvatureTensor t = random_curvature_tensor(m, rng);
    const MatC frame = complete_to_unitary(to_vec(rng.unit_complex_vector(m)));
    const SubspaceSpec sigma(frame.leftCols(2));
    const double closed = ric_perp_k(t, sigma);
    Rng mc(101);
    const McEstimate est = ric_perp_k_mc(t, sigma, 100000, mc);
    CHECK(std::abs(est.mean - closed) < 3 * est.std_error);
    // non-orthonormal basis must be rejected
    MatC bad = frame.leftCols(2);
    bad(0, 1) = bad(0, 0);
    CHECK_THROWS_AS(SubspaceSpec{bad}, std::invalid_argument);
}

TEST_CASE("tensor JSON round trip preserves entries") {
    Rng rng(55);
    const CurvatureTensor t = random_curvature_tensor(3, rng);
    const auto j = tensor_to_json(t);
    CHECK(j.at("m").get<int>() == 3);
    const CurvatureTensor back = tensor_from_json(j);
    for (int i = 0; i < 3; ++i)
        for (int jj = 0; jj < 3; ++jj)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) CHECK(std::abs(t(i, jj, k, l) - back(i, jj, k, l)) < 1e-15);
}

TEST_CASE("sphere extremizers: exact cases and sampled cross-check") {
    Rng rng(77);
    // constant H on a space form
    const CurvatureTensor sf = space_form_tensor(3, 0.5);
    CHECK(extremize_over_sphere(sf, SphereFunctional::HolSectional, false, rng, 4).value ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(extremize_over_sphere(sf, SphereFunctional::HolSectional, true, rng, 4).value ==
          doctest::Approx(1.0).epsilon(1e-10));
    // diagonal pattern: H depends only on s = |z_1|^2, extrema analytic
    const CurvatureTensor d = diagonal_type_tensor(3, -1.0, 2.0, 1.0);
    // H(s) = -8s^2 + 6s + 1: max 17/8 at s = 3/8, min -1 at s = 1
    CHECK(extremize_over_sphere(d, SphereFunctional::HolSectional, true, rng, 16).value ==
          doctest::Approx(17.0 / 8.0).epsilon(1e-8));
    CHECK(extremize_over_sphere(d, SphereFunctional::HolSectional, false, rng, 16).value ==
          doctest::Approx(-1.0).epsilon(1e-8));
    // Ricci path is an exact eigensolve on the diagonal pattern
    const CurvatureTensor dr = diagonal_type_tensor(4, 1.5, 0.3, 0.8);
    const double ric1 = 1.5 + 3 * 0.3, ricp = 0.3 + 4 * 0.8 / 2;
    CHECK(extremize_over_sphere(dr, SphereFunctional::Ricci, true, rng).value ==
          doctest::Approx(std::max(ric1, ricp)));
    CHECK(extremize_over_sphere(dr, SphereFunctional::Ricci, false, rng).value ==
          doctest::Approx(std::min(ric1, ricp)));
}

TEST_CASE("extremizer matches polished dense sampling on random tensors") {
    for (int trial = 0; trial < 3; ++trial) {
        Rng rng = Rng::stream(7, static_cast<std::uint64_t>(trial));
        const int m = 2;
        const CurvatureTensor t = random_curvature_tensor(m, rng);
        Rng opt(1);
        const auto ext = extremize_over_sphere(t, SphereFunctional::HolSectional, false, opt, 64);
        // dense sampling: the sampled minimum can only be above the true one
        Rng smp(2);
        double best = 1e300;
        VecC bestz;
        for (int i = 0; i < 50000; ++i) {
            const VecC z = to_vec(smp.unit_complex_vector(m));
            const double v = quartic_form(t, z);
            if (v < best) {
                best = v;
                bestz = z;
            }
        }
        CHECK(ext.value <= best + 1e-9);
        // with 50k samples on S^3 the sampled minimum sits close to the true one
        CHECK(std::abs(ext.value - best) < 0.05);
        (void)bestz;
    }
}

TEST_CASE("second-variation inequality at certified extremizers") {
    // at a global max Z of H: H(Z) >= 2 R(Z,Zbar,W,Wbar) for every unit W
    // orthogonal to Z, and H(Z) >= 2/(m-1) RicPerp(Z); reversed at a min
    for (int trial = 0; trial < 5; ++trial) {
        Rng rng = Rng::stream(19, static_cast<std::uint64_t>(trial));
        const int m = 2 + trial % 2;
        const CurvatureTensor t = random_curvature_tensor_ridge(m, 2.0, rng);
        Rng opt(4);
        const auto mx = extremize_over_sphere(t, SphereFunctional::HolSectional, true, opt, 64);
        const double pairmax = orthogonal_pair_extreme(t, mx.direction, true);
        CHECK(mx.value >= 2.0 * pairmax - 1e-8);
        CHECK(mx.value >= 2.0 / (m - 1) * ric_perp(t, TangentDirection(mx.direction)) - 1e-8);
        const auto mn = extremize_over_sphere(t, SphereFunctional::HolSectional, false, opt, 64);
        const double pairmin = orthogonal_pair_extreme(t, mn.direction, false);
        CHECK(mn.value <= 2.0 * pairmin + 1e-8);
        CHECK(mn.value <= 2.0 / (m - 1) * ric_perp(t, TangentDirection(mn.direction)) + 1e-8);
    }
}

TEST_CASE("average bound for scalar curvature at nonnegative orthogonal Ricci") {
    int nontrivial = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng = Rng::stream(23, static_cast<std::uint64_t>(trial));
        const int m = 2 + trial % 3;
        const CurvatureTensor t = random_curvature_tensor_ridge(m, 1.5, rng);
        Rng opt(6);
        const auto mn = extremize_over_sphere(t, SphereFunctional::RicPerp, false, opt, 32);
        if (mn.value < 0.0) continue;
        ++nontrivial;
        const double s = scalar_curvature(t);
        CHECK(s >= 2.0 * m * (m + 1) / (m - 1) * mn.value - 1e-6);
    }
    CHECK(nontrivial >= 5); // the ridge shift must make the hypothesis non-vacuous
}

TEST_CASE("orthogonal pair minimization") {
    Rng rng(91);
    // space form: R(Z,Zbar,W,Wbar) = lambda for any orthonormal pair
    const CurvatureTensor sf = space_form_tensor(3, 0.8);
    const auto r = orthogonal_bisectional_min(sf, rng, 8);
    CHECK(r.value == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(std::abs((r.z.adjoint() * r.w)(0)) < 1e-9);
    // diagonal pattern: frame pairs give B and C/2
    const CurvatureTensor d = diagonal_type_tensor(3, 5.0, 0.4, 1.2);
    const auto rd = orthogonal_bisectional_min(d, rng, 16);
    CHECK(rd.value <= std::min(0.4, 0.6) + 1e-9);
    // dense pair sampling can only stay above the reported minimum
    Rng smp(8);
    double best = 1e300;
    for (int i = 0; i < 20000; ++i) {
        const VecC z = to_vec(smp.unit_complex_vector(3));
        const MatC frame = complete_to_unitary(z);
        const VecC wr = to_vec(smp.unit_complex_vector(2));
        const VecC w = frame.rightCols(2) * wr;
        best = std::min(best, bisectional_form(d, z, w));
    }
    CHECK(rd.value <= best + 1e-9);
    CHECK(rd.value >= best - 0.05);
    // flat tensor: identically zero
    CHECK(orthogonal_bisectional_min(CurvatureTensor(2), rng, 4).value == doctest::Approx(0.0));
}

TEST_CASE("skew normal form: reconstruction, oracle, invariance") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const MatC a = random_skew_matrix(6, rng);
        const SkewNormalForm nf = skew_normal_form(a);
        CHECK((nf.u.adjoint() * nf.u - MatC::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(nf.residual(a) < 1e-9);
        REQUIRE(nf.values.size() == 3);
        CHECK(nf.values[0] >= nf.values[1]);
        CHECK(nf.values[1] >= nf.values[2]);
        // paired singular values, taken once per pair
        Eigen::JacobiSVD<MatC> svd(a);
        for (int i = 0; i < 3; ++i)
            CHECK(nf.values[static_cast<std::size_t>(i)] ==
                  doctest::Approx(svd.singularValues()[2 * i]).epsilon(1e-10));
        // invariance under unitary congruence
        const MatC v = complete_to_unitary(to_vec(rng.unit_complex_vector(6)));
        const SkewNormalForm nf2 = skew_normal_form(v.transpose() * a * v);
        for (int i = 0; i < 3; ++i)
            CHECK(nf2.values[static_cast<std::size_t>(i)] ==
                  doctest::Approx(nf.values[static_cast<std::size_t>(i)]).epsilon(1e-9));
    }
    // odd dimension leaves a zero column
    const MatC a5 = random_skew_matrix(5, rng);
    const SkewNormalForm nf5 = skew_normal_form(a5);
    CHECK(nf5.residual(a5) < 1e-9);
    CHECK(nf5.values.size() == 2);
    // zero matrix
    const SkewNormalForm nf0 = skew_normal_form(MatC::Zero(4, 4));
    for (double v : nf0.values) CHECK(v == 0.0);
    CHECK(nf0.residual(MatC::Zero(4, 4)) < 1e-15);
    // already in normal form: single block c*E
    MatC ce = MatC::Zero(2, 2);
    ce(0, 1) = cplx(0.3, -0.4);
    ce(1, 0) = -ce(0, 1);
    const SkewNormalForm nfc = skew_normal_form(ce);
    REQUIRE(nfc.values.size() == 1);
    CHECK(nfc.values[0] == doctest::Approx(0.5));
    CHECK(nfc.residual(ce) < 1e-12);
    // non-skew input rejected
    CHECK_THROWS_AS(skew_normal_form(MatC::Identity(3, 3)), std::invalid_argument);
}

TEST_SUITE_END();
