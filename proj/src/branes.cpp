#include "gerbecalc/branes.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gerbecalc/index_map.hpp"
#include "gerbecalc/integrate.hpp"

namespace gerbecalc {

namespace {

// -----------------------------------------------------------------------
// Component calculus
// -----------------------------------------------------------------------

// Components of an algebra element in the given basis via the trace Gram
// matrix.  If residual is non-null it receives the norm of the part of x
// that the basis cannot represent (nonzero for matrices outside the
// algebra).
Eigen::VectorXd basis_components(const std::vector<Mat>& basis, const Mat& x,
                                 double* residual = nullptr) {
    const int n = static_cast<int>(basis.size());
    Eigen::MatrixXd gram(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            gram(i, j) = std::real((basis[i] * basis[j]).trace());
        rhs(i) = std::real((x * basis[i]).trace());
    }
    Eigen::VectorXd c = gram.fullPivLu().solve(rhs);
    if (residual) {
        Mat back = Mat::Zero(x.rows(), x.cols());
        for (int i = 0; i < n; ++i) back += c(i) * basis[i];
        *residual = (x - back).norm();
    }
    return c;
}

Mat from_components(const std::vector<Mat>& basis, const Eigen::VectorXd& c) {
    Mat x = Mat::Zero(basis[0].rows(), basis[0].cols());
    for (int i = 0; i < static_cast<int>(basis.size()); ++i)
        x += c(i) * basis[i];
    return x;
}

// The matrix of Ad_{g^{-1}}: column j holds the components of g^{-1} e_j g.
Eigen::MatrixXd ad_inverse_matrix(const GroupElement& g,
                                  const std::vector<Mat>& basis) {
    const int n = static_cast<int>(basis.size());
    const Mat gi = group_inv(g).m;
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j)
        m.col(j) = basis_components(basis, gi * basis[j] * g.m);
    return m;
}

// Largest distance between the spectra of a and b (each eigenvalue must
// have a partner on the other side).
double spectral_distance(const Mat& a, const Mat& b) {
    Eigen::ComplexEigenSolver<Mat> ea(a, false), eb(b, false);
    const auto& va = ea.eigenvalues();
    const auto& vb = eb.eigenvalues();
    double worst = 0.0;
    for (int i = 0; i < va.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < vb.size(); ++j)
            best = std::min(best, std::abs(va(i) - vb(j)));
        worst = std::max(worst, best);
    }
    for (int j = 0; j < vb.size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < va.size(); ++i)
            best = std::min(best, std::abs(va(i) - vb(j)));
        worst = std::max(worst, best);
    }
    return worst;
}

// theta of a candidate class tangent at g, as components: checks that
// g^{-1} v lies in the algebra within tol.
Eigen::VectorXd tangent_components(const GroupElement& g,
                                   const std::vector<Mat>& basis, const Mat& v,
                                   double tol, const char* what) {
    double res = 0.0;
    Eigen::VectorXd c = basis_components(basis, group_inv(g).m * v, &res);
    GC_CHECK(res <= tol * (1.0 + v.norm()),
             what, ": vector is not a group tangent");
    return c;
}

constexpr double kClassTol = 1e-10;
constexpr double kTangentTol = 1e-8;

}  // namespace

// -----------------------------------------------------------------------
// Conjugacy classes
// -----------------------------------------------------------------------

ConjClassPoint make_conj_point(const GroupElement& h, const GroupElement& g) {
    GC_CHECK(h.tag == g.tag && h.m.rows() == g.m.rows(),
             "make_conj_point: mismatched group elements");
    GC_CHECK(spectral_distance(h.m, g.m) <= kClassTol,
             "make_conj_point: point is not on the class of h");
    return {h, g};
}

ConjClassPoint random_conj_point(const GroupElement& h, Rng& rng) {
    const GroupElement u =
        random_group_element(h.tag, static_cast<int>(h.m.rows()), rng);
    return {h, group_mul(group_mul(u, h), group_inv(u))};
}

Mat conj_tangent(const ConjClassPoint& p, const Mat& x) {
    return x * p.g.m - p.g.m * x;
}

double omega_h(const InvariantPairing& pairing, const ConjClassPoint& p,
               const Mat& v1, const Mat& v2) {
    const std::vector<Mat> basis =
        algebra_basis(p.g.tag, static_cast<int>(p.g.m.rows()));
    const int n = static_cast<int>(basis.size());
    const Eigen::MatrixXd ad_inv = ad_inverse_matrix(p.g, basis);
    const Eigen::MatrixXd lhs = ad_inv - Eigen::MatrixXd::Identity(n, n);

    // theta(v) = (Ad^{-1} - 1)x for v = x g - g x, so the minimum-norm
    // least-squares preimage recovers the image component of x; a residual
    // marks a vector that leaves the class.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    auto solve_t = [&](const Mat& v) {
        const Eigen::VectorXd theta =
            tangent_components(p.g, basis, v, kTangentTol, "omega_h");
        const Eigen::VectorXd y = svd.solve(theta);
        GC_CHECK((lhs * y - theta).norm() <=
                     kTangentTol * (1.0 + theta.norm()),
                 "omega_h: vector is not tangent to the class");
        return std::make_pair(theta, Eigen::VectorXd(ad_inv * y + y));
    };
    const auto [th1, t1] = solve_t(v1);
    const auto [th2, t2] = solve_t(v2);

    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            gram(i, j) = pairing.eval(basis[i], basis[j]);
    return th1.dot(gram * t2) - th2.dot(gram * t1);
}

// -----------------------------------------------------------------------
// Biconjugacy classes
// -----------------------------------------------------------------------

BiconjPoint make_biconj_point(const GroupElement& h1, const GroupElement& h2,
                              const GroupElement& g1, const GroupElement& g2) {
    GC_CHECK(h1.tag == h2.tag && h1.tag == g1.tag && h1.tag == g2.tag &&
                 h1.m.rows() == h2.m.rows() && h1.m.rows() == g1.m.rows() &&
                 h1.m.rows() == g2.m.rows(),
             "make_biconj_point: mismatched group elements");
    const Mat a = group_mul(g1, group_inv(g2)).m;
    const Mat h = group_mul(h1, group_inv(h2)).m;
    GC_CHECK(spectral_distance(a, h) <= kClassTol,
             "make_biconj_point: g1 g2^{-1} is not on the class of h1 h2^{-1}");
    return {h1, h2, g1, g2};
}

BiconjPoint random_biconj_point(const GroupElement& h1, const GroupElement& h2,
                                Rng& rng) {
    const int ambient = static_cast<int>(h1.m.rows());
    const GroupElement x1 = random_group_element(h1.tag, ambient, rng);
    const GroupElement x2 = random_group_element(h1.tag, ambient, rng);
    const GroupElement x2i = group_inv(x2);
    return {h1, h2, group_mul(group_mul(x1, h1), x2i),
            group_mul(group_mul(x1, h2), x2i)};
}

std::pair<Mat, Mat> biconj_tangent(const BiconjPoint& q, const Mat& x,
                                   const Mat& y) {
    return {x * q.g1.m - q.g1.m * y, x * q.g2.m - q.g2.m * y};
}

BibraneValue bibrane_curvature(const BiconjPoint& q,
                               const std::pair<Mat, Mat>& t1,
                               const std::pair<Mat, Mat>& t2, int level_k) {
    GC_CHECK(level_k >= 1, "bibrane_curvature: level must be positive");
    const std::vector<Mat> basis =
        algebra_basis(q.g1.tag, static_cast<int>(q.g1.m.rows()));
    const int n = static_cast<int>(basis.size());

    // Recover the directions (x, y) of each tangent pair from the right
    // logarithms  v g1^{-1} = x - Ad_{g1} y,  w g2^{-1} = x - Ad_{g2} y;
    // a large least-squares residual marks a pair outside the class.
    const Eigen::MatrixXd a1 = ad_inverse_matrix(group_inv(q.g1), basis);
    const Eigen::MatrixXd a2 = ad_inverse_matrix(group_inv(q.g2), basis);
    Eigen::MatrixXd sys(2 * n, 2 * n);
    sys.block(0, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
    sys.block(n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
    sys.block(0, n, n, n) = -a1;
    sys.block(n, n, n, n) = -a2;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        sys, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Mat g1i_m = group_inv(q.g1).m;
    const Mat g2i_m = group_inv(q.g2).m;
    auto right_log = [&](const Mat& v, const Mat& gi) {
        double res = 0.0;
        Eigen::VectorXd c = basis_components(basis, v * gi, &res);
        GC_CHECK(res <= kTangentTol * (1.0 + v.norm()),
                 "bibrane_curvature: vector is not a group tangent");
        return c;
    };
    auto direction = [&](const std::pair<Mat, Mat>& t) {
        Eigen::VectorXd rhs(2 * n);
        rhs.head(n) = right_log(t.first, g1i_m);
        rhs.tail(n) = right_log(t.second, g2i_m);
        const Eigen::VectorXd sol = svd.solve(rhs);
        GC_CHECK((sys * sol - rhs).norm() <= kTangentTol * (1.0 + rhs.norm()),
                 "bibrane_curvature: tangents are not of biconjugacy type");
        return from_components(basis, sol.head(n));
    };
    const Mat x1 = direction(t1);
    const Mat x2 = direction(t2);

    const InvariantPairing pairing = calibrated_pairing(level_k);
    const ConjClassPoint pa = make_conj_point(
        group_mul(q.h1, group_inv(q.h2)), group_mul(q.g1, group_inv(q.g2)));

    // Gerbe side: mu* rho through the form machinery plus the class form
    // along the recovered direction.
    IndexMap mu;
    mu.arity_in = 2;
    mu.arity_out = 2;
    mu.blocks = {{{0, false}, {1, true}}, {{1, false}}};
    const FormPtr mu_rho = form_pullback(mu, rho_form(pairing));
    const double rho_val =
        eval_form(mu_rho, {q.g1, q.g2},
                  {{t1.first, t1.second}, {t2.first, t2.second}});
    const double def4 = -rho_val +
                        omega_h(pairing, pa, conj_tangent(pa, x1),
                                conj_tangent(pa, x2));

    // Symmetric side: the twisted-multiplication differential taken
    // directly,  d mt (v, w) = v g2^{-1} - (g1 g2^{-1}) w g2^{-1},  and the
    // Maurer-Cartan cross term from plain matrix products.
    auto dmt = [&](const std::pair<Mat, Mat>& t) {
        return Mat(t.first * g2i_m - pa.g.m * t.second * g2i_m);
    };
    const double cross =
        0.5 * (pairing.eval(g1i_m * t1.first, g2i_m * t2.second) -
               pairing.eval(g1i_m * t2.first, g2i_m * t1.second));
    const double target =
        omega_h(pairing, pa, dmt(t1), dmt(t2)) - cross;

    return {def4, target, std::abs(def4 - target)};
}

}  // namespace gerbecalc
