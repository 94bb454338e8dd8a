#pragma once

// Conjugacy-class geometry for symmetric branes.
//
// A symmetric brane sits on a conjugacy class C_h = {u h u^{-1}} and carries
// the 2-form
//
//     omega_h(v1, v2) = <theta(v1), T theta(v2)> - <theta(v2), T theta(v1)>,
//     T = (Ad^{-1} + 1) o (Ad^{-1} - 1)^{-1},
//
// with theta the left Maurer-Cartan form and Ad = Ad_g at the evaluation
// point g.  Tangents to the class at g are exactly the matrices x g - g x
// with x in the Lie algebra, so theta of a class tangent always lies in
// im(Ad^{-1} - 1) and the inverse is taken there: Ad is orthogonal for the
// invariant pairing of a compact group, which makes ker(Ad^{-1} - 1) and
// im(Ad^{-1} - 1) orthogonal complements, and the minimum-norm least-squares
// solve picks the image component and discards the kernel.
//
// Two classes combine into the biconjugacy class
//
//     B_{h1,h2} = {(x1 h1 x2^{-1}, x1 h2 x2^{-1})}  in  G x G,
//
// the preimage of C_{h1 h2^{-1}} under the twisted multiplication
// mt(g1,g2) = g1 g2^{-1}; its tangents at (g1,g2) are the pairs
// (x g1 - g1 y, x g2 - g2 y), and dmt sends such a pair to the class tangent
// x a - a x at a = g1 g2^{-1} (the y-terms cancel).  The brane 2-form on
// B_{h1,h2} arises in two ways: from the multiplicative gerbe data as
//
//     -mu* rho + mt* omega_h,    mu(g1,g2) = (g1 g2^{-1}, g2),
//
// with rho the bi-invariant 2-form of the multiplicative structure, or
// directly as the symmetric-brane form
//
//     mt* omega_{h1 h2^{-1}} - 1/2 <p1* theta ^ p2* theta>.
//
// The two agree: pulling rho back along mu collapses it to the cross term,
// because the right-logarithm contributions of the second slot cancel in
// pairs.  bibrane_curvature evaluates both, the first through the simplicial
// form machinery and the second directly from matrices, and reports the
// difference.

#include <utility>

#include "gerbecalc/forms.hpp"
#include "gerbecalc/group.hpp"

namespace gerbecalc {

// A point g on the conjugacy class C_h of its representative h.
struct ConjClassPoint {
    GroupElement h;
    GroupElement g;
};

// Checks that g and h have matching eigenvalues (within 1e-10) before
// accepting g as a point of C_h.
ConjClassPoint make_conj_point(const GroupElement& h, const GroupElement& g);

// h conjugated by a random group element.
ConjClassPoint random_conj_point(const GroupElement& h, Rng& rng);

// The class tangent x g - g x at p.g; zero exactly when x commutes with g,
// so central classes are points with no nonzero tangents.
Mat conj_tangent(const ConjClassPoint& p, const Mat& x);

// The symmetric-brane 2-form at p.g.  Wedge convention:
// (alpha ^ beta)(v1,v2) = alpha(v1) beta(v2) - alpha(v2) beta(v1).
// Vectors that are not class tangents within 1e-8 are rejected.
double omega_h(const InvariantPairing& pairing, const ConjClassPoint& p,
               const Mat& v1, const Mat& v2);

// A point (g1, g2) on the biconjugacy class B_{h1,h2}.
struct BiconjPoint {
    GroupElement h1, h2;
    GroupElement g1, g2;
};

// Checks that g1 g2^{-1} lies on C_{h1 h2^{-1}} (within 1e-10).
BiconjPoint make_biconj_point(const GroupElement& h1, const GroupElement& h2,
                              const GroupElement& g1, const GroupElement& g2);

// (x1 h1 x2^{-1}, x1 h2 x2^{-1}) for random x1, x2.
BiconjPoint random_biconj_point(const GroupElement& h1, const GroupElement& h2,
                                Rng& rng);

// The biconjugacy tangent pair (x g1 - g1 y, x g2 - g2 y) at q.
std::pair<Mat, Mat> biconj_tangent(const BiconjPoint& q, const Mat& x,
                                   const Mat& y);

// Both evaluations of the bi-brane curvature at q with the level-k pairing:
//   def4_value   = -mu* rho + mt* omega        (gerbe construction)
//   target_value = mt* omega - cross term      (symmetric form)
// and defect = |def4_value - target_value|.  Tangent pairs must be of
// biconjugacy type within 1e-8.
struct BibraneValue {
    double def4_value = 0.0;
    double target_value = 0.0;
    double defect = 0.0;
};

BibraneValue bibrane_curvature(const BiconjPoint& q,
                               const std::pair<Mat, Mat>& t1,
                               const std::pair<Mat, Mat>& t2, int level_k);

}  // namespace gerbecalc
