#pragma once

// Matrix Lie groups used by the toolkit.
//
// Three families are supported, all represented by small complex matrices so
// that products, inverses and tangent calculus are uniform:
//
//   SU2           2x2 special unitary matrices (unit quaternions),
//   UnitaryN      n x n unitary matrices; in practice the diagonal torus,
//                 which hosts periodic coordinate charts,
//   VectorGroupRd translation group of R^d embedded as (d+1)x(d+1)
//                 matrices [[I, v], [0, 1]].
//
// Tangent vectors at g are ambient matrices v with g^{-1} v in the Lie
// algebra; algebra values are ambient matrices in the algebra itself.

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "gerbecalc/common.hpp"

namespace gerbecalc {

enum class GroupTag : std::uint8_t { SU2, UnitaryN, VectorGroupRd };

const char* group_tag_name(GroupTag tag);
GroupTag group_tag_from_name(const std::string& name);

using Mat = Eigen::MatrixXcd;

// Lie algebra value (ambient matrix in the algebra of its group).
struct AlgebraVector {
    GroupTag tag = GroupTag::SU2;
    Mat m;
};

struct GroupElement {
    GroupTag tag = GroupTag::SU2;
    Mat m;

    int ambient() const { return static_cast<int>(m.rows()); }
};

// --- basic group operations ------------------------------------------------

GroupElement group_identity(GroupTag tag, int ambient);
GroupElement group_mul(const GroupElement& a, const GroupElement& b);
GroupElement group_inv(const GroupElement& g);

// exp : algebra -> group and the principal logarithm group -> algebra.
// The logarithm throws when the element is at (or numerically near) the cut
// locus of the identity (e.g. -1 in SU(2)).
GroupElement group_exp(const AlgebraVector& x);
AlgebraVector group_log(const GroupElement& g);

// log(a^{-1} b): the algebra vector pointing from a to b.
AlgebraVector log_between(const GroupElement& a, const GroupElement& b);

// --- Lie algebra structure ---------------------------------------------------

// Dimension of the algebra we expose for the tag (for UnitaryN this is the
// diagonal torus u(1)^n, the part used by coordinate charts).
int algebra_dim(GroupTag tag, int ambient);

// Basis of that algebra.  SU2: e_a = -(i/2) sigma_a, a = 1..3, satisfying
// [e_1, e_2] = e_3 cyclically.  UnitaryN: 2*pi*i E_jj.  VectorGroupRd: E_{j,d}.
std::vector<Mat> algebra_basis(GroupTag tag, int ambient);

// Orthogonal projection of an ambient matrix onto the algebra (full u(n) for
// UnitaryN, not just the torus, so that arbitrary unitary tangents pass).
Mat project_algebra(GroupTag tag, const Mat& m);

// Left Maurer-Cartan form: theta_g(v) = g^{-1} v, projected to the algebra.
// Throws if v is not tangent at g (projection defect above `tol` relative to
// the tangent's scale).
AlgebraVector left_mc(const GroupElement& g, const Mat& v, double tol = 1e-9);

// Right Maurer-Cartan form: thetabar_g(v) = v g^{-1} = Ad_g(theta_g(v)).
AlgebraVector right_mc(const GroupElement& g, const Mat& v, double tol = 1e-9);

// --- coordinate charts -------------------------------------------------------

// UnitaryN (diagonal torus): x_j = arg(g_jj) / 2pi in [0,1), periodic.
// VectorGroupRd: x_j = v_j, global.
// SU2 carries no preferred chart; chart functions throw for it.
int chart_dim(GroupTag tag, int ambient);
Eigen::VectorXd chart_coords(const GroupElement& g);
// dx_j evaluated on a tangent vector at g.
double chart_dx(const GroupElement& g, const Mat& v, int j);

// --- quaternions (SU2 only) --------------------------------------------------

// q = (w, x, y, z) <-> w I + x (i sigma_1) + y (i sigma_2) + z (i sigma_3).
Eigen::Vector4d su2_to_quaternion(const GroupElement& g);
GroupElement su2_from_quaternion(const Eigen::Vector4d& q);

// --- randomness ---------------------------------------------------------------

using Rng = std::mt19937_64;

// Haar-uniform for SU2 and the UnitaryN torus; uniform in [0,1)^d translations
// for VectorGroupRd.
GroupElement random_group_element(GroupTag tag, int ambient, Rng& rng);

// Normal(0, scale) coefficients on algebra_basis.
AlgebraVector random_algebra(GroupTag tag, int ambient, Rng& rng, double scale = 1.0);

// Random tangent vector at g: g * random_algebra.
Mat random_tangent(const GroupElement& g, Rng& rng, double scale = 1.0);

}  // namespace gerbecalc
