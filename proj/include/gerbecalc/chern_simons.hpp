#pragma once

// The action 3-form TP(A) = P(A ^ dA) + (1/3)<A, [A ^ A]> of a connection on
// a trivialized bundle M x G, its action integral over closed oriented
// 3-meshes, the curvature identity d TP(A) = P(Omega ^ Omega), the
// fiber-difference identities coupling TP(A) to the canonical 3-form and the
// bi-invariant 2-form on the group, and the integrality of the action's
// gauge ambiguity.
//
// Normalization.  The invariant polynomial entering TP is the calibrated
// level-k pairing scaled by -1/2 (cs_pairing below).  This is the unique
// scaling for which, with Delta(f) = p2*f - p1*f on the fiber products of
// M x G and g the transition function g((m,a),(m,b)) = a^-1 b,
//
//     Delta TP(A) = g*eta_k + d omega,   omega := -P(g*thetabar ^ p1*A),
//     g*rho_k + Delta omega = 0,
//
// hold against the level-k canonical forms eta_k and rho_k (the ones
// normalized by int_{S^3} eta = k), and the gauge ambiguity of the action is
// exactly k times the mapping degree of the gauge transformation.  The
// factor was pinned by evaluating the flat case A = theta: the identities
// close to machine/FD precision with the -1/2 and with no other scaling.
// The second identity is algebraic (no differentiation): the proof only
// uses p2*A = Ad_{g^-1}(p1*A) + g*theta, so it holds exactly for every base
// form, and the implementation checks it to ~1e-12.
//
// Base manifolds are coordinate-chart carriers (tori U(1)^d or R^d), so base
// forms are chart expressions with exact coordinate derivatives; everything
// integrated by quadrature is free of finite-difference error.  The bundle
// direction uses the exponential-coordinate FD derivative of forms.hpp.

#include <iosfwd>

#include "gerbecalc/integrate.hpp"

namespace gerbecalc {

// Calibrated level-k pairing scaled by -1/2 (see header comment).
InvariantPairing cs_pairing(int level_k);

// --- connections -------------------------------------------------------------

// A connection on the trivial bundle M x SU(2), stored through its base form
// a in Omega^1(M, su(2)); the connection 1-form is Ad_{g^-1}(a) + theta.
struct ConnectionData {
    GroupTag chart_tag = GroupTag::UnitaryN;  // base manifold carrier
    int chart_ambient = 3;
    int level = 1;
    InvariantPairing pairing;                 // polynomial used in TP
    std::shared_ptr<const ChartFormData> base;  // may hold zero terms
};

ConnectionData make_connection(GroupTag chart_tag, int chart_ambient,
                               int level, std::vector<ChartTerm> base_terms);

// Uniformly bounded random base form: `terms` chart terms with trigonometric
// or polynomial coefficients in random coordinates, random algebra basis
// directions.
ConnectionData random_connection(GroupTag chart_tag, int chart_ambient,
                                 int level, Rng& rng, int terms = 4,
                                 bool abelian = false);

// --- form expressions ---------------------------------------------------------

// TP(A) with dA supplied (exact) or taken by FD.
FormPtr tp_form(const InvariantPairing& P, const FormPtr& A,
                const FormPtr& dA);
FormPtr tp_form(const InvariantPairing& P, const FormPtr& A);

// The base form a as an expression on slot `base_slot`.
FormPtr base_form(const ConnectionData& c, int base_slot, int arity);

// The connection form Ad_{g^-1}(a) + theta on (m, g) slots.
FormPtr connection_form(const ConnectionData& c, int base_slot,
                        int group_slot, int arity);

// --- exact chart calculus on the base ----------------------------------------

// Pointwise wedge-and-pair of two algebra-valued chart forms (shuffle
// convention), expanded symbolically into a real chart form.
ChartFormData chart_pairing_wedge(const InvariantPairing& P,
                                  const ChartFormData& a,
                                  const ChartFormData& b);
// [a ^ b] expanded through the structure constants.
ChartFormData chart_bracket_wedge(const ChartFormData& a,
                                  const ChartFormData& b);

// Curvature of the base form, exact: Omega = da + (1/2)[a ^ a].
ChartFormData base_curvature(const ConnectionData& c);
// TP(a) as an exact real chart 3-form (what the action integrates).
ChartFormData base_tp(const ConnectionData& c);
// P(Omega ^ Omega), exact real chart 4-form.
ChartFormData base_pontryagin(const ConnectionData& c);

// --- action -------------------------------------------------------------------

// int_M TP(a) over a closed oriented 3-mesh valued in the chart carrier.
double cs_action(const GroupMesh& mesh, const ConnectionData& c);

// Transgression of the Pontryagin form along the linear path between two
// base forms on the same carrier:
//     int_0^1 dt int_M 2 P((a1 - a0) ^ Omega_t) = Z(a1) - Z(a0).
// Gauss-Legendre in t with `t_points` nodes; the equality is the boundary
// case of expressing the action through a filling 4-manifold integral.
double pontryagin_transgression(const GroupMesh& mesh,
                                const ConnectionData& c0,
                                const ConnectionData& c1, int t_points = 6);

// --- identity checks ----------------------------------------------------------

// Max pointwise defect of d TP(A) = P(Omega_A ^ Omega_A) on M x G at random
// points and 4-frames (FD-limited; the nested derivative uses `fd_step`).
double pontryagin_defect(const ConnectionData& c, int samples, unsigned seed,
                         double fd_step = 2e-3);

struct TransitionCheck {
    double coboundary_defect = 0.0;  // 3-form identity on M x G^2 (FD)
    double bi_form_defect = 0.0;     // 2-form identity on M x G^3 (algebraic)
};
TransitionCheck transition_identity_check(const ConnectionData& c, int samples,
                                          unsigned seed);

// --- gauge shifts --------------------------------------------------------------

// Gauge transformations act on base forms by a^h = Ad_{h^-1}(a) + h*theta.
// The base manifold here is the unit 3-sphere carried by SU(2) itself, so
// base forms are the left-invariant family
//     a = sum_{ij} coeffs(i,j) e_i <e_j, theta>
// (the difference Z(a^h) - Z(a) is independent of a; a nonzero base makes
// the cancellation part of the test).  Both actions are quadratures of TP
// over the mesh of h; the reported delta is normalized by the same-mesh
// integral of the level-1 canonical 3-form along the identity section, which
// removes the common discretization bias of smooth-map integrals without
// touching the two action values themselves.
struct GaugeShiftResult {
    double z_base = 0.0;
    double z_shifted = 0.0;
    double unit = 1.0;     // same-mesh integral of eta_1 along the identity
    double delta = 0.0;    // (z_shifted - z_base) / unit
    double nearest_int_defect = 0.0;
};

// h: SU(2)-valued arity-1 map on a closed 3-mesh embedded in the unit sphere
// of R^4 (the identity section is rebuilt from the embedding).
//
// Accuracy: when h is a left translate of the identity section the delta is
// exact to roundoff (the integrands coincide pointwise).  For maps that
// stretch the mesh (power maps) the single-level delta carries the
// interpolation bias of the map quadrature, which converges at order ~1.8 in
// the mesh spacing; gauge_shift_suite removes the leading term by comparing
// two refinement levels.
GaugeShiftResult gauge_shift_check(const GroupMesh& h, int level_k,
                                   const Eigen::Matrix3d& base_coeffs =
                                       Eigen::Matrix3d::Zero());

// Randomized gauge-shift suite: `count` maps u q^d exp(F) with degree d in
// [-2, 2], random wobble, and (half the time) a random left-invariant base
// form.  Each map is checked on sphere meshes at fine_level-1 and fine_level
// and the reported delta is the Richardson extrapolation of the two
// normalized deltas.
struct GaugeSuiteCase {
    int degree = 0;
    double wobble = 0.0;
    bool with_base = false;
    GaugeShiftResult coarse, fine;
    double delta = 0.0;  // extrapolated
    double nearest_int_defect = 0.0;
};
std::vector<GaugeSuiteCase> gauge_shift_suite(int level_k, int count,
                                              unsigned seed,
                                              int fine_level = 4);

// Degree-d helper maps for gauge suites: q -> u q^d exp(F(q)) with random
// isometry u and random null-homotopic wobble F; the mapping degree is d.
GroupMesh power_gauge_map(const SimplicialMesh& s3, int degree, double wobble,
                          unsigned seed);

// --- connection files -----------------------------------------------------------

// Structured text: carrier tag/ambient, level, then one line per chart term
// (algebra basis index, coordinate 1-form indices, coefficient atoms).
void write_connection(std::ostream& os, const ConnectionData& c);
ConnectionData read_connection(std::istream& is);

}  // namespace gerbecalc
