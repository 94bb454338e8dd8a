#pragma once

// Surface holonomy on SU(2) at level k via Wess-Zumino extensions, the
// Polyakov-Wiegmann verifier, the Mickelsson central-extension product on
// (disc map, circle value) pairs, and the log-holonomy derivative check for
// U(1) bundles (monopole model on the 2-sphere).

#include <complex>

#include "gerbecalc/integrate.hpp"

namespace gerbecalc {

// exp(2πi k ∫_{B³} φ̃*η) for a ball extension φ̃ of the sphere map φ. The
// integral is well defined modulo 1; wz_integral stores the representative
// in [-1/2, 1/2).
struct WZHolonomy {
    int level = 1;
    std::complex<double> value{1.0, 0.0};
    double wz_integral = 0.0;
    unsigned extension_id = 0;  // seed used for the coning construction
};

WZHolonomy wz_action(const GroupMesh& sphere, int k, unsigned seed = 1,
                     int layers = 0);

struct PWResult {
    std::complex<double> lhs{1.0, 0.0};  // Hol(φ₁) · Hol(φ₂)
    std::complex<double> rhs{1.0, 0.0};  // Hol(φ₁φ₂) · exp(2πi ∫_Σ Φ*ρ)
    double defect = 0.0;                 // |lhs/rhs - 1|
};

// Hol(φ₁)Hol(φ₂) = Hol(φ₁φ₂) · exp(2πi ∫_Σ Φ*ρ) with Φ = (φ₁, φ₂) and the
// level-k pairing in ρ.
PWResult polyakov_wiegmann_check(const GroupMesh& phi1, const GroupMesh& phi2,
                                 int k, unsigned seed = 1, int layers = 0);

// Central extension of the loop group: pairs (disc map, unit complex),
// multiplied pointwise on discs and twisted by ∫_{D²} (φ₁,φ₂)*ρ on the
// circle factor.
//
// Products keep the list of primitive factor maps, and the twist integral is
// evaluated on the joint map of all factors with ρ pulled back through the
// multiplication index map (product of interpolations, not interpolation of
// the product values). All twist integrands of an iterated product then live
// on the same quadrature nodes, so the associator defect cancels pointwise
// rather than being quadrature-limited.
struct MickelssonElement {
    GroupMesh disc;
    std::complex<double> z{1.0, 0.0};
    int level = 1;
    std::vector<GroupMesh> factors;  // empty means {disc}
};

MickelssonElement make_mickelsson(const GroupMesh& disc,
                                  std::complex<double> z, int level);

MickelssonElement me_product(const MickelssonElement& a,
                             const MickelssonElement& b);

// (φ, z) ~ (φ', z') iff z'/z = exp(2πi k S_WZ) on the sphere glued from the
// two discs. The pair is ordered canonically before gluing so the relation
// is symmetric by construction.
bool me_equal(const MickelssonElement& a, const MickelssonElement& b,
              double tol = 1e-3, unsigned seed = 1);

// Derivative of the log-holonomy of a U(1) bundle along a loop family vs the
// fiber integral of the curvature over the circle. Both sides are reported
// as d/dt of (log Hol)/(2πi), i.e. real numbers.
struct Lemma6Result {
    double fd_derivative = 0.0;
    double fiber_integral = 0.0;
    double defect = 0.0;
};

// Monopole curvature of integer charge n on the unit sphere in R³ (total
// flux n), as a degree-2 form on R³-valued maps: F_p(a,b) = n p·(a×b)/(4π|p|³).
FormPtr monopole_curvature(int charge);

// Loops are maps S¹ → S² ⊂ R³ carried by the translation group; the family
// is evaluated at t0 and t0 ± dt. Holonomy is realized as
// exp(2πi ∫_{cap} F) where the cap cones the loop to the north pole along
// great circles (fails for loops through the south pole). `segments` is the
// circle resolution, `cap_level` the disc refinement of the cap.
Lemma6Result lemma6_check(
    const FormPtr& curvature,
    const std::function<Eigen::Vector3d(double, double)>& loop, double t0,
    double dt, int segments = 96, int cap_level = 4);

}  // namespace gerbecalc
