#pragma once

// Differential-form expressions on products of Lie groups.
//
// A FormExpr is an immutable expression tree describing a real- or
// algebra-valued form on G^arity.  Evaluation at a point takes one ambient
// tangent matrix per slot for each form argument.  All wedge products use the
// shuffle convention (no factorial normalisation):
//
//   (a ^ b)(v_1..v_{p+q}) = sum_{(p,q)-shuffles s} sgn(s) a(v_s..) b(v_s..)
//
// The bracket wedge and pairing nodes follow the same convention; note that
// for a single algebra-valued 1-form A the geometric commutator square
// [A ^ A](u,v) = [A(u), A(v)] is HALF of bracket_wedge(A, A), which the
// canonical-form constructors below account for.
//
// The exterior derivative is a finite-difference operator in exponential
// normal coordinates: coordinate frames are transported analytically with the
// derivative-of-exp series, so the only error is the O(h^2) central stencil
// (optionally removed to O(h^4) by one Richardson step).
//
// The simplicial differential Delta f = sum_k (-1)^k (face_k)^* f is built
// from pullback nodes whose index maps compose symbolically; applying it
// twice cancels term-by-term, so Delta(Delta f) is the empty sum and
// evaluates to exactly zero.

#include <functional>
#include <memory>
#include <vector>

#include "gerbecalc/group.hpp"
#include "gerbecalc/index_map.hpp"

namespace gerbecalc {

// Ad-invariant pairing <X, Y> = -c * level * tr(XY).  The constant c is fixed
// once per group by calibrate_pairing (mesh-integrate module) so that the
// basic 3-form integrates to 1 over the group at level 1.
struct InvariantPairing {
    GroupTag tag = GroupTag::SU2;
    int level = 1;
    double c = 1.0;

    double eval(const Mat& x, const Mat& y) const {
        return -c * static_cast<double>(level) * std::real((x * y).trace());
    }

    InvariantPairing at_level(int k) const { return {tag, k, c}; }
};

struct FormExpr;
using FormPtr = std::shared_ptr<const FormExpr>;

// One tangent tuple: an ambient matrix per slot of G^arity.
using TangentTuple = std::vector<Mat>;
// A frame: `degree` tangent tuples.
using Frame = std::vector<TangentTuple>;

// Atomic coordinate-chart forms: sums of terms
//   coef(x) dx_{i1} ^ ... ^ dx_{ik} (x) basis_element
// where coef is a product of a constant, monomials x_v^p and trig factors
// sin/cos(2 pi f x_v + phase).  These support an exact exterior derivative.
struct CoefAtom {
    double c = 1.0;
    struct Mono {
        int var;
        int power;
    };
    struct Trig {
        int var;
        double freq = 1.0;   // sin/cos(2 pi freq x + phase)
        double phase = 0.0;
        bool is_sin = true;
    };
    std::vector<Mono> monos;
    std::vector<Trig> trigs;

    double eval(const Eigen::VectorXd& x) const;
    // Partial derivative d/dx_v as a sum of atoms.
    std::vector<CoefAtom> partial(int v) const;
};

struct ChartTerm {
    CoefAtom coef;
    std::vector<int> dxs;  // strictly increasing coordinate indices
    int basis = -1;        // index into value-algebra basis; -1 = real-valued
};

// A chart form lives on one group slot carrying a coordinate chart
// (UnitaryN torus or VectorGroupRd) and takes values in the algebra of a
// (possibly different) structure group, or in R when all basis = -1.
struct ChartFormData {
    GroupTag chart_tag = GroupTag::VectorGroupRd;
    int chart_ambient = 0;
    int degree = 1;
    GroupTag value_tag = GroupTag::SU2;
    int value_ambient = 2;
    bool algebra_valued = true;
    std::vector<ChartTerm> terms;

    // Exact exterior derivative (degree + 1).
    ChartFormData exterior_derivative() const;
};

enum class FormKind : std::uint8_t {
    ThetaLeft,
    ThetaRight,
    ConstantAlgebra,
    Wedge,
    BracketWedge,
    PairingWedge,
    BracketPairing,
    Sum,
    Pullback,
    ExtD,
    AdjointConj,
    ChartForm,
    CustomReal,
};

struct FormExpr {
    FormKind kind;
    int degree = 0;
    int arity = 1;
    bool algebra_valued = false;

    std::vector<FormPtr> children;
    std::vector<double> coefs;  // Sum only, parallel to children
    int slot = 0;               // ThetaLeft/Right, AdjointConj, ChartForm
    IndexMap map;               // Pullback
    InvariantPairing pairing;   // PairingWedge, BracketPairing
    Mat constant;               // ConstantAlgebra
    double fd_step = 1e-4;      // ExtD
    bool fd_richardson = true;  // ExtD
    std::shared_ptr<const ChartFormData> chart;  // ChartForm
    std::function<double(const std::vector<GroupElement>&, const Frame&)>
        custom;  // CustomReal
};

// --- constructors ------------------------------------------------------------

FormPtr theta_left(int slot, int arity);
FormPtr theta_right(int slot, int arity);
FormPtr constant_algebra(const AlgebraVector& x, int arity);
FormPtr wedge(const FormPtr& a, const FormPtr& b);
FormPtr bracket_wedge(const FormPtr& a, const FormPtr& b);
FormPtr pairing_wedge(const InvariantPairing& p, const FormPtr& a,
                      const FormPtr& b);
FormPtr bracket_pairing(const InvariantPairing& p, const FormPtr& a,
                        const FormPtr& b, const FormPtr& c);
FormPtr form_sum(const std::vector<std::pair<double, FormPtr>>& terms);
FormPtr form_add(const FormPtr& a, const FormPtr& b);
FormPtr form_scale(double c, const FormPtr& f);
FormPtr form_pullback(const IndexMap& map, const FormPtr& f);
FormPtr ext_d(const FormPtr& f, double step = 1e-4, bool richardson = true);
FormPtr adjoint_conj(int slot, const FormPtr& f);
FormPtr chart_form(const std::shared_ptr<const ChartFormData>& data, int slot,
                   int arity);
FormPtr custom_real_form(
    int degree, int arity,
    std::function<double(const std::vector<GroupElement>&, const Frame&)> fn);

// Simplicial coboundary: for f on G^q returns sum_{k=0}^{q+1} (-1)^k
// (face_k)^* f on G^{q+1}, with pullback maps composed symbolically and equal
// terms collected (so Delta(Delta(f)) is identically the empty sum).
FormPtr simplicial_delta(const FormPtr& f);

// --- canonical forms ----------------------------------------------------------

// Basic 3-form (1/6)<theta ^ [theta ^ theta]> on one slot.
FormPtr eta_form(const InvariantPairing& p, int slot = 0, int arity = 1);

// Two-slot 2-form (1/2)<p1* theta ^ p2* thetabar>.
FormPtr rho_form(const InvariantPairing& p, int arity = 2, int slot1 = 0,
                 int slot2 = 1);

// --- evaluation ----------------------------------------------------------------

// Evaluate a real-valued form.  frame.size() must equal f->degree, and each
// tuple must have one matrix per slot.  Exact-duplicate frame tuples give an
// exact zero; the frame is canonically ordered first, so the evaluation is
// manifestly alternating.
double eval_form(const FormPtr& f, const std::vector<GroupElement>& pt,
                 const Frame& frame);

// Evaluate an algebra-valued form.
Mat eval_form_matrix(const FormPtr& f, const std::vector<GroupElement>& pt,
                     const Frame& frame);

}  // namespace gerbecalc
