#pragma once
// deligne.hpp -- exact Cech--Deligne cochain calculus over a simplicial group
// model.
//
// Coefficients live in two sheaves, both realized with rational numbers so
// every identity below is exact:
//
//   * U(1)-valued functions are rational vertex cochains read modulo one
//     integer shift per connected component of their patch -- the discrete
//     counterpart of choosing a local logarithm, which is unique up to a
//     locally constant integer.  Their "dlog" is the coboundary of any
//     representative; constant shifts die under the coboundary, so dlog is
//     well defined.
//   * Differential k-forms are rational cellular k-cochains with d the cell
//     coboundary.
//
// A Deligne cochain of total degree m and truncation n over the cover stack
// has components xi_{q,p,k} in Cech^p(cover_q, level-k sheaf) with
// q + p + k = m and k <= n, plus -- in degree m = n+1 only -- a global bi-form
// rho on K_2.  The fixed-level differential is D = delta + (-1)^p d (with dlog
// in place of d on the function layer and the top layer k = n truncated); the
// total differential is (-1)^q D + Delta with Delta the alternating sum of
// pullbacks along the group face maps; and the bi-complex modification sends
// rho to (1, 0, ..., 0, -rho) placed over the level-2 cover.

#include <gmpxx.h>

#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gerbecalc/cell_complex.hpp"
#include "gerbecalc/group.hpp"

namespace gerbecalc {

using Rational = mpq_class;

// ---------------------------------------------------------------------------
// discrete forms
// ---------------------------------------------------------------------------

// A rational cellular k-cochain on K_level; absent cells read as zero.
struct DiscreteForm {
  int level = 1;
  int degree = 0;
  std::map<int, Rational> values;
};

DiscreteForm form_zero(int level, int degree);
DiscreteForm form_add(const DiscreteForm& a, const DiscreteForm& b);
DiscreteForm form_scale(const Rational& s, const DiscreteForm& a);
bool form_is_zero(const DiscreteForm& a);
bool form_equal(const DiscreteForm& a, const DiscreteForm& b);

// Cell coboundary d : Omega^k(K_q) -> Omega^{k+1}(K_q).
DiscreteForm form_d(const SimplicialGroupModel& model, const DiscreteForm& a);

// Simplicial difference Delta : Omega^k(K_q) -> Omega^k(K_{q+1}), the
// alternating sum of pullbacks along the face maps.
DiscreteForm form_delta(const SimplicialGroupModel& model, const DiscreteForm& a);

// Exact basis of { f in Omega^degree(K_level) : Delta f = 0 }, optionally
// intersected with ker d.  Computed by sparse rational elimination.
std::vector<DiscreteForm> delta_kernel(const SimplicialGroupModel& model,
                                       int level, int degree,
                                       bool also_d_closed = false);

DiscreteForm random_form(const SimplicialGroupModel& model, int level,
                         int degree, Rng& rng, int entries,
                         int denominator_bound = 8);

// ---------------------------------------------------------------------------
// Cech layers
// ---------------------------------------------------------------------------

// A Cech p-cochain over cover `level` with values in the k-form sheaf
// (form >= 1) or the U(1)-function sheaf (form == 0).  Keys are strictly
// ascending patch tuples; values are sparse cell -> rational maps supported on
// the tuple's intersection (vertices when form == 0).
struct CechCochain {
  int level = 1;  // q
  int cech = 0;   // p
  int form = 0;   // k
  std::map<std::vector<int>, std::map<int, Rational>> entries;
};

CechCochain cech_add(const CechCochain& a, const CechCochain& b);
CechCochain cech_scale(const Rational& s, const CechCochain& a);

// Cech coboundary delta (alternating, ascending-tuple storage).
CechCochain cech_delta(const SimplicialGroupModel& model, const CechCochain& c);
// Cell coboundary d per tuple; for form == 0 this is dlog: the coboundary of
// the stored representative.
CechCochain cech_d(const SimplicialGroupModel& model, const CechCochain& c);
// Simplicial difference Delta into the next cover level.
CechCochain cech_Delta(const SimplicialGroupModel& model, const CechCochain& c);

// Exact zero test.  Plain cochains (form >= 1) must vanish identically;
// function cochains (form == 0) are trivial when the representative is a
// constant integer on every connected component of every tuple intersection
// (absent entries read as 0).
bool cech_is_trivial(const SimplicialGroupModel& model, const CechCochain& c);

// Canonical representative of a function cochain: on each component, shift by
// the integer making the value at the least vertex lie in [0,1).
CechCochain canonical_rep(const SimplicialGroupModel& model, const CechCochain& c);

CechCochain random_cech(const SimplicialGroupModel& model, int level, int cech,
                        int form, Rng& rng, int tuples, int entries,
                        int denominator_bound = 8);

// ---------------------------------------------------------------------------
// Deligne cochains
// ---------------------------------------------------------------------------

struct DeligneCochain {
  int degree = 0;      // m
  int truncation = 0;  // n
  // key {q, p, k}; absent components are zero.
  std::map<std::array<int, 3>, CechCochain> parts;
  bool has_rho = false;
  DiscreteForm rho;  // degree-n form on K_2, present only when degree == n+1

  CechCochain part_or_zero(int q, int p, int k) const;
};

DeligneCochain cochain_zero(int degree, int truncation);
DeligneCochain cochain_add(const DeligneCochain& a, const DeligneCochain& b);
DeligneCochain cochain_negate(const DeligneCochain& a);
bool cochain_equal(const SimplicialGroupModel& model, const DeligneCochain& a,
                   const DeligneCochain& b);

// Fixed-level Deligne differential D = delta + (-1)^p d (dlog on the function
// layer, k = n truncated).  Raises the total degree by one without moving
// levels.
DeligneCochain deligne_D(const SimplicialGroupModel& model,
                         const DeligneCochain& c);

// Total differential of the bi-complex: (-1)^q D + Delta on components, and
// (1,0,...,0,-rho) over the level-2 cover for the bi-form.  Components that
// would land beyond the model's top level are dropped (the model truncates the
// simplicial direction).  Requires Delta rho = 0 when rho is present.
DeligneCochain bi_D(const SimplicialGroupModel& model, const DeligneCochain& c);

struct CocycleReport {
  bool ok = true;
  std::vector<std::string> residuals;
};

// True iff bi_D(c) vanishes exactly; residuals name the offending components.
CocycleReport is_cocycle(const SimplicialGroupModel& model,
                         const DeligneCochain& c);

// True iff c2 = c1 + bi_D(witness) exactly (U(1) layers compared as classes).
bool check_coboundary(const SimplicialGroupModel& model, const DeligneCochain& c1,
                      const DeligneCochain& c2, const DeligneCochain& witness);

// ---------------------------------------------------------------------------
// constructors from the structure results
// ---------------------------------------------------------------------------

// The trivially multiplicative cocycle of a global n-form phi on K_1 together
// with a Delta-closed (n-1)-form psi on K_2 (n = phi.degree >= 1): components
// phi in the top slot over cover 1, psi over cover 2 (as a function
// representative when n = 1), and bi-form rho = d psi + Delta phi.
DeligneCochain make_trivial_multiplicative(const SimplicialGroupModel& model,
                                           const DiscreteForm& phi,
                                           const DiscreteForm& psi);

// The degree-(n+2) cocycle attached to a pair (H, rho) with dH = 0,
// Delta H = d rho, Delta rho = 0, and per-patch primitives B_i with
// dB_i = H on U_i:  xi_n = (1,0,...,0, Delta B + rho) over cover 2 and
// xi_{n+1} = (1,0,...,0, -delta B) over cover 1.
DeligneCochain make_lemma2_cocycle(const SimplicialGroupModel& model,
                                   const DiscreteForm& H, const DiscreteForm& rho,
                                   const std::vector<DiscreteForm>& B);

// ---------------------------------------------------------------------------
// the real/integer total complex and the multiplicative class
// ---------------------------------------------------------------------------

// A cochain of the plain total complex Tot(covers, R): one rational Cech layer
// per level, differential (-1)^q delta + Delta, compared exactly (no integer
// quotient).
struct TotalCochain {
  int degree = 0;  // q + p
  std::map<std::pair<int, int>, CechCochain> parts;  // key (q, p)
};

TotalCochain total_add(const TotalCochain& a, const TotalCochain& b);
TotalCochain total_negate(const TotalCochain& a);
TotalCochain total_D(const SimplicialGroupModel& model, const TotalCochain& t);
bool total_is_zero(const TotalCochain& t);
// Integer-valued and locally constant on every tuple intersection.
bool total_is_integer(const SimplicialGroupModel& model, const TotalCochain& t);

struct MultiplicativeClass {
  TotalCochain kappa;
  bool is_integer = false;
  bool is_closed = false;
};

// The multiplicative class of a degree-(n+1) cocycle: apply the total
// differential to the canonical rational lifts of the U(1) layers (including
// the bi-form contribution when n = 0).  The result is integer-valued and
// closed precisely because the input satisfies the U(1) cocycle conditions.
// Throws on non-cocycle input.
MultiplicativeClass mc_class(const SimplicialGroupModel& model,
                             const DeligneCochain& c);

// ---------------------------------------------------------------------------
// curvature projection
// ---------------------------------------------------------------------------

struct OmegaProjection {
  DiscreteForm H;    // d of the top form layer, assembled globally on K_1
  DiscreteForm rho;  // the bi-form
  bool overlaps_consistent = true;  // patch values of dH agreed on overlaps
  bool dH_zero = true;              // d H = 0
  bool delta_H_matches_d_rho = true;  // Delta H = d rho
  bool rho_delta_closed = true;       // Delta rho = 0
  std::vector<std::string> issues;
};

OmegaProjection omega_projection(const SimplicialGroupModel& model,
                                 const DeligneCochain& c);

// ---------------------------------------------------------------------------
// projective homomorphisms (smooth side)
// ---------------------------------------------------------------------------

struct ProjectiveHomResult {
  bool ok = false;
  double hom_defect = 0.0;     // worst |g(x)g(y) - g(xy) e^{2 pi i rho(x,y)}|
  double cocycle_defect = 0.0; // worst |Delta rho| at sampled triples
};

// Checks g(x) g(y) = g(xy) e^{2 pi i rho(x,y)} at random sample pairs of the
// given matrix group.  rho must be a group 2-cocycle at the sampled triples
// (checked first; throws if violated).
ProjectiveHomResult verify_projective_hom(
    const std::function<std::complex<double>(const GroupElement&)>& g,
    const std::function<double(const GroupElement&, const GroupElement&)>& rho,
    GroupTag tag, int ambient, int samples, unsigned seed, double tol = 1e-10);

// ---------------------------------------------------------------------------
// cochain files
// ---------------------------------------------------------------------------

// Structured text: degree/truncation header, one block per component with
// (q,p,k), patch tuples and exact rational cell values, and the bi-form.
// Round-trips are bit-exact.
void write_cochain(std::ostream& os, const DeligneCochain& c);
DeligneCochain read_cochain(std::istream& is);

}  // namespace gerbecalc
