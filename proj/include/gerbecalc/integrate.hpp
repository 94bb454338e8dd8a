#pragma once

// Quadrature of pulled-back forms over group-valued simplicial maps, and the
// normalization of the invariant pairing against the generator integral
// ∫_{S³} η = 1.

#include "gerbecalc/forms.hpp"
#include "gerbecalc/mesh.hpp"

namespace gerbecalc {

// Nodes are barycentric (dim+1 entries each); weights sum to the reference
// simplex volume 1/dim!.
struct QuadratureRule {
    int dim = 0;
    int order = 0;  // polynomial degree integrated exactly
    std::vector<Eigen::VectorXd> nodes;
    std::vector<double> weights;
};

QuadratureRule segment_rule_gauss3();  // degree 5
QuadratureRule triangle_rule_deg4();   // 6-point, degree 4
QuadratureRule tet_rule_deg3();        // 5-point, degree 3
QuadratureRule tet_rule_deg5();        // 15-point Grundmann-Moller
QuadratureRule tet_rule_deg7();        // 35-point Grundmann-Moller
QuadratureRule default_rule(int dim);

// ∫ over the mesh of the pullback of f (degree = mesh dim, arity = map
// arity) along the interpolated map. Tangent frames come from central finite
// differences in barycentric coordinates (step 1e-5). Cells are processed
// independently (GERBECALC_THREADS workers) and reduced by a fixed pairwise
// tree, so results are bitwise reproducible at any thread count.
double integrate_pullback(const FormPtr& f, const GroupMesh& map,
                          const QuadratureRule& rule);
double integrate_pullback(const FormPtr& f, const GroupMesh& map);

// Normalize the pairing so that the canonical 3-form integrates to 1 over
// the unit-quaternion sphere at level 1 (mesh refined `level` times). The
// constant is cached after the first call.
double calibrate_pairing(int level = 3);

// Level-k pairing carrying the calibrated constant (calibrates on first use).
InvariantPairing calibrated_pairing(int level_k);

}  // namespace gerbecalc
