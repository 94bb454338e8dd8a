#pragma once

// Index-notation maps G^q -> G^p.  Each output slot is a product of input
// factors, optionally inverted, e.g. the map (g1,...,g7) -> (g1g2, g3, g4g6, g7)
// has blocks {{1,2},{3},{4,6},{7}} (1-based in that notation; 0-based here),
// and (g,h) -> g h^{-1} has blocks {{(0,+),(1,inv)}}.
//
// These generate all simplicial face maps, projections and the multiplication
// maps used by the transition and brane identities.  Composition is exact
// symbolic block substitution, which is what makes iterated simplicial
// differentials cancel algebraically.

#include <utility>
#include <vector>

#include "gerbecalc/group.hpp"

namespace gerbecalc {

struct IndexMap {
    int arity_in = 0;
    int arity_out = 0;
    // blocks[s]: the product for output slot s as (input slot, inverted?) factors.
    std::vector<std::vector<std::pair<int, bool>>> blocks;

    bool operator==(const IndexMap& o) const {
        return arity_in == o.arity_in && blocks == o.blocks;
    }
};

IndexMap identity_map(int arity);

// Keep only the given input slots, in order.
IndexMap projection_map(int arity_in, const std::vector<int>& slots);

// Simplicial face map from G^q to G^{q-1} (q >= 1, 0 <= k <= q):
//   k = 0     drop the first factor,
//   0 < k < q multiply factors k and k+1 (1-based),
//   k = q     drop the last factor.
IndexMap face_map(int q, int k);

// second(first(x)): substitute `first`'s blocks into `second`'s factors.
IndexMap compose_maps(const IndexMap& first, const IndexMap& second);

std::vector<GroupElement> apply_point(const IndexMap& f,
                                      const std::vector<GroupElement>& pt);

// Pushforward of one tangent tuple (one ambient matrix per input slot).
std::vector<Mat> apply_tangent(const IndexMap& f,
                               const std::vector<GroupElement>& pt,
                               const std::vector<Mat>& v);

}  // namespace gerbecalc
