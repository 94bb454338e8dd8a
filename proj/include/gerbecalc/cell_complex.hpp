#pragma once
// cell_complex.hpp -- finite cell complexes with integer chain maps, covers by
// acyclic subcomplexes, and level-graded models of the simplicial manifold
// G^bullet = { G^q } built from a finite group.
//
// A model carries, for each level q = 1..Q, a cell complex K_q standing in for
// G^q, a cover of K_q by contractible patches, and for q >= 2 the face chain
// maps
//
//     (Delta_i)_# : chains(K_q) -> chains(K_{q-1}),   i = 0..q,
//
// realizing the simplicial structure maps: Delta_0 drops the first group slot,
// Delta_q drops the last, and Delta_i (0 < i < q) multiplies slots i and i+1.
// Covers come with index maps Delta_i on patch labels compatible with the
// chain maps, so that Cech cochains can be pushed along the simplicial
// direction.  Everything is integer data; validation is exact.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gerbecalc {

// ---------------------------------------------------------------------------
// complexes and chain maps
// ---------------------------------------------------------------------------

// A finite cell complex stored by dimension.  Cell (d, i) is the i-th cell of
// dimension d; boundary[d][i] lists (index of a (d-1)-cell, incidence sign).
// All incidences here are +-1 (regular complexes); the validator enforces
// boundary(boundary) = 0.
struct CellComplex {
  std::vector<std::vector<std::vector<std::pair<int, int>>>> boundary;

  // cofaces[d][i]: the (d+1)-cells having cell (d,i) on their boundary, with
  // the matching incidence sign.  Built by finalize().
  std::vector<std::vector<std::vector<std::pair<int, int>>>> cofaces;

  int dim() const { return static_cast<int>(boundary.size()) - 1; }
  int cell_count(int d) const {
    return (d >= 0 && d < static_cast<int>(boundary.size()))
               ? static_cast<int>(boundary[d].size())
               : 0;
  }
  void finalize();  // build coface lists
};

// An integer chain map f : chains(source) -> chains(target), degree 0.
// entries[d][i] lists (target cell index in dimension d, coefficient); cells
// not listed map to 0.  Dimension-0 entries must be single vertices with
// coefficient 1 so that functions pull back along the map.
struct ChainMap {
  std::vector<std::vector<std::vector<std::pair<int, long>>>> entries;

  // transpose[d][j]: the source d-cells whose image contains target cell j,
  // with coefficients.  Built by SimplicialGroupModel::finalize().
  std::vector<std::vector<std::vector<std::pair<int, long>>>> transpose;
};

// Applies a chain map to a single cell, returning the image chain.
const std::vector<std::pair<int, long>>& chain_image(const ChainMap& f, int d,
                                                     int cell);

// ---------------------------------------------------------------------------
// covers
// ---------------------------------------------------------------------------

// A subcomplex given by sorted cell-id lists per dimension; must be closed
// under boundary.
struct Patch {
  std::vector<std::vector<int>> cells;

  bool contains(int d, int cell) const;
};

struct Cover {
  std::vector<Patch> patches;
};

// Connected components of a subcomplex, keyed by its vertices.
struct Components {
  std::vector<int> vertices;    // sorted vertex ids of the subcomplex
  std::vector<int> component;   // component id per vertex (parallel)
  std::vector<int> base;        // least vertex id per component
  int count = 0;

  int component_of(int vertex) const;  // -1 if absent
};

Components subcomplex_components(const CellComplex& cx,
                                 const std::vector<std::vector<int>>& cells);

// Exact acyclicity test (H_0 = Z, H_{>0} = 0) for a subcomplex: free-face
// collapsing first, exact rational rank of the residual boundary matrices if
// the collapse stalls.
bool subcomplex_acyclic(const CellComplex& cx,
                        const std::vector<std::vector<int>>& cells);

// Sorted-vector intersection helper used for patch overlaps.
std::vector<int> intersect_sorted(const std::vector<int>& a,
                                  const std::vector<int>& b);

// ---------------------------------------------------------------------------
// simplicial group models
// ---------------------------------------------------------------------------

struct SimplicialGroupModel {
  std::string name;

  // complexes[q-1] models G^q, q = 1..levels().
  std::vector<CellComplex> complexes;
  std::vector<Cover> covers;

  // face_maps[q-2][i], i = 0..q: chain map K_q -> K_{q-1}.
  std::vector<std::vector<ChainMap>> face_maps;
  // index_face[q-2][i]: patch label map compatible with face_maps, i.e.
  // (Delta_i)_# maps U_j^q into U_{index_face[q-2][i][j]}^{q-1}.
  std::vector<std::vector<std::vector<int>>> index_face;

  // Caches built by finalize():
  // vertex_patches[q-1][v]: sorted ids of the level-q patches containing v.
  std::vector<std::vector<std::vector<int>>> vertex_patches;
  // patch_components[q-1][i]: components of patch i of cover q.
  std::vector<std::vector<Components>> patch_components;

  int levels() const { return static_cast<int>(complexes.size()); }
  const CellComplex& complex(int q) const { return complexes[q - 1]; }
  const Cover& cover(int q) const { return covers[q - 1]; }
  const ChainMap& face(int q, int i) const { return face_maps[q - 2][i]; }
  int face_index(int q, int i, int patch) const {
    return index_face[q - 2][i][patch];
  }

  // Cells of dimension d common to the patches in `tuple` (ascending patch
  // ids, level q).
  std::vector<int> intersection(int q, const std::vector<int>& tuple,
                                int d) const;
  // Sorted ids of level-q patches whose intersection with all patches in
  // `tuple` is nonempty (shares a vertex).
  std::vector<int> patches_meeting(int q, const std::vector<int>& tuple) const;

  void finalize();  // build all caches and complex cofaces
};

// Validation: every structural invariant checked exactly.
//   - boundary of boundary = 0 in every complex;
//   - patches closed under boundary, connected, acyclic; covers cover;
//   - chain maps commute with the boundary; dimension-0 entries are unit
//     vertex assignments; images of patch cells land in the mapped patch;
//   - simplicial identities d_i d_j = d_j d_{i+1} (i >= j) hold for both the
//     chain maps and the index maps.
struct ValidationReport {
  bool valid = true;
  std::vector<std::string> issues;
};

ValidationReport validate_model(const SimplicialGroupModel& model);

// ---------------------------------------------------------------------------
// built-in models
// ---------------------------------------------------------------------------

// The N-gon model of the circle group Z_N.  K_q is the q-fold product of the
// N-gon (a torus complex); the level-q cover consists of the N^q products of
// arcs A_c^(q) = [c, c + len_q - 1], one arc per start c in Z_N.  The arc
// lengths halve down the levels, len_{q-1} = 2 len_q - 1, so that arc sumsets
// match cover arcs exactly: A_a^(q) + A_b^(q) = A_{a+b}^(q-1).  With the
// default N = 12 this supports levels (9,5,3,2), the maximal 4-level stair.
SimplicialGroupModel circle_group_model(int n = 12, int levels = 4);

// A one-point model of the trivial group: every K_q is a single vertex and
// every cover has one patch.  Cech degree collapses to 0.
SimplicialGroupModel point_group_model(int levels = 4);

// Vertex id of the point with the given Z_n coordinates (one per torus
// factor) in the level-q complex of circle_group_model(n, ...); the level is
// coords.size().  Lets callers address cells geometrically.
int torus_vertex_id(int n, const std::vector<int>& coords);

// A single-level circle cover with prescribed arc starts and length; no face
// maps.  Used for hand-checked Cech/Deligne expansions on small covers.
SimplicialGroupModel arc_cover_circle(int n, const std::vector<int>& starts,
                                      int length);

// ---------------------------------------------------------------------------
// model files
// ---------------------------------------------------------------------------

// Structured text format: complexes (cells by dimension with boundary
// incidences and signs), covers (cell-id lists per patch), chain maps (sparse
// integer rows per dimension), and index maps.  Integer data only, so
// round-trips are bit-exact.
void write_model(std::ostream& os, const SimplicialGroupModel& model);
SimplicialGroupModel read_model(std::istream& is);

}  // namespace gerbecalc
