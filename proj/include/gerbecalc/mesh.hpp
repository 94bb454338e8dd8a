#pragma once

// Oriented simplicial meshes (dimensions 1-3), group-valued simplicial maps
// with first-vertex exponential interpolation, and the constructions needed
// for surface holonomy: sphere/disc/torus builders, red refinement, boundary
// chains, the cone extension of a sphere map into a 3-ball, and gluing two
// discs into a sphere.
//
// Cells store an ordered vertex tuple plus an orientation sign; the signed
// chain of a mesh and all boundary arithmetic are exact integer computations
// on canonically sorted tuples.

#include <array>
#include <iosfwd>
#include <map>
#include <functional>

#include "gerbecalc/group.hpp"

namespace gerbecalc {

struct SimplicialMesh {
    int dim = 0;           // simplex dimension: 1, 2 or 3
    int vertex_count = 0;
    // Optional embedding used for construction and refinement; may be empty
    // for meshes loaded from files (integration never needs it).
    std::vector<Eigen::VectorXd> coords;
    struct Cell {
        std::array<int, 4> v{-1, -1, -1, -1};  // v[0..dim] used
        int sign = 1;
    };
    std::vector<Cell> cells;
};

// ---------------------------------------------------------------------------
// Chains and boundaries
// ---------------------------------------------------------------------------

// Key: vertex tuple sorted ascending, padded with -1.
using ChainKey = std::array<int, 4>;
using Chain = std::map<ChainKey, long long>;

// The mesh's own cells as a signed chain (sorting parity folded into the
// coefficient).
Chain cell_chain(const SimplicialMesh& mesh);

// Alternating-sum boundary of the cell chain.
Chain boundary_chain(const SimplicialMesh& mesh);

bool is_closed(const SimplicialMesh& mesh);

// Extract the boundary as a (dim-1)-mesh with the induced orientation.
// Fails if some face has net multiplicity outside {-1, 0, +1} (inconsistent
// interior orientations).
SimplicialMesh boundary_mesh(const SimplicialMesh& mesh);

// Ordered vertex ids around the single boundary loop of a 2-mesh with disc
// topology, following the induced orientation.
std::vector<int> boundary_loop(const SimplicialMesh& mesh);

SimplicialMesh flip_orientation(const SimplicialMesh& mesh);

// ---------------------------------------------------------------------------
// Builders and refinement
// ---------------------------------------------------------------------------

// One red-refinement sweep: edges are bisected; each segment splits in 2,
// each triangle in 4, each tetrahedron in 8 (Bey's scheme). Children inherit
// the parent's orientation.
SimplicialMesh refine_red(const SimplicialMesh& mesh);

// Rescale every embedded vertex to the unit sphere.
void normalize_coords(SimplicialMesh& mesh);

// Boundary of the 16-cell: 16 tetrahedra on the 8 vertices ±e_i in R⁴,
// red-refined `level` times with vertices projected to the unit sphere.
// level 3 gives 8192 cells.
SimplicialMesh sphere3_mesh(int level);

// Icosphere: icosahedron red-refined `level` times, vertices on the unit
// sphere in R³. level 3 gives 1280 cells.
SimplicialMesh sphere2_mesh(int level);

// Round disc in R²: hexagonal fan about the origin, red-refined `level`
// times, then warped so concentric hexagons become circles; boundary
// vertices sit exactly on the unit circle.
SimplicialMesh disc_mesh(int level);

// Kuhn (6-tetrahedra-per-cube) triangulation of the unit cube subdivided
// n × n × n. `periodic` identifies opposite faces (vertex ids mod n), giving
// a closed 3-torus mesh; otherwise the mesh has the cube boundary.
SimplicialMesh cube3_mesh(int n, bool periodic);

// ---------------------------------------------------------------------------
// Group-valued simplicial maps
// ---------------------------------------------------------------------------

struct GroupMesh {
    SimplicialMesh mesh;
    GroupTag tag = GroupTag::SU2;
    int ambient = 2;
    int arity = 1;
    // values[vertex][slot], slot < arity.
    std::vector<std::vector<GroupElement>> values;
};

// Build a map by sampling `fn` at every embedded vertex.
GroupMesh make_group_mesh(
    const SimplicialMesh& mesh, GroupTag tag, int ambient, int arity,
    const std::function<std::vector<GroupElement>(int, const Eigen::VectorXd&)>&
        fn);

// Pointwise product map (same underlying mesh, arities 1).
GroupMesh pointwise_product(const GroupMesh& a, const GroupMesh& b);

// Pair two maps over the same mesh into one of arity a.arity + b.arity.
GroupMesh pair_maps(const GroupMesh& a, const GroupMesh& b);

// First-vertex exponential interpolation inside one cell:
// g(λ) = g₀ exp(Σ_{i≥1} λ_i log(g₀⁻¹ g_i)), componentwise over the tuple.
std::vector<GroupElement> interpolate(const GroupMesh& gm, int cell,
                                      const Eigen::VectorXd& lambda);

// Restrict a map to the boundary of its mesh (vertices re-indexed).
GroupMesh boundary_restriction(const GroupMesh& gm);

// ---------------------------------------------------------------------------
// Cone extension and gluing
// ---------------------------------------------------------------------------

// Extend a closed oriented 2-sphere map into SU(2) over a 3-ball: pick a
// point q* far from the image by rejection sampling, put the apex at -q*,
// and contract the sphere to the apex along geodesics (slerp), in `layers`
// concentric shells. Prisms between shells split into three tetrahedra
// conforming across shared faces; the boundary of the result equals the
// input chain exactly (the last `sphere vertex count` vertices are the
// boundary, in input order). layers <= 0 picks a value matching the surface
// resolution.
GroupMesh cone_extension(const GroupMesh& sphere, int layers, unsigned seed);

// Glue two discs with identical mesh topology along their boundary (second
// disc orientation-reversed) into a closed 2-sphere map. Boundary values
// must agree within `tol`.
GroupMesh glue_sphere(const GroupMesh& d1, const GroupMesh& d2,
                      double tol = 1e-9);

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

// Text format, version-tagged. Header: dim, group tag, ambient, arity,
// vertex and cell counts. Vertex table: group values per vertex (quaternion
// components for SU(2), complex matrix entries row-major otherwise), printed
// with enough digits for bit-exact round trips. Cell table: vertex ids and
// orientation sign.
void write_group_mesh(std::ostream& os, const GroupMesh& gm);
GroupMesh read_group_mesh(std::istream& is);

}  // namespace gerbecalc
