#include "gerbecalc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace gerbecalc {

namespace {

// ---------------------------------------------------------------------------
// Chain arithmetic helpers
// ---------------------------------------------------------------------------

// Canonically sort a vertex tuple; returns the permutation parity (+1/-1).
int sort_with_parity(std::array<int, 4>& v, int n) {
    int parity = 1;
    for (int i = 1; i < n; ++i)
        for (int j = i; j > 0 && v[j - 1] > v[j]; --j) {
            std::swap(v[j - 1], v[j]);
            parity = -parity;
        }
    return parity;
}

void chain_add(Chain& chain, std::array<int, 4> key, int n, long long coef) {
    for (int i = 0; i + 1 < n; ++i)
        if (key[i] == key[i + 1]) return;  // degenerate tuple contributes 0
    coef *= sort_with_parity(key, n);
    for (int i = n; i < 4; ++i) key[i] = -1;
    long long& c = chain[key];
    c += coef;
    if (c == 0) chain.erase(key);
}

}  // namespace

Chain cell_chain(const SimplicialMesh& mesh) {
    Chain out;
    for (const auto& c : mesh.cells)
        chain_add(out, c.v, mesh.dim + 1, c.sign);
    return out;
}

Chain boundary_chain(const SimplicialMesh& mesh) {
    Chain out;
    for (const auto& c : mesh.cells) {
        for (int k = 0; k <= mesh.dim; ++k) {
            std::array<int, 4> face{-1, -1, -1, -1};
            int p = 0;
            for (int i = 0; i <= mesh.dim; ++i)
                if (i != k) face[p++] = c.v[i];
            chain_add(out, face, mesh.dim, c.sign * ((k % 2 == 0) ? 1 : -1));
        }
    }
    return out;
}

bool is_closed(const SimplicialMesh& mesh) {
    return boundary_chain(mesh).empty();
}

SimplicialMesh boundary_mesh(const SimplicialMesh& mesh) {
    GC_CHECK(mesh.dim >= 1, "boundary_mesh: dimension must be >= 1");
    Chain b = boundary_chain(mesh);
    SimplicialMesh out;
    out.dim = mesh.dim - 1;
    out.vertex_count = mesh.vertex_count;
    out.coords = mesh.coords;
    for (const auto& [key, coef] : b) {
        GC_CHECK(coef == 1 || coef == -1,
                 "boundary_mesh: face with net multiplicity ", coef,
                 "; interior orientations are inconsistent");
        SimplicialMesh::Cell c;
        c.v = key;
        c.sign = static_cast<int>(coef);
        out.cells.push_back(c);
    }
    return out;
}

std::vector<int> boundary_loop(const SimplicialMesh& mesh) {
    GC_CHECK(mesh.dim == 2, "boundary_loop: expected a 2-mesh");
    SimplicialMesh bm = boundary_mesh(mesh);
    GC_CHECK(!bm.cells.empty(), "boundary_loop: mesh is closed");
    std::map<int, int> next;
    for (const auto& c : bm.cells) {
        const int from = (c.sign > 0) ? c.v[0] : c.v[1];
        const int to = (c.sign > 0) ? c.v[1] : c.v[0];
        GC_CHECK(next.emplace(from, to).second,
                 "boundary_loop: branching boundary (not a single loop)");
    }
    std::vector<int> loop;
    int start = next.begin()->first;
    int at = start;
    do {
        loop.push_back(at);
        auto it = next.find(at);
        GC_CHECK(it != next.end(), "boundary_loop: open boundary chain");
        at = it->second;
    } while (at != start && loop.size() <= next.size());
    GC_CHECK(at == start && loop.size() == next.size(),
             "boundary_loop: boundary is not a single cycle");
    return loop;
}

SimplicialMesh flip_orientation(const SimplicialMesh& mesh) {
    SimplicialMesh out = mesh;
    for (auto& c : out.cells) c.sign = -c.sign;
    return out;
}

// ---------------------------------------------------------------------------
// Red refinement
// ---------------------------------------------------------------------------

namespace {

struct MidpointTable {
    SimplicialMesh* mesh;
    std::map<std::pair<int, int>, int> table;
    int get(int a, int b) {
        auto key = std::minmax(a, b);
        auto it = table.find(key);
        if (it != table.end()) return it->second;
        const int id = mesh->vertex_count++;
        mesh->coords.push_back(0.5 *
                               (mesh->coords[a] + mesh->coords[b]));
        table.emplace(key, id);
        return id;
    }
};

}  // namespace

SimplicialMesh refine_red(const SimplicialMesh& mesh) {
    GC_CHECK(static_cast<int>(mesh.coords.size()) == mesh.vertex_count,
             "refine_red: refinement needs embedded vertex coordinates");
    SimplicialMesh out;
    out.dim = mesh.dim;
    out.vertex_count = mesh.vertex_count;
    out.coords = mesh.coords;
    MidpointTable mid{&out, {}};
    auto push = [&](std::array<int, 4> v, int sign) {
        SimplicialMesh::Cell c;
        c.v = v;
        c.sign = sign;
        out.cells.push_back(c);
    };
    for (const auto& c : mesh.cells) {
        const int s = c.sign;
        if (mesh.dim == 1) {
            const int m = mid.get(c.v[0], c.v[1]);
            push({c.v[0], m, -1, -1}, s);
            push({m, c.v[1], -1, -1}, s);
        } else if (mesh.dim == 2) {
            const int a = c.v[0], b = c.v[1], d = c.v[2];
            const int ab = mid.get(a, b), ad = mid.get(a, d),
                      bd = mid.get(b, d);
            push({a, ab, ad, -1}, s);
            push({ab, b, bd, -1}, s);
            push({ad, bd, d, -1}, s);
            push({ab, bd, ad, -1}, s);
        } else {
            const int v0 = c.v[0], v1 = c.v[1], v2 = c.v[2], v3 = c.v[3];
            const int m01 = mid.get(v0, v1), m02 = mid.get(v0, v2),
                      m03 = mid.get(v0, v3), m12 = mid.get(v1, v2),
                      m13 = mid.get(v1, v3), m23 = mid.get(v2, v3);
            // Four corner tetrahedra plus the interior octahedron split
            // along the m02-m13 diagonal; all children carry the parent's
            // orientation.
            push({v0, m01, m02, m03}, s);
            push({m01, v1, m12, m13}, s);
            push({m02, m12, v2, m23}, s);
            push({m03, m13, m23, v3}, s);
            push({m02, m13, m03, m01}, s);
            push({m02, m13, m23, m03}, s);
            push({m02, m13, m12, m23}, s);
            push({m02, m13, m01, m12}, s);
        }
    }
    return out;
}

void normalize_coords(SimplicialMesh& mesh) {
    for (auto& x : mesh.coords) {
        const double n = x.norm();
        GC_CHECK(n > 1e-12, "normalize_coords: vertex at the origin");
        x /= n;
    }
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

SimplicialMesh sphere3_mesh(int level) {
    SimplicialMesh m;
    m.dim = 3;
    m.vertex_count = 8;
    for (int axis = 0; axis < 4; ++axis)
        for (int s = 0; s < 2; ++s) {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
            x[axis] = (s == 0) ? 1.0 : -1.0;
            m.coords.push_back(x);
        }
    for (int mask = 0; mask < 16; ++mask) {
        SimplicialMesh::Cell c;
        // Alternating signs close the chain; the overall flip orients the
        // sphere so the canonical 3-form of the unit quaternions integrates
        // positively.
        int sign = -1;
        for (int axis = 0; axis < 4; ++axis) {
            const int s = (mask >> axis) & 1;
            c.v[axis] = 2 * axis + s;
            if (s) sign = -sign;
        }
        c.sign = sign;
        m.cells.push_back(c);
    }
    for (int l = 0; l < level; ++l) {
        m = refine_red(m);
        normalize_coords(m);
    }
    return m;
}

SimplicialMesh sphere2_mesh(int level) {
    SimplicialMesh m;
    m.dim = 2;
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Eigen::Vector3d> vs;
    for (int s1 = -1; s1 <= 1; s1 += 2)
        for (int s2 = -1; s2 <= 1; s2 += 2) {
            vs.emplace_back(0.0, s1 * 1.0, s2 * phi);
            vs.emplace_back(s1 * 1.0, s2 * phi, 0.0);
            vs.emplace_back(s2 * phi, 0.0, s1 * 1.0);
        }
    m.vertex_count = static_cast<int>(vs.size());
    for (const auto& v : vs) m.coords.push_back(v);
    // Faces: triples at minimal pairwise distance (edge length 2), oriented
    // outward from the origin.
    const double edge2 = 4.0;
    for (int a = 0; a < 12; ++a)
        for (int b = a + 1; b < 12; ++b) {
            if ((vs[a] - vs[b]).squaredNorm() > edge2 + 0.1) continue;
            for (int c = b + 1; c < 12; ++c) {
                if ((vs[a] - vs[c]).squaredNorm() > edge2 + 0.1 ||
                    (vs[b] - vs[c]).squaredNorm() > edge2 + 0.1)
                    continue;
                SimplicialMesh::Cell cell;
                cell.v = {a, b, c, -1};
                Eigen::Matrix3d d;
                d.row(0) = vs[a];
                d.row(1) = vs[b];
                d.row(2) = vs[c];
                if (d.determinant() < 0) std::swap(cell.v[1], cell.v[2]);
                cell.sign = 1;
                m.cells.push_back(cell);
            }
        }
    GC_CHECK(m.cells.size() == 20, "sphere2_mesh: expected 20 faces, got ",
             m.cells.size());
    for (int l = 0; l < level; ++l) {
        m = refine_red(m);
        normalize_coords(m);
    }
    return m;
}

SimplicialMesh disc_mesh(int level) {
    SimplicialMesh m;
    m.dim = 2;
    m.vertex_count = 7;
    m.coords.push_back(Eigen::Vector2d(0.0, 0.0));
    for (int k = 0; k < 6; ++k)
        m.coords.push_back(
            Eigen::Vector2d(std::cos(k * kPi / 3.0), std::sin(k * kPi / 3.0)));
    for (int k = 0; k < 6; ++k) {
        SimplicialMesh::Cell c;
        c.v = {0, 1 + k, 1 + (k + 1) % 6, -1};
        c.sign = 1;
        m.cells.push_back(c);
    }
    for (int l = 0; l < level; ++l) m = refine_red(m);
    // Warp concentric hexagons onto circles: the radial level of a point in
    // the sector spanned by directions d_k, d_{k+1} is alpha + beta where
    // p = alpha d_k + beta d_{k+1}; rescale |p| to that level.
    for (auto& x : m.coords) {
        const double n = x.norm();
        if (n < 1e-14) continue;
        double ang = std::atan2(x[1], x[0]);
        if (ang < 0) ang += kTwoPi;
        int k = static_cast<int>(ang / (kPi / 3.0));
        if (k > 5) k = 5;
        Eigen::Matrix2d d;
        d << std::cos(k * kPi / 3.0), std::cos((k + 1) * kPi / 3.0),
            std::sin(k * kPi / 3.0), std::sin((k + 1) * kPi / 3.0);
        const Eigen::Vector2d ab = d.colPivHouseholderQr().solve(
            Eigen::Vector2d(x[0], x[1]));
        const double r = ab[0] + ab[1];
        x *= r / n;
    }
    return m;
}

SimplicialMesh cube3_mesh(int n, bool periodic) {
    GC_CHECK(n >= (periodic ? 3 : 1),
             "cube3_mesh: need n >= 3 for a periodic mesh");
    SimplicialMesh m;
    m.dim = 3;
    const int s = periodic ? n : n + 1;
    m.vertex_count = s * s * s;
    auto vid = [&](int i, int j, int k) {
        if (periodic) {
            i %= n;
            j %= n;
            k %= n;
        }
        return i + s * (j + s * k);
    };
    m.coords.resize(m.vertex_count);
    for (int k = 0; k < s; ++k)
        for (int j = 0; j < s; ++j)
            for (int i = 0; i < s; ++i)
                m.coords[vid(i, j, k)] =
                    Eigen::Vector3d(double(i) / n, double(j) / n,
                                    double(k) / n);
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    static const int psign[6] = {1, -1, -1, 1, 1, -1};
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                for (int p = 0; p < 6; ++p) {
                    int c[3] = {i, j, k};
                    SimplicialMesh::Cell cell;
                    cell.v[0] = vid(c[0], c[1], c[2]);
                    for (int step = 0; step < 3; ++step) {
                        ++c[perms[p][step]];
                        cell.v[step + 1] = vid(c[0], c[1], c[2]);
                    }
                    cell.sign = psign[p];
                    m.cells.push_back(cell);
                }
    return m;
}

// ---------------------------------------------------------------------------
// Group-valued maps
// ---------------------------------------------------------------------------

GroupMesh make_group_mesh(
    const SimplicialMesh& mesh, GroupTag tag, int ambient, int arity,
    const std::function<std::vector<GroupElement>(int, const Eigen::VectorXd&)>&
        fn) {
    GC_CHECK(static_cast<int>(mesh.coords.size()) == mesh.vertex_count,
             "make_group_mesh: mesh has no embedded coordinates");
    GroupMesh gm;
    gm.mesh = mesh;
    gm.tag = tag;
    gm.ambient = ambient;
    gm.arity = arity;
    gm.values.resize(mesh.vertex_count);
    for (int v = 0; v < mesh.vertex_count; ++v) {
        gm.values[v] = fn(v, mesh.coords[v]);
        GC_CHECK(static_cast<int>(gm.values[v].size()) == arity,
                 "make_group_mesh: value tuple arity mismatch at vertex ", v);
    }
    return gm;
}

namespace {

void check_same_topology(const GroupMesh& a, const GroupMesh& b,
                         const char* who) {
    GC_CHECK(a.mesh.dim == b.mesh.dim &&
                 a.mesh.vertex_count == b.mesh.vertex_count &&
                 a.mesh.cells.size() == b.mesh.cells.size() &&
                 a.tag == b.tag && a.ambient == b.ambient,
             who, ": maps live on different meshes");
    for (size_t i = 0; i < a.mesh.cells.size(); ++i)
        GC_CHECK(a.mesh.cells[i].v == b.mesh.cells[i].v &&
                     a.mesh.cells[i].sign == b.mesh.cells[i].sign,
                 who, ": cell tables differ at cell ", i);
}

}  // namespace

GroupMesh pointwise_product(const GroupMesh& a, const GroupMesh& b) {
    check_same_topology(a, b, "pointwise_product");
    GC_CHECK(a.arity == 1 && b.arity == 1,
             "pointwise_product: expects arity-1 maps");
    GroupMesh out = a;
    for (int v = 0; v < a.mesh.vertex_count; ++v)
        out.values[v] = {group_mul(a.values[v][0], b.values[v][0])};
    return out;
}

GroupMesh pair_maps(const GroupMesh& a, const GroupMesh& b) {
    check_same_topology(a, b, "pair_maps");
    GroupMesh out = a;
    out.arity = a.arity + b.arity;
    for (int v = 0; v < a.mesh.vertex_count; ++v)
        out.values[v].insert(out.values[v].end(), b.values[v].begin(),
                             b.values[v].end());
    return out;
}

std::vector<GroupElement> interpolate(const GroupMesh& gm, int cell,
                                      const Eigen::VectorXd& lambda) {
    const auto& c = gm.mesh.cells[cell];
    GC_CHECK(lambda.size() == gm.mesh.dim + 1,
             "interpolate: barycentric coordinate count mismatch");
    std::vector<GroupElement> out;
    for (int slot = 0; slot < gm.arity; ++slot) {
        const GroupElement& g0 = gm.values[c.v[0]][slot];
        const GroupElement g0inv = group_inv(g0);
        Mat s = Mat::Zero(g0.ambient(), g0.ambient());
        for (int i = 1; i <= gm.mesh.dim; ++i)
            s += lambda[i] *
                 group_log(group_mul(g0inv, gm.values[c.v[i]][slot])).m;
        out.push_back(group_mul(g0, group_exp({gm.tag, s})));
    }
    return out;
}

GroupMesh boundary_restriction(const GroupMesh& gm) {
    SimplicialMesh bm = boundary_mesh(gm.mesh);
    std::set<int> used;
    for (const auto& c : bm.cells)
        for (int i = 0; i <= bm.dim; ++i) used.insert(c.v[i]);
    std::map<int, int> remap;
    GroupMesh out;
    out.tag = gm.tag;
    out.ambient = gm.ambient;
    out.arity = gm.arity;
    out.mesh.dim = bm.dim;
    for (int id : used) {
        remap[id] = out.mesh.vertex_count++;
        if (!gm.mesh.coords.empty())
            out.mesh.coords.push_back(gm.mesh.coords[id]);
        out.values.push_back(gm.values[id]);
    }
    for (auto c : bm.cells) {
        for (int i = 0; i <= bm.dim; ++i) c.v[i] = remap[c.v[i]];
        out.mesh.cells.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cone extension
// ---------------------------------------------------------------------------

namespace {

Eigen::Vector4d slerp4(const Eigen::Vector4d& a, const Eigen::Vector4d& b,
                       double t) {
    double dot = a.dot(b);
    dot = std::clamp(dot, -1.0, 1.0);
    const double ang = std::acos(dot);
    if (ang < 1e-9) {
        Eigen::Vector4d v = (1.0 - t) * a + t * b;
        return v / v.norm();
    }
    return (std::sin((1.0 - t) * ang) * a + std::sin(t * ang) * b) /
           std::sin(ang);
}

}  // namespace

GroupMesh cone_extension(const GroupMesh& sphere, int layers, unsigned seed) {
    GC_CHECK(sphere.mesh.dim == 2 && sphere.arity == 1 &&
                 sphere.tag == GroupTag::SU2,
             "cone_extension: expects an arity-1 SU(2) map over a 2-mesh");
    GC_CHECK(is_closed(sphere.mesh), "cone_extension: surface is not closed");
    const int nv = sphere.mesh.vertex_count;
    std::vector<Eigen::Vector4d> q(nv);
    for (int v = 0; v < nv; ++v)
        q[v] = su2_to_quaternion(sphere.values[v][0]);

    // Longest geodesic edge of the image (safety margin for the avoided
    // point: interpolated cell points stay within roughly one edge length of
    // the vertex values).
    double max_edge = 0.0;
    for (const auto& c : sphere.mesh.cells)
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                max_edge = std::max(
                    max_edge, (q[c.v[i]] - q[c.v[j]]).norm());

    // Rejection-sample a point q* far from every image vertex; the apex of
    // the cone is -q*.
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Vector4d qstar = Eigen::Vector4d::Zero();
    double best = -1.0;
    for (int trial = 0; trial < 256; ++trial) {
        Eigen::Vector4d cand;
        for (int i = 0; i < 4; ++i) cand[i] = normal(rng);
        if (cand.norm() < 1e-6) continue;
        cand.normalize();
        double dist = 2.0;
        for (int v = 0; v < nv; ++v)
            dist = std::min(dist, (cand - q[v]).norm());
        if (dist > best) {
            best = dist;
            qstar = cand;
        }
    }
    GC_CHECK(best - 0.6 * max_edge > 0.15,
             "cone_extension: could not find a point at a safe distance from "
             "the image; refine the surface mesh or change the seed");
    const Eigen::Vector4d apex = -qstar;

    if (layers <= 0)
        layers = std::max(
            4, static_cast<int>(std::lround(
                   std::sqrt(double(sphere.mesh.cells.size())) / 1.5)));

    GroupMesh out;
    out.tag = GroupTag::SU2;
    out.ambient = 2;
    out.arity = 1;
    out.mesh.dim = 3;
    out.mesh.vertex_count = 1 + layers * nv;
    auto vid = [&](int layer, int v) { return 1 + (layer - 1) * nv + v; };
    out.mesh.coords.resize(out.mesh.vertex_count);
    out.values.resize(out.mesh.vertex_count);
    out.mesh.coords[0] = apex;
    out.values[0] = {su2_from_quaternion(apex)};
    for (int s = 1; s <= layers; ++s)
        for (int v = 0; v < nv; ++v) {
            const Eigen::Vector4d p =
                (s == layers) ? q[v]
                              : slerp4(apex, q[v], double(s) / layers);
            out.mesh.coords[vid(s, v)] = p;
            out.values[vid(s, v)] = {(s == layers)
                                         ? sphere.values[v][0]
                                         : su2_from_quaternion(p)};
        }

    for (const auto& c : sphere.mesh.cells) {
        std::array<int, 4> t = c.v;
        const int par = sort_with_parity(t, 3);
        const int a = t[0], b = t[1], d = t[2];
        const int sg = c.sign * par;
        auto push = [&](int w0, int w1, int w2, int w3) {
            SimplicialMesh::Cell cell;
            cell.v = {w0, w1, w2, w3};
            cell.sign = sg;
            out.mesh.cells.push_back(cell);
        };
        push(0, vid(1, a), vid(1, b), vid(1, d));
        for (int s = 1; s < layers; ++s) {
            // Prism split conforming across shared quads: each vertical quad
            // over the edge (u < v) is cut by the diagonal from the bottom
            // copy of v to the top copy of u.
            push(vid(s, a), vid(s, b), vid(s, d), vid(s + 1, a));
            push(vid(s, b), vid(s, d), vid(s + 1, a), vid(s + 1, b));
            push(vid(s, d), vid(s + 1, a), vid(s + 1, b), vid(s + 1, d));
        }
    }
    return out;
}

GroupMesh glue_sphere(const GroupMesh& d1, const GroupMesh& d2, double tol) {
    check_same_topology(d1, d2, "glue_sphere");
    GC_CHECK(d1.mesh.dim == 2 && d1.arity == 1 && d2.arity == 1,
             "glue_sphere: expects arity-1 maps over 2-meshes");
    const std::vector<int> loop = boundary_loop(d1.mesh);
    std::set<int> bset(loop.begin(), loop.end());
    for (int v : bset)
        GC_CHECK((d1.values[v][0].m - d2.values[v][0].m).norm() <= tol,
                 "glue_sphere: boundary values disagree at vertex ", v,
                 " beyond tolerance ", tol);

    GroupMesh out;
    out.tag = d1.tag;
    out.ambient = d1.ambient;
    out.arity = 1;
    out.mesh.dim = 2;
    out.mesh.vertex_count = d1.mesh.vertex_count;
    out.values = d1.values;
    // The glued sphere has no natural flat embedding; leave coords empty.
    std::map<int, int> remap2;
    for (int v = 0; v < d2.mesh.vertex_count; ++v) {
        if (bset.count(v)) {
            remap2[v] = v;
        } else {
            remap2[v] = out.mesh.vertex_count++;
            out.values.push_back(d2.values[v]);
        }
    }
    out.mesh.cells = d1.mesh.cells;
    for (auto c : d2.mesh.cells) {
        for (int i = 0; i < 3; ++i) c.v[i] = remap2[c.v[i]];
        c.sign = -c.sign;
        out.mesh.cells.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

namespace {

void put_double(std::ostream& os, double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
}

}  // namespace

void write_group_mesh(std::ostream& os, const GroupMesh& gm) {
    os << "gerbemesh 1\n";
    os << "dim " << gm.mesh.dim << "\n";
    os << "group " << group_tag_name(gm.tag) << " " << gm.ambient << "\n";
    os << "arity " << gm.arity << "\n";
    os << "counts " << gm.mesh.vertex_count << " " << gm.mesh.cells.size()
       << "\n";
    for (int v = 0; v < gm.mesh.vertex_count; ++v) {
        os << "v";
        for (int slot = 0; slot < gm.arity; ++slot) {
            const GroupElement& g = gm.values[v][slot];
            if (gm.tag == GroupTag::SU2) {
                const Eigen::Vector4d q = su2_to_quaternion(g);
                for (int i = 0; i < 4; ++i) {
                    os << " ";
                    put_double(os, q[i]);
                }
            } else {
                for (int r = 0; r < gm.ambient; ++r)
                    for (int c = 0; c < gm.ambient; ++c) {
                        os << " ";
                        put_double(os, std::real(g.m(r, c)));
                        os << " ";
                        put_double(os, std::imag(g.m(r, c)));
                    }
            }
        }
        os << "\n";
    }
    for (const auto& c : gm.mesh.cells) {
        os << "c";
        for (int i = 0; i <= gm.mesh.dim; ++i) os << " " << c.v[i];
        os << " " << c.sign << "\n";
    }
}

GroupMesh read_group_mesh(std::istream& is) {
    std::string word;
    int version = 0;
    is >> word >> version;
    GC_CHECK(is && word == "gerbemesh" && version == 1,
             "read_group_mesh: not a gerbemesh file (or unknown version)");
    GroupMesh gm;
    int cell_count = 0;
    is >> word;
    GC_CHECK(word == "dim", "read_group_mesh: expected 'dim'");
    is >> gm.mesh.dim;
    is >> word;
    GC_CHECK(word == "group", "read_group_mesh: expected 'group'");
    is >> word >> gm.ambient;
    gm.tag = group_tag_from_name(word);
    is >> word;
    GC_CHECK(word == "arity", "read_group_mesh: expected 'arity'");
    is >> gm.arity;
    is >> word;
    GC_CHECK(word == "counts", "read_group_mesh: expected 'counts'");
    is >> gm.mesh.vertex_count >> cell_count;
    GC_CHECK(is && gm.mesh.dim >= 1 && gm.mesh.dim <= 3 && gm.arity >= 1 &&
                 gm.mesh.vertex_count >= 0,
             "read_group_mesh: malformed header");
    gm.values.resize(gm.mesh.vertex_count);
    for (int v = 0; v < gm.mesh.vertex_count; ++v) {
        is >> word;
        GC_CHECK(is && word == "v", "read_group_mesh: expected vertex row ",
                 v);
        for (int slot = 0; slot < gm.arity; ++slot) {
            if (gm.tag == GroupTag::SU2) {
                Eigen::Vector4d q;
                for (int i = 0; i < 4; ++i) is >> q[i];
                gm.values[v].push_back(su2_from_quaternion(q));
            } else {
                Mat m(gm.ambient, gm.ambient);
                for (int r = 0; r < gm.ambient; ++r)
                    for (int c = 0; c < gm.ambient; ++c) {
                        double re = 0, im = 0;
                        is >> re >> im;
                        m(r, c) = std::complex<double>(re, im);
                    }
                gm.values[v].push_back(GroupElement{gm.tag, m});
            }
        }
        GC_CHECK(is, "read_group_mesh: truncated vertex table at row ", v);
        if (gm.tag == GroupTag::SU2)
            gm.mesh.coords.push_back(su2_to_quaternion(gm.values[v][0]));
    }
    for (int i = 0; i < cell_count; ++i) {
        is >> word;
        GC_CHECK(is && word == "c", "read_group_mesh: expected cell row ", i);
        SimplicialMesh::Cell c;
        for (int k = 0; k <= gm.mesh.dim; ++k) is >> c.v[k];
        is >> c.sign;
        GC_CHECK(is, "read_group_mesh: truncated cell table at row ", i);
        gm.mesh.cells.push_back(c);
    }
    return gm;
}

}  // namespace gerbecalc
