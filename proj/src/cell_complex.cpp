// cell_complex.cpp -- exact structural machinery for the level-graded group
// models: boundary bookkeeping, connected components, collapse-based
// acyclicity with a rational-rank fallback, model validation, and the model
// file format.

#include "gerbecalc/cell_complex.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gerbecalc/common.hpp"

namespace gerbecalc {

namespace {

const std::vector<std::pair<int, long>> kEmptyChain;

// Disjoint-set forest on vertex ids.
struct UnionFind {
  std::map<int, int> parent;
  int find(int v) {
    auto it = parent.find(v);
    if (it == parent.end()) {
      parent[v] = v;
      return v;
    }
    int r = v;
    while (parent[r] != r) r = parent[r];
    while (parent[v] != r) {
      int next = parent[v];
      parent[v] = r;
      v = next;
    }
    return r;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

// ---------------------------------------------------------------------------
// CellComplex
// ---------------------------------------------------------------------------

void CellComplex::finalize() {
  cofaces.assign(boundary.size(), {});
  for (int d = 0; d <= dim(); ++d) cofaces[d].resize(cell_count(d));
  for (int d = 1; d <= dim(); ++d)
    for (int i = 0; i < cell_count(d); ++i)
      for (const auto& [j, s] : boundary[d][i]) cofaces[d - 1][j].push_back({i, s});
}

const std::vector<std::pair<int, long>>& chain_image(const ChainMap& f, int d,
                                                     int cell) {
  if (d >= static_cast<int>(f.entries.size())) return kEmptyChain;
  if (cell >= static_cast<int>(f.entries[d].size())) return kEmptyChain;
  return f.entries[d][cell];
}

bool Patch::contains(int d, int cell) const {
  if (d < 0 || d >= static_cast<int>(cells.size())) return false;
  return std::binary_search(cells[d].begin(), cells[d].end(), cell);
}

std::vector<int> intersect_sorted(const std::vector<int>& a,
                                  const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

// ---------------------------------------------------------------------------
// components and acyclicity
// ---------------------------------------------------------------------------

int Components::component_of(int vertex) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), vertex);
  if (it == vertices.end() || *it != vertex) return -1;
  return component[it - vertices.begin()];
}

Components subcomplex_components(const CellComplex& cx,
                                 const std::vector<std::vector<int>>& cells) {
  Components out;
  if (cells.empty()) return out;
  out.vertices = cells[0];
  UnionFind uf;
  for (int v : out.vertices) uf.find(v);
  if (cells.size() > 1)
    for (int e : cells[1]) {
      const auto& bd = cx.boundary[1][e];
      for (std::size_t a = 1; a < bd.size(); ++a)
        uf.unite(bd[0].first, bd[a].first);
    }
  std::map<int, int> label;
  out.component.resize(out.vertices.size());
  for (std::size_t i = 0; i < out.vertices.size(); ++i) {
    int root = uf.find(out.vertices[i]);
    auto it = label.find(root);
    if (it == label.end()) {
      it = label.insert({root, static_cast<int>(out.base.size())}).first;
      out.base.push_back(out.vertices[i]);  // vertices sorted => least first
    }
    out.component[i] = it->second;
  }
  out.count = static_cast<int>(out.base.size());
  return out;
}

namespace {

// Exact rank over Q of a sparse integer matrix given as columns.
int rational_rank(std::vector<std::map<int, mpq_class>> cols) {
  int rank = 0;
  std::map<int, std::map<int, mpq_class>> pivots;  // pivot row -> column
  for (auto& col : cols) {
    while (!col.empty()) {
      int row = col.begin()->first;
      auto piv = pivots.find(row);
      if (piv == pivots.end()) break;
      mpq_class factor = col.begin()->second / piv->second.begin()->second;
      for (const auto& [r, v] : piv->second) {
        auto it = col.find(r);
        mpq_class nv = (it == col.end() ? mpq_class(0) : it->second) - factor * v;
        if (nv == 0) {
          if (it != col.end()) col.erase(it);
        } else {
          col[r] = nv;
        }
      }
    }
    if (!col.empty()) {
      pivots[col.begin()->first] = col;
      ++rank;
    }
  }
  return rank;
}

}  // namespace

bool subcomplex_acyclic(const CellComplex& cx,
                        const std::vector<std::vector<int>>& cells) {
  // Local index per dimension.
  int top = static_cast<int>(cells.size()) - 1;
  while (top >= 0 && cells[top].empty()) --top;
  if (top < 0) return false;  // empty complex
  std::vector<std::map<int, int>> local(top + 1);
  std::vector<int> counts(top + 1, 0);
  for (int d = 0; d <= top; ++d)
    for (int c : cells[d]) local[d][c] = counts[d]++;

  std::vector<std::vector<char>> alive(top + 1);
  for (int d = 0; d <= top; ++d) alive[d].assign(counts[d], 1);
  long alive_total = std::accumulate(counts.begin(), counts.end(), 0L);

  // coface_count[d][i]: alive (d+1)-cofaces inside the subcomplex.
  std::vector<std::vector<int>> coface_count(top + 1);
  std::vector<std::vector<std::vector<std::pair<int, int>>>> up(top + 1);
  for (int d = 0; d <= top; ++d) {
    coface_count[d].assign(counts[d], 0);
    up[d].resize(counts[d]);
  }
  for (int d = 1; d <= top; ++d)
    for (int c : cells[d]) {
      int ic = local[d][c];
      for (const auto& [b, s] : cx.boundary[d][c]) {
        auto it = local[d - 1].find(b);
        if (it == local[d - 1].end()) continue;  // not closed; validator catches
        coface_count[d - 1][it->second]++;
        up[d - 1][it->second].push_back({ic, s});
      }
    }

  // Free-face collapsing: remove (sigma, tau) whenever sigma has exactly one
  // alive coface tau and unit incidence.  Products of arcs and their
  // intersections collapse completely; anything else falls through to the
  // exact rank computation below.
  std::deque<std::pair<int, int>> queue;
  for (int d = 0; d < top; ++d)
    for (int i = 0; i < counts[d]; ++i)
      if (coface_count[d][i] == 1) queue.push_back({d, i});
  auto boundary_alive = [&](int d, int tau_local, int skip_dim, int skip_local) {
    // Decrement coface counts of tau's boundary when tau dies.
    int cell = cells[d][tau_local];
    for (const auto& [b, s] : cx.boundary[d][cell]) {
      auto it = local[d - 1].find(b);
      if (it == local[d - 1].end()) continue;
      int ib = it->second;
      if (d - 1 == skip_dim && ib == skip_local) continue;
      if (!alive[d - 1][ib]) continue;
      if (--coface_count[d - 1][ib] == 1) queue.push_back({d - 1, ib});
    }
  };
  while (!queue.empty()) {
    auto [d, i] = queue.front();
    queue.pop_front();
    if (!alive[d][i] || coface_count[d][i] != 1) continue;
    int tau = -1, sign = 0;
    for (const auto& [t, s] : up[d][i])
      if (alive[d + 1][t]) {
        tau = t;
        sign = s;
      }
    if (tau < 0 || (sign != 1 && sign != -1)) continue;
    alive[d][i] = 0;
    alive[d + 1][tau] = 0;
    alive_total -= 2;
    boundary_alive(d + 1, tau, d, i);
  }

  long alive_vertices = 0;
  for (int i = 0; i < counts[0]; ++i) alive_vertices += alive[0][i];
  if (alive_total == 1 && alive_vertices == 1) return true;

  // Rank fallback on the residual complex (exact, rational).  The residual
  // has the same homology as the subcomplex because collapses are homotopy
  // equivalences; compute Betti numbers directly.
  std::vector<int> n(top + 1, 0), rk(top + 2, 0);
  std::vector<std::vector<int>> keep(top + 1);
  for (int d = 0; d <= top; ++d) {
    keep[d].assign(counts[d], -1);
    for (int i = 0; i < counts[d]; ++i)
      if (alive[d][i]) keep[d][i] = n[d]++;
  }
  for (int d = 1; d <= top; ++d) {
    std::vector<std::map<int, mpq_class>> colsmat;
    for (int c : cells[d]) {
      int ic = local[d][c];
      if (!alive[d][ic]) continue;
      std::map<int, mpq_class> col;
      for (const auto& [b, s] : cx.boundary[d][c]) {
        auto it = local[d - 1].find(b);
        if (it == local[d - 1].end()) continue;
        if (alive[d - 1][it->second]) col[keep[d - 1][it->second]] = s;
      }
      colsmat.push_back(std::move(col));
    }
    rk[d] = rational_rank(std::move(colsmat));
  }
  if (n[0] - rk[1] != 1) return false;
  for (int d = 1; d <= top; ++d)
    if (n[d] - rk[d] - rk[d + 1] != 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// SimplicialGroupModel
// ---------------------------------------------------------------------------

std::vector<int> SimplicialGroupModel::intersection(
    int q, const std::vector<int>& tuple, int d) const {
  const Cover& cov = cover(q);
  GC_CHECK(!tuple.empty(), "intersection of empty patch tuple");
  const Patch& first = cov.patches[tuple[0]];
  std::vector<int> out =
      (d < static_cast<int>(first.cells.size())) ? first.cells[d] : std::vector<int>{};
  for (std::size_t t = 1; t < tuple.size() && !out.empty(); ++t) {
    const Patch& p = cov.patches[tuple[t]];
    if (d >= static_cast<int>(p.cells.size())) return {};
    out = intersect_sorted(out, p.cells[d]);
  }
  return out;
}

std::vector<int> SimplicialGroupModel::patches_meeting(
    int q, const std::vector<int>& tuple) const {
  std::vector<int> verts = intersection(q, tuple, 0);
  std::vector<int> out;
  for (int v : verts) {
    const auto& ps = vertex_patches[q - 1][v];
    std::vector<int> merged;
    std::set_union(out.begin(), out.end(), ps.begin(), ps.end(),
                   std::back_inserter(merged));
    out = std::move(merged);
  }
  return out;
}

void SimplicialGroupModel::finalize() {
  for (auto& cx : complexes) cx.finalize();
  vertex_patches.assign(complexes.size(), {});
  patch_components.assign(complexes.size(), {});
  for (int q = 1; q <= levels(); ++q) {
    vertex_patches[q - 1].assign(complex(q).cell_count(0), {});
    for (std::size_t i = 0; i < cover(q).patches.size(); ++i) {
      const Patch& p = cover(q).patches[i];
      if (!p.cells.empty())
        for (int v : p.cells[0])
          vertex_patches[q - 1][v].push_back(static_cast<int>(i));
      patch_components[q - 1].push_back(subcomplex_components(complex(q), p.cells));
    }
  }
  // Transposes of the face maps, for pulling cochains backwards.
  for (int q = 2; q <= levels(); ++q)
    for (auto& f : face_maps[q - 2]) {
      const CellComplex& target = complex(q - 1);
      f.transpose.assign(f.entries.size(), {});
      for (std::size_t d = 0; d < f.entries.size(); ++d) {
        f.transpose[d].resize(target.cell_count(static_cast<int>(d)));
        for (std::size_t i = 0; i < f.entries[d].size(); ++i)
          for (const auto& [j, c] : f.entries[d][i])
            f.transpose[d][j].push_back({static_cast<int>(i), c});
      }
    }
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

namespace {

using SparseChain = std::map<int, long>;

void accumulate(SparseChain& acc, int cell, long coeff) {
  long& v = acc[cell];
  v += coeff;
  if (v == 0) acc.erase(cell);
}

SparseChain apply_map(const ChainMap& f, int d, const SparseChain& chain) {
  SparseChain out;
  for (const auto& [cell, coeff] : chain)
    for (const auto& [j, c] : chain_image(f, d, cell)) accumulate(out, j, coeff * c);
  return out;
}

SparseChain boundary_chain_of(const CellComplex& cx, int d,
                              const SparseChain& chain) {
  SparseChain out;
  for (const auto& [cell, coeff] : chain)
    for (const auto& [b, s] : cx.boundary[d][cell]) accumulate(out, b, coeff * s);
  return out;
}

}  // namespace

ValidationReport validate_model(const SimplicialGroupModel& model) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.valid = false;
    rep.issues.push_back(msg);
  };

  // Complex well-formedness and boundary(boundary) = 0.
  for (int q = 1; q <= model.levels(); ++q) {
    const CellComplex& cx = model.complex(q);
    std::ostringstream tag;
    tag << "K_" << q << ": ";
    if (cx.boundary.empty()) {
      fail(tag.str() + "empty complex");
      continue;
    }
    for (int i = 0; i < cx.cell_count(0); ++i)
      if (!cx.boundary[0][i].empty()) fail(tag.str() + "vertex with boundary");
    for (int d = 1; d <= cx.dim(); ++d)
      for (int i = 0; i < cx.cell_count(d); ++i) {
        for (const auto& [j, s] : cx.boundary[d][i]) {
          if (j < 0 || j >= cx.cell_count(d - 1))
            fail(tag.str() + "boundary index out of range");
          if (s != 1 && s != -1) fail(tag.str() + "non-unit incidence");
        }
        if (d >= 2) {
          SparseChain bb = boundary_chain_of(
              cx, d - 1, boundary_chain_of(cx, d, {{i, 1}}));
          if (!bb.empty()) {
            std::ostringstream msg;
            msg << tag.str() << "boundary^2 != 0 at cell (" << d << "," << i << ")";
            fail(msg.str());
          }
        }
      }
  }

  // Covers: closure, coverage, connectivity, acyclicity.
  for (int q = 1; q <= model.levels(); ++q) {
    const CellComplex& cx = model.complex(q);
    const Cover& cov = model.cover(q);
    std::vector<std::vector<char>> covered(cx.dim() + 1);
    for (int d = 0; d <= cx.dim(); ++d) covered[d].assign(cx.cell_count(d), 0);
    for (std::size_t i = 0; i < cov.patches.size(); ++i) {
      const Patch& p = cov.patches[i];
      std::ostringstream tag;
      tag << "cover " << q << " patch " << i << ": ";
      for (std::size_t d = 0; d < p.cells.size(); ++d) {
        if (!std::is_sorted(p.cells[d].begin(), p.cells[d].end()))
          fail(tag.str() + "cell list not sorted");
        for (int c : p.cells[d]) {
          if (c < 0 || c >= cx.cell_count(static_cast<int>(d))) {
            fail(tag.str() + "cell id out of range");
            continue;
          }
          covered[d][c] = 1;
          if (d >= 1)
            for (const auto& [b, s] : cx.boundary[d][c])
              if (!p.contains(static_cast<int>(d) - 1, b))
                fail(tag.str() + "not closed under boundary");
        }
      }
      Components comp = subcomplex_components(cx, p.cells);
      if (comp.count != 1) fail(tag.str() + "not connected");
      if (!subcomplex_acyclic(cx, p.cells)) fail(tag.str() + "not acyclic");
    }
    for (int d = 0; d <= cx.dim(); ++d)
      for (int c = 0; c < cx.cell_count(d); ++c)
        if (!covered[d][c]) {
          std::ostringstream msg;
          msg << "cover " << q << ": cell (" << d << "," << c << ") uncovered";
          fail(msg.str());
        }
  }

  // Face maps: shapes, unit vertex rows, boundary commutation, and cover
  // compatibility with the index maps.
  for (int q = 2; q <= model.levels(); ++q) {
    if (static_cast<int>(model.face_maps[q - 2].size()) != q + 1) {
      std::ostringstream msg;
      msg << "level " << q << ": expected " << q + 1 << " face maps";
      fail(msg.str());
      continue;
    }
    const CellComplex& src = model.complex(q);
    const CellComplex& dst = model.complex(q - 1);
    for (int i = 0; i <= q; ++i) {
      const ChainMap& f = model.face(q, i);
      std::ostringstream tag;
      tag << "face map Delta_" << i << " at level " << q << ": ";
      if (static_cast<int>(f.entries.size()) != src.dim() + 1) {
        fail(tag.str() + "wrong dimension range");
        continue;
      }
      for (int d = 0; d <= src.dim(); ++d) {
        if (static_cast<int>(f.entries[d].size()) != src.cell_count(d)) {
          fail(tag.str() + "wrong cell count");
          continue;
        }
        for (int cell = 0; cell < src.cell_count(d); ++cell) {
          for (const auto& [j, c] : f.entries[d][cell])
            if (d > dst.dim() || j < 0 || j >= dst.cell_count(d))
              fail(tag.str() + "image cell out of range");
          if (d == 0 &&
              (f.entries[0][cell].size() != 1 || f.entries[0][cell][0].second != 1))
            fail(tag.str() + "vertex image is not a single unit vertex");
          if (d >= 1) {
            SparseChain lhs = boundary_chain_of(dst, d, apply_map(f, d, {{cell, 1}}));
            SparseChain rhs =
                apply_map(f, d - 1, boundary_chain_of(src, d, {{cell, 1}}));
            if (lhs != rhs) {
              std::ostringstream msg;
              msg << tag.str() << "boundary commutation fails at cell (" << d
                  << "," << cell << ")";
              fail(msg.str());
            }
          }
        }
      }
    }
    // Index maps and patch compatibility.
    const Cover& cov = model.cover(q);
    const Cover& cov_dst = model.cover(q - 1);
    for (int i = 0; i <= q; ++i) {
      const auto& idx = model.index_face[q - 2][i];
      std::ostringstream tag;
      tag << "index map Delta_" << i << " at level " << q << ": ";
      if (idx.size() != cov.patches.size()) {
        fail(tag.str() + "wrong size");
        continue;
      }
      const ChainMap& f = model.face(q, i);
      for (std::size_t p = 0; p < idx.size(); ++p) {
        if (idx[p] < 0 || idx[p] >= static_cast<int>(cov_dst.patches.size())) {
          fail(tag.str() + "target patch out of range");
          continue;
        }
        const Patch& target = cov_dst.patches[idx[p]];
        const Patch& source = cov.patches[p];
        for (std::size_t d = 0; d < source.cells.size(); ++d)
          for (int cell : source.cells[d])
            for (const auto& [j, c] : chain_image(f, static_cast<int>(d), cell))
              if (!target.contains(static_cast<int>(d), j)) {
                std::ostringstream msg;
                msg << tag.str() << "patch " << p
                    << " image leaves target patch at cell (" << d << "," << cell
                    << ")";
                fail(msg.str());
              }
      }
    }
  }

  // Simplicial identities d_i d_j = d_j d_{i+1} (i >= j), chain and index level.
  for (int q = 3; q <= model.levels(); ++q) {
    const CellComplex& src = model.complex(q);
    for (int j = 0; j <= q - 1; ++j)
      for (int i = j; i <= q - 1; ++i) {
        const ChainMap& fj = model.face(q, j);
        const ChainMap& fi1 = model.face(q, i + 1);
        const ChainMap& gi = model.face(q - 1, i);
        const ChainMap& gj = model.face(q - 1, j);
        for (int d = 0; d <= model.complex(q - 2).dim(); ++d)
          for (int cell = 0; cell < src.cell_count(d); ++cell) {
            SparseChain lhs = apply_map(gi, d, apply_map(fj, d, {{cell, 1}}));
            SparseChain rhs = apply_map(gj, d, apply_map(fi1, d, {{cell, 1}}));
            if (lhs != rhs) {
              std::ostringstream msg;
              msg << "simplicial identity d_" << i << " d_" << j
                  << " = d_" << j << " d_" << i + 1 << " fails at level " << q
                  << " cell (" << d << "," << cell << ")";
              fail(msg.str());
            }
          }
        for (std::size_t p = 0; p < model.cover(q).patches.size(); ++p) {
          int lhs = model.face_index(q - 1, i, model.face_index(q, j, static_cast<int>(p)));
          int rhs = model.face_index(q - 1, j, model.face_index(q, i + 1, static_cast<int>(p)));
          if (lhs != rhs) {
            std::ostringstream msg;
            msg << "index identity d_" << i << " d_" << j << " = d_" << j
                << " d_" << i + 1 << " fails at level " << q << " patch " << p;
            fail(msg.str());
          }
        }
      }
  }

  return rep;
}

// ---------------------------------------------------------------------------
// model files
// ---------------------------------------------------------------------------

void write_model(std::ostream& os, const SimplicialGroupModel& model) {
  os << "gerbecalc-model 1\n";
  os << "name " << (model.name.empty() ? "unnamed" : model.name) << "\n";
  os << "levels " << model.levels() << "\n";
  for (int q = 1; q <= model.levels(); ++q) {
    const CellComplex& cx = model.complex(q);
    os << "complex " << q << " dim " << cx.dim() << "\n";
    os << "counts";
    for (int d = 0; d <= cx.dim(); ++d) os << " " << cx.cell_count(d);
    os << "\n";
    for (int d = 1; d <= cx.dim(); ++d)
      for (int i = 0; i < cx.cell_count(d); ++i) {
        os << "bd " << d << " " << i << " " << cx.boundary[d][i].size();
        for (const auto& [j, s] : cx.boundary[d][i]) os << " " << j << " " << s;
        os << "\n";
      }
    const Cover& cov = model.cover(q);
    os << "cover " << cov.patches.size() << "\n";
    for (const Patch& p : cov.patches) {
      os << "patch " << p.cells.size() << "\n";
      for (const auto& list : p.cells) {
        os << list.size();
        for (int c : list) os << " " << c;
        os << "\n";
      }
    }
  }
  for (int q = 2; q <= model.levels(); ++q)
    for (int i = 0; i <= q; ++i) {
      const ChainMap& f = model.face(q, i);
      os << "facemap " << q << " " << i << " dims " << f.entries.size() << "\n";
      for (std::size_t d = 0; d < f.entries.size(); ++d)
        for (std::size_t cell = 0; cell < f.entries[d].size(); ++cell) {
          if (f.entries[d][cell].empty()) continue;
          os << "row " << d << " " << cell << " " << f.entries[d][cell].size();
          for (const auto& [j, c] : f.entries[d][cell]) os << " " << j << " " << c;
          os << "\n";
        }
      os << "endfacemap\n";
      const auto& idx = model.index_face[q - 2][i];
      os << "indexmap " << idx.size();
      for (int v : idx) os << " " << v;
      os << "\n";
    }
  os << "endmodel\n";
}

namespace {

void expect_token(std::istream& is, const std::string& want) {
  std::string tok;
  is >> tok;
  GC_CHECK(tok == want, "model file: expected '" + want + "', got '" + tok + "'");
}

}  // namespace

SimplicialGroupModel read_model(std::istream& is) {
  SimplicialGroupModel model;
  expect_token(is, "gerbecalc-model");
  int version = 0;
  is >> version;
  GC_CHECK(version == 1, "model file: unsupported version");
  expect_token(is, "name");
  is >> model.name;
  expect_token(is, "levels");
  int levels = 0;
  is >> levels;
  GC_CHECK(levels >= 1, "model file: bad level count");
  model.complexes.resize(levels);
  model.covers.resize(levels);
  for (int q = 1; q <= levels; ++q) {
    expect_token(is, "complex");
    int qq = 0, dim = 0;
    is >> qq;
    expect_token(is, "dim");
    is >> dim;
    GC_CHECK(qq == q && dim >= 0, "model file: bad complex header");
    CellComplex& cx = model.complexes[q - 1];
    cx.boundary.resize(dim + 1);
    expect_token(is, "counts");
    for (int d = 0; d <= dim; ++d) {
      int n = 0;
      is >> n;
      cx.boundary[d].resize(n);
    }
    for (int d = 1; d <= dim; ++d)
      for (int i = 0; i < cx.cell_count(d); ++i) {
        expect_token(is, "bd");
        int dd = 0, ii = 0, k = 0;
        is >> dd >> ii >> k;
        GC_CHECK(dd == d && ii == i, "model file: boundary rows out of order");
        cx.boundary[d][i].resize(k);
        for (auto& [j, s] : cx.boundary[d][i]) is >> j >> s;
      }
    expect_token(is, "cover");
    int patches = 0;
    is >> patches;
    model.covers[q - 1].patches.resize(patches);
    for (int p = 0; p < patches; ++p) {
      expect_token(is, "patch");
      int dims = 0;
      is >> dims;
      Patch& patch = model.covers[q - 1].patches[p];
      patch.cells.resize(dims);
      for (int d = 0; d < dims; ++d) {
        int n = 0;
        is >> n;
        patch.cells[d].resize(n);
        for (int& c : patch.cells[d]) is >> c;
      }
    }
  }
  model.face_maps.resize(std::max(0, levels - 1));
  model.index_face.resize(std::max(0, levels - 1));
  for (int q = 2; q <= levels; ++q) {
    model.face_maps[q - 2].resize(q + 1);
    model.index_face[q - 2].resize(q + 1);
    for (int i = 0; i <= q; ++i) {
      expect_token(is, "facemap");
      int qq = 0, ii = 0;
      std::size_t dims = 0;
      is >> qq >> ii;
      expect_token(is, "dims");
      is >> dims;
      GC_CHECK(qq == q && ii == i, "model file: face maps out of order");
      ChainMap& f = model.face_maps[q - 2][i];
      f.entries.resize(dims);
      for (std::size_t d = 0; d < dims; ++d)
        f.entries[d].resize(model.complexes[q - 1].cell_count(static_cast<int>(d)));
      std::string tok;
      while (is >> tok && tok == "row") {
        int d = 0, cell = 0, k = 0;
        is >> d >> cell >> k;
        auto& row = f.entries[d][cell];
        row.resize(k);
        for (auto& [j, c] : row) is >> j >> c;
      }
      GC_CHECK(tok == "endfacemap", "model file: expected endfacemap");
      expect_token(is, "indexmap");
      int n = 0;
      is >> n;
      model.index_face[q - 2][i].resize(n);
      for (int& v : model.index_face[q - 2][i]) is >> v;
    }
  }
  expect_token(is, "endmodel");
  model.finalize();
  return model;
}

}  // namespace gerbecalc
