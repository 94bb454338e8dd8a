// builtin_model.cpp -- ready-made simplicial group models.
//
// The main one is the N-gon model of the circle group Z_N.  Level q is the
// q-fold product complex of the N-gon (a combinatorial q-torus); a cell is a
// tuple of factor cells, one vertex or edge per group slot.  The group face
// maps act factor-wise:
//
//   drop maps     (projections): a cell with an edge in the dropped slot has
//                 degenerate image, hence maps to zero;
//   merge maps    (multiplication of adjacent slots): vertices add,
//                 (v_a, e_b) and (e_a, v_b) map to e_{a+b}, and (e, e) maps to
//                 zero because the image of a square under multiplication is
//                 one-dimensional.  The shear terms of the boundary cancel
//                 exactly because multiplication by a vertex is a cell shift.
//
// Covers are products of arcs A_c = [c, c+len-1] with one arc per start
// c in Z_N and level-dependent lengths len_{q-1} = 2 len_q - 1.  That stair
// makes arc sumsets exactly cover arcs: A_a + A_b = A_{a+b} one level down,
// which is the cover compatibility the Cech machinery needs.

#include <algorithm>
#include <sstream>
#include <vector>

#include "gerbecalc/cell_complex.hpp"
#include "gerbecalc/common.hpp"

namespace gerbecalc {

namespace {

// Cells of the q-torus over the N-gon, addressed by factor codes: code
// f in [0, N) is vertex f, code N + e is edge [e, e+1].  A cell is the
// mixed-radix number sum f_j (2N)^j.
struct TorusIndexer {
  int n = 0, q = 0;
  long radix = 0;
  std::vector<std::vector<long>> codes;  // per dimension, ascending

  TorusIndexer(int n_, int q_) : n(n_), q(q_), radix(2L * n_) {
    codes.resize(q + 1);
    long total = 1;
    for (int j = 0; j < q; ++j) total *= radix;
    for (long code = 0; code < total; ++code) codes[dim_of(code)].push_back(code);
  }

  int dim_of(long code) const {
    int d = 0;
    for (int j = 0; j < q; ++j) {
      if (code % radix >= n) ++d;
      code /= radix;
    }
    return d;
  }

  std::vector<int> factors_of(long code) const {
    std::vector<int> f(q);
    for (int j = 0; j < q; ++j) {
      f[j] = static_cast<int>(code % radix);
      code /= radix;
    }
    return f;
  }

  long code_of(const std::vector<int>& f) const {
    long code = 0;
    for (int j = q - 1; j >= 0; --j) code = code * radix + f[j];
    return code;
  }

  int index_of(int d, long code) const {
    auto it = std::lower_bound(codes[d].begin(), codes[d].end(), code);
    GC_CHECK(it != codes[d].end() && *it == code, "torus cell lookup failed");
    return static_cast<int>(it - codes[d].begin());
  }
};

CellComplex torus_complex(const TorusIndexer& ix) {
  CellComplex cx;
  cx.boundary.resize(ix.q + 1);
  for (int d = 0; d <= ix.q; ++d) {
    cx.boundary[d].resize(ix.codes[d].size());
    if (d == 0) continue;
    for (std::size_t i = 0; i < ix.codes[d].size(); ++i) {
      std::vector<int> f = ix.factors_of(ix.codes[d][i]);
      int sign = 1;
      for (int j = 0; j < ix.q; ++j) {
        if (f[j] < ix.n) continue;  // vertex factor
        int e = f[j] - ix.n;
        std::vector<int> head = f, tail = f;
        head[j] = (e + 1) % ix.n;
        tail[j] = e;
        cx.boundary[d][i].push_back({ix.index_of(d - 1, ix.code_of(head)), sign});
        cx.boundary[d][i].push_back({ix.index_of(d - 1, ix.code_of(tail)), -sign});
        sign = -sign;  // Koszul sign: one flip per edge factor passed
      }
    }
  }
  return cx;
}

// Factor codes of the arc [start, start+len-1]: len vertices and len-1 edges.
std::vector<int> arc_codes(int n, int start, int len) {
  std::vector<int> out;
  for (int k = 0; k < len; ++k) out.push_back((start + k) % n);
  for (int k = 0; k + 1 < len; ++k) out.push_back(n + (start + k) % n);
  return out;
}

Patch product_patch(const TorusIndexer& ix, const std::vector<std::vector<int>>& factor_lists) {
  Patch p;
  p.cells.resize(ix.q + 1);
  std::vector<int> pick(ix.q, 0), f(ix.q);
  for (;;) {
    for (int j = 0; j < ix.q; ++j) f[j] = factor_lists[j][pick[j]];
    long code = ix.code_of(f);
    int d = ix.dim_of(code);
    p.cells[d].push_back(ix.index_of(d, code));
    int j = 0;
    while (j < ix.q && ++pick[j] == static_cast<int>(factor_lists[j].size())) pick[j++] = 0;
    if (j == ix.q) break;
  }
  for (auto& list : p.cells) std::sort(list.begin(), list.end());
  return p;
}

// The face map Delta_i : K_q -> K_{q-1} on factor codes; returns false for a
// degenerate (zero) image.
bool face_factors(int n, int i, const std::vector<int>& f, std::vector<int>& out) {
  int q = static_cast<int>(f.size());
  out.clear();
  if (i == 0 || i == q) {
    int drop = (i == 0) ? 0 : q - 1;
    if (f[drop] >= n) return false;  // projected edge is degenerate
    for (int j = 0; j < q; ++j)
      if (j != drop) out.push_back(f[j]);
    return true;
  }
  int a = f[i - 1], b = f[i];
  int merged;
  if (a < n && b < n) {
    merged = (a + b) % n;
  } else if (a >= n && b >= n) {
    return false;  // multiplication flattens the square
  } else if (a >= n) {
    merged = n + ((a - n) + b) % n;
  } else {
    merged = n + (a + (b - n)) % n;
  }
  for (int j = 0; j < i - 1; ++j) out.push_back(f[j]);
  out.push_back(merged);
  for (int j = i + 1; j < q; ++j) out.push_back(f[j]);
  return true;
}

}  // namespace

SimplicialGroupModel circle_group_model(int n, int levels) {
  GC_CHECK(levels >= 1, "circle model needs at least one level");
  int top_len = (1 << (levels - 1)) + 1;
  GC_CHECK(top_len + 1 <= n, "circle model: N too small for the arc-length stair");

  SimplicialGroupModel model;
  {
    std::ostringstream name;
    name << "circle-Z" << n << "-levels" << levels;
    model.name = name.str();
  }
  std::vector<TorusIndexer> ix;
  for (int q = 1; q <= levels; ++q) ix.emplace_back(n, q);
  std::vector<int> len(levels + 1, 0);
  for (int q = 1; q <= levels; ++q) len[q] = (1 << (levels - q)) + 1;

  model.complexes.resize(levels);
  model.covers.resize(levels);
  for (int q = 1; q <= levels; ++q) {
    model.complexes[q - 1] = torus_complex(ix[q - 1]);
    long patches = 1;
    for (int j = 0; j < q; ++j) patches *= n;
    model.covers[q - 1].patches.resize(patches);
    std::vector<std::vector<int>> factor_lists(q);
    for (long p = 0; p < patches; ++p) {
      long rest = p;
      for (int j = 0; j < q; ++j) {
        factor_lists[j] = arc_codes(n, static_cast<int>(rest % n), len[q]);
        rest /= n;
      }
      model.covers[q - 1].patches[p] = product_patch(ix[q - 1], factor_lists);
    }
  }

  model.face_maps.resize(levels - 1);
  model.index_face.resize(levels - 1);
  for (int q = 2; q <= levels; ++q) {
    model.face_maps[q - 2].resize(q + 1);
    model.index_face[q - 2].resize(q + 1);
    const TorusIndexer& src = ix[q - 1];
    const TorusIndexer& dst = ix[q - 2];
    for (int i = 0; i <= q; ++i) {
      ChainMap& f = model.face_maps[q - 2][i];
      f.entries.resize(q + 1);
      std::vector<int> out;
      for (int d = 0; d <= q; ++d) {
        f.entries[d].resize(src.codes[d].size());
        for (std::size_t c = 0; c < src.codes[d].size(); ++c)
          if (face_factors(n, i, src.factors_of(src.codes[d][c]), out))
            f.entries[d][c].push_back({dst.index_of(d, dst.code_of(out)), 1});
      }
      auto& idx = model.index_face[q - 2][i];
      long patches = static_cast<long>(model.covers[q - 1].patches.size());
      idx.resize(patches);
      for (long p = 0; p < patches; ++p) {
        std::vector<int> starts(q);
        long rest = p;
        for (int j = 0; j < q; ++j) {
          starts[j] = static_cast<int>(rest % n);
          rest /= n;
        }
        std::vector<int> target;
        if (i == 0 || i == q) {
          for (int j = 0; j < q; ++j)
            if (j != (i == 0 ? 0 : q - 1)) target.push_back(starts[j]);
        } else {
          for (int j = 0; j < i - 1; ++j) target.push_back(starts[j]);
          target.push_back((starts[i - 1] + starts[i]) % n);
          for (int j = i + 1; j < q; ++j) target.push_back(starts[j]);
        }
        long t = 0;
        for (int j = q - 2; j >= 0; --j) t = t * n + target[j];
        idx[p] = static_cast<int>(t);
      }
    }
  }

  model.finalize();
  return model;
}

SimplicialGroupModel point_group_model(int levels) {
  GC_CHECK(levels >= 1, "point model needs at least one level");
  SimplicialGroupModel model;
  model.name = "point";
  model.complexes.resize(levels);
  model.covers.resize(levels);
  for (int q = 1; q <= levels; ++q) {
    model.complexes[q - 1].boundary.resize(1);
    model.complexes[q - 1].boundary[0].resize(1);
    Patch p;
    p.cells = {{0}};
    model.covers[q - 1].patches.push_back(p);
  }
  model.face_maps.resize(levels - 1);
  model.index_face.resize(levels - 1);
  for (int q = 2; q <= levels; ++q) {
    model.face_maps[q - 2].resize(q + 1);
    model.index_face[q - 2].resize(q + 1);
    for (int i = 0; i <= q; ++i) {
      model.face_maps[q - 2][i].entries = {{{{0, 1}}}};
      model.index_face[q - 2][i] = {0};
    }
  }
  model.finalize();
  return model;
}

int torus_vertex_id(int n, const std::vector<int>& coords) {
  GC_CHECK(!coords.empty(), "torus_vertex_id: no coordinates");
  TorusIndexer ix(n, static_cast<int>(coords.size()));
  std::vector<int> f(coords.size());
  for (std::size_t j = 0; j < coords.size(); ++j) {
    GC_CHECK(coords[j] >= 0 && coords[j] < n, "torus_vertex_id: coordinate ",
             coords[j], " outside Z_", n);
    f[j] = coords[j];
  }
  return ix.index_of(0, ix.code_of(f));
}

SimplicialGroupModel arc_cover_circle(int n, const std::vector<int>& starts,
                                      int length) {
  GC_CHECK(n >= 3 && length >= 2 && length <= n - 1,
           "arc cover: need 2 <= length <= N-1");
  SimplicialGroupModel model;
  {
    std::ostringstream name;
    name << "arcs-Z" << n << "-" << starts.size() << "x" << length;
    model.name = name.str();
  }
  TorusIndexer ix(n, 1);
  model.complexes.push_back(torus_complex(ix));
  Cover cov;
  for (int s : starts)
    cov.patches.push_back(product_patch(ix, {arc_codes(n, s, length)}));
  model.covers.push_back(cov);
  model.finalize();
  return model;
}

}  // namespace gerbecalc
