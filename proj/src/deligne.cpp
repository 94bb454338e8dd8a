// deligne.cpp -- exact Cech--Deligne cochain calculus.
//
// Everything here is sparse rational arithmetic: a cochain stores only its
// nonzero cells, absent entries read as zero, and every operator enumerates
// contributions from the stored support outward.  The three differentials:
//
//   delta  -- Cech coboundary.  For a stored tuple tau we enumerate the
//             patches u whose intersection with U_tau is nonempty, insert u
//             into tau at its sorted position `pos`, and add (-1)^pos times
//             the restricted values.  This realizes the alternating-face sum
//             because the stored tuple is exactly one face of each extension.
//   d      -- cell coboundary per tuple (the coboundary of the representative
//             when the layer is the U(1)-function sheaf).
//   Delta  -- alternating sum of pullbacks along the group face maps.  For
//             each face Delta_i and each stored tuple tau we enumerate the
//             source cells sigma meeting the support through the transposed
//             chain map, and the source tuples t with componentwise patch
//             image tau; sorting t introduces the inversion parity of the
//             chosen sequence, multiplied by (-1)^i.
//
// U(1) layers are compared as classes: trivial means "constant integer on
// every connected component of every tuple intersection", with absent
// entries reading zero.

#include "gerbecalc/deligne.hpp"

#include <algorithm>
#include <complex>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "gerbecalc/common.hpp"

namespace gerbecalc {

namespace {

// --- sparse value-map helpers -----------------------------------------------

using ValueMap = std::map<int, Rational>;

void map_cleanup(ValueMap& m) {
    for (auto it = m.begin(); it != m.end();) {
        if (it->second == 0) it = m.erase(it); else ++it;
    }
}

void map_add_scaled(ValueMap& dst, const ValueMap& src, const Rational& s) {
    if (s == 0) return;
    for (const auto& [cell, v] : src) dst[cell] += s * v;
}

Rational map_value(const ValueMap& m, int cell) {
    auto it = m.find(cell);
    return it == m.end() ? Rational(0) : it->second;
}

bool rational_is_integer(const Rational& v) { return v.get_den() == 1; }

Rational rational_floor(const Rational& v) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    return Rational(q);
}

// --- cell / patch lookups -----------------------------------------------------

// Any vertex of cell (d, i), found by descending first boundary entries.
int first_vertex(const CellComplex& cx, int d, int cell) {
    while (d > 0) {
        GC_CHECK(!cx.boundary[d][cell].empty(), "cell of dimension ", d,
                 " with empty boundary");
        cell = cx.boundary[d][cell][0].first;
        --d;
    }
    return cell;
}

// Sorted ids of the level-q patches containing cell (d, i).
std::vector<int> patches_containing_cell(const SimplicialGroupModel& model,
                                         int q, int d, int cell) {
    if (d == 0) return model.vertex_patches[q - 1][cell];
    int v0 = first_vertex(model.complex(q), d, cell);
    std::vector<int> out;
    for (int p : model.vertex_patches[q - 1][v0]) {
        if (model.cover(q).patches[p].contains(d, cell)) out.push_back(p);
    }
    return out;
}

// Connected components of the intersection subcomplex of a patch tuple.
Components tuple_components(const SimplicialGroupModel& model, int q,
                            const std::vector<int>& tuple) {
    if (tuple.size() == 1) return model.patch_components[q - 1][tuple[0]];
    const CellComplex& cx = model.complex(q);
    std::vector<std::vector<int>> cells(cx.dim() + 1);
    for (int d = 0; d <= cx.dim(); ++d) cells[d] = model.intersection(q, tuple, d);
    return subcomplex_components(cx, cells);
}

// Restrict a global form on K_q to the dimension-matching cells of every patch
// of cover q, as a Cech 0-cochain.
CechCochain restrict_to_singletons(const SimplicialGroupModel& model, int q,
                                   const DiscreteForm& f) {
    GC_CHECK(f.level == q, "form lives on level ", f.level, ", expected ", q);
    CechCochain out;
    out.level = q;
    out.cech = 0;
    out.form = f.degree;
    const Cover& cov = model.cover(q);
    for (int i = 0; i < static_cast<int>(cov.patches.size()); ++i) {
        const Patch& patch = cov.patches[i];
        if (f.degree >= static_cast<int>(patch.cells.size())) continue;
        ValueMap vals;
        for (int cell : patch.cells[f.degree]) {
            Rational v = map_value(f.values, cell);
            if (v != 0) vals[cell] = v;
        }
        if (!vals.empty()) out.entries[{i}] = std::move(vals);
    }
    return out;
}

void cech_cleanup(CechCochain& c) {
    for (auto it = c.entries.begin(); it != c.entries.end();) {
        map_cleanup(it->second);
        if (it->second.empty()) it = c.entries.erase(it); else ++it;
    }
}

std::string tuple_string(const std::vector<int>& t) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
    os << ")";
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// discrete forms
// ---------------------------------------------------------------------------

DiscreteForm form_zero(int level, int degree) {
    DiscreteForm f;
    f.level = level;
    f.degree = degree;
    return f;
}

DiscreteForm form_add(const DiscreteForm& a, const DiscreteForm& b) {
    GC_CHECK(a.level == b.level && a.degree == b.degree,
             "form_add: mismatched level or degree");
    DiscreteForm out = a;
    map_add_scaled(out.values, b.values, Rational(1));
    map_cleanup(out.values);
    return out;
}

DiscreteForm form_scale(const Rational& s, const DiscreteForm& a) {
    DiscreteForm out = form_zero(a.level, a.degree);
    map_add_scaled(out.values, a.values, s);
    map_cleanup(out.values);
    return out;
}

bool form_is_zero(const DiscreteForm& a) {
    for (const auto& [cell, v] : a.values)
        if (v != 0) return false;
    return true;
}

bool form_equal(const DiscreteForm& a, const DiscreteForm& b) {
    if (a.level != b.level || a.degree != b.degree) return false;
    return form_is_zero(form_add(a, form_scale(Rational(-1), b)));
}

DiscreteForm form_d(const SimplicialGroupModel& model, const DiscreteForm& a) {
    const CellComplex& cx = model.complex(a.level);
    DiscreteForm out = form_zero(a.level, a.degree + 1);
    if (a.degree + 1 > cx.dim()) return out;
    for (const auto& [cell, v] : a.values) {
        if (v == 0) continue;
        for (const auto& [coface, sign] : cx.cofaces[a.degree][cell])
            out.values[coface] += sign * v;
    }
    map_cleanup(out.values);
    return out;
}

DiscreteForm form_delta(const SimplicialGroupModel& model, const DiscreteForm& a) {
    GC_CHECK(a.level + 1 <= model.levels(),
             "form_delta: level ", a.level + 1, " not modelled");
    DiscreteForm out = form_zero(a.level + 1, a.degree);
    const CellComplex& target = model.complex(a.level + 1);
    if (a.degree > target.dim()) return out;
    int q1 = a.level + 1;
    for (int i = 0; i <= q1; ++i) {
        const ChainMap& f = model.face(q1, i);
        int sign = (i % 2 == 0) ? 1 : -1;
        for (const auto& [cell, v] : a.values) {
            if (v == 0) continue;
            for (const auto& [sigma, coef] : f.transpose[a.degree][cell])
                out.values[sigma] += Rational(sign * coef) * v;
        }
    }
    map_cleanup(out.values);
    return out;
}

DiscreteForm random_form(const SimplicialGroupModel& model, int level,
                         int degree, Rng& rng, int entries,
                         int denominator_bound) {
    DiscreteForm out = form_zero(level, degree);
    const CellComplex& cx = model.complex(level);
    int n = cx.cell_count(degree);
    if (n == 0) return out;
    std::uniform_int_distribution<int> cell_dist(0, n - 1);
    std::uniform_int_distribution<int> den(1, denominator_bound);
    std::uniform_int_distribution<int> num(-3 * denominator_bound,
                                           3 * denominator_bound);
    for (int e = 0; e < entries; ++e) {
        int numerator = num(rng);
        if (numerator == 0) numerator = 1;
        Rational v(numerator, den(rng));
        v.canonicalize();
        out.values[cell_dist(rng)] = v;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cech operators
// ---------------------------------------------------------------------------

CechCochain cech_add(const CechCochain& a, const CechCochain& b) {
    GC_CHECK(a.level == b.level && a.cech == b.cech && a.form == b.form,
             "cech_add: mismatched bidegrees");
    CechCochain out = a;
    for (const auto& [tuple, vals] : b.entries)
        map_add_scaled(out.entries[tuple], vals, Rational(1));
    cech_cleanup(out);
    return out;
}

CechCochain cech_scale(const Rational& s, const CechCochain& a) {
    CechCochain out;
    out.level = a.level;
    out.cech = a.cech;
    out.form = a.form;
    if (s == 0) return out;
    for (const auto& [tuple, vals] : a.entries)
        map_add_scaled(out.entries[tuple], vals, s);
    cech_cleanup(out);
    return out;
}

CechCochain cech_delta(const SimplicialGroupModel& model, const CechCochain& c) {
    CechCochain out;
    out.level = c.level;
    out.cech = c.cech + 1;
    out.form = c.form;
    int d = c.form;
    for (const auto& [tuple, vals] : c.entries) {
        if (vals.empty()) continue;
        for (int u : model.patches_meeting(c.level, tuple)) {
            auto it = std::lower_bound(tuple.begin(), tuple.end(), u);
            if (it != tuple.end() && *it == u) continue;
            int pos = static_cast<int>(it - tuple.begin());
            std::vector<int> t = tuple;
            t.insert(t.begin() + pos, u);
            std::vector<int> cells = model.intersection(c.level, t, d);
            if (cells.empty()) continue;
            int sign = (pos % 2 == 0) ? 1 : -1;
            ValueMap& dst = out.entries[t];
            for (const auto& [cell, v] : vals) {
                if (std::binary_search(cells.begin(), cells.end(), cell))
                    dst[cell] += sign * v;
            }
        }
    }
    cech_cleanup(out);
    return out;
}

CechCochain cech_d(const SimplicialGroupModel& model, const CechCochain& c) {
    CechCochain out;
    out.level = c.level;
    out.cech = c.cech;
    out.form = c.form + 1;
    const CellComplex& cx = model.complex(c.level);
    int k = c.form;
    if (k + 1 > cx.dim()) return out;
    for (const auto& [tuple, vals] : c.entries) {
        ValueMap dst;
        for (int tau : model.intersection(c.level, tuple, k + 1)) {
            Rational acc(0);
            for (const auto& [b, s] : cx.boundary[k + 1][tau]) {
                auto it = vals.find(b);
                if (it != vals.end()) acc += s * it->second;
            }
            if (acc != 0) dst[tau] = acc;
        }
        if (!dst.empty()) out.entries[tuple] = std::move(dst);
    }
    return out;
}

CechCochain cech_Delta(const SimplicialGroupModel& model, const CechCochain& c) {
    int q = c.level;
    GC_CHECK(q + 1 <= model.levels(),
             "cech_Delta: level ", q + 1, " not modelled");
    CechCochain out;
    out.level = q + 1;
    out.cech = c.cech;
    out.form = c.form;
    const CellComplex& target = model.complex(q + 1);
    int d = c.form;
    if (d > target.dim()) return out;

    int nfaces = q + 2;
    int source_patches = static_cast<int>(model.cover(q + 1).patches.size());
    // pre[i][j]: level-(q+1) patches mapping to level-q patch j under face i.
    std::vector<std::vector<std::vector<int>>> pre(nfaces);
    for (int i = 0; i < nfaces; ++i) {
        pre[i].assign(model.cover(q).patches.size(), {});
        for (int j = 0; j < source_patches; ++j)
            pre[i][model.face_index(q + 1, i, j)].push_back(j);
    }

    for (const auto& [tuple, vals] : c.entries) {
        if (vals.empty()) continue;
        for (int i = 0; i < nfaces; ++i) {
            const ChainMap& f = model.face(q + 1, i);
            int face_sign = (i % 2 == 0) ? 1 : -1;
            std::set<int> sigmas;
            for (const auto& [cell, v] : vals)
                for (const auto& [sigma, coef] : f.transpose[d][cell])
                    sigmas.insert(sigma);
            for (int sigma : sigmas) {
                Rational vs(0);
                for (const auto& [target_cell, coef] : chain_image(f, d, sigma)) {
                    auto it = vals.find(target_cell);
                    if (it != vals.end()) vs += Rational(coef) * it->second;
                }
                if (vs == 0) continue;
                std::vector<int> holders =
                    patches_containing_cell(model, q + 1, d, sigma);
                std::vector<std::vector<int>> opts(tuple.size());
                bool empty_slot = false;
                for (size_t l = 0; l < tuple.size(); ++l) {
                    opts[l] = intersect_sorted(pre[i][tuple[l]], holders);
                    if (opts[l].empty()) { empty_slot = true; break; }
                }
                if (empty_slot) continue;
                // odometer over one choice per slot; slots have disjoint
                // option sets (distinct targets), so entries stay distinct.
                std::vector<size_t> idx(tuple.size(), 0);
                std::vector<int> choice(tuple.size());
                for (;;) {
                    for (size_t l = 0; l < tuple.size(); ++l)
                        choice[l] = opts[l][idx[l]];
                    int inversions = 0;
                    for (size_t a = 0; a < choice.size(); ++a)
                        for (size_t b = a + 1; b < choice.size(); ++b)
                            if (choice[a] > choice[b]) ++inversions;
                    std::vector<int> t = choice;
                    std::sort(t.begin(), t.end());
                    int sign = ((inversions % 2 == 0) ? 1 : -1) * face_sign;
                    out.entries[t][sigma] += sign * vs;
                    size_t l = 0;
                    while (l < idx.size() && ++idx[l] == opts[l].size())
                        idx[l++] = 0;
                    if (l == idx.size()) break;
                }
            }
        }
    }
    cech_cleanup(out);
    return out;
}

bool cech_is_trivial(const SimplicialGroupModel& model, const CechCochain& c) {
    if (c.form >= 1) {
        for (const auto& [tuple, vals] : c.entries)
            for (const auto& [cell, v] : vals)
                if (v != 0) return false;
        return true;
    }
    for (const auto& [tuple, vals] : c.entries) {
        bool any = false;
        for (const auto& [cell, v] : vals)
            if (v != 0) { any = true; break; }
        if (!any) continue;
        Components comp = tuple_components(model, c.level, tuple);
        for (const auto& [cell, v] : vals)
            if (v != 0 && comp.component_of(cell) < 0) return false;
        std::vector<Rational> first(comp.count);
        std::vector<char> seen(comp.count, 0);
        for (size_t j = 0; j < comp.vertices.size(); ++j) {
            Rational v = map_value(vals, comp.vertices[j]);
            int ci = comp.component[j];
            if (!seen[ci]) {
                if (!rational_is_integer(v)) return false;
                first[ci] = v;
                seen[ci] = 1;
            } else if (v != first[ci]) {
                return false;
            }
        }
    }
    return true;
}

CechCochain canonical_rep(const SimplicialGroupModel& model,
                          const CechCochain& c) {
    GC_CHECK(c.form == 0, "canonical_rep only applies to the function layer");
    CechCochain out = c;
    for (auto& [tuple, vals] : out.entries) {
        Components comp = tuple_components(model, c.level, tuple);
        for (int ci = 0; ci < comp.count; ++ci) {
            Rational shift = rational_floor(map_value(vals, comp.base[ci]));
            if (shift == 0) continue;
            for (size_t j = 0; j < comp.vertices.size(); ++j)
                if (comp.component[j] == ci) vals[comp.vertices[j]] -= shift;
        }
    }
    cech_cleanup(out);
    return out;
}

CechCochain random_cech(const SimplicialGroupModel& model, int level, int cech,
                        int form, Rng& rng, int tuples, int entries,
                        int denominator_bound) {
    CechCochain out;
    out.level = level;
    out.cech = cech;
    out.form = form;
    int npatch = static_cast<int>(model.cover(level).patches.size());
    if (npatch == 0) return out;
    int d = form;
    std::uniform_int_distribution<int> patch_dist(0, npatch - 1);
    std::uniform_int_distribution<int> den(1, denominator_bound);
    std::uniform_int_distribution<int> num(-3 * denominator_bound,
                                           3 * denominator_bound);
    for (int t = 0; t < tuples; ++t) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            std::vector<int> tuple = {patch_dist(rng)};
            bool stuck = false;
            while (static_cast<int>(tuple.size()) < cech + 1) {
                std::vector<int> cands;
                for (int u : model.patches_meeting(level, tuple))
                    if (!std::binary_search(tuple.begin(), tuple.end(), u))
                        cands.push_back(u);
                if (cands.empty()) { stuck = true; break; }
                std::uniform_int_distribution<size_t> pick(0, cands.size() - 1);
                int u = cands[pick(rng)];
                tuple.insert(std::lower_bound(tuple.begin(), tuple.end(), u), u);
            }
            if (stuck) continue;
            std::vector<int> cells = model.intersection(level, tuple, d);
            if (cells.empty()) continue;
            std::uniform_int_distribution<size_t> cell_pick(0, cells.size() - 1);
            ValueMap& dst = out.entries[tuple];
            for (int e = 0; e < entries; ++e) {
                int numerator = num(rng);
                if (numerator == 0) numerator = 1;
                Rational v(numerator, den(rng));
                v.canonicalize();
                dst[cells[cell_pick(rng)]] = v;
            }
            break;
        }
    }
    cech_cleanup(out);
    return out;
}

// ---------------------------------------------------------------------------
// Deligne cochains
// ---------------------------------------------------------------------------

CechCochain DeligneCochain::part_or_zero(int q, int p, int k) const {
    auto it = parts.find({q, p, k});
    if (it != parts.end()) return it->second;
    CechCochain zero;
    zero.level = q;
    zero.cech = p;
    zero.form = k;
    return zero;
}

DeligneCochain cochain_zero(int degree, int truncation) {
    DeligneCochain c;
    c.degree = degree;
    c.truncation = truncation;
    return c;
}

namespace {

void cochain_cleanup(DeligneCochain& c) {
    for (auto it = c.parts.begin(); it != c.parts.end();) {
        cech_cleanup(it->second);
        if (it->second.entries.empty()) it = c.parts.erase(it); else ++it;
    }
    if (c.has_rho) map_cleanup(c.rho.values);
}

void accumulate_part(DeligneCochain& out, int q, int p, int k, CechCochain cc) {
    if (cc.entries.empty()) return;
    std::array<int, 3> key = {q, p, k};
    auto it = out.parts.find(key);
    if (it == out.parts.end()) {
        cc.level = q;
        cc.cech = p;
        cc.form = k;
        out.parts.emplace(key, std::move(cc));
    } else {
        it->second = cech_add(it->second, cc);
    }
}

}  // namespace

DeligneCochain cochain_add(const DeligneCochain& a, const DeligneCochain& b) {
    GC_CHECK(a.degree == b.degree && a.truncation == b.truncation,
             "cochain_add: mismatched degree or truncation");
    DeligneCochain out = a;
    for (const auto& [key, part] : b.parts)
        accumulate_part(out, key[0], key[1], key[2], part);
    if (b.has_rho) {
        if (out.has_rho) {
            out.rho = form_add(out.rho, b.rho);
        } else {
            out.has_rho = true;
            out.rho = b.rho;
        }
    }
    cochain_cleanup(out);
    return out;
}

DeligneCochain cochain_negate(const DeligneCochain& a) {
    DeligneCochain out = cochain_zero(a.degree, a.truncation);
    for (const auto& [key, part] : a.parts)
        accumulate_part(out, key[0], key[1], key[2],
                        cech_scale(Rational(-1), part));
    if (a.has_rho) {
        out.has_rho = true;
        out.rho = form_scale(Rational(-1), a.rho);
    }
    return out;
}

bool cochain_equal(const SimplicialGroupModel& model, const DeligneCochain& a,
                   const DeligneCochain& b) {
    if (a.degree != b.degree || a.truncation != b.truncation) return false;
    DeligneCochain diff = cochain_add(a, cochain_negate(b));
    for (const auto& [key, part] : diff.parts)
        if (!cech_is_trivial(model, part)) return false;
    if (diff.has_rho && !form_is_zero(diff.rho)) return false;
    return true;
}

DeligneCochain deligne_D(const SimplicialGroupModel& model,
                         const DeligneCochain& c) {
    GC_CHECK(!c.has_rho,
             "the fixed-level differential does not act on the bi-form");
    DeligneCochain out = cochain_zero(c.degree + 1, c.truncation);
    for (const auto& [key, part] : c.parts) {
        int q = key[0], p = key[1], k = key[2];
        accumulate_part(out, q, p + 1, k, cech_delta(model, part));
        if (k < c.truncation) {
            Rational sd((p % 2 == 0) ? 1 : -1);
            accumulate_part(out, q, p, k + 1, cech_scale(sd, cech_d(model, part)));
        }
    }
    cochain_cleanup(out);
    return out;
}

DeligneCochain bi_D(const SimplicialGroupModel& model, const DeligneCochain& c) {
    DeligneCochain out = cochain_zero(c.degree + 1, c.truncation);
    for (const auto& [key, part] : c.parts) {
        int q = key[0], p = key[1], k = key[2];
        Rational sq((q % 2 == 0) ? 1 : -1);
        accumulate_part(out, q, p + 1, k, cech_scale(sq, cech_delta(model, part)));
        if (k < c.truncation) {
            Rational sd(((q + p) % 2 == 0) ? 1 : -1);
            accumulate_part(out, q, p, k + 1, cech_scale(sd, cech_d(model, part)));
        }
        if (q < model.levels())
            accumulate_part(out, q + 1, p, k, cech_Delta(model, part));
    }
    if (c.has_rho) {
        GC_CHECK(c.degree == c.truncation + 1,
                 "bi-form only lives in total degree truncation+1");
        GC_CHECK(model.levels() >= 2, "bi-form needs the level-2 cover");
        if (model.levels() >= 3)
            GC_CHECK(form_is_zero(form_delta(model, c.rho)),
                     "bi-form must be Delta-closed");
        accumulate_part(out, 2, 0, c.truncation,
                        cech_scale(Rational(-1),
                                   restrict_to_singletons(model, 2, c.rho)));
    }
    cochain_cleanup(out);
    return out;
}

CocycleReport is_cocycle(const SimplicialGroupModel& model,
                         const DeligneCochain& c) {
    CocycleReport report;
    if (c.has_rho && model.levels() >= 3 &&
        !form_is_zero(form_delta(model, c.rho))) {
        report.ok = false;
        report.residuals.push_back("bi-form is not Delta-closed");
        return report;
    }
    DeligneCochain r = bi_D(model, c);
    for (const auto& [key, part] : r.parts) {
        if (cech_is_trivial(model, part)) continue;
        report.ok = false;
        std::ostringstream os;
        os << "component (q=" << key[0] << ",p=" << key[1] << ",k=" << key[2]
           << "): " << part.entries.size() << " stored tuples, e.g. "
           << tuple_string(part.entries.begin()->first);
        report.residuals.push_back(os.str());
    }
    return report;
}

bool check_coboundary(const SimplicialGroupModel& model, const DeligneCochain& c1,
                      const DeligneCochain& c2, const DeligneCochain& witness) {
    GC_CHECK(c1.degree == c2.degree && c1.truncation == c2.truncation,
             "check_coboundary: cochains live in different groups");
    GC_CHECK(witness.degree == c1.degree - 1 &&
                 witness.truncation == c1.truncation,
             "check_coboundary: witness has the wrong degree");
    return cochain_equal(model, cochain_add(c1, bi_D(model, witness)), c2);
}

// ---------------------------------------------------------------------------
// constructors
// ---------------------------------------------------------------------------

DeligneCochain make_trivial_multiplicative(const SimplicialGroupModel& model,
                                           const DiscreteForm& phi,
                                           const DiscreteForm& psi) {
    int n = phi.degree;
    GC_CHECK(n >= 1, "the global form must have degree >= 1");
    GC_CHECK(phi.level == 1, "phi lives on K_1");
    GC_CHECK(psi.level == 2 && psi.degree == n - 1,
             "psi must be a degree-", n - 1, " form on K_2");
    GC_CHECK(model.levels() >= 2, "need the level-2 cover");
    if (model.levels() >= 3)
        GC_CHECK(form_is_zero(form_delta(model, psi)), "psi must be Delta-closed");

    DeligneCochain c = cochain_zero(n + 1, n);
    accumulate_part(c, 1, 0, n, restrict_to_singletons(model, 1, phi));
    accumulate_part(c, 2, 0, n - 1, restrict_to_singletons(model, 2, psi));
    c.has_rho = true;
    c.rho = form_add(form_d(model, psi), form_delta(model, phi));
    cochain_cleanup(c);
    return c;
}

DeligneCochain make_lemma2_cocycle(const SimplicialGroupModel& model,
                                   const DiscreteForm& H, const DiscreteForm& rho,
                                   const std::vector<DiscreteForm>& B) {
    int n = rho.degree;
    GC_CHECK(H.level == 1 && H.degree == n + 1,
             "H must be a degree-", n + 1, " form on K_1");
    GC_CHECK(rho.level == 2, "rho lives on K_2");
    GC_CHECK(model.levels() >= 2, "need the level-2 cover");
    const Cover& cov1 = model.cover(1);
    GC_CHECK(B.size() == cov1.patches.size(),
             "need one primitive per level-1 patch");

    GC_CHECK(form_is_zero(form_d(model, H)), "H must be closed");
    GC_CHECK(form_equal(form_delta(model, H), form_d(model, rho)),
             "Delta H = d rho fails");
    if (model.levels() >= 3)
        GC_CHECK(form_is_zero(form_delta(model, rho)), "rho must be Delta-closed");

    CechCochain Bc;
    Bc.level = 1;
    Bc.cech = 0;
    Bc.form = n;
    for (int i = 0; i < static_cast<int>(cov1.patches.size()); ++i) {
        const Patch& patch = cov1.patches[i];
        GC_CHECK(B[i].level == 1 && B[i].degree == n,
                 "primitive ", i, " must be a degree-", n, " form on K_1");
        for (const auto& [cell, v] : B[i].values)
            GC_CHECK(v == 0 || patch.contains(n, cell),
                     "primitive ", i, " supported outside its patch");
        // dB_i = H on the patch (the patch is boundary-closed, so the
        // coboundary of the restriction agrees with the restriction of dB_i).
        DiscreteForm dBi = form_d(model, B[i]);
        if (n + 1 < static_cast<int>(patch.cells.size())) {
            for (int cell : patch.cells[n + 1])
                GC_CHECK(map_value(dBi.values, cell) == map_value(H.values, cell),
                         "dB = H fails on patch ", i, " at cell ", cell);
        }
        ValueMap vals;
        for (const auto& [cell, v] : B[i].values)
            if (v != 0) vals[cell] = v;
        if (!vals.empty()) Bc.entries[{i}] = std::move(vals);
    }

    DeligneCochain c = cochain_zero(n + 2, n);
    accumulate_part(c, 1, 1, n,
                    cech_scale(Rational(-1), cech_delta(model, Bc)));
    accumulate_part(c, 2, 0, n,
                    cech_add(cech_Delta(model, Bc),
                             restrict_to_singletons(model, 2, rho)));
    cochain_cleanup(c);
    return c;
}

// ---------------------------------------------------------------------------
// total complex and the multiplicative class
// ---------------------------------------------------------------------------

TotalCochain total_add(const TotalCochain& a, const TotalCochain& b) {
    GC_CHECK(a.degree == b.degree, "total_add: mismatched degree");
    TotalCochain out = a;
    for (const auto& [key, part] : b.parts) {
        auto it = out.parts.find(key);
        if (it == out.parts.end()) out.parts.emplace(key, part);
        else it->second = cech_add(it->second, part);
    }
    for (auto it = out.parts.begin(); it != out.parts.end();) {
        cech_cleanup(it->second);
        if (it->second.entries.empty()) it = out.parts.erase(it); else ++it;
    }
    return out;
}

TotalCochain total_negate(const TotalCochain& a) {
    TotalCochain out;
    out.degree = a.degree;
    for (const auto& [key, part] : a.parts)
        out.parts.emplace(key, cech_scale(Rational(-1), part));
    return out;
}

TotalCochain total_D(const SimplicialGroupModel& model, const TotalCochain& t) {
    TotalCochain out;
    out.degree = t.degree + 1;
    auto add = [&out](int q, int p, CechCochain cc) {
        if (cc.entries.empty()) return;
        auto key = std::make_pair(q, p);
        auto it = out.parts.find(key);
        if (it == out.parts.end()) out.parts.emplace(key, std::move(cc));
        else it->second = cech_add(it->second, cc);
    };
    for (const auto& [key, part] : t.parts) {
        int q = key.first, p = key.second;
        Rational sq((q % 2 == 0) ? 1 : -1);
        add(q, p + 1, cech_scale(sq, cech_delta(model, part)));
        if (q < model.levels()) add(q + 1, p, cech_Delta(model, part));
    }
    for (auto it = out.parts.begin(); it != out.parts.end();) {
        cech_cleanup(it->second);
        if (it->second.entries.empty()) it = out.parts.erase(it); else ++it;
    }
    return out;
}

bool total_is_zero(const TotalCochain& t) {
    for (const auto& [key, part] : t.parts)
        for (const auto& [tuple, vals] : part.entries)
            for (const auto& [cell, v] : vals)
                if (v != 0) return false;
    return true;
}

bool total_is_integer(const SimplicialGroupModel& model, const TotalCochain& t) {
    for (const auto& [key, part] : t.parts) {
        GC_CHECK(part.form == 0, "integer test expects vertex-valued layers");
        if (!cech_is_trivial(model, part)) return false;
    }
    return true;
}

MultiplicativeClass mc_class(const SimplicialGroupModel& model,
                             const DeligneCochain& c) {
    GC_CHECK(c.degree == c.truncation + 1,
             "the multiplicative class needs a degree-(n+1) cochain");
    CocycleReport rep = is_cocycle(model, c);
    GC_CHECK(rep.ok, "mc_class: input is not a cocycle (",
             rep.residuals.empty() ? "" : rep.residuals.front(), ")");

    // Lift each U(1) layer by reading its stored representative as a real
    // cochain.  Any other representative differs by locally constant integers
    // and moves kappa by an exact integer coboundary.
    int m = c.degree;
    std::map<int, CechCochain> lifts;
    for (int q = 1; q <= std::min(m, model.levels()); ++q)
        lifts.emplace(q, c.part_or_zero(q, m - q, 0));

    MultiplicativeClass out;
    out.kappa.degree = m + 1;
    for (int q = 1; q <= std::min(m + 1, model.levels()); ++q) {
        int p = m + 1 - q;
        CechCochain acc;
        acc.level = q;
        acc.cech = p;
        acc.form = 0;
        if (q >= 2 && lifts.count(q - 1))
            acc = cech_add(acc, cech_Delta(model, lifts.at(q - 1)));
        if (lifts.count(q)) {
            Rational sq((q % 2 == 0) ? 1 : -1);
            acc = cech_add(acc, cech_scale(sq, cech_delta(model, lifts.at(q))));
        }
        if (c.truncation == 0 && q == 2 && c.has_rho)
            acc = cech_add(acc,
                           cech_scale(Rational(-1),
                                      restrict_to_singletons(model, 2, c.rho)));
        if (!acc.entries.empty()) out.kappa.parts[{q, p}] = std::move(acc);
    }
    out.is_integer = total_is_integer(model, out.kappa);
    out.is_closed = total_is_zero(total_D(model, out.kappa));
    return out;
}

// ---------------------------------------------------------------------------
// curvature projection
// ---------------------------------------------------------------------------

OmegaProjection omega_projection(const SimplicialGroupModel& model,
                                 const DeligneCochain& c) {
    GC_CHECK(c.degree == c.truncation + 1,
             "the curvature projection needs a degree-(n+1) cochain");
    int n = c.truncation;
    OmegaProjection out;
    out.H = form_zero(1, n + 1);
    out.rho = c.has_rho ? c.rho : form_zero(2, n);

    const CellComplex& K1 = model.complex(1);
    if (n + 1 <= K1.dim()) {
        CechCochain top = c.part_or_zero(1, 0, n);
        const Cover& cov = model.cover(1);
        std::map<int, Rational> assigned;
        std::map<int, int> assigner;
        for (int i = 0; i < static_cast<int>(cov.patches.size()); ++i) {
            const ValueMap* vals = nullptr;
            auto it = top.entries.find({i});
            if (it != top.entries.end()) vals = &it->second;
            const Patch& patch = cov.patches[i];
            if (n + 1 >= static_cast<int>(patch.cells.size())) continue;
            for (int tau : patch.cells[n + 1]) {
                Rational val(0);
                if (vals) {
                    for (const auto& [b, s] : K1.boundary[n + 1][tau]) {
                        auto vit = vals->find(b);
                        if (vit != vals->end()) val += s * vit->second;
                    }
                }
                auto ait = assigned.find(tau);
                if (ait == assigned.end()) {
                    assigned[tau] = val;
                    assigner[tau] = i;
                } else if (ait->second != val) {
                    out.overlaps_consistent = false;
                    std::ostringstream os;
                    os << "curvature disagrees on cell " << tau << ": patch "
                       << assigner[tau] << " vs patch " << i;
                    out.issues.push_back(os.str());
                }
            }
        }
        out.H.values = std::move(assigned);
        map_cleanup(out.H.values);
    }

    out.dH_zero = form_is_zero(form_d(model, out.H));
    if (!out.dH_zero) out.issues.push_back("dH != 0");
    if (model.levels() >= 2) {
        out.delta_H_matches_d_rho =
            form_equal(form_delta(model, out.H), form_d(model, out.rho));
        if (!out.delta_H_matches_d_rho) out.issues.push_back("Delta H != d rho");
    }
    if (model.levels() >= 3) {
        out.rho_delta_closed = form_is_zero(form_delta(model, out.rho));
        if (!out.rho_delta_closed) out.issues.push_back("Delta rho != 0");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Delta-kernel by exact elimination
// ---------------------------------------------------------------------------

std::vector<DiscreteForm> delta_kernel(const SimplicialGroupModel& model,
                                       int level, int degree,
                                       bool also_d_closed) {
    int q = level;
    GC_CHECK(q + 1 <= model.levels(), "delta_kernel: level ", q + 1,
             " not modelled");
    const CellComplex& Kq = model.complex(q);
    const CellComplex& Kq1 = model.complex(q + 1);
    int ncols = Kq.cell_count(degree);
    int delta_rows = Kq1.cell_count(degree);

    // columns of the stacked constraint matrix [Delta; d], one per source cell
    std::vector<std::map<int, Rational>> cols(ncols);
    if (degree <= Kq1.dim()) {
        for (int sigma = 0; sigma < delta_rows; ++sigma) {
            for (int i = 0; i <= q + 1; ++i) {
                int sign = (i % 2 == 0) ? 1 : -1;
                for (const auto& [target, coef] :
                     chain_image(model.face(q + 1, i), degree, sigma))
                    cols[target][sigma] += Rational(sign * coef);
            }
        }
    }
    if (also_d_closed && degree + 1 <= Kq.dim()) {
        for (int tau = 0; tau < Kq.cell_count(degree + 1); ++tau)
            for (const auto& [b, s] : Kq.boundary[degree + 1][tau])
                cols[b][delta_rows + tau] += s;
    }

    struct PivotColumn {
        std::map<int, Rational> rows;   // normalized: leading value 1
        std::map<int, Rational> combo;  // expression in source cells
    };
    std::map<int, PivotColumn> pivots;  // leading row -> column
    std::vector<DiscreteForm> kernel;

    for (int cidx = 0; cidx < ncols; ++cidx) {
        std::map<int, Rational> rows = std::move(cols[cidx]);
        map_cleanup(rows);
        std::map<int, Rational> combo;
        combo[cidx] = 1;
        while (!rows.empty()) {
            auto lead = rows.begin();
            auto pit = pivots.find(lead->first);
            if (pit == pivots.end()) break;
            Rational f = lead->second;
            map_add_scaled(rows, pit->second.rows, -f);
            map_add_scaled(combo, pit->second.combo, -f);
            map_cleanup(rows);
        }
        if (rows.empty()) {
            DiscreteForm v = form_zero(q, degree);
            v.values = std::move(combo);
            map_cleanup(v.values);
            kernel.push_back(std::move(v));
        } else {
            int lead_row = rows.begin()->first;
            Rational lead = rows.begin()->second;
            for (auto& [r, val] : rows) val /= lead;
            for (auto& [cell, val] : combo) val /= lead;
            map_cleanup(combo);
            pivots.emplace(lead_row,
                           PivotColumn{std::move(rows), std::move(combo)});
        }
    }
    return kernel;
}

// ---------------------------------------------------------------------------
// projective homomorphisms
// ---------------------------------------------------------------------------

ProjectiveHomResult verify_projective_hom(
    const std::function<std::complex<double>(const GroupElement&)>& g,
    const std::function<double(const GroupElement&, const GroupElement&)>& rho,
    GroupTag tag, int ambient, int samples, unsigned seed, double tol) {
    ProjectiveHomResult out;
    Rng rng(seed);
    for (int s = 0; s < samples; ++s) {
        GroupElement x = random_group_element(tag, ambient, rng);
        GroupElement y = random_group_element(tag, ambient, rng);
        GroupElement z = random_group_element(tag, ambient, rng);
        double d = rho(y, z) - rho(group_mul(x, y), z) +
                   rho(x, group_mul(y, z)) - rho(x, y);
        out.cocycle_defect = std::max(out.cocycle_defect, std::abs(d));
    }
    GC_CHECK(out.cocycle_defect <= tol,
             "rho fails the 2-cocycle identity at sampled triples (defect ",
             out.cocycle_defect, ")");
    for (int s = 0; s < samples; ++s) {
        GroupElement x = random_group_element(tag, ambient, rng);
        GroupElement y = random_group_element(tag, ambient, rng);
        std::complex<double> lhs = g(x) * g(y);
        std::complex<double> rhs =
            g(group_mul(x, y)) *
            std::exp(std::complex<double>(0.0, kTwoPi * rho(x, y)));
        out.hom_defect = std::max(out.hom_defect, std::abs(lhs - rhs));
    }
    out.ok = out.hom_defect <= tol;
    return out;
}

// ---------------------------------------------------------------------------
// cochain files
// ---------------------------------------------------------------------------

namespace {

void expect_token(std::istream& is, const std::string& expected) {
    std::string tok;
    GC_CHECK(static_cast<bool>(is >> tok), "cochain file ends before '",
             expected, "'");
    GC_CHECK(tok == expected, "cochain file: expected '", expected, "', got '",
             tok, "'");
}

template <typename T>
T read_value(std::istream& is, const char* what) {
    T v{};
    GC_CHECK(static_cast<bool>(is >> v), "cochain file: cannot read ", what);
    return v;
}

Rational read_rational(std::istream& is) {
    std::string tok;
    GC_CHECK(static_cast<bool>(is >> tok), "cochain file: missing value");
    try {
        Rational v(tok);
        v.canonicalize();
        return v;
    } catch (const std::invalid_argument&) {
        GC_CHECK(false, "cochain file: malformed rational '", tok, "'");
    }
    return Rational(0);
}

}  // namespace

void write_cochain(std::ostream& os, const DeligneCochain& c) {
    os << "gerbecalc-cochain 1\n";
    os << "degree " << c.degree << " truncation " << c.truncation << " parts "
       << c.parts.size() << " rho " << (c.has_rho ? 1 : 0) << "\n";
    for (const auto& [key, part] : c.parts) {
        os << "part " << key[0] << ' ' << key[1] << ' ' << key[2] << " tuples "
           << part.entries.size() << "\n";
        for (const auto& [tuple, vals] : part.entries) {
            os << "tuple " << tuple.size();
            for (int id : tuple) os << ' ' << id;
            os << " cells " << vals.size() << "\n";
            for (const auto& [cell, v] : vals)
                os << cell << ' ' << v.get_str() << "\n";
        }
    }
    if (c.has_rho) {
        os << "rho " << c.rho.level << ' ' << c.rho.degree << ' '
           << c.rho.values.size() << "\n";
        for (const auto& [cell, v] : c.rho.values)
            os << cell << ' ' << v.get_str() << "\n";
    }
    os << "endcochain\n";
}

DeligneCochain read_cochain(std::istream& is) {
    expect_token(is, "gerbecalc-cochain");
    int version = read_value<int>(is, "version");
    GC_CHECK(version == 1, "unsupported cochain file version ", version);
    expect_token(is, "degree");
    DeligneCochain c;
    c.degree = read_value<int>(is, "degree");
    expect_token(is, "truncation");
    c.truncation = read_value<int>(is, "truncation");
    expect_token(is, "parts");
    int nparts = read_value<int>(is, "part count");
    expect_token(is, "rho");
    int has_rho = read_value<int>(is, "rho flag");
    for (int pi = 0; pi < nparts; ++pi) {
        expect_token(is, "part");
        int q = read_value<int>(is, "part level");
        int p = read_value<int>(is, "part Cech degree");
        int k = read_value<int>(is, "part form degree");
        expect_token(is, "tuples");
        int ntuples = read_value<int>(is, "tuple count");
        CechCochain part;
        part.level = q;
        part.cech = p;
        part.form = k;
        for (int ti = 0; ti < ntuples; ++ti) {
            expect_token(is, "tuple");
            int len = read_value<int>(is, "tuple length");
            GC_CHECK(len == p + 1, "tuple length ", len, " in a Cech ", p,
                     " component");
            std::vector<int> tuple(len);
            for (int& id : tuple) id = read_value<int>(is, "patch id");
            GC_CHECK(std::is_sorted(tuple.begin(), tuple.end()) &&
                         std::adjacent_find(tuple.begin(), tuple.end()) ==
                             tuple.end(),
                     "tuple ids must be strictly ascending");
            expect_token(is, "cells");
            int ncells = read_value<int>(is, "cell count");
            ValueMap vals;
            for (int ci = 0; ci < ncells; ++ci) {
                int cell = read_value<int>(is, "cell id");
                vals[cell] = read_rational(is);
            }
            part.entries[tuple] = std::move(vals);
        }
        GC_CHECK(c.parts.emplace(std::array<int, 3>{q, p, k}, std::move(part))
                     .second,
                 "duplicate component (", q, ",", p, ",", k, ")");
    }
    if (has_rho) {
        expect_token(is, "rho");
        c.has_rho = true;
        c.rho.level = read_value<int>(is, "rho level");
        c.rho.degree = read_value<int>(is, "rho degree");
        int count = read_value<int>(is, "rho cell count");
        for (int ci = 0; ci < count; ++ci) {
            int cell = read_value<int>(is, "rho cell id");
            c.rho.values[cell] = read_rational(is);
        }
    }
    expect_token(is, "endcochain");
    return c;
}

}  // namespace gerbecalc
