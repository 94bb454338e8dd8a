#include "gerbecalc/forms.hpp"

#include <algorithm>
#include <map>

namespace gerbecalc {

// --- coefficient atoms --------------------------------------------------------

double CoefAtom::eval(const Eigen::VectorXd& x) const {
    double v = c;
    for (const auto& m : monos) v *= std::pow(x[m.var], m.power);
    for (const auto& t : trigs) {
        const double a = kTwoPi * t.freq * x[t.var] + t.phase;
        v *= t.is_sin ? std::sin(a) : std::cos(a);
    }
    return v;
}

std::vector<CoefAtom> CoefAtom::partial(int v) const {
    // Product rule across the monomial and trig factors that involve x_v.
    std::vector<CoefAtom> out;
    for (std::size_t i = 0; i < monos.size(); ++i) {
        if (monos[i].var != v || monos[i].power == 0) continue;
        CoefAtom a = *this;
        a.c *= monos[i].power;
        a.monos[i].power -= 1;
        if (a.monos[i].power == 0) a.monos.erase(a.monos.begin() + i);
        out.push_back(std::move(a));
    }
    for (std::size_t i = 0; i < trigs.size(); ++i) {
        if (trigs[i].var != v) continue;
        CoefAtom a = *this;
        a.c *= kTwoPi * trigs[i].freq;
        if (trigs[i].is_sin) {
            a.trigs[i].is_sin = false;  // sin' = cos
        } else {
            a.trigs[i].is_sin = true;  // cos' = -sin
            a.c = -a.c;
        }
        out.push_back(std::move(a));
    }
    return out;
}

ChartFormData ChartFormData::exterior_derivative() const {
    ChartFormData d = *this;
    d.degree = degree + 1;
    d.terms.clear();
    const int n = chart_dim(chart_tag, chart_ambient);
    for (const auto& term : terms) {
        for (int v = 0; v < n; ++v) {
            if (std::find(term.dxs.begin(), term.dxs.end(), v) != term.dxs.end())
                continue;  // dx_v ^ dx_v = 0
            for (CoefAtom a : term.coef.partial(v)) {
                // Sort v into the index list; each transposition flips sign.
                ChartTerm t;
                t.basis = term.basis;
                t.dxs = term.dxs;
                int pos = 0;
                while (pos < static_cast<int>(t.dxs.size()) && t.dxs[pos] < v)
                    ++pos;
                t.dxs.insert(t.dxs.begin() + pos, v);
                if (pos % 2 == 1) a.c = -a.c;
                t.coef = std::move(a);
                d.terms.push_back(std::move(t));
            }
        }
    }
    return d;
}

// --- constructors ------------------------------------------------------------

static std::shared_ptr<FormExpr> make(FormKind kind) {
    auto f = std::make_shared<FormExpr>();
    f->kind = kind;
    return f;
}

FormPtr theta_left(int slot, int arity) {
    auto f = make(FormKind::ThetaLeft);
    f->degree = 1;
    f->arity = arity;
    f->slot = slot;
    f->algebra_valued = true;
    GC_CHECK(0 <= slot && slot < arity, "theta_left: slot out of range");
    return f;
}

FormPtr theta_right(int slot, int arity) {
    auto f = make(FormKind::ThetaRight);
    f->degree = 1;
    f->arity = arity;
    f->slot = slot;
    f->algebra_valued = true;
    GC_CHECK(0 <= slot && slot < arity, "theta_right: slot out of range");
    return f;
}

FormPtr constant_algebra(const AlgebraVector& x, int arity) {
    auto f = make(FormKind::ConstantAlgebra);
    f->degree = 0;
    f->arity = arity;
    f->algebra_valued = true;
    f->constant = x.m;
    return f;
}

FormPtr wedge(const FormPtr& a, const FormPtr& b) {
    GC_CHECK(a->arity == b->arity, "wedge: arity mismatch");
    GC_CHECK(!(a->algebra_valued && b->algebra_valued),
             "wedge: cannot multiply two algebra-valued forms "
             "(use bracket_wedge or pairing_wedge)");
    auto f = make(FormKind::Wedge);
    f->degree = a->degree + b->degree;
    f->arity = a->arity;
    f->algebra_valued = a->algebra_valued || b->algebra_valued;
    f->children = {a, b};
    return f;
}

FormPtr bracket_wedge(const FormPtr& a, const FormPtr& b) {
    GC_CHECK(a->arity == b->arity, "bracket_wedge: arity mismatch");
    GC_CHECK(a->algebra_valued && b->algebra_valued,
             "bracket_wedge: children must be algebra-valued");
    auto f = make(FormKind::BracketWedge);
    f->degree = a->degree + b->degree;
    f->arity = a->arity;
    f->algebra_valued = true;
    f->children = {a, b};
    return f;
}

FormPtr pairing_wedge(const InvariantPairing& p, const FormPtr& a,
                      const FormPtr& b) {
    GC_CHECK(a->arity == b->arity, "pairing_wedge: arity mismatch");
    GC_CHECK(a->algebra_valued && b->algebra_valued,
             "pairing_wedge: children must be algebra-valued");
    auto f = make(FormKind::PairingWedge);
    f->degree = a->degree + b->degree;
    f->arity = a->arity;
    f->pairing = p;
    f->children = {a, b};
    return f;
}

FormPtr bracket_pairing(const InvariantPairing& p, const FormPtr& a,
                        const FormPtr& b, const FormPtr& c) {
    GC_CHECK(a->arity == b->arity && b->arity == c->arity,
             "bracket_pairing: arity mismatch");
    GC_CHECK(a->algebra_valued && b->algebra_valued && c->algebra_valued,
             "bracket_pairing: children must be algebra-valued");
    auto f = make(FormKind::BracketPairing);
    f->degree = a->degree + b->degree + c->degree;
    f->arity = a->arity;
    f->pairing = p;
    f->children = {a, b, c};
    return f;
}

FormPtr form_sum(const std::vector<std::pair<double, FormPtr>>& terms) {
    GC_CHECK(!terms.empty(), "form_sum: need at least one term for shape");
    auto f = make(FormKind::Sum);
    f->degree = terms[0].second->degree;
    f->arity = terms[0].second->arity;
    f->algebra_valued = terms[0].second->algebra_valued;
    for (const auto& [c, t] : terms) {
        GC_CHECK(t->degree == f->degree && t->arity == f->arity &&
                     t->algebra_valued == f->algebra_valued,
                 "form_sum: mixed term shapes");
        f->coefs.push_back(c);
        f->children.push_back(t);
    }
    return f;
}

FormPtr form_add(const FormPtr& a, const FormPtr& b) {
    return form_sum({{1.0, a}, {1.0, b}});
}

FormPtr form_scale(double c, const FormPtr& f) { return form_sum({{c, f}}); }

FormPtr form_pullback(const IndexMap& map, const FormPtr& f) {
    GC_CHECK(map.arity_out == f->arity,
             "form_pullback: map output arity must match form arity");
    auto g = make(FormKind::Pullback);
    g->degree = f->degree;
    g->arity = map.arity_in;
    g->algebra_valued = f->algebra_valued;
    g->map = map;
    g->children = {f};
    return g;
}

FormPtr ext_d(const FormPtr& f, double step, bool richardson) {
    auto g = make(FormKind::ExtD);
    g->degree = f->degree + 1;
    g->arity = f->arity;
    g->algebra_valued = f->algebra_valued;
    g->fd_step = step;
    g->fd_richardson = richardson;
    g->children = {f};
    return g;
}

FormPtr adjoint_conj(int slot, const FormPtr& f) {
    GC_CHECK(f->algebra_valued, "adjoint_conj: child must be algebra-valued");
    auto g = make(FormKind::AdjointConj);
    g->degree = f->degree;
    g->arity = f->arity;
    g->algebra_valued = true;
    g->slot = slot;
    g->children = {f};
    GC_CHECK(0 <= slot && slot < f->arity, "adjoint_conj: slot out of range");
    return g;
}

FormPtr chart_form(const std::shared_ptr<const ChartFormData>& data, int slot,
                   int arity) {
    auto g = make(FormKind::ChartForm);
    g->degree = data->degree;
    g->arity = arity;
    g->algebra_valued = data->algebra_valued;
    g->slot = slot;
    g->chart = data;
    GC_CHECK(0 <= slot && slot < arity, "chart_form: slot out of range");
    return g;
}

FormPtr custom_real_form(
    int degree, int arity,
    std::function<double(const std::vector<GroupElement>&, const Frame&)> fn) {
    auto g = make(FormKind::CustomReal);
    g->degree = degree;
    g->arity = arity;
    g->custom = std::move(fn);
    return g;
}

// --- simplicial coboundary -----------------------------------------------------

namespace {

struct LinearTerm {
    double coef;
    IndexMap map;
    FormPtr core;
};

// Flatten f into sum of pullbacks of non-pullback, non-sum cores.
void collect_terms(const FormPtr& f, double coef, const IndexMap& outer,
                   std::vector<LinearTerm>& out) {
    switch (f->kind) {
        case FormKind::Sum:
            for (std::size_t i = 0; i < f->children.size(); ++i)
                collect_terms(f->children[i], coef * f->coefs[i], outer, out);
            return;
        case FormKind::Pullback:
            // f(x) = core(map(outer(x)))
            collect_terms(f->children[0], coef, compose_maps(outer, f->map),
                          out);
            return;
        default:
            out.push_back({coef, outer, f});
            return;
    }
}

}  // namespace

FormPtr simplicial_delta(const FormPtr& f) {
    const int q = f->arity;
    std::vector<LinearTerm> base;
    collect_terms(f, 1.0, identity_map(q), base);

    std::vector<LinearTerm> expanded;
    for (int k = 0; k <= q + 1; ++k) {
        const IndexMap face = face_map(q + 1, k);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        for (const auto& t : base)
            expanded.push_back({sign * t.coef, compose_maps(face, t.map), t.core});
    }

    // Collect terms with identical composed maps and cores; simplicial
    // identities make the second application cancel pairwise and exactly.
    using Key = std::pair<const FormExpr*,
                          std::vector<std::vector<std::pair<int, bool>>>>;
    std::map<Key, std::pair<double, const LinearTerm*>> acc;
    for (const auto& t : expanded) {
        Key key{t.core.get(), t.map.blocks};
        auto it = acc.find(key);
        if (it == acc.end())
            acc.emplace(key, std::make_pair(t.coef, &t));
        else
            it->second.first += t.coef;
    }

    std::vector<std::pair<double, FormPtr>> terms;
    for (const auto& [key, val] : acc) {
        if (val.first == 0.0) continue;
        terms.emplace_back(val.first,
                           form_pullback(val.second->map, val.second->core));
    }

    if (terms.empty()) {
        // Identically zero: an empty sum of the right shape.
        auto z = make(FormKind::Sum);
        z->degree = f->degree;
        z->arity = q + 1;
        z->algebra_valued = f->algebra_valued;
        return z;
    }
    return form_sum(terms);
}

// --- canonical forms ------------------------------------------------------------

FormPtr eta_form(const InvariantPairing& p, int slot, int arity) {
    auto th = theta_left(slot, arity);
    // (1/6)<theta ^ [theta ^ theta]> with [A ^ A](u,v) = [A(u), A(v)];
    // the all-shuffles bracket pairing double counts the bracket, hence 1/12.
    return form_scale(1.0 / 12.0, bracket_pairing(p, th, th, th));
}

FormPtr rho_form(const InvariantPairing& p, int arity, int slot1, int slot2) {
    return form_scale(
        0.5, pairing_wedge(p, theta_left(slot1, arity), theta_right(slot2, arity)));
}

// --- evaluation -------------------------------------------------------------------

namespace {

// Lazy value: Zero carries no shape so empty sums work for both kinds.
struct Value {
    enum Kind : std::uint8_t { Zero, Real, Matrix } kind = Zero;
    double s = 0.0;
    Mat m;

    static Value zero() { return {}; }
    static Value real(double x) {
        Value v;
        v.kind = Real;
        v.s = x;
        return v;
    }
    static Value matrix(Mat x) {
        Value v;
        v.kind = Matrix;
        v.m = std::move(x);
        return v;
    }

    void add(const Value& o, double c = 1.0) {
        if (o.kind == Zero || c == 0.0) return;
        if (kind == Zero) {
            *this = o;
            if (c != 1.0) scale(c);
            return;
        }
        GC_CHECK(kind == o.kind, "form evaluation: mixed value kinds");
        if (kind == Real)
            s += c * o.s;
        else
            m += c * o.m;
    }
    void scale(double c) {
        if (kind == Real) s *= c;
        if (kind == Matrix) m *= c;
    }
};

// Call fn(first, rest, sign) for every (p, n-p)-shuffle of {0..n-1}.
template <class Fn>
void for_each_split(const std::vector<int>& idx, int p, const Fn& fn) {
    const int n = static_cast<int>(idx.size());
    std::vector<int> sel(p);
    std::vector<int> first(p), rest(n - p);
    std::function<void(int, int)> rec = [&](int start, int chosen) {
        if (chosen == p) {
            int sign = 1;
            // Parity of moving the selected ascending positions to the front.
            for (int t = 0; t < p; ++t)
                if ((sel[t] - t) % 2 == 1) sign = -sign;
            int fi = 0, ri = 0, si = 0;
            for (int i = 0; i < n; ++i) {
                if (si < p && sel[si] == i) {
                    first[fi++] = idx[i];
                    ++si;
                } else {
                    rest[ri++] = idx[i];
                }
            }
            fn(first, rest, sign);
            return;
        }
        if (n - start < p - chosen) return;
        for (int i = start; i <= n - (p - chosen); ++i) {
            sel[chosen] = i;
            rec(i + 1, chosen + 1);
        }
    };
    rec(0, 0);
}

struct Evaluator {
    // vs: pointers to the frame tuples, one per form argument.
    Value ev(const FormExpr* f, const std::vector<GroupElement>& pt,
             const std::vector<const TangentTuple*>& vs) {
        GC_CHECK(static_cast<int>(vs.size()) == f->degree,
                 "form evaluation: argument count != degree");
        switch (f->kind) {
            case FormKind::ThetaLeft:
                return Value::matrix(left_mc(pt[f->slot], (*vs[0])[f->slot]).m);
            case FormKind::ThetaRight:
                return Value::matrix(right_mc(pt[f->slot], (*vs[0])[f->slot]).m);
            case FormKind::ConstantAlgebra:
                return Value::matrix(f->constant);
            case FormKind::Wedge:
            case FormKind::BracketWedge:
            case FormKind::PairingWedge:
                return ev_binary(f, pt, vs);
            case FormKind::BracketPairing:
                return ev_triple(f, pt, vs);
            case FormKind::Sum: {
                Value acc;
                for (std::size_t i = 0; i < f->children.size(); ++i)
                    acc.add(ev(f->children[i].get(), pt, vs), f->coefs[i]);
                return acc;
            }
            case FormKind::Pullback:
                return ev_pullback(f, pt, vs);
            case FormKind::ExtD:
                return ev_ext_d(f, pt, vs);
            case FormKind::AdjointConj: {
                Value v = ev(f->children[0].get(), pt, vs);
                if (v.kind == Value::Zero) return v;
                const Mat gi = group_inv(pt[f->slot]).m;
                return Value::matrix(gi * v.m * pt[f->slot].m);
            }
            case FormKind::ChartForm:
                return ev_chart(f, pt, vs);
            case FormKind::CustomReal: {
                Frame frame;
                frame.reserve(vs.size());
                for (const auto* t : vs) frame.push_back(*t);
                return Value::real(f->custom(pt, frame));
            }
        }
        detail::fail("form evaluation: bad node kind");
    }

    Value ev_binary(const FormExpr* f, const std::vector<GroupElement>& pt,
                    const std::vector<const TangentTuple*>& vs) {
        const FormExpr* a = f->children[0].get();
        const FormExpr* b = f->children[1].get();
        std::vector<int> idx(vs.size());
        for (std::size_t i = 0; i < vs.size(); ++i) idx[i] = static_cast<int>(i);
        Value acc;
        for_each_split(idx, a->degree, [&](const std::vector<int>& ia,
                                           const std::vector<int>& ib,
                                           int sign) {
            Value va = ev(a, pt, select(vs, ia));
            Value vb = ev(b, pt, select(vs, ib));
            if (va.kind == Value::Zero || vb.kind == Value::Zero) return;
            switch (f->kind) {
                case FormKind::Wedge:
                    if (va.kind == Value::Real && vb.kind == Value::Real)
                        acc.add(Value::real(va.s * vb.s), sign);
                    else if (va.kind == Value::Real)
                        acc.add(Value::matrix(va.s * vb.m), sign);
                    else
                        acc.add(Value::matrix(vb.s * va.m), sign);
                    break;
                case FormKind::BracketWedge:
                    acc.add(Value::matrix(va.m * vb.m - vb.m * va.m), sign);
                    break;
                case FormKind::PairingWedge:
                    acc.add(Value::real(f->pairing.eval(va.m, vb.m)), sign);
                    break;
                default:
                    detail::fail("ev_binary: bad kind");
            }
        });
        return acc;
    }

    Value ev_triple(const FormExpr* f, const std::vector<GroupElement>& pt,
                    const std::vector<const TangentTuple*>& vs) {
        const FormExpr* a = f->children[0].get();
        const FormExpr* b = f->children[1].get();
        const FormExpr* c = f->children[2].get();
        std::vector<int> idx(vs.size());
        for (std::size_t i = 0; i < vs.size(); ++i) idx[i] = static_cast<int>(i);
        Value acc;
        for_each_split(
            idx, a->degree,
            [&](const std::vector<int>& ia, const std::vector<int>& rest,
                int sign1) {
                Value va = ev(a, pt, select(vs, ia));
                if (va.kind == Value::Zero) return;
                for_each_split(
                    rest, b->degree,
                    [&](const std::vector<int>& ib, const std::vector<int>& ic,
                        int sign2) {
                        Value vb = ev(b, pt, select(vs, ib));
                        Value vc = ev(c, pt, select(vs, ic));
                        if (vb.kind == Value::Zero || vc.kind == Value::Zero)
                            return;
                        const Mat br = vb.m * vc.m - vc.m * vb.m;
                        acc.add(Value::real(f->pairing.eval(va.m, br)),
                                sign1 * sign2);
                    });
            });
        return acc;
    }

    Value ev_pullback(const FormExpr* f, const std::vector<GroupElement>& pt,
                      const std::vector<const TangentTuple*>& vs) {
        const std::vector<GroupElement> qt = apply_point(f->map, pt);
        std::vector<TangentTuple> pushed;
        pushed.reserve(vs.size());
        for (const auto* v : vs) pushed.push_back(apply_tangent(f->map, pt, *v));
        std::vector<const TangentTuple*> qs;
        qs.reserve(pushed.size());
        for (const auto& t : pushed) qs.push_back(&t);
        return ev(f->children[0].get(), qt, qs);
    }

    // d in exponential normal coordinates.  Coordinate frames are transported
    // with the derivative-of-exp series
    //   w_i(s)_r = g_r exp(s X_j_r) * (X_i - (s/2)[X_j, X_i]
    //              + (s^2/6)[X_j,[X_j, X_i]] - (s^3/24)[X_j,[X_j,[X_j, X_i]]])
    // so the frames commute to O(s^4) and no bracket correction terms appear.
    Value ev_ext_d(const FormExpr* f, const std::vector<GroupElement>& pt,
                   const std::vector<const TangentTuple*>& vs) {
        const FormExpr* child = f->children[0].get();
        const int k1 = f->degree;  // number of frame vectors (child degree + 1)
        const int slots = static_cast<int>(pt.size());

        // Algebra components of each frame vector at each slot.
        std::vector<std::vector<Mat>> X(k1, std::vector<Mat>(slots));
        for (int i = 0; i < k1; ++i)
            for (int r = 0; r < slots; ++r)
                X[i][r] = left_mc(pt[r], (*vs[i])[r]).m;

        auto eval_shifted = [&](int j, double s) -> Value {
            std::vector<GroupElement> qt(slots);
            std::vector<TangentTuple> w(k1, TangentTuple(slots));
            for (int r = 0; r < slots; ++r) {
                const Mat A = s * X[j][r];
                qt[r] = group_mul(pt[r], group_exp({pt[r].tag, A}));
                for (int i = 0; i < k1; ++i) {
                    if (i == j) continue;
                    Mat B = X[i][r];
                    Mat c1 = A * B - B * A;
                    Mat c2 = A * c1 - c1 * A;
                    Mat c3 = A * c2 - c2 * A;
                    w[i][r] = qt[r].m *
                              (B - 0.5 * c1 + (1.0 / 6.0) * c2 - (1.0 / 24.0) * c3);
                }
            }
            std::vector<const TangentTuple*> args;
            args.reserve(k1 - 1);
            for (int i = 0; i < k1; ++i)
                if (i != j) args.push_back(&w[i]);
            return ev(child, qt, args);
        };

        auto central = [&](int j, double h) -> Value {
            Value plus = eval_shifted(j, h);
            Value minus = eval_shifted(j, -h);
            Value d;
            d.add(plus, 1.0 / (2.0 * h));
            d.add(minus, -1.0 / (2.0 * h));
            return d;
        };

        Value acc;
        const double h = f->fd_step;
        for (int j = 0; j < k1; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            if (f->fd_richardson) {
                Value d1 = central(j, h);
                Value d2 = central(j, h / 2.0);
                acc.add(d2, sign * 4.0 / 3.0);
                acc.add(d1, sign * -1.0 / 3.0);
            } else {
                acc.add(central(j, h), sign);
            }
        }
        return acc;
    }

    Value ev_chart(const FormExpr* f, const std::vector<GroupElement>& pt,
                   const std::vector<const TangentTuple*>& vs) {
        const ChartFormData& data = *f->chart;
        const GroupElement& g = pt[f->slot];
        GC_CHECK(g.tag == data.chart_tag && g.ambient() == data.chart_ambient,
                 "chart_form: slot group does not match the chart");
        const Eigen::VectorXd x = chart_coords(g);
        const int k = f->degree;

        // dx_j(v_a) for every coordinate that appears.
        std::vector<Mat> basis;
        if (data.algebra_valued)
            basis = algebra_basis(data.value_tag, data.value_ambient);

        Value acc;
        Eigen::MatrixXd dxm(k, k);
        for (const auto& term : data.terms) {
            double c = term.coef.eval(x);
            if (c == 0.0) continue;
            if (k > 0) {
                for (int a = 0; a < k; ++a)
                    for (int b = 0; b < k; ++b)
                        dxm(a, b) = chart_dx(g, (*vs[a])[f->slot], term.dxs[b]);
                c *= dxm.determinant();
            }
            if (term.basis < 0)
                acc.add(Value::real(c));
            else
                acc.add(Value::matrix(c * basis[term.basis]));
        }
        if (acc.kind == Value::Zero && data.algebra_valued && !basis.empty())
            return Value::matrix(Mat::Zero(basis[0].rows(), basis[0].cols()));
        if (acc.kind == Value::Zero && !data.algebra_valued)
            return Value::real(0.0);
        return acc;
    }

    static std::vector<const TangentTuple*> select(
        const std::vector<const TangentTuple*>& vs, const std::vector<int>& ix) {
        std::vector<const TangentTuple*> out;
        out.reserve(ix.size());
        for (int i : ix) out.push_back(vs[i]);
        return out;
    }
};

// Lexicographic order on tangent tuples (by slot, then matrix entries).
bool tuple_less(const TangentTuple& a, const TangentTuple& b) {
    for (std::size_t s = 0; s < a.size(); ++s) {
        const Mat& x = a[s];
        const Mat& y = b[s];
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) {
                if (x(i, j).real() != y(i, j).real())
                    return x(i, j).real() < y(i, j).real();
                if (x(i, j).imag() != y(i, j).imag())
                    return x(i, j).imag() < y(i, j).imag();
            }
    }
    return false;
}

bool tuple_equal(const TangentTuple& a, const TangentTuple& b) {
    for (std::size_t s = 0; s < a.size(); ++s) {
        const Mat& x = a[s];
        const Mat& y = b[s];
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j)
                if (x(i, j).real() != y(i, j).real() ||
                    x(i, j).imag() != y(i, j).imag())
                    return false;
    }
    return true;
}

Value eval_top(const FormPtr& f, const std::vector<GroupElement>& pt,
               const Frame& frame) {
    GC_CHECK(static_cast<int>(pt.size()) == f->arity,
             "eval_form: point arity mismatch (got ", pt.size(), ", expected ",
             f->arity, ")");
    GC_CHECK(static_cast<int>(frame.size()) == f->degree,
             "eval_form: frame size must equal the form degree");
    for (const auto& t : frame)
        GC_CHECK(t.size() == pt.size(), "eval_form: tuple arity mismatch");

    // Alternation by construction: exact duplicates vanish, and the frame is
    // put into canonical order (tracking the permutation sign) so that the
    // evaluation is manifestly antisymmetric.
    const int k = static_cast<int>(frame.size());
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (tuple_equal(frame[i], frame[j])) return Value::zero();

    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return tuple_less(frame[a], frame[b]); });
    int sign = 1;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (order[i] > order[j]) sign = -sign;

    std::vector<const TangentTuple*> vs(k);
    for (int i = 0; i < k; ++i) vs[i] = &frame[order[i]];

    Evaluator e;
    Value v = e.ev(f.get(), pt, vs);
    v.scale(sign);
    return v;
}

}  // namespace

double eval_form(const FormPtr& f, const std::vector<GroupElement>& pt,
                 const Frame& frame) {
    GC_CHECK(!f->algebra_valued,
             "eval_form: form is algebra-valued, use eval_form_matrix");
    Value v = eval_top(f, pt, frame);
    return v.kind == Value::Zero ? 0.0 : v.s;
}

Mat eval_form_matrix(const FormPtr& f, const std::vector<GroupElement>& pt,
                     const Frame& frame) {
    GC_CHECK(f->algebra_valued,
             "eval_form_matrix: form is real-valued, use eval_form");
    Value v = eval_top(f, pt, frame);
    if (v.kind == Value::Zero) return Mat::Zero(0, 0);
    return v.m;
}

}  // namespace gerbecalc
