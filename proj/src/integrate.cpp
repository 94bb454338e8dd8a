#include "gerbecalc/integrate.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <thread>

namespace gerbecalc {

// ---------------------------------------------------------------------------
// Quadrature rules (barycentric nodes; weights sum to 1/dim!)
// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd bary(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

}  // namespace

QuadratureRule segment_rule_gauss3() {
    QuadratureRule r;
    r.dim = 1;
    r.order = 5;
    const double s = 0.5 * std::sqrt(0.6);
    for (double t : {0.5 - s, 0.5, 0.5 + s}) r.nodes.push_back(bary({1.0 - t, t}));
    r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    return r;
}

QuadratureRule triangle_rule_deg4() {
    QuadratureRule r;
    r.dim = 2;
    r.order = 4;
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
        const double b = 1.0 - 2.0 * a;
        r.nodes.push_back(bary({b, a, a}));
        r.nodes.push_back(bary({a, b, a}));
        r.nodes.push_back(bary({a, a, b}));
        for (int i = 0; i < 3; ++i) r.weights.push_back(0.5 * w);
    }
    return r;
}

QuadratureRule tet_rule_deg3() {
    QuadratureRule r;
    r.dim = 3;
    r.order = 3;
    r.nodes.push_back(bary({0.25, 0.25, 0.25, 0.25}));
    r.weights.push_back(-4.0 / 5.0 / 6.0);
    const double a = 1.0 / 6.0, b = 0.5;
    for (int hot = 0; hot < 4; ++hot) {
        Eigen::VectorXd n(4);
        for (int i = 0; i < 4; ++i) n[i] = (i == hot) ? b : a;
        r.nodes.push_back(n);
        r.weights.push_back(9.0 / 20.0 / 6.0);
    }
    return r;
}

// Grundmann-Moller simplex rule of degree 2s+1 on the reference tet.  The
// construction is fully rational:
//   I = sum_{i=0}^{s} (-1)^i 2^{-2s} (d+n-2i)^d / (i! (d+n-i)!)
//         sum_{|k|=s-i} f((2k+1)/(d+n-2i))
// with n = 3, d = 2s+1, k running over nonnegative multi-indices on the four
// barycentric slots.  Some weights are negative; the rule is exact on
// polynomials of degree d and the weights sum to the volume 1/6.
QuadratureRule gm_tet_rule(int s) {
    GC_CHECK(s >= 0 && s <= 6, "gm_tet_rule: order out of range");
    const int n = 3;
    const int d = 2 * s + 1;
    auto fact = [](int m) {
        double f = 1.0;
        for (int i = 2; i <= m; ++i) f *= i;
        return f;
    };
    QuadratureRule r;
    r.dim = 3;
    r.order = d;
    for (int i = 0; i <= s; ++i) {
        const double w = ((i % 2) ? -1.0 : 1.0) * std::pow(0.5, 2 * s) *
                         std::pow(d + n - 2 * i, d) /
                         (fact(i) * fact(d + n - i));
        const int total = s - i;
        for (int k0 = 0; k0 <= total; ++k0)
            for (int k1 = 0; k1 + k0 <= total; ++k1)
                for (int k2 = 0; k2 + k1 + k0 <= total; ++k2) {
                    const int k3 = total - k0 - k1 - k2;
                    Eigen::VectorXd node(4);
                    node << 2 * k0 + 1, 2 * k1 + 1, 2 * k2 + 1, 2 * k3 + 1;
                    node /= static_cast<double>(d + n - 2 * i);
                    r.nodes.push_back(node);
                    r.weights.push_back(w);
                }
    }
    return r;
}

QuadratureRule tet_rule_deg5() { return gm_tet_rule(2); }
QuadratureRule tet_rule_deg7() { return gm_tet_rule(3); }

QuadratureRule default_rule(int dim) {
    switch (dim) {
        case 1: return segment_rule_gauss3();
        case 2: return triangle_rule_deg4();
        case 3: return tet_rule_deg3();
    }
    detail::fail("default_rule: unsupported dimension ", dim);
}

// ---------------------------------------------------------------------------
// Pullback integration
// ---------------------------------------------------------------------------

namespace {

int thread_count() {
    if (const char* env = std::getenv("GERBECALC_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

// Deterministic pairwise reduction: result does not depend on how the work
// was distributed over threads.
double tree_sum(std::vector<double> v) {
    if (v.empty()) return 0.0;
    while (v.size() > 1) {
        std::vector<double> next;
        next.reserve((v.size() + 1) / 2);
        for (size_t i = 0; i + 1 < v.size(); i += 2) next.push_back(v[i] + v[i + 1]);
        if (v.size() % 2) next.push_back(v.back());
        v.swap(next);
    }
    return v[0];
}

struct CellWorker {
    const FormPtr& f;
    const GroupMesh& gm;
    const QuadratureRule& rule;
    double fd_step = 1e-5;

    // One cell: quadrature of the pulled-back form on the FD tangent frame
    // of the interpolated map. Returns the signed contribution; sets
    // `degenerate` if the frame is numerically dependent but not zero.
    double run(int cell, bool& degenerate) const {
        const auto& c = gm.mesh.cells[cell];
        const int d = gm.mesh.dim;
        // Cache the per-cell exponential coefficients.
        std::vector<GroupElement> g0(gm.arity), g0inv(gm.arity);
        std::vector<std::vector<Mat>> X(gm.arity);
        for (int slot = 0; slot < gm.arity; ++slot) {
            g0[slot] = gm.values[c.v[0]][slot];
            g0inv[slot] = group_inv(g0[slot]);
            for (int i = 1; i <= d; ++i)
                X[slot].push_back(
                    group_log(group_mul(g0inv[slot], gm.values[c.v[i]][slot]))
                        .m);
        }
        auto at = [&](const Eigen::VectorXd& t) {
            std::vector<GroupElement> pt;
            for (int slot = 0; slot < gm.arity; ++slot) {
                Mat s = Mat::Zero(gm.ambient, gm.ambient);
                for (int i = 0; i < d; ++i) s += t[i] * X[slot][i];
                pt.push_back(group_mul(g0[slot], group_exp({gm.tag, s})));
            }
            return pt;
        };
        double acc = 0.0;
        bool checked = false;
        for (size_t n = 0; n < rule.nodes.size(); ++n) {
            Eigen::VectorXd t(d);
            for (int i = 0; i < d; ++i) t[i] = rule.nodes[n][i + 1];
            const std::vector<GroupElement> pt = at(t);
            Frame frame(d);
            for (int i = 0; i < d; ++i) {
                Eigen::VectorXd tp = t, tm = t;
                tp[i] += fd_step;
                tm[i] -= fd_step;
                const auto gp = at(tp);
                const auto gmn = at(tm);
                TangentTuple tt;
                for (int slot = 0; slot < gm.arity; ++slot)
                    tt.push_back((gp[slot].m - gmn[slot].m) /
                                 (2.0 * fd_step));
                frame[i] = std::move(tt);
            }
            if (!checked) {
                checked = true;
                Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
                double scale = 0.0;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) {
                        double s = 0.0;
                        for (int slot = 0; slot < gm.arity; ++slot)
                            s += std::real(
                                (frame[i][slot].adjoint() * frame[j][slot])
                                    .trace());
                        gram(i, j) = s;
                        if (i == j) scale = std::max(scale, s);
                    }
                if (scale > 1e-24 &&
                    gram.determinant() < 1e-18 * std::pow(scale, d))
                    degenerate = true;
            }
            acc += rule.weights[n] * eval_form(f, pt, frame);
        }
        return c.sign * acc;
    }
};

}  // namespace

double integrate_pullback(const FormPtr& f, const GroupMesh& gm,
                          const QuadratureRule& rule) {
    GC_CHECK(f != nullptr, "integrate_pullback: null form");
    GC_CHECK(f->degree == gm.mesh.dim,
             "integrate_pullback: form degree ", f->degree,
             " != mesh dimension ", gm.mesh.dim);
    GC_CHECK(f->arity == gm.arity, "integrate_pullback: form arity ",
             f->arity, " != map arity ", gm.arity);
    GC_CHECK(rule.dim == gm.mesh.dim,
             "integrate_pullback: quadrature rule dimension mismatch");
    GC_CHECK(!f->algebra_valued,
             "integrate_pullback: form must be real-valued");

    const int ncells = static_cast<int>(gm.mesh.cells.size());
    std::vector<double> vals(ncells, 0.0);
    std::vector<char> degen(ncells, 0);
    CellWorker worker{f, gm, rule};
    const int nthreads = std::min(thread_count(), std::max(1, ncells));
    if (nthreads == 1) {
        for (int i = 0; i < ncells; ++i) {
            bool dg = false;
            vals[i] = worker.run(i, dg);
            degen[i] = dg;
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> cursor{0};
        for (int tid = 0; tid < nthreads; ++tid)
            pool.emplace_back([&]() {
                for (;;) {
                    const int i = cursor.fetch_add(1);
                    if (i >= ncells) return;
                    bool dg = false;
                    vals[i] = worker.run(i, dg);
                    degen[i] = dg;
                }
            });
        for (auto& th : pool) th.join();
    }
    int bad = 0;
    for (char d : degen) bad += d;
    if (bad > 0)
        std::fprintf(stderr,
                     "integrate_pullback: %d of %d cells have a nearly "
                     "degenerate tangent frame; consider refining the mesh\n",
                     bad, ncells);
    return tree_sum(std::move(vals));
}

double integrate_pullback(const FormPtr& f, const GroupMesh& gm) {
    return integrate_pullback(f, gm, default_rule(gm.mesh.dim));
}

// ---------------------------------------------------------------------------
// Pairing calibration
// ---------------------------------------------------------------------------

double calibrate_pairing(int level) {
    static std::map<int, double> cache;
    auto it = cache.find(level);
    if (it != cache.end()) return it->second;
    SimplicialMesh mesh = sphere3_mesh(level);
    GroupMesh gm = make_group_mesh(
        mesh, GroupTag::SU2, 2, 1,
        [](int, const Eigen::VectorXd& x) {
            return std::vector<GroupElement>{
                su2_from_quaternion(Eigen::Vector4d(x))};
        });
    InvariantPairing raw{GroupTag::SU2, 1, 1.0};
    const double integral = integrate_pullback(eta_form(raw), gm);
    GC_CHECK(std::abs(integral) > 1e-6,
             "calibrate_pairing: generator integral vanished");
    const double c = 1.0 / integral;
    cache[level] = c;
    return c;
}

InvariantPairing calibrated_pairing(int level_k) {
    return InvariantPairing{GroupTag::SU2, level_k, calibrate_pairing()};
}

}  // namespace gerbecalc
