#include "gerbecalc/suites.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <map>

#include <json.hpp>

#include "gerbecalc/branes.hpp"
#include "gerbecalc/chern_simons.hpp"
#include "gerbecalc/deligne.hpp"
#include "gerbecalc/wzw.hpp"

namespace gerbecalc {

namespace {

// -----------------------------------------------------------------------
// Bookkeeping
// -----------------------------------------------------------------------

int samples(const RunConfig& cfg, int dflt) {
    return cfg.resolution > 0 ? cfg.resolution : dflt;
}

// Numeric check: pass iff defect <= tol * tolerance_scale.
void run_check(SuiteReport& rep, const std::string& name, double tol,
               const std::function<double()>& defect_fn) {
    CheckResult r;
    r.name = name;
    r.tolerance = tol * rep.config.tolerance_scale;
    const auto t0 = std::chrono::steady_clock::now();
    r.defect = defect_fn();
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    r.pass = r.defect <= r.tolerance;
    rep.checks.push_back(std::move(r));
}

// Exact check: defect is 0 or 1 and the tolerance stays 0 regardless of the
// tolerance scale.
void run_exact(SuiteReport& rep, const std::string& name,
               const std::function<bool()>& ok_fn) {
    CheckResult r;
    r.name = name;
    r.tolerance = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    r.pass = ok_fn();
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    r.defect = r.pass ? 0.0 : 1.0;
    rep.checks.push_back(std::move(r));
}

// -----------------------------------------------------------------------
// Shared sample builders
// -----------------------------------------------------------------------

std::vector<GroupElement> random_su2_tuple(int arity, Rng& rng) {
    std::vector<GroupElement> pt;
    for (int i = 0; i < arity; ++i)
        pt.push_back(random_group_element(GroupTag::SU2, 2, rng));
    return pt;
}

Frame random_frame(const std::vector<GroupElement>& pt, int degree, Rng& rng) {
    Frame fm(degree);
    for (auto& t : fm) {
        t.clear();
        for (const auto& g : pt) t.push_back(random_tangent(g, rng));
    }
    return fm;
}

double max_eval(const FormPtr& f, int arity, int degree, int count, Rng& rng) {
    double worst = 0.0;
    for (int s = 0; s < count; ++s) {
        const std::vector<GroupElement> pt = random_su2_tuple(arity, rng);
        worst = std::max(
            worst, std::abs(eval_form(f, pt, random_frame(pt, degree, rng))));
    }
    return worst;
}

GroupMesh identity_section(int sphere_level) {
    return make_group_mesh(
        sphere3_mesh(sphere_level), GroupTag::SU2, 2, 1,
        [](int, const Eigen::VectorXd& x) -> std::vector<GroupElement> {
            return {su2_from_quaternion(Eigen::Vector4d(x.normalized()))};
        });
}

// exp of a random affine su(2)-valued field of the ambient coordinates.
GroupMesh random_su2_map(const SimplicialMesh& m, Rng& rng, double amp) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::Matrix3d dir;
    Eigen::Vector3d off;
    for (int a = 0; a < 3; ++a) {
        off[a] = u(rng);
        for (int j = 0; j < 3; ++j) dir(a, j) = u(rng);
    }
    return make_group_mesh(
        m, GroupTag::SU2, 2, 1, [dir, off, amp](int, const Eigen::VectorXd& x) {
            std::vector<Mat> basis = algebra_basis(GroupTag::SU2, 2);
            Mat X = Mat::Zero(2, 2);
            for (int a = 0; a < 3; ++a) {
                double f = off[a];
                for (int j = 0; j < std::min<int>(3, x.size()); ++j)
                    f += dir(a, j) * x[j];
                X += amp * f * basis[a];
            }
            return std::vector<GroupElement>{group_exp({GroupTag::SU2, X})};
        });
}

GroupMesh torus_diagonal_map(int n) {
    return make_group_mesh(
        cube3_mesh(n, true), GroupTag::UnitaryN, 3, 1,
        [](int, const Eigen::VectorXd& x) -> std::vector<GroupElement> {
            Mat m = Mat::Zero(3, 3);
            for (int j = 0; j < 3; ++j)
                m(j, j) = std::polar(1.0, kTwoPi * x(j));
            return {{GroupTag::UnitaryN, m}};
        });
}

// -----------------------------------------------------------------------
// Discrete-model sample builders (exact arithmetic)
// -----------------------------------------------------------------------

Rational look(const std::map<int, Rational>& m, int cell) {
    auto it = m.find(cell);
    return it == m.end() ? Rational(0) : it->second;
}

bool cochain_exact_zero(const DeligneCochain& c) {
    for (const auto& [key, part] : c.parts)
        for (const auto& [tuple, vals] : part.entries)
            for (const auto& [cell, v] : vals)
                if (v != 0) return false;
    return true;
}

DiscreteForm random_delta_closed(const SimplicialGroupModel& model, int n,
                                 Rng& rng) {
    DiscreteForm rho = form_delta(model, random_form(model, 1, n, rng, 6));
    if (n >= 1)
        rho = form_add(rho, form_d(model, form_delta(model, random_form(
                                                model, 1, n - 1, rng, 6))));
    return rho;
}

DeligneCochain random_cochain(const SimplicialGroupModel& model, int m, int n,
                              Rng& rng, bool with_rho) {
    DeligneCochain c = cochain_zero(m, n);
    for (int q = 1; q <= model.levels(); ++q) {
        for (int k = 0; k <= n; ++k) {
            int p = m - q - k;
            if (p < 0) continue;
            CechCochain cc = random_cech(model, q, p, k, rng, 2, 3);
            if (!cc.entries.empty()) c.parts[{q, p, k}] = cc;
        }
    }
    if (with_rho && m == n + 1) {
        c.has_rho = true;
        c.rho = random_delta_closed(model, n, rng);
    }
    return c;
}

DeligneCochain sample_trivial_cocycle(const SimplicialGroupModel& model, int n,
                                      Rng& rng) {
    DiscreteForm phi = random_form(model, 1, n, rng, 8);
    DiscreteForm psi = form_zero(2, n - 1);
    auto kernel = delta_kernel(model, 2, n - 1, false);
    std::uniform_int_distribution<int> coeff(-3, 3);
    for (std::size_t j = 0; j < kernel.size(); j += 2) {
        Rational s(coeff(rng), 2);
        s.canonicalize();
        psi = form_add(psi, form_scale(s, kernel[j]));
    }
    return make_trivial_multiplicative(model, phi, psi);
}

// Random valid (H, rho, B) on the function level: H = d(beta), per-patch
// primitives beta + c_i, rho = Delta(beta) plus a Delta- and d-closed shift.
struct CurvatureTriple {
    DiscreteForm H;
    DiscreteForm rho;
    std::vector<DiscreteForm> B;
};

CurvatureTriple random_curvature_triple(const SimplicialGroupModel& model,
                                        Rng& rng) {
    const Cover& cov1 = model.cover(1);
    DiscreteForm beta = random_form(model, 1, 0, rng, 8);
    CurvatureTriple out;
    out.H = form_d(model, beta);
    out.rho = form_delta(model, beta);
    std::uniform_int_distribution<int> kdist(-2, 2);
    for (const auto& k : delta_kernel(model, 2, 0, true))
        out.rho = form_add(out.rho, form_scale(Rational(kdist(rng), 2), k));
    std::uniform_int_distribution<int> cdist(-4, 4);
    for (const auto& patch : cov1.patches) {
        DiscreteForm Bi = form_zero(1, 0);
        Rational ci(cdist(rng), 3);
        ci.canonicalize();
        for (int cell : patch.cells[0]) {
            Rational val = ci + look(beta.values, cell);
            if (val != 0) Bi.values[cell] = val;
        }
        out.B.push_back(Bi);
    }
    return out;
}

// -----------------------------------------------------------------------
// Suites
// -----------------------------------------------------------------------

void suite_form_identities(const RunConfig& cfg, SuiteReport& rep) {
    const int n = samples(cfg, 100);
    const InvariantPairing p = calibrated_pairing(cfg.level);
    run_check(rep, "pullback identity of the canonical 3-form", 1e-5, [&] {
        Rng rng(cfg.seed);
        FormPtr diff = form_add(simplicial_delta(eta_form(p)),
                                form_scale(-1.0, ext_d(rho_form(p))));
        return max_eval(diff, 2, 3, n, rng);
    });
    run_check(rep, "two-slot 2-form is simplicially closed", 1e-10, [&] {
        Rng rng(cfg.seed + 1);
        return max_eval(simplicial_delta(rho_form(p)), 3, 2, n, rng);
    });
    run_check(rep, "Maurer-Cartan structure equation", 1e-5, [&] {
        Rng rng(cfg.seed + 2);
        FormPtr th = theta_left(0, 1);
        FormPtr lhs = form_add(ext_d(th),
                               form_scale(0.5, bracket_wedge(th, th)));
        double worst = 0.0;
        for (int s = 0; s < n; ++s) {
            const std::vector<GroupElement> pt = random_su2_tuple(1, rng);
            const Frame fm = random_frame(pt, 2, rng);
            worst = std::max(worst,
                             eval_form_matrix(lhs, pt, fm).cwiseAbs().maxCoeff());
        }
        return worst;
    });
}

void suite_normalization(const RunConfig& cfg, SuiteReport& rep) {
    const int lvl = cfg.resolution > 0 ? cfg.resolution : 3;
    const GroupMesh id = identity_section(lvl);
    run_check(rep, "unit-sphere integral of the canonical 3-form", 1e-3, [&] {
        return std::abs(
            integrate_pullback(eta_form(calibrated_pairing(1)), id) - 1.0);
    });
    if (cfg.level != 1) {
        run_check(rep, "level scaling of the 3-form integral",
                  1e-3 * cfg.level, [&] {
                      return std::abs(integrate_pullback(
                                 eta_form(calibrated_pairing(cfg.level)), id) -
                             cfg.level);
                  });
    }
}

void suite_pw(const RunConfig& cfg, SuiteReport& rep) {
    const int pairs = samples(cfg, 5);
    const SimplicialMesh sphere = sphere2_mesh(2);
    for (int k : {1, 2, 3}) {
        run_check(rep,
                  "Polyakov-Wiegmann factorization at level " +
                      std::to_string(k),
                  1e-3, [&] {
                      Rng rng(cfg.seed + 10 * k);
                      double worst = 0.0;
                      for (int i = 0; i < pairs; ++i) {
                          GroupMesh a = random_su2_map(sphere, rng, 0.6);
                          GroupMesh b = random_su2_map(sphere, rng, 0.6);
                          worst = std::max(
                              worst,
                              polyakov_wiegmann_check(a, b, k, cfg.seed).defect);
                      }
                      return worst;
                  });
    }
}

void suite_mickelsson(const RunConfig& cfg, SuiteReport& rep) {
    const int triples = samples(cfg, 10);
    const SimplicialMesh disc = disc_mesh(3);
    run_check(rep, "associator defect of the twisted product", 1e-9, [&] {
        Rng rng(cfg.seed);
        double worst = 0.0;
        for (int i = 0; i < triples; ++i) {
            MickelssonElement a =
                make_mickelsson(random_su2_map(disc, rng, 0.6), {1.0, 0.0},
                                cfg.level);
            MickelssonElement b = make_mickelsson(
                random_su2_map(disc, rng, 0.6), {0.6, 0.8}, cfg.level);
            MickelssonElement c = make_mickelsson(
                random_su2_map(disc, rng, 0.6), {-0.8, 0.6}, cfg.level);
            MickelssonElement l = me_product(me_product(a, b), c);
            MickelssonElement r = me_product(a, me_product(b, c));
            worst = std::max(worst, std::abs(l.z / r.z - 1.0));
        }
        return worst;
    });
    run_exact(rep, "equivalence relation separates off-phase pairs", [&] {
        Rng rng(cfg.seed + 1);
        MickelssonElement e1 = make_mickelsson(
            random_su2_map(disc, rng, 0.5), {1.0, 0.0}, cfg.level);
        std::complex<double> off{std::cos(0.6 * kPi), std::sin(0.6 * kPi)};
        MickelssonElement bad = make_mickelsson(e1.disc, off, cfg.level);
        return me_equal(e1, e1) && !me_equal(e1, bad);
    });
}

const SimplicialGroupModel& builtin_model(const RunConfig& cfg) {
    static std::map<int, SimplicialGroupModel> cache;
    const int n = cfg.resolution > 0 ? std::max(3, cfg.resolution) : 12;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, circle_group_model(n, 4)).first;
    return it->second;
}

void suite_deligne(const RunConfig& cfg, SuiteReport& rep) {
    const SimplicialGroupModel& model = builtin_model(cfg);
    run_exact(rep, "bi-complex differential squares to zero", [&] {
        Rng rng(cfg.seed);
        for (int n = 0; n <= 2; ++n)
            for (int m = 1; m <= n + 2; ++m)
                for (int r = 0; r < 4; ++r) {
                    DeligneCochain c =
                        random_cochain(model, m, n, rng, m == n + 1);
                    if (!cochain_exact_zero(bi_D(model, bi_D(model, c))))
                        return false;
                }
        return true;
    });
    run_exact(rep, "trivially multiplicative cocycles close", [&] {
        Rng rng(cfg.seed + 1);
        for (int n = 1; n <= 2; ++n) {
            DeligneCochain triv = sample_trivial_cocycle(model, n, rng);
            if (!is_cocycle(model, triv).ok) return false;
            if (!total_is_zero(mc_class(model, triv).kappa)) return false;
            OmegaProjection op = omega_projection(model, triv);
            if (!op.overlaps_consistent || !op.dH_zero ||
                !op.delta_H_matches_d_rho || !op.rho_delta_closed)
                return false;
        }
        return true;
    });
    run_exact(rep, "curvature-pair cocycles close", [&] {
        Rng rng(cfg.seed + 2);
        for (int trial = 0; trial < 5; ++trial) {
            CurvatureTriple t = random_curvature_triple(model, rng);
            DeligneCochain c = make_lemma2_cocycle(model, t.H, t.rho, t.B);
            if (!is_cocycle(model, c).ok) return false;
        }
        return true;
    });
}

void suite_mc_class(const RunConfig& cfg, SuiteReport& rep) {
    const SimplicialGroupModel& model = builtin_model(cfg);
    const int trials = samples(cfg, 10);
    run_exact(rep, "multiplicative class integrality and closedness", [&] {
        Rng rng(cfg.seed);
        for (int trial = 0; trial < trials; ++trial) {
            const int n = 1 + trial % 2;
            DeligneCochain triv = sample_trivial_cocycle(model, n, rng);
            DeligneCochain w = cochain_zero(n, n);
            w.parts[{1, 0, n - 1}] = random_cech(model, 1, 0, n - 1, rng, 3, 2);
            if (n == 2)
                w.parts[{2, 0, 0}] = random_cech(model, 2, 0, 0, rng, 3, 2);
            DeligneCochain shifted = cochain_add(triv, bi_D(model, w));
            if (!is_cocycle(model, shifted).ok) return false;
            MultiplicativeClass mc = mc_class(model, shifted);
            if (!mc.is_integer || !mc.is_closed) return false;
            // The shift is a coboundary, so the class must not move.
            MultiplicativeClass base = mc_class(model, triv);
            if (!total_is_zero(
                    total_add(mc.kappa, total_negate(base.kappa))))
                return false;
        }
        return true;
    });
}

void suite_cs(const RunConfig& cfg, SuiteReport& rep) {
    const int lvl = cfg.resolution > 0 ? cfg.resolution : 3;
    run_check(rep, "flat action over the unit sphere equals the level", 1e-9,
              [&] {
                  const GroupMesh id = identity_section(lvl);
                  return std::abs(
                      integrate_pullback(
                          tp_form(cs_pairing(cfg.level), theta_left(0, 1)),
                          id) -
                      cfg.level);
              });
    run_check(rep, "torus action matches the closed form", 1e-9, [&] {
        std::vector<ChartTerm> ts(2);
        ts[0].basis = 2;
        ts[0].dxs = {1};
        ts[0].coef.trigs.push_back({0, 1.0, 0.0, true});
        ts[1].basis = 2;
        ts[1].dxs = {2};
        ts[1].coef.trigs.push_back({0, 1.0, 0.0, false});
        ConnectionData c =
            make_connection(GroupTag::UnitaryN, 3, cfg.level, ts);
        const Mat e2 = algebra_basis(GroupTag::SU2, 2)[2];
        const double want = kTwoPi * c.pairing.eval(e2, e2);
        return std::abs(cs_action(torus_diagonal_map(6), c) - want);
    });
    run_check(rep, "derivative of the action form is the curvature square",
              1e-5, [&] {
                  Rng rng(cfg.seed);
                  double worst = 0.0;
                  for (int i = 0; i < 3; ++i) {
                      ConnectionData c = random_connection(
                          GroupTag::UnitaryN, 3, cfg.level, rng, 4);
                      worst = std::max(
                          worst, pontryagin_defect(c, samples(cfg, 25),
                                                   cfg.seed + i));
                  }
                  return worst;
              });
}

void suite_transition(const RunConfig& cfg, SuiteReport& rep) {
    TransitionCheck tc;
    run_check(rep, "coboundary identity of the action form", 1e-5, [&] {
        Rng rng(cfg.seed);
        ConnectionData c =
            random_connection(GroupTag::UnitaryN, 3, cfg.level, rng, 4);
        tc = transition_identity_check(c, samples(cfg, 50), cfg.seed);
        return tc.coboundary_defect;
    });
    run_check(rep, "algebraic 2-form identity on the fiber square", 1e-9,
              [&] { return tc.bi_form_defect; });
}

void suite_lemma6(const RunConfig& cfg, SuiteReport& rep) {
    auto lat = [](double t, double s) {
        return Eigen::Vector3d(std::sin(t) * std::cos(kTwoPi * s),
                               std::sin(t) * std::sin(kTwoPi * s),
                               std::cos(t));
    };
    run_check(rep, "log-holonomy derivative matches the fiber integral", 1e-3,
              [&] {
                  const int charge = std::max(1, cfg.level);
                  return lemma6_check(monopole_curvature(charge), lat, 1.0,
                                      1e-3)
                      .defect;
              });
    run_exact(rep, "stationary families have exactly zero derivative", [&] {
        auto stat = [](double, double s) {
            return Eigen::Vector3d(std::sin(1.1) * std::cos(kTwoPi * s),
                                   std::sin(1.1) * std::sin(kTwoPi * s),
                                   std::cos(1.1));
        };
        Lemma6Result r = lemma6_check(monopole_curvature(1), stat, 0.3, 1e-3);
        return r.fd_derivative == 0.0 && r.fiber_integral == 0.0;
    });
}

void suite_branes(const RunConfig& cfg, SuiteReport& rep) {
    run_check(rep, "bi-brane curvature agrees both ways", 1e-9, [&] {
        Rng rng(cfg.seed);
        const int points = samples(cfg, 50);
        double worst = 0.0;
        for (int pair = 0; pair < 3; ++pair) {
            GroupElement h1 = random_group_element(GroupTag::SU2, 2, rng);
            GroupElement h2 = random_group_element(GroupTag::SU2, 2, rng);
            for (int i = 0; i < points; ++i) {
                BiconjPoint q = random_biconj_point(h1, h2, rng);
                auto t1 = biconj_tangent(
                    q, random_algebra(GroupTag::SU2, 2, rng).m,
                    random_algebra(GroupTag::SU2, 2, rng).m);
                auto t2 = biconj_tangent(
                    q, random_algebra(GroupTag::SU2, 2, rng).m,
                    random_algebra(GroupTag::SU2, 2, rng).m);
                worst = std::max(
                    worst, bibrane_curvature(q, t1, t2, cfg.level).defect);
            }
        }
        return worst;
    });
    run_check(rep, "brane form matches the rotation-angle closed form", 1e-12,
              [&] {
                  const auto e = algebra_basis(GroupTag::SU2, 2);
                  const InvariantPairing P = calibrated_pairing(cfg.level);
                  double worst = 0.0;
                  for (double phi : {0.8, 1.7, -0.6}) {
                      GroupElement g =
                          group_exp({GroupTag::SU2, Mat(phi * e[2])});
                      ConjClassPoint p = make_conj_point(g, g);
                      const double w = omega_h(P, p, conj_tangent(p, e[0]),
                                               conj_tangent(p, e[1]));
                      worst = std::max(
                          worst,
                          std::abs(w + 4.0 * P.eval(e[0], e[0]) *
                                           std::sin(phi)));
                  }
                  return worst;
              });
}

using SuiteFn = void (*)(const RunConfig&, SuiteReport&);

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
    static const std::vector<std::pair<std::string, SuiteFn>> table = {
        {"form-identities", suite_form_identities},
        {"normalization", suite_normalization},
        {"pw", suite_pw},
        {"mickelsson", suite_mickelsson},
        {"deligne", suite_deligne},
        {"mc-class", suite_mc_class},
        {"cs", suite_cs},
        {"transition", suite_transition},
        {"lemma6", suite_lemma6},
        {"branes", suite_branes},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : suite_table()) out.push_back(name);
        return out;
    }();
    return names;
}

SuiteReport run_suite(const RunConfig& cfg) {
    GC_CHECK(cfg.level >= 1, "run_suite: level must be positive");
    GC_CHECK(cfg.tolerance_scale > 0,
             "run_suite: tolerance scale must be positive");
    SuiteReport rep;
    rep.config = cfg;
    for (const auto& [name, fn] : suite_table()) {
        if (name == cfg.command) {
            fn(cfg, rep);
            return rep;
        }
    }
    GC_CHECK(false, "unknown command: ", cfg.command);
    return rep;
}

std::string report_json(const SuiteReport& report) {
    nlohmann::json j;
    j["schema"] = "gerbecalc-report/1";
    j["command"] = report.config.command;
    j["seed"] = report.config.seed;
    j["level"] = report.config.level;
    j["resolution"] = report.config.resolution;
    j["tolerance_scale"] = report.config.tolerance_scale;
    j["pass"] = report.all_pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : report.checks) {
        j["checks"].push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"defect", c.defect},
                               {"tolerance", c.tolerance},
                               {"seconds", c.seconds}});
    }
    return j.dump(2) + "\n";
}

}  // namespace gerbecalc
