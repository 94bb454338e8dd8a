// Tests for the Chern-Simons layer: the normalization of the action form
// against the canonical 3-form, exact chart calculus on base manifolds, the
// torus action oracle, the curvature and transition identities on the
// trivialized bundle, transgression along linear paths, integer gauge
// shifts, and connection file round trips.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "gerbecalc/chern_simons.hpp"

using namespace gerbecalc;

namespace {

GroupMesh torus_map(int n) {
    return make_group_mesh(
        cube3_mesh(n, true), GroupTag::UnitaryN, 3, 1,
        [](int, const Eigen::VectorXd& x) -> std::vector<GroupElement> {
            Mat m = Mat::Zero(3, 3);
            for (int j = 0; j < 3; ++j)
                m(j, j) = std::polar(1.0, kTwoPi * x(j));
            return {{GroupTag::UnitaryN, m}};
        });
}

GroupMesh unit_sphere_section(const SimplicialMesh& s3) {
    return make_group_mesh(
        s3, GroupTag::SU2, 2, 1,
        [](int, const Eigen::VectorXd& x) -> std::vector<GroupElement> {
            return {su2_from_quaternion(Eigen::Vector4d(x.normalized()))};
        });
}

// The abelian oracle connection: a = (f dx1 + g dx2) e2 with f = sin(2pi x0),
// g = cos(2pi x0).  TP(a) = P(e2,e2)(g f' - f g') dx0^dx1^dx2 and
// g f' - f g' = 2pi, so the torus action is exactly 2pi P(e2,e2).
ConnectionData oracle_connection(int level) {
    std::vector<ChartTerm> ts(2);
    ts[0].basis = 2;
    ts[0].dxs = {1};
    ts[0].coef.trigs.push_back({0, 1.0, 0.0, true});
    ts[1].basis = 2;
    ts[1].dxs = {2};
    ts[1].coef.trigs.push_back({0, 1.0, 0.0, false});
    return make_connection(GroupTag::UnitaryN, 3, level, ts);
}

// The oracle connection plus two terms that do not commute with it.  The
// extra e0 coefficient shares the variable x0 with the e2 row so that the
// bracket term has nonzero mean over the torus.
ConnectionData oracle_connection_deformed(int level) {
    ConnectionData c = oracle_connection(level);
    std::vector<ChartTerm> ts = c.base->terms;
    ChartTerm t2;
    t2.basis = 0;
    t2.dxs = {0};
    t2.coef.c = 0.7;
    t2.coef.trigs.push_back({0, 1.0, 0.3, true});
    ChartTerm t3;
    t3.basis = 1;
    t3.dxs = {1};
    t3.coef.c = -0.4;
    ts.push_back(t2);
    ts.push_back(t3);
    return make_connection(GroupTag::UnitaryN, 3, level, ts);
}

double chart_eval_defect(const ChartFormData& a, const ChartFormData& b,
                         int degree, Rng& rng, int samples) {
    auto fa = chart_form(std::make_shared<const ChartFormData>(a), 0, 1);
    auto fb = chart_form(std::make_shared<const ChartFormData>(b), 0, 1);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        std::vector<GroupElement> pt = {
            random_group_element(a.chart_tag, a.chart_ambient, rng)};
        Frame fm(degree);
        for (auto& t : fm) t = {random_tangent(pt[0], rng)};
        worst = std::max(worst, std::abs(eval_form(fa, pt, fm) -
                                         eval_form(fb, pt, fm)));
    }
    return worst;
}

}  // namespace

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

TEST_CASE("flat action form equals the canonical 3-form pointwise") {
    // For A = theta: P(theta ^ d theta) = -1/2 <theta,[theta^theta]> and the
    // bracket term contributes +1/3, so TP(theta) = -2 eta_P; the -1/2 in
    // cs_pairing turns that into +eta_k of the calibrated level-k pairing.
    Rng rng(20260815);
    for (int k : {1, 3}) {
        FormPtr tp = tp_form(cs_pairing(k), theta_left(0, 1));
        FormPtr eta = eta_form(calibrated_pairing(k));
        for (int s = 0; s < 10; ++s) {
            std::vector<GroupElement> pt = {
                random_group_element(GroupTag::SU2, 2, rng)};
            Frame fm(3);
            for (auto& t : fm) t = {random_tangent(pt[0], rng)};
            CHECK(eval_form(tp, pt, fm) ==
                  doctest::Approx(eval_form(eta, pt, fm)).epsilon(1e-8));
        }
    }
}

TEST_CASE("flat action over the unit sphere equals the level") {
    GroupMesh id = unit_sphere_section(sphere3_mesh(3));
    for (int k : {1, 2}) {
        double z = integrate_pullback(tp_form(cs_pairing(k), theta_left(0, 1)),
                                      id);
        CHECK(z == doctest::Approx(double(k)).epsilon(1e-9));
    }
}

// ---------------------------------------------------------------------------
// Chart calculus
// ---------------------------------------------------------------------------

TEST_CASE("chart derivative of the action form is the Pontryagin form") {
    // On a 4-coordinate carrier d TP(a) and P(Omega ^ Omega) are both
    // nonzero 4-forms; the chart expansion makes the identity exact.
    Rng rng(7);
    ConnectionData c = random_connection(GroupTag::VectorGroupRd, 5, 2, rng, 5);
    ChartFormData lhs = base_tp(c).exterior_derivative();
    ChartFormData rhs = base_pontryagin(c);
    CHECK(chart_eval_defect(lhs, rhs, 4, rng, 25) < 1e-12);
}

TEST_CASE("chart action form matches the finite-difference expression") {
    Rng rng(8);
    ConnectionData c = random_connection(GroupTag::VectorGroupRd, 5, 1, rng, 4);
    FormPtr fd = tp_form(c.pairing, base_form(c, 0, 1));
    auto chart = chart_form(std::make_shared<const ChartFormData>(base_tp(c)),
                            0, 1);
    double worst = 0.0;
    for (int s = 0; s < 15; ++s) {
        std::vector<GroupElement> pt = {
            random_group_element(GroupTag::VectorGroupRd, 5, rng)};
        Frame fm(3);
        for (auto& t : fm) t = {random_tangent(pt[0], rng)};
        worst = std::max(worst, std::abs(eval_form(fd, pt, fm) -
                                         eval_form(chart, pt, fm)));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("abelian connections drop all bracket terms") {
    Rng rng(9);
    ConnectionData c =
        random_connection(GroupTag::UnitaryN, 4, 2, rng, 5, /*abelian=*/true);
    // Curvature reduces to the plain derivative...
    ChartFormData domega = base_curvature(c);
    ChartFormData da = c.base->exterior_derivative();
    CHECK(chart_bracket_wedge(*c.base, *c.base).terms.empty());
    REQUIRE(domega.terms.size() == da.terms.size());
    // ...and TP to the quadratic part.
    ChartFormData quad =
        chart_pairing_wedge(c.pairing, *c.base, c.base->exterior_derivative());
    CHECK(chart_eval_defect(base_tp(c), quad, 3, rng, 10) < 1e-14);
}

TEST_CASE("action is linear in the pairing") {
    Rng rng(10);
    ConnectionData c = random_connection(GroupTag::UnitaryN, 3, 1, rng, 4);
    ConnectionData c3 = c;
    InvariantPairing scaled = c.pairing;
    scaled.c *= 3.0;
    c3.pairing = scaled;
    GroupMesh t3 = torus_map(5);
    const double z = cs_action(t3, c);
    CHECK(cs_action(t3, c3) == doctest::Approx(3.0 * z).epsilon(1e-13));
}

// ---------------------------------------------------------------------------
// Torus oracle
// ---------------------------------------------------------------------------

TEST_CASE("torus action matches the closed form") {
    const Mat e2 = algebra_basis(GroupTag::SU2, 2)[2];
    for (int k : {1, 2}) {
        ConnectionData c = oracle_connection(k);
        const double want = kTwoPi * c.pairing.eval(e2, e2);
        CHECK(cs_action(torus_map(6), c) ==
              doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("action rejects open meshes and mismatched carriers") {
    ConnectionData c = oracle_connection(1);
    GroupMesh open_map = make_group_mesh(
        cube3_mesh(3, false), GroupTag::UnitaryN, 3, 1,
        [](int, const Eigen::VectorXd& x) -> std::vector<GroupElement> {
            Mat m = Mat::Zero(3, 3);
            for (int j = 0; j < 3; ++j)
                m(j, j) = std::polar(1.0, kTwoPi * x(j));
            return {{GroupTag::UnitaryN, m}};
        });
    CHECK_THROWS_AS(cs_action(open_map, c), Error);

    Rng rng(3);
    ConnectionData c4 = random_connection(GroupTag::UnitaryN, 4, 1, rng, 3);
    CHECK_THROWS_AS(cs_action(torus_map(4), c4), Error);
}

// ---------------------------------------------------------------------------
// Bundle identities
// ---------------------------------------------------------------------------

TEST_CASE("derivative of the action form is the curvature square on the bundle") {
    Rng rng(11);
    for (int i = 0; i < 2; ++i) {
        ConnectionData c = random_connection(GroupTag::UnitaryN, 3, 1 + i, rng, 4);
        CHECK(pontryagin_defect(c, 15, 900 + i) < 1e-5);
    }
}

TEST_CASE("transition identities close on the fiber products") {
    for (int k : {1, 3}) {
        Rng rng(100 + k);
        ConnectionData c = random_connection(GroupTag::UnitaryN, 3, k, rng, 4);
        TransitionCheck tc = transition_identity_check(c, 15, 500 + k);
        // The 3-form identity carries the FD error of two exterior
        // derivatives; the 2-form identity is algebraic.
        CHECK(tc.coboundary_defect < 1e-8);
        CHECK(tc.bi_form_defect < 1e-12);
    }
}

TEST_CASE("transgression along a linear path reproduces the action change") {
    ConnectionData c0 = oracle_connection(2);
    ConnectionData c1 = oracle_connection_deformed(2);
    GroupMesh t3 = torus_map(6);
    const double dz = cs_action(t3, c1) - cs_action(t3, c0);
    REQUIRE(std::abs(dz) > 1e-4);  // the pair is genuinely nonabelian
    CHECK(pontryagin_transgression(t3, c0, c1) ==
          doctest::Approx(dz).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// Gauge shifts
// ---------------------------------------------------------------------------

TEST_CASE("gauge shift of a translated identity map is exactly the level") {
    SimplicialMesh s3 = sphere3_mesh(3);
    GroupMesh h = power_gauge_map(s3, 1, 0.0, 99);
    for (int k : {1, 3}) {
        GaugeShiftResult r = gauge_shift_check(h, k);
        CHECK(r.nearest_int_defect < 1e-9);
        CHECK(r.delta == doctest::Approx(double(k)).epsilon(1e-9));
    }
}

TEST_CASE("degree-zero maps shift the action by nothing") {
    SimplicialMesh s3 = sphere3_mesh(3);
    GroupMesh h = power_gauge_map(s3, 0, 0.4, 18);
    GaugeShiftResult r = gauge_shift_check(h, 2);
    CHECK(std::abs(r.delta) < 1e-6);
}

TEST_CASE("extrapolated gauge suite lands on level times degree") {
    auto suite = gauge_shift_suite(1, 2, 515);
    for (const auto& item : suite) {
        CHECK(item.nearest_int_defect < 1e-2);
        CHECK(std::abs(item.delta - item.degree) < 1e-2);
    }
}

// ---------------------------------------------------------------------------
// Files and validation
// ---------------------------------------------------------------------------

TEST_CASE("connection files round trip bit-exactly") {
    Rng rng(5);
    ConnectionData c = random_connection(GroupTag::UnitaryN, 3, 2, rng, 5);
    std::ostringstream os;
    write_connection(os, c);
    std::istringstream is(os.str());
    ConnectionData c2 = read_connection(is);
    CHECK(c2.level == c.level);
    CHECK(c2.chart_tag == c.chart_tag);
    REQUIRE(c2.base->terms.size() == c.base->terms.size());
    for (std::size_t i = 0; i < c.base->terms.size(); ++i) {
        const ChartTerm& a = c.base->terms[i];
        const ChartTerm& b = c2.base->terms[i];
        CHECK(a.basis == b.basis);
        CHECK(a.dxs == b.dxs);
        CHECK(a.coef.c == b.coef.c);
        REQUIRE(a.coef.trigs.size() == b.coef.trigs.size());
        for (std::size_t t = 0; t < a.coef.trigs.size(); ++t) {
            CHECK(a.coef.trigs[t].freq == b.coef.trigs[t].freq);
            CHECK(a.coef.trigs[t].phase == b.coef.trigs[t].phase);
        }
    }
}

TEST_CASE("malformed connection files are rejected") {
    ConnectionData c = oracle_connection(1);  // has a sin and a cos term
    std::ostringstream os;
    write_connection(os, c);
    const std::string good = os.str();
    REQUIRE(good.find("sin") != std::string::npos);

    auto rejects = [](std::string text) {
        std::istringstream is(text);
        CHECK_THROWS_AS(read_connection(is), Error);
    };
    rejects("gerbecalc-mesh 1\n");       // wrong magic
    rejects(good.substr(0, good.size() - 5));  // missing end marker
    std::string bad = good;
    bad.replace(bad.find("sin"), 3, "tan");
    rejects(bad);
}

TEST_CASE("base form validation rejects out-of-range data") {
    auto term = [](int basis, int dx) {
        ChartTerm t;
        t.basis = basis;
        t.dxs = {dx};
        return t;
    };
    CHECK_THROWS_AS(make_connection(GroupTag::UnitaryN, 3, 1, {term(3, 0)}),
                    Error);
    CHECK_THROWS_AS(make_connection(GroupTag::UnitaryN, 3, 1, {term(0, 3)}),
                    Error);
    CHECK_THROWS_AS(make_connection(GroupTag::SU2, 2, 1, {term(0, 0)}), Error);
    CHECK_THROWS_AS(make_connection(GroupTag::UnitaryN, 3, 0, {term(0, 0)}),
                    Error);

    // Torus charts require periodic coefficients.
    ChartTerm mono = term(0, 0);
    mono.coef.monos.push_back({0, 1});
    CHECK_THROWS_AS(make_connection(GroupTag::UnitaryN, 3, 1, {mono}), Error);
    CHECK_NOTHROW(make_connection(GroupTag::VectorGroupRd, 4, 1, {mono}));
    ChartTerm frac = term(0, 0);
    frac.coef.trigs.push_back({0, 1.5, 0.0, true});
    CHECK_THROWS_AS(make_connection(GroupTag::UnitaryN, 3, 1, {frac}), Error);
    CHECK_NOTHROW(make_connection(GroupTag::VectorGroupRd, 4, 1, {frac}));
}

TEST_CASE("tangent pushforward handles mixed ambient slots") {
    // Transition maps multiply 2x2 fiber slots while the 3x3 chart slot rides
    // along; the pushforward must size its products per block.
    Rng rng(12);
    std::vector<GroupElement> pt = {
        random_group_element(GroupTag::UnitaryN, 3, rng),
        random_group_element(GroupTag::SU2, 2, rng),
        random_group_element(GroupTag::SU2, 2, rng)};
    std::vector<Mat> v = {random_tangent(pt[0], rng),
                          random_tangent(pt[1], rng),
                          random_tangent(pt[2], rng)};
    IndexMap gmap;
    gmap.arity_in = 3;
    gmap.arity_out = 1;
    gmap.blocks = {{{1, true}, {2, false}}};
    std::vector<Mat> w = apply_tangent(gmap, pt, v);
    REQUIRE(w.size() == 1);
    CHECK(w[0].rows() == 2);
    // Product rule: d(a^{-1} b) = -a^{-1} da a^{-1} b + a^{-1} db.
    const Mat ai = group_inv(pt[1]).m;
    const Mat want = -ai * v[1] * ai * pt[2].m + ai * v[2];
    CHECK((w[0] - want).cwiseAbs().maxCoeff() < 1e-12);
}
