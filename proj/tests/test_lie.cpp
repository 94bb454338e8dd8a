// Lie-group form calculus: group arithmetic, Maurer-Cartan forms, the
// expression evaluator, the finite-difference exterior derivative and the
// simplicial coboundary.
//
// The numeric oracles here are independent re-derivations (hand-coded
// expansions, closed-form charts, classical structure equations), not
// round-trips through the code under test.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gerbecalc/forms.hpp"

using namespace gerbecalc;

namespace {

Rng make_rng(unsigned seed) { return Rng(seed); }

// Hand-coded (1/6)<X ^ [Y ^ Z]> expansion over the three (1,2)-shuffles,
// with the commutator square [A ^ A](u,v) = [A(u), A(v)].
double eta_by_hand(const InvariantPairing& p, const Mat& x, const Mat& y,
                   const Mat& z) {
    auto br = [](const Mat& a, const Mat& b) -> Mat { return a * b - b * a; };
    return (p.eval(x, br(y, z)) - p.eval(y, br(x, z)) + p.eval(z, br(x, y))) /
           6.0;
}

}  // namespace

TEST_CASE("SU2 exp/log/quaternion round trips") {
    auto rng = make_rng(11);
    for (int t = 0; t < 50; ++t) {
        GroupElement g = random_group_element(GroupTag::SU2, 2, rng);
        CHECK((su2_from_quaternion(su2_to_quaternion(g)).m - g.m).norm() <
              1e-14);
        AlgebraVector x = group_log(g);
        CHECK((group_exp(x).m - g.m).norm() < 1e-12);
        // Unitarity and unit determinant are preserved by exp.
        AlgebraVector y = random_algebra(GroupTag::SU2, 2, rng);
        GroupElement h = group_exp(y);
        CHECK((h.m * h.m.adjoint() - Mat::Identity(2, 2)).norm() < 1e-13);
        CHECK(std::abs(h.m.determinant() - std::complex<double>(1.0)) < 1e-13);
    }
    // log at the cut locus must fail.
    GroupElement minus1{GroupTag::SU2, -Mat::Identity(2, 2)};
    CHECK_THROWS_AS((void)group_log(minus1), Error);
}

TEST_CASE("su(2) basis brackets and pairing invariance") {
    auto basis = algebra_basis(GroupTag::SU2, 2);
    auto br = [](const Mat& a, const Mat& b) -> Mat { return a * b - b * a; };
    // [e1,e2]=e3 cyclic.
    CHECK((br(basis[0], basis[1]) - basis[2]).norm() < 1e-15);
    CHECK((br(basis[1], basis[2]) - basis[0]).norm() < 1e-15);
    CHECK((br(basis[2], basis[0]) - basis[1]).norm() < 1e-15);

    InvariantPairing p{GroupTag::SU2, 2, 0.7};
    // <e_a, e_b> = c k delta_ab / 2.
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK(p.eval(basis[a], basis[b]) ==
                  doctest::Approx(a == b ? 0.7 * 2 / 2.0 : 0.0).epsilon(1e-12));

    // Ad-invariance: <Ad_g X, Ad_g Y> = <X, Y>.
    auto rng = make_rng(12);
    for (int t = 0; t < 50; ++t) {
        GroupElement g = random_group_element(GroupTag::SU2, 2, rng);
        Mat x = random_algebra(GroupTag::SU2, 2, rng).m;
        Mat y = random_algebra(GroupTag::SU2, 2, rng).m;
        Mat gx = g.m * x * group_inv(g).m;
        Mat gy = g.m * y * group_inv(g).m;
        CHECK(std::abs(p.eval(gx, gy) - p.eval(x, y)) < 1e-10);
    }
}

TEST_CASE("Maurer-Cartan forms: values, relation, tangency check") {
    auto rng = make_rng(13);
    for (int t = 0; t < 25; ++t) {
        GroupElement g = random_group_element(GroupTag::SU2, 2, rng);
        Mat x = random_algebra(GroupTag::SU2, 2, rng).m;
        // theta(g X) = X, thetabar = Ad_g theta.
        CHECK((left_mc(g, g.m * x).m - x).norm() < 1e-13);
        Mat adx = g.m * x * group_inv(g).m;
        CHECK((right_mc(g, g.m * x).m - adx).norm() < 1e-12);
    }
    GroupElement g = random_group_element(GroupTag::SU2, 2, rng);
    // A non-tangent ambient matrix must be rejected.
    Mat bad = Mat::Identity(2, 2);
    CHECK_THROWS_AS((void)left_mc(g, bad), Error);
}

TEST_CASE("index maps: application, inversion blocks, composition") {
    auto rng = make_rng(14);
    // m_{12,3,46,7}: (g1,...,g7) -> (g1g2, g3, g4g6, g7).
    IndexMap m;
    m.arity_in = 7;
    m.arity_out = 4;
    m.blocks = {{{0, false}, {1, false}},
                {{2, false}},
                {{3, false}, {5, false}},
                {{6, false}}};
    std::vector<GroupElement> pt;
    for (int i = 0; i < 7; ++i)
        pt.push_back(random_group_element(GroupTag::SU2, 2, rng));
    auto out = apply_point(m, pt);
    CHECK((out[0].m - pt[0].m * pt[1].m).norm() < 1e-14);
    CHECK((out[1].m - pt[2].m).norm() == 0.0);
    CHECK((out[2].m - pt[3].m * pt[5].m).norm() < 1e-14);
    CHECK((out[3].m - pt[6].m).norm() == 0.0);

    // (g,h) -> g h^{-1} and its tangent via the Leibniz rule.
    IndexMap mu;
    mu.arity_in = 2;
    mu.arity_out = 1;
    mu.blocks = {{{0, false}, {1, true}}};
    std::vector<GroupElement> gh = {pt[0], pt[1]};
    std::vector<Mat> v = {random_tangent(pt[0], rng), random_tangent(pt[1], rng)};
    auto w = apply_tangent(mu, gh, v);
    const Mat hinv = group_inv(pt[1]).m;
    Mat expect = v[0] * hinv - pt[0].m * hinv * v[1] * hinv;
    CHECK((w[0] - expect).norm() < 1e-12);

    // Composition: substituted blocks agree with sequential application.
    IndexMap f1 = face_map(3, 1);  // (g1,g2,g3) -> (g1g2, g3)
    IndexMap f2 = face_map(2, 1);  // (a,b) -> ab
    IndexMap comp = compose_maps(f1, f2);
    std::vector<GroupElement> p3 = {pt[0], pt[1], pt[2]};
    auto seq = apply_point(f2, apply_point(f1, p3));
    auto direct = apply_point(comp, p3);
    CHECK((seq[0].m - direct[0].m).norm() < 1e-13);
}

TEST_CASE("basic 3-form at the identity matches the hand expansion") {
    InvariantPairing p{GroupTag::SU2, 1, 1.0};
    FormPtr eta = eta_form(p);
    auto basis = algebra_basis(GroupTag::SU2, 2);
    GroupElement e = group_identity(GroupTag::SU2, 2);

    // Orthonormal-direction frame at the identity: the structure-constant
    // contraction (1/2)<e1, [e2, e3]> = <e1, e1>/2 = c/4.
    Frame frame = {{basis[0]}, {basis[1]}, {basis[2]}};
    const double got = eval_form(eta, {e}, frame);
    CHECK(got == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(got == doctest::Approx(eta_by_hand(p, basis[0], basis[1], basis[2]))
                     .epsilon(1e-12));

    // Random algebra frames, and translated to a random base point where the
    // left-invariant value is unchanged.
    auto rng = make_rng(15);
    for (int t = 0; t < 25; ++t) {
        Mat x = random_algebra(GroupTag::SU2, 2, rng).m;
        Mat y = random_algebra(GroupTag::SU2, 2, rng).m;
        Mat z = random_algebra(GroupTag::SU2, 2, rng).m;
        const double want = eta_by_hand(p, x, y, z);
        CHECK(eval_form(eta, {e}, {{x}, {y}, {z}}) ==
              doctest::Approx(want).epsilon(1e-11));
        GroupElement g = random_group_element(GroupTag::SU2, 2, rng);
        CHECK(eval_form(eta, {g}, {{g.m * x}, {g.m * y}, {g.m * z}}) ==
              doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("alternation: repeated frame vectors give exactly zero") {
    InvariantPairing p{GroupTag::SU2, 1, 1.0};
    FormPtr eta = eta_form(p);
    FormPtr rho = rho_form(p);
    auto rng = make_rng(16);
    GroupElement g = random_group_element(GroupTag::SU2, 2, rng);
    Mat v = random_tangent(g, rng);
    Mat w = random_tangent(g, rng);
    CHECK(eval_form(eta, {g}, {{v}, {w}, {v}}) == 0.0);

    GroupElement h = random_group_element(GroupTag::SU2, 2, rng);
    TangentTuple t1 = {v, random_tangent(h, rng)};
    CHECK(eval_form(rho, {g, h}, {t1, t1}) == 0.0);

    // Swapping two frame vectors flips the sign exactly.
    Mat u = random_tangent(g, rng);
    const double a = eval_form(eta, {g}, {{u}, {v}, {w}});
    const double b = eval_form(eta, {g}, {{v}, {u}, {w}});
    CHECK(a == -b);
}

TEST_CASE("exterior derivative: closed-form chart oracle") {
    // On the R^2 translation group take f = x^2 y dx; df = -x^2 dx ^ dy
    // ... d(x^2 y) ^ dx = (2xy dx + x^2 dy) ^ dx = -x^2 dx ^ dy.
    auto data = std::make_shared<ChartFormData>();
    data->chart_tag = GroupTag::VectorGroupRd;
    data->chart_ambient = 3;
    data->degree = 1;
    data->algebra_valued = false;
    ChartTerm term;
    term.coef.c = 1.0;
    term.coef.monos = {{0, 2}, {1, 1}};
    term.dxs = {0};
    term.basis = -1;
    data->terms = {term};

    FormPtr f = chart_form(data, 0, 1);
    FormPtr df_fd = ext_d(f);
    auto ddata = std::make_shared<ChartFormData>(data->exterior_derivative());
    FormPtr df_exact = chart_form(ddata, 0, 1);

    auto rng = make_rng(17);
    for (int t = 0; t < 20; ++t) {
        GroupElement g = random_group_element(GroupTag::VectorGroupRd, 3, rng);
        Mat v1 = random_tangent(g, rng);
        Mat v2 = random_tangent(g, rng);
        const double exact = eval_form(df_exact, {g}, {{v1}, {v2}});
        const double fd = eval_form(df_fd, {g}, {{v1}, {v2}});
        // Cross-check the analytic derivative too: -x^2 (dx^dy)(v1,v2).
        const auto x = chart_coords(g);
        const double dx1 = std::real(v1(0, 2)), dy1 = std::real(v1(1, 2));
        const double dx2 = std::real(v2(0, 2)), dy2 = std::real(v2(1, 2));
        const double want = -x[0] * x[0] * (dx1 * dy2 - dx2 * dy1);
        CHECK(exact == doctest::Approx(want).epsilon(1e-12));
        CHECK(std::abs(fd - want) < 1e-9);
    }
}

TEST_CASE("structure equation: d theta + (1/2)[theta ^ theta] = 0") {
    // With the shuffle convention bracket_wedge(theta, theta)(u,v) =
    // 2 [theta(u), theta(v)], so the classical Maurer-Cartan equation reads
    // d theta = -(1/2) bracket_wedge(theta, theta).
    FormPtr th = theta_left(0, 1);
    FormPtr lhs = form_add(ext_d(th), form_scale(0.5, bracket_wedge(th, th)));
    auto rng = make_rng(18);
    for (int t = 0; t < 20; ++t) {
        GroupElement g = random_group_element(GroupTag::SU2, 2, rng);
        Mat v1 = random_tangent(g, rng);
        Mat v2 = random_tangent(g, rng);
        CHECK(eval_form_matrix(lhs, {g}, {{v1}, {v2}}).norm() < 1e-8);
    }
}

TEST_CASE("pullback identity for the 3-form: Delta eta = d rho") {
    InvariantPairing p{GroupTag::SU2, 1, 1.0};
    FormPtr d_eta = simplicial_delta(eta_form(p));   // eta_2 - eta_12 + eta_1
    FormPtr d_rho = ext_d(rho_form(p));
    auto rng = make_rng(19);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::vector<GroupElement> pt = {
            random_group_element(GroupTag::SU2, 2, rng),
            random_group_element(GroupTag::SU2, 2, rng)};
        Frame frame;
        for (int i = 0; i < 3; ++i)
            frame.push_back({random_tangent(pt[0], rng),
                             random_tangent(pt[1], rng)});
        const double a = eval_form(d_eta, pt, frame);
        const double b = eval_form(d_rho, pt, frame);
        worst = std::max(worst, std::abs(a - b));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("two-slot 2-form is simplicially closed: Delta rho = 0") {
    InvariantPairing p{GroupTag::SU2, 1, 1.0};
    FormPtr d_rho = simplicial_delta(rho_form(p));
    auto rng = make_rng(20);
    for (int t = 0; t < 50; ++t) {
        std::vector<GroupElement> pt = {
            random_group_element(GroupTag::SU2, 2, rng),
            random_group_element(GroupTag::SU2, 2, rng),
            random_group_element(GroupTag::SU2, 2, rng)};
        Frame frame;
        for (int i = 0; i < 2; ++i)
            frame.push_back({random_tangent(pt[0], rng),
                             random_tangent(pt[1], rng),
                             random_tangent(pt[2], rng)});
        CHECK(std::abs(eval_form(d_rho, pt, frame)) < 1e-10);
    }
}

TEST_CASE("simplicial coboundary squares to zero algebraically") {
    InvariantPairing p{GroupTag::SU2, 1, 1.0};
    for (FormPtr f : {eta_form(p), rho_form(p)}) {
        FormPtr dd = simplicial_delta(simplicial_delta(f));
        // The double coboundary collects to the empty sum.
        REQUIRE(dd->kind == FormKind::Sum);
        CHECK(dd->children.empty());
        auto rng = make_rng(21);
        std::vector<GroupElement> pt;
        for (int i = 0; i < f->arity + 2; ++i)
            pt.push_back(random_group_element(GroupTag::SU2, 2, rng));
        Frame frame;
        for (int i = 0; i < f->degree; ++i) {
            TangentTuple t;
            for (auto& g : pt) t.push_back(random_tangent(g, rng));
            frame.push_back(t);
        }
        CHECK(eval_form(dd, pt, frame) == 0.0);
    }
}

TEST_CASE("pullback functoriality") {
    InvariantPairing p{GroupTag::SU2, 1, 1.0};
    FormPtr rho = rho_form(p);
    auto rng = make_rng(22);

    // Re-indexing maps (no products): iterated pullback is bit-exact.
    IndexMap pr = projection_map(4, {2, 0});        // G^4 -> G^2
    IndexMap sw = projection_map(3, {1, 2, 0, 1});  // G^3 -> G^4
    FormPtr nested = form_pullback(sw, form_pullback(pr, rho));
    FormPtr composed = form_pullback(compose_maps(sw, pr), rho);
    for (int t = 0; t < 10; ++t) {
        std::vector<GroupElement> pt;
        for (int i = 0; i < 3; ++i)
            pt.push_back(random_group_element(GroupTag::SU2, 2, rng));
        Frame frame;
        for (int i = 0; i < 2; ++i) {
            TangentTuple tt;
            for (auto& g : pt) tt.push_back(random_tangent(g, rng));
            frame.push_back(tt);
        }
        CHECK(eval_form(nested, pt, frame) == eval_form(composed, pt, frame));
    }

    // Multiplicative maps: composition reassociates matrix products, so the
    // agreement is to round-off.
    IndexMap f1 = face_map(3, 1);
    IndexMap f2 = face_map(2, 1);
    FormPtr eta = eta_form(p);
    FormPtr nested2 = form_pullback(f1, form_pullback(f2, eta));
    FormPtr composed2 = form_pullback(compose_maps(f1, f2), eta);
    for (int t = 0; t < 10; ++t) {
        std::vector<GroupElement> pt;
        for (int i = 0; i < 3; ++i)
            pt.push_back(random_group_element(GroupTag::SU2, 2, rng));
        Frame frame;
        for (int i = 0; i < 3; ++i) {
            TangentTuple tt;
            for (auto& g : pt) tt.push_back(random_tangent(g, rng));
            frame.push_back(tt);
        }
        CHECK(eval_form(nested2, pt, frame) ==
              doctest::Approx(eval_form(composed2, pt, frame)).epsilon(1e-12));
    }
}

TEST_CASE("d of d is zero up to the stencil error") {
    InvariantPairing p{GroupTag::SU2, 1, 1.0};
    auto basis = algebra_basis(GroupTag::SU2, 2);
    FormPtr one_form = pairing_wedge(
        p, constant_algebra({GroupTag::SU2, basis[0]}, 1), theta_left(0, 1));
    FormPtr dd = ext_d(ext_d(one_form));
    auto rng = make_rng(23);
    for (int t = 0; t < 10; ++t) {
        GroupElement g = random_group_element(GroupTag::SU2, 2, rng);
        Frame frame = {{random_tangent(g, rng)},
                       {random_tangent(g, rng)},
                       {random_tangent(g, rng)}};
        CHECK(std::abs(eval_form(dd, {g}, frame)) < 1e-6);
    }
}

TEST_CASE("torus chart: coordinates, dx, periodicity") {
    auto rng = make_rng(24);
    GroupElement g = random_group_element(GroupTag::UnitaryN, 3, rng);
    auto x = chart_coords(g);
    for (int j = 0; j < 3; ++j) {
        CHECK(x[j] >= 0.0);
        CHECK(x[j] < 1.0);
        // dx_j(g D_k) = delta_jk for the torus basis.
        auto basis = algebra_basis(GroupTag::UnitaryN, 3);
        for (int k = 0; k < 3; ++k)
            CHECK(chart_dx(g, g.m * basis[k], j) ==
                  doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-12));
    }
}
