#include "gerbecalc/wzw.hpp"

#include <algorithm>
#include <cmath>

namespace gerbecalc {

namespace {

std::complex<double> unit_phase(double x) {
    return {std::cos(kTwoPi * x), std::sin(kTwoPi * x)};
}

// Representative of x mod 1 in [-1/2, 1/2).
double mod_one(double x) {
    double r = x - std::round(x);
    if (r >= 0.5) r -= 1.0;
    return r;
}

void check_su2_surface(const GroupMesh& gm, const char* what) {
    GC_CHECK(gm.tag == GroupTag::SU2, std::string(what) + ": SU(2) maps only");
    GC_CHECK(gm.arity == 1, std::string(what) + ": arity-1 map expected");
    GC_CHECK(gm.mesh.dim == 2, std::string(what) + ": surface mesh expected");
}

}  // namespace

// ---------------------------------------------------------------------------
// Wess-Zumino action and surface holonomy
// ---------------------------------------------------------------------------

WZHolonomy wz_action(const GroupMesh& sphere, int k, unsigned seed,
                     int layers) {
    check_su2_surface(sphere, "wz_action");
    GC_CHECK(is_closed(sphere.mesh), "wz_action: the surface must be closed");
    GC_CHECK(k >= 1, "wz_action: level must be positive");

    GroupMesh ball = cone_extension(sphere, layers, seed);
    FormPtr eta = eta_form(calibrated_pairing(1));
    double raw = integrate_pullback(eta, ball);

    WZHolonomy h;
    h.level = k;
    h.wz_integral = mod_one(raw);
    h.value = unit_phase(static_cast<double>(k) * h.wz_integral);
    h.extension_id = seed;
    return h;
}

PWResult polyakov_wiegmann_check(const GroupMesh& phi1, const GroupMesh& phi2,
                                 int k, unsigned seed, int layers) {
    check_su2_surface(phi1, "polyakov_wiegmann_check");
    check_su2_surface(phi2, "polyakov_wiegmann_check");

    // One seed for all three extensions: when one factor is constant the
    // product cone is then bit-identical to the other factor's cone.
    WZHolonomy h1 = wz_action(phi1, k, seed, layers);
    WZHolonomy h2 = wz_action(phi2, k, seed, layers);
    GroupMesh prod = pointwise_product(phi1, phi2);
    WZHolonomy h12 = wz_action(prod, k, seed, layers);

    FormPtr rho = rho_form(calibrated_pairing(k));
    double twist = integrate_pullback(rho, pair_maps(phi1, phi2));

    PWResult r;
    r.lhs = h1.value * h2.value;
    r.rhs = h12.value * unit_phase(twist);
    r.defect = std::abs(r.lhs / r.rhs - 1.0);
    return r;
}

// ---------------------------------------------------------------------------
// Mickelsson product on (disc map, circle value) pairs
// ---------------------------------------------------------------------------

MickelssonElement make_mickelsson(const GroupMesh& disc,
                                  std::complex<double> z, int level) {
    check_su2_surface(disc, "make_mickelsson");
    GC_CHECK(level >= 1, "make_mickelsson: level must be positive");
    MickelssonElement e;
    e.disc = disc;
    e.z = z;
    e.level = level;
    e.factors = {disc};
    return e;
}

namespace {

std::vector<GroupMesh> factor_list(const MickelssonElement& e) {
    if (!e.factors.empty()) return e.factors;
    return {e.disc};
}

}  // namespace

MickelssonElement me_product(const MickelssonElement& a,
                             const MickelssonElement& b) {
    check_su2_surface(a.disc, "me_product");
    check_su2_surface(b.disc, "me_product");
    GC_CHECK(a.level == b.level, "me_product: levels must agree");

    std::vector<GroupMesh> fs = factor_list(a);
    const int split = static_cast<int>(fs.size());
    for (const GroupMesh& f : factor_list(b)) fs.push_back(f);
    const int n = static_cast<int>(fs.size());

    GroupMesh joint = fs[0];
    for (int i = 1; i < n; ++i) joint = pair_maps(joint, fs[i]);

    // (g_1,...,g_n) -> (g_1...g_split, g_{split+1}...g_n), then ρ.
    IndexMap mul;
    mul.arity_in = n;
    mul.arity_out = 2;
    mul.blocks.resize(2);
    for (int i = 0; i < n; ++i)
        mul.blocks[i < split ? 0 : 1].push_back({i, false});
    FormPtr twist_form =
        form_pullback(mul, rho_form(calibrated_pairing(a.level)));
    double twist = integrate_pullback(twist_form, joint);

    MickelssonElement p;
    p.disc = pointwise_product(a.disc, b.disc);
    p.z = a.z * b.z * unit_phase(twist);
    p.level = a.level;
    p.factors = std::move(fs);
    return p;
}

namespace {

// Lexicographic key on the disc values; used to order a pair of elements
// canonically so the equivalence test is symmetric by construction.
bool disc_less(const GroupMesh& a, const GroupMesh& b) {
    if (a.mesh.vertex_count != b.mesh.vertex_count)
        return a.mesh.vertex_count < b.mesh.vertex_count;
    for (int v = 0; v < a.mesh.vertex_count; ++v) {
        const Mat& ma = a.values[v][0].m;
        const Mat& mb = b.values[v][0].m;
        for (int i = 0; i < ma.rows(); ++i)
            for (int j = 0; j < ma.cols(); ++j) {
                double ra = ma(i, j).real(), rb = mb(i, j).real();
                if (ra != rb) return ra < rb;
                double ia = ma(i, j).imag(), ib = mb(i, j).imag();
                if (ia != ib) return ia < ib;
            }
    }
    return false;
}

}  // namespace

bool me_equal(const MickelssonElement& a, const MickelssonElement& b,
              double tol, unsigned seed) {
    GC_CHECK(a.level == b.level, "me_equal: levels must agree");
    const MickelssonElement* lo = &a;
    const MickelssonElement* hi = &b;
    if (disc_less(hi->disc, lo->disc)) std::swap(lo, hi);

    GroupMesh sphere = glue_sphere(lo->disc, hi->disc);
    WZHolonomy s = wz_action(sphere, a.level, seed);
    std::complex<double> ratio = hi->z / lo->z;
    return std::abs(ratio - s.value) < tol;
}

// ---------------------------------------------------------------------------
// Log-holonomy derivative along a loop family (monopole model)
// ---------------------------------------------------------------------------

namespace {

GroupElement translation_point(const Eigen::Vector3d& p) {
    GroupElement g = group_identity(GroupTag::VectorGroupRd, 4);
    for (int i = 0; i < 3; ++i) g.m(i, 3) = p[i];
    return g;
}

Eigen::Vector3d point_of(const Mat& m) {
    return m.col(3).head(3).real();
}

// Geodesic from the north pole to w on the unit sphere, parameter r in [0,1].
Eigen::Vector3d cap_point(const Eigen::Vector3d& w_in, double r) {
    Eigen::Vector3d u(0.0, 0.0, 1.0);
    Eigen::Vector3d w = w_in.normalized();
    double alpha = std::acos(std::clamp(w.z(), -1.0, 1.0));
    GC_CHECK(alpha < 3.0,
             "cap construction fails for loops near the south pole");
    if (alpha < 1e-12) return u;
    double s = std::sin(alpha);
    return (std::sin((1.0 - r) * alpha) * u + std::sin(r * alpha) * w) / s;
}

SimplicialMesh circle_mesh(int segments) {
    SimplicialMesh m;
    m.dim = 1;
    m.vertex_count = segments;
    m.coords.resize(segments);
    for (int i = 0; i < segments; ++i) {
        Eigen::VectorXd c(1);
        c[0] = static_cast<double>(i) / segments;
        m.coords[i] = c;
    }
    for (int i = 0; i < segments; ++i) {
        SimplicialMesh::Cell c;
        c.v[0] = i;
        c.v[1] = (i + 1) % segments;
        c.sign = 1;
        m.cells.push_back(c);
    }
    return m;
}

// Loop at time t sampled on `segments` circle vertices, spanned to a cap
// over the disc: disc vertex at radius r and angle 2*pi*s maps to the
// geodesic point cap_point(loop(t, s), r).
GroupMesh cap_mesh(const std::function<Eigen::Vector3d(double, double)>& loop,
                   double t, int cap_level) {
    SimplicialMesh disc = disc_mesh(cap_level);
    return make_group_mesh(
        disc, GroupTag::VectorGroupRd, 4, 1,
        [&](int, const Eigen::VectorXd& xy) {
            double r = std::min(1.0, xy.norm());
            double s = std::atan2(xy[1], xy[0]) / kTwoPi;
            if (s < 0.0) s += 1.0;
            return std::vector<GroupElement>{
                translation_point(cap_point(loop(t, s), r))};
        });
}

}  // namespace

FormPtr monopole_curvature(int charge) {
    double scale = static_cast<double>(charge) / (2.0 * kTwoPi);
    return custom_real_form(
        2, 1,
        [scale](const std::vector<GroupElement>& pt, const Frame& fr) {
            Eigen::Vector3d p = point_of(pt[0].m);
            Eigen::Vector3d a = point_of(fr[0][0]);
            Eigen::Vector3d b = point_of(fr[1][0]);
            double r = p.norm();
            return scale * p.dot(a.cross(b)) / (r * r * r);
        });
}

Lemma6Result lemma6_check(
    const FormPtr& curvature,
    const std::function<Eigen::Vector3d(double, double)>& loop, double t0,
    double dt, int segments, int cap_level) {
    GC_CHECK(curvature->degree == 2 && curvature->arity == 1,
             "lemma6_check: curvature must be a degree-2 form on single maps");
    GC_CHECK(dt > 0.0, "lemma6_check: dt must be positive");

    // Finite-difference derivative of (log Hol)/(2 pi i) = integral of the
    // curvature over the cap bounded by the loop.
    double cap_plus = integrate_pullback(curvature, cap_mesh(loop, t0 + dt, cap_level));
    double cap_minus =
        integrate_pullback(curvature, cap_mesh(loop, t0 - dt, cap_level));
    double fd = (cap_plus - cap_minus) / (2.0 * dt);

    // Fiber integral over the circle of the curvature contracted with the
    // variation field: slots carry the loop at t0 and t0 +/- dt, the
    // variation is the central difference of the neighbour slots.
    SimplicialMesh circle = circle_mesh(segments);
    GroupMesh family = make_group_mesh(
        circle, GroupTag::VectorGroupRd, 4, 3,
        [&](int, const Eigen::VectorXd& c) {
            double s = c[0];
            return std::vector<GroupElement>{
                translation_point(loop(t0, s)),
                translation_point(loop(t0 + dt, s)),
                translation_point(loop(t0 - dt, s))};
        });
    FormPtr contracted = custom_real_form(
        1, 3,
        [&curvature, dt](const std::vector<GroupElement>& pt, const Frame& fr) {
            Mat vt = (pt[1].m - pt[2].m) / (2.0 * dt);
            return eval_form(curvature, {pt[0]}, {{vt}, {fr[0][0]}});
        });
    double fiber = integrate_pullback(contracted, family);

    Lemma6Result r;
    r.fd_derivative = fd;
    r.fiber_integral = fiber;
    r.defect = std::abs(fd - fiber);
    return r;
}

}  // namespace gerbecalc
