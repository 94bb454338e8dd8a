#include "gerbecalc/group.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace gerbecalc {

using cplx = std::complex<double>;
static const cplx I1(0.0, 1.0);

const char* group_tag_name(GroupTag tag) {
    switch (tag) {
        case GroupTag::SU2: return "SU2";
        case GroupTag::UnitaryN: return "UnitaryN";
        case GroupTag::VectorGroupRd: return "VectorGroupRd";
    }
    return "?";
}

GroupTag group_tag_from_name(const std::string& name) {
    if (name == "SU2") return GroupTag::SU2;
    if (name == "UnitaryN") return GroupTag::UnitaryN;
    if (name == "VectorGroupRd") return GroupTag::VectorGroupRd;
    detail::fail("unknown group tag '", name, "'");
}

GroupElement group_identity(GroupTag tag, int ambient) {
    GroupElement g;
    g.tag = tag;
    g.m = Mat::Identity(ambient, ambient);
    return g;
}

GroupElement group_mul(const GroupElement& a, const GroupElement& b) {
    GC_CHECK(a.tag == b.tag && a.ambient() == b.ambient(),
             "group_mul: mismatched groups");
    return GroupElement{a.tag, a.m * b.m};
}

GroupElement group_inv(const GroupElement& g) {
    switch (g.tag) {
        case GroupTag::SU2:
        case GroupTag::UnitaryN:
            return GroupElement{g.tag, g.m.adjoint()};
        case GroupTag::VectorGroupRd: {
            // [[I, v], [0, 1]]^{-1} = [[I, -v], [0, 1]]
            Mat m = g.m;
            const int d = g.ambient() - 1;
            m.block(0, d, d, 1) = -m.block(0, d, d, 1);
            return GroupElement{g.tag, m};
        }
    }
    detail::fail("group_inv: bad tag");
}

static bool is_numerically_diagonal(const Mat& m) {
    const int n = static_cast<int>(m.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && std::abs(m(i, j)) > 1e-13) return false;
    return true;
}

GroupElement group_exp(const AlgebraVector& x) {
    switch (x.tag) {
        case GroupTag::SU2: {
            // X in su(2) has X^2 = -theta^2 I with theta^2 = det X >= 0, so
            // exp X = cos(theta) I + sinc(theta) X exactly.
            const double th2 = std::real(x.m.determinant());
            const double th = std::sqrt(std::max(0.0, th2));
            double s;  // sin(theta)/theta
            if (th < 1e-8) {
                s = 1.0 - th2 / 6.0;
            } else {
                s = std::sin(th) / th;
            }
            Mat m = std::cos(th) * Mat::Identity(2, 2) + s * x.m;
            return GroupElement{x.tag, m};
        }
        case GroupTag::UnitaryN: {
            if (is_numerically_diagonal(x.m)) {
                Mat m = Mat::Zero(x.m.rows(), x.m.cols());
                for (int j = 0; j < x.m.rows(); ++j) m(j, j) = std::exp(x.m(j, j));
                return GroupElement{x.tag, m};
            }
            return GroupElement{x.tag, x.m.exp()};
        }
        case GroupTag::VectorGroupRd: {
            // Nilpotent: exp = I + X.
            return GroupElement{x.tag, Mat::Identity(x.m.rows(), x.m.cols()) + x.m};
        }
    }
    detail::fail("group_exp: bad tag");
}

AlgebraVector group_log(const GroupElement& g) {
    switch (g.tag) {
        case GroupTag::SU2: {
            const Eigen::Vector4d q = su2_to_quaternion(g);
            const double w = q[0];
            const double s = std::sqrt(q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
            GC_CHECK(s > 1e-12 || w > 0.0,
                     "group_log: SU2 element at the cut locus (g = -1)");
            const double th = std::atan2(s, w);
            const double f = (s < 1e-8) ? (1.0 / w) : (th / s);
            Mat m(2, 2);
            m << I1 * (f * q[3]), f * q[2] + I1 * (f * q[1]),
                -f * q[2] + I1 * (f * q[1]), -I1 * (f * q[3]);
            return AlgebraVector{g.tag, m};
        }
        case GroupTag::UnitaryN: {
            if (is_numerically_diagonal(g.m)) {
                Mat m = Mat::Zero(g.m.rows(), g.m.cols());
                for (int j = 0; j < g.m.rows(); ++j) {
                    const cplx z = g.m(j, j);
                    GC_CHECK(std::abs(z + 1.0) > 1e-12 || std::imag(z) != 0.0,
                             "group_log: unitary eigenvalue at the branch cut");
                    m(j, j) = cplx(0.0, std::arg(z));
                }
                return AlgebraVector{g.tag, m};
            }
            return AlgebraVector{g.tag, g.m.log()};
        }
        case GroupTag::VectorGroupRd: {
            return AlgebraVector{g.tag, g.m - Mat::Identity(g.m.rows(), g.m.cols())};
        }
    }
    detail::fail("group_log: bad tag");
}

AlgebraVector log_between(const GroupElement& a, const GroupElement& b) {
    return group_log(group_mul(group_inv(a), b));
}

int algebra_dim(GroupTag tag, int ambient) {
    switch (tag) {
        case GroupTag::SU2: return 3;
        case GroupTag::UnitaryN: return ambient;
        case GroupTag::VectorGroupRd: return ambient - 1;
    }
    detail::fail("algebra_dim: bad tag");
}

std::vector<Mat> algebra_basis(GroupTag tag, int ambient) {
    std::vector<Mat> basis;
    switch (tag) {
        case GroupTag::SU2: {
            // e_a = -(i/2) sigma_a; [e_1, e_2] = e_3 and cyclic.
            Mat e1(2, 2), e2(2, 2), e3(2, 2);
            e1 << 0, -0.5 * I1, -0.5 * I1, 0;
            e2 << 0, -0.5, 0.5, 0;
            e3 << -0.5 * I1, 0, 0, 0.5 * I1;
            basis = {e1, e2, e3};
            break;
        }
        case GroupTag::UnitaryN: {
            for (int j = 0; j < ambient; ++j) {
                Mat e = Mat::Zero(ambient, ambient);
                e(j, j) = kTwoPi * I1;
                basis.push_back(e);
            }
            break;
        }
        case GroupTag::VectorGroupRd: {
            const int d = ambient - 1;
            for (int j = 0; j < d; ++j) {
                Mat e = Mat::Zero(ambient, ambient);
                e(j, d) = 1.0;
                basis.push_back(e);
            }
            break;
        }
    }
    return basis;
}

Mat project_algebra(GroupTag tag, const Mat& m) {
    switch (tag) {
        case GroupTag::SU2: {
            Mat a = 0.5 * (m - m.adjoint());
            a -= (a.trace() / 2.0) * Mat::Identity(2, 2);
            return a;
        }
        case GroupTag::UnitaryN:
            return 0.5 * (m - m.adjoint());
        case GroupTag::VectorGroupRd: {
            Mat a = Mat::Zero(m.rows(), m.cols());
            const int d = static_cast<int>(m.rows()) - 1;
            for (int j = 0; j < d; ++j) a(j, d) = std::real(m(j, d));
            return a;
        }
    }
    detail::fail("project_algebra: bad tag");
}

static AlgebraVector mc_impl(const GroupElement& g, const Mat& v, bool right,
                             double tol) {
    Mat x = right ? Mat(v * group_inv(g).m) : Mat(group_inv(g).m * v);
    Mat p = project_algebra(g.tag, x);
    const double scale = std::max(1.0, x.norm());
    GC_CHECK((x - p).norm() <= tol * scale,
             "Maurer-Cartan form: vector is not tangent at g (defect ",
             (x - p).norm(), ")");
    return AlgebraVector{g.tag, p};
}

AlgebraVector left_mc(const GroupElement& g, const Mat& v, double tol) {
    return mc_impl(g, v, /*right=*/false, tol);
}

AlgebraVector right_mc(const GroupElement& g, const Mat& v, double tol) {
    return mc_impl(g, v, /*right=*/true, tol);
}

int chart_dim(GroupTag tag, int ambient) {
    switch (tag) {
        case GroupTag::UnitaryN: return ambient;
        case GroupTag::VectorGroupRd: return ambient - 1;
        case GroupTag::SU2:
            detail::fail("chart_dim: SU2 carries no coordinate chart");
    }
    detail::fail("chart_dim: bad tag");
}

Eigen::VectorXd chart_coords(const GroupElement& g) {
    switch (g.tag) {
        case GroupTag::UnitaryN: {
            Eigen::VectorXd x(g.ambient());
            for (int j = 0; j < g.ambient(); ++j) {
                double a = std::arg(g.m(j, j)) / kTwoPi;
                if (a < 0) a += 1.0;
                x[j] = a;
            }
            return x;
        }
        case GroupTag::VectorGroupRd: {
            const int d = g.ambient() - 1;
            Eigen::VectorXd x(d);
            for (int j = 0; j < d; ++j) x[j] = std::real(g.m(j, d));
            return x;
        }
        case GroupTag::SU2:
            detail::fail("chart_coords: SU2 carries no coordinate chart");
    }
    detail::fail("chart_coords: bad tag");
}

double chart_dx(const GroupElement& g, const Mat& v, int j) {
    switch (g.tag) {
        case GroupTag::UnitaryN: {
            const Mat x = group_inv(g).m * v;
            return std::imag(x(j, j)) / kTwoPi;
        }
        case GroupTag::VectorGroupRd:
            return std::real(v(j, g.ambient() - 1));
        case GroupTag::SU2:
            detail::fail("chart_dx: SU2 carries no coordinate chart");
    }
    detail::fail("chart_dx: bad tag");
}

Eigen::Vector4d su2_to_quaternion(const GroupElement& g) {
    GC_CHECK(g.tag == GroupTag::SU2, "su2_to_quaternion: not an SU2 element");
    Eigen::Vector4d q;
    q[0] = 0.5 * (std::real(g.m(0, 0)) + std::real(g.m(1, 1)));
    q[1] = 0.5 * (std::imag(g.m(0, 1)) + std::imag(g.m(1, 0)));
    q[2] = 0.5 * (std::real(g.m(0, 1)) - std::real(g.m(1, 0)));
    q[3] = 0.5 * (std::imag(g.m(0, 0)) - std::imag(g.m(1, 1)));
    return q;
}

GroupElement su2_from_quaternion(const Eigen::Vector4d& q) {
    Mat m(2, 2);
    m << q[0] + I1 * q[3], q[2] + I1 * q[1], -q[2] + I1 * q[1], q[0] - I1 * q[3];
    return GroupElement{GroupTag::SU2, m};
}

GroupElement random_group_element(GroupTag tag, int ambient, Rng& rng) {
    switch (tag) {
        case GroupTag::SU2: {
            std::normal_distribution<double> n(0.0, 1.0);
            Eigen::Vector4d q;
            do {
                for (int i = 0; i < 4; ++i) q[i] = n(rng);
            } while (q.norm() < 1e-6);
            q.normalize();
            return su2_from_quaternion(q);
        }
        case GroupTag::UnitaryN: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            Mat m = Mat::Zero(ambient, ambient);
            for (int j = 0; j < ambient; ++j)
                m(j, j) = std::exp(I1 * (kTwoPi * u(rng)));
            return GroupElement{tag, m};
        }
        case GroupTag::VectorGroupRd: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            GroupElement g = group_identity(tag, ambient);
            const int d = ambient - 1;
            for (int j = 0; j < d; ++j) g.m(j, d) = u(rng);
            return g;
        }
    }
    detail::fail("random_group_element: bad tag");
}

AlgebraVector random_algebra(GroupTag tag, int ambient, Rng& rng, double scale) {
    std::normal_distribution<double> n(0.0, scale);
    const auto basis = algebra_basis(tag, ambient);
    Mat m = Mat::Zero(ambient, ambient);
    for (const auto& e : basis) m += n(rng) * e;
    return AlgebraVector{tag, m};
}

Mat random_tangent(const GroupElement& g, Rng& rng, double scale) {
    return g.m * random_algebra(g.tag, g.ambient(), rng, scale).m;
}

}  // namespace gerbecalc
