#include <cmath>
#include <vector>

#include <doctest.h>

#include "check.hpp"
#include "logcal/ucp_recovery.hpp"
#include "oracles.hpp"

using namespace logcal;

namespace {

const Mass m2(2.0);

ModelPtr circle(int K, double R = 1.0)
{
    return build_model(ModelDescriptor::circle(R, K));
}

PotentialField cosine(double amplitude)
{
    PotentialSpec s;
    s.expression = "cosine";
    s.amplitude = amplitude;
    return PotentialField::from_spec(s, ManifoldKind::Circle);
}

std::vector<double> grid(double a, double b, int n)
{
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        s[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    }
    return s;
}

double recover_cosine(int K)
{
    const auto c = circle(K);
    const auto V = cosine(0.3);
    const SchrodingerOperator op(c, m2, V);
    const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi});
    const auto sols = forward_solutions(op, make_source_basis(c, set, 6));
    const auto rec = recover_potential(*c, m2, set, V.restriction(set), sols);
    return recovery_error(rec, V);
}

} // namespace

TEST_CASE("finite-rank unique continuation against the dense oracle")
{
    for (int K : {8, 16}) {
        const auto c = circle(K);
        const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi / 2});
        const auto rep = ucp_nullspace_test(*c, m2, set);
        double ratio = 0.0;
        const int expected = oracle::dense_null_dimension(
            oracle::circle_cauchy_constraint(K, 2.0, 0.0, oracle::pi / 2, 2 * (2 * K - 1)), 1e-9, &ratio);
        CHECK(rep.space_dimension == 2 * K - 1);
        CHECK(rep.samples == 2 * (2 * K - 1));
        CHECK(rep.null_dimension == expected);
        CHECK(rep.sigma_min / rep.sigma_max == doctest::Approx(ratio).epsilon(1e-3));
        if (K == 8) {
            // frozen oracle output
            CHECK(expected == 0);
            CHECK(rep.passed);
        } else {
            CHECK(expected == 4);
            CHECK_FALSE(rep.passed);
        }
    }

    const auto wide = circle(16);
    const auto big = restrict_to_observation(*wide, AngularInterval{0.0, 0.9 * 2 * oracle::pi});
    CHECK(ucp_nullspace_test(*wide, m2, big).passed);
}

TEST_CASE("unique continuation needs enough samples")
{
    const auto c = circle(8);
    const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi / 2});
    UcpOptions one;
    one.samples = {Point{0.5}};
    CHECK_ERROR_KIND(ucp_nullspace_test(*c, m2, set, one), ErrorKind::Underdetermined);
    UcpOptions zero;
    zero.node_multiplier = 0;
    CHECK_ERROR_KIND(ucp_nullspace_test(*c, m2, set, zero), ErrorKind::Underdetermined);
}

TEST_CASE("the Cauchy pair constrains more than the solution alone")
{
    // beyond K = 8 both smallest singular values fall below double precision
    const auto c = circle(8);
    const auto set = restrict_to_observation(*c, AngularInterval{0.0, 0.6});
    const auto rep = ucp_nullspace_test(*c, m2, set);
    CHECK(rep.sigma_min > 0.0);
    CHECK(rep.solution_only_sigma_min / rep.solution_only_sigma_max < 1e-6 * (rep.sigma_min / rep.sigma_max));
}

TEST_CASE("moments")
{
    const auto s = grid(0.0, 60.0, 6001);
    std::vector<double> phi(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        phi[i] = std::exp(-s[i]);
    }
    const auto rep = moment_vector(s, phi, 3);
    const std::vector<double> gamma{1, 1, 2, 6};
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(rep.moments[k] == doctest::Approx(gamma[k]).epsilon(1e-9));
        CHECK(rep.tail_bounds[k] < 1e-20);
    }
    CHECK(rep.decay_rate == doctest::Approx(1.0).epsilon(1e-9));

    const std::vector<double> zero(s.size(), 0.0);
    for (double v : moment_vector(s, zero, 4).moments) {
        CHECK(v == 0.0);
    }

    // vanishing zeroth moment only
    const auto fine = grid(0.0, 40.0, 40001);
    phi.resize(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) {
        phi[i] = std::exp(-2 * fine[i]) - 2 * std::exp(-4 * fine[i]);
    }
    const auto mix = moment_vector(fine, phi, 4);
    CHECK(std::fabs(mix.moments[0]) < 1e-10);
    for (int k = 1; k <= 4; ++k) {
        const double expected = oracle::gamma_moment(k, 2.0) - 2 * oracle::gamma_moment(k, 4.0);
        CHECK(expected != 0.0);
        CHECK(mix.moments[static_cast<std::size_t>(k)] == doctest::Approx(expected).epsilon(1e-8));
    }

    std::vector<double> growing(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        growing[i] = 1.0 + s[i];
    }
    CHECK_ERROR_KIND(moment_vector(s, growing, 2), ErrorKind::NoExponentialDecay);
    CHECK_ERROR_KIND(moment_vector(s, std::vector<double>(3, 1.0), 2), ErrorKind::LengthMismatch);
}

TEST_CASE("moment completeness")
{
    const auto s = grid(0.0, 10.0, 401);
    const auto none = moment_completeness(s, std::vector<double>(s.size(), 0.0), 4);
    CHECK(none.moments_vanish);
    CHECK(none.amplitudes_vanish);
    CHECK(none.consistent);

    std::vector<double> phi(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        phi[i] = std::exp(-s[i]) + 0.5 * std::exp(-3 * s[i]);
    }
    const auto some = moment_completeness(s, phi, 4);
    CHECK_FALSE(some.moments_vanish);
    CHECK(some.max_amplitude == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(some.consistent);
}

TEST_CASE("pairings")
{
    const auto c = circle(6);
    const SchrodingerOperator op(c, m2, PotentialField::zero());
    const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi});
    const auto src = make_source_basis(c, set, 3);
    const auto& f = src.sources[0].coefficients;

    const auto p = nonvanishing_pairing_search(op, 2, {f});
    CHECK(p.candidate == 0);
    const int j = c->block_offset(2) + p.l - 1;
    CHECK(p.value == doctest::Approx(f.coefficients()[j] / oracle::l_multiplier(4.0, 2.0)).epsilon(1e-12));

    Eigen::VectorXd a = f.coefficients();
    a.segment(c->block_offset(2), 2).setZero();
    const FieldCoefficients hole(c, a);
    CHECK_ERROR_KIND(nonvanishing_pairing_search(op, 2, {hole}), ErrorKind::AllPairingsVanish);
    CHECK(nonvanishing_pairing_search(op, 2, {hole, f}).candidate == 1);

    const SchrodingerOperator opv(c, m2, cosine(0.3));
    for (int k = 0; k < 6; ++k) {
        CHECK(nonvanishing_pairing_search(opv, k, {f}).candidate == 0);
    }
}

TEST_CASE("recovery of a vanishing potential")
{
    const auto c = circle(24);
    const SchrodingerOperator op(c, m2, PotentialField::zero());
    const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi});
    const auto sols = forward_solutions(op, make_source_basis(c, set, 1));
    const auto rec = recover_potential(*c, m2, set, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.size())), sols);
    CHECK(rec.masked == 0);
    for (std::size_t n = 0; n < rec.nodes.size(); ++n) {
        REQUIRE(rec.covered[n]);
        CHECK(std::fabs(rec.values[static_cast<Eigen::Index>(n)]) < 1e-8);
    }
}

TEST_CASE("recovery of a cosine potential")
{
    const double e32 = recover_cosine(32);
    const double e48 = recover_cosine(48);
    CHECK(e48 <= 1e-4);
    CHECK(e48 < e32);

    // known values are copied on the observation set
    const auto c = circle(16);
    const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi});
    const SchrodingerOperator op(c, m2, cosine(0.3));
    const auto sols = forward_solutions(op, make_source_basis(c, set, 6));
    const Eigen::VectorXd known = cosine(0.3).restriction(set);
    const auto rec = recover_potential(*c, m2, set, known, sols);
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(rec.values[set.node_indices()[i]] == known[static_cast<Eigen::Index>(i)]);
        CHECK(rec.observed[static_cast<std::size_t>(set.node_indices()[i])]);
    }
    CHECK_ERROR_KIND(recover_potential(*c, m2, set, Eigen::VectorXd::Zero(2), sols), ErrorKind::LengthMismatch);
    CHECK_ERROR_KIND(recover_potential(*c, m2, set, known, {}), ErrorKind::EmptyCoverage);
}

TEST_CASE("nodes where every solution vanishes are masked")
{
    // u = sin(theta) vanishes at theta = pi, outside the observation arc
    const auto c = circle(8);
    const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi / 2});
    const auto u = FieldCoefficients::eigenfunction(c, 1, 2);
    const std::vector<SolutionSample> sols{{0, u, apply_L(u, m2)}};
    const Eigen::VectorXd known = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.size()));
    CHECK_ERROR_KIND(recover_potential(*c, m2, set, known, sols), ErrorKind::EmptyCoverage);

    RecoveryOptions opt;
    opt.require_full_coverage = false;
    const auto rec = recover_potential(*c, m2, set, known, sols, opt);
    CHECK(rec.masked >= 1);
    int at_pi = -1;
    for (std::size_t n = 0; n < rec.nodes.size(); ++n) {
        if (std::fabs(rec.nodes[n][0] - oracle::pi) < 1e-12) {
            at_pi = static_cast<int>(n);
        }
        if (!rec.covered[n]) {
            CHECK(std::isnan(rec.values[static_cast<Eigen::Index>(n)]));
            CHECK(rec.contributing[n] == 0);
        }
    }
    REQUIRE(at_pi >= 0);
    CHECK_FALSE(rec.covered[static_cast<std::size_t>(at_pi)]);
}

TEST_CASE("heat kernel equality")
{
    const auto a = circle(12);
    const auto set = restrict_to_observation(*a, AngularInterval{0.0, oracle::pi});
    const std::vector<double> t{0.05, 0.2, 1.0};
    const auto same = heat_kernel_equality_check(*a, *a, m2, set, set, t, 1e-12);
    CHECK(same.passed);
    CHECK(same.max_deviation == 0.0);

    const auto b = circle(12, 1.05);
    const auto set_b = restrict_to_observation(*b, AngularInterval{0.0, oracle::pi});
    const auto diff = heat_kernel_equality_check(*a, *b, m2, set, set_b, t, 1e-6);
    CHECK_FALSE(diff.passed);
    CHECK(diff.worst_time == 0.05);

    const auto p = a->permuted_within_eigenspaces(4);
    const auto set_p = restrict_to_observation(*p, AngularInterval{0.0, oracle::pi});
    CHECK(heat_kernel_equality_check(*a, *p, m2, set, set_p, t, 1e-12).passed);

    const auto other = restrict_to_observation(*a, AngularInterval{0.5, oracle::pi});
    CHECK_ERROR_KIND(heat_kernel_equality_check(*a, *a, m2, set, other, t, 1e-6), ErrorKind::IncompatibleGrids);
}

TEST_CASE("isometries")
{
    const auto c = circle(6);
    const auto r = Isometry::circle_rotation(0.4);
    CHECK(r.apply(Point{1.0})[0] == doctest::Approx(1.4));
    CHECK(r.inverse().apply(r.apply(Point{2.0}))[0] == doctest::Approx(2.0));

    // pullback agrees with composition on the nodes
    for (const auto& phi : {r, Isometry::circle_reflection(0.3), Isometry::identity(ManifoldKind::Circle)}) {
        const Eigen::MatrixXd P = phi.pullback(*c);
        std::vector<Point> moved;
        for (const auto& x : c->quadrature().nodes) {
            moved.push_back(phi.apply(x));
        }
        const Eigen::MatrixXd lhs = c->basis_values(moved);
        const Eigen::MatrixXd rhs = c->basis_at_nodes() * P;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }

    const auto s = build_model(ModelDescriptor::sphere(1.0, 6));
    const Eigen::MatrixXd P = Isometry::sphere_rotation(0.7).pullback(*s);
    CHECK((P.transpose() * P - Eigen::MatrixXd::Identity(P.rows(), P.cols())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gauge check")
{
    const auto c = circle(12);
    const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi / 2});
    const auto src = make_source_basis(c, set, 3);
    const auto id = isometry_gauge_check(c, m2, cosine(0.3), set, Isometry::identity(ManifoldKind::Circle), src);
    CHECK(id.passed);
    CHECK(id.direct_deviation == 0.0);
    CHECK(id.records == 3);

    CHECK_ERROR_KIND(isometry_gauge_check(c, m2, cosine(0.3), set, Isometry::circle_reflection(0.0), src),
                     ErrorKind::IsometryPrecondition);

    const auto s = build_model(ModelDescriptor::sphere(1.0, 10));
    const auto cap = restrict_to_observation(*s, SphericalCap{Point{0.0, 0.0}, oracle::pi / 3});
    PotentialSpec z;
    z.expression = "zonal";
    z.amplitude = 0.4;
    z.frequency = 2;
    const auto V = PotentialField::from_spec(z, ManifoldKind::Sphere2);
    const auto rot = isometry_gauge_check(s, m2, V, cap, Isometry::sphere_rotation(0.7), make_source_basis(s, cap, 3));
    CHECK(rot.passed);
    CHECK(rot.intertwining_defect <= 1e-10);
    CHECK(rot.transported_deviation <= 1e-10);
    // a zonal potential is invariant, so the direct records agree as well
    CHECK(rot.direct_deviation <= 1e-10);
}
