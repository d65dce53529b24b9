#include <cmath>
#include <vector>

#include <doctest.h>

#include "check.hpp"
#include "logcal/manifold_spectrum.hpp"
#include "logcal/observation.hpp"
#include "oracles.hpp"

using namespace logcal;

namespace {

std::vector<double> eigs(const SpectralModel& m)
{
    return {m.eigenvalues().begin(), m.eigenvalues().end()};
}

std::vector<int> mults(const SpectralModel& m)
{
    return {m.multiplicities().begin(), m.multiplicities().end()};
}

} // namespace

TEST_CASE("circle catalog")
{
    const auto m = build_model(ModelDescriptor::circle(1.0, 4));
    CHECK(eigs(*m) == std::vector<double>{0, 1, 4, 9});
    CHECK(mults(*m) == std::vector<int>{1, 2, 2, 2});
    CHECK(m->basis_size() == 7);
    CHECK(m->volume() == doctest::Approx(2 * pi));

    const auto r2 = build_model(ModelDescriptor::circle(2.0, 3));
    CHECK(r2->eigenvalue(2) == doctest::Approx(1.0));
}

TEST_CASE("sphere catalog")
{
    const auto m = build_model(ModelDescriptor::sphere(1.0, 3));
    CHECK(eigs(*m) == std::vector<double>{0, 2, 6});
    CHECK(mults(*m) == std::vector<int>{1, 3, 5});
}

TEST_CASE("torus catalog against brute-force lattice enumeration")
{
    const auto m = build_model(ModelDescriptor::torus({two_pi, two_pi}, 3));
    const auto ref = oracle::torus_lattice({two_pi, two_pi}, 3);
    // frozen oracle output
    CHECK(ref.eigenvalues == std::vector<double>{0, 1, 2});
    CHECK(ref.multiplicities == std::vector<int>{1, 4, 4});
    CHECK(eigs(*m) == ref.eigenvalues);
    CHECK(mults(*m) == ref.multiplicities);

    for (const auto& edges : std::vector<std::vector<double>>{{two_pi, 2 * two_pi}, {3.0, 5.0, 7.0}, {two_pi}}) {
        const auto t = build_model(ModelDescriptor::torus(edges, 10));
        const auto o = oracle::torus_lattice(edges, 10);
        REQUIRE(t->truncation() == 10);
        for (int k = 0; k < 10; ++k) {
            CHECK(t->eigenvalue(k) == doctest::Approx(o.eigenvalues[static_cast<std::size_t>(k)]).epsilon(1e-12));
            CHECK(t->multiplicity(k) == o.multiplicities[static_cast<std::size_t>(k)]);
        }
    }
}

TEST_CASE("catalog without a basis matches the materialized model")
{
    const auto desc = ModelDescriptor::sphere(1.5, 6);
    const auto cat = catalog_spectrum(desc, 9);
    const auto m = build_model(desc);
    for (int k = 0; k < 6; ++k) {
        CHECK(cat.eigenvalues[static_cast<std::size_t>(k)] == doctest::Approx(m->eigenvalue(k)));
    }
    CHECK(cat.multiplicities[8] == 17);
}

TEST_CASE("eigenfunction values")
{
    const auto c = build_model(ModelDescriptor::circle(1.0, 4));
    CHECK(c->eigenfunction(0, 1, Point{1.234}) == doctest::Approx(0.398942).epsilon(1e-6));
    CHECK(c->eigenfunction(1, 1, Point{0.0}) == doctest::Approx(0.564190).epsilon(1e-6));

    // zonal l = 1 harmonic at the north pole; normalization from a Simpson oracle
    const double z2 = 2 * pi * oracle::simpson([](double t) { return std::cos(t) * std::cos(t) * std::sin(t); }, 0,
                                               pi, 2000);
    const double expected = 1.0 / std::sqrt(z2);
    CHECK(expected == doctest::Approx(0.488603).epsilon(1e-6));
    const auto s = build_model(ModelDescriptor::sphere(1.0, 3));
    CHECK(s->eigenfunction(1, 1, Point{0.0, 0.0}) == doctest::Approx(expected).epsilon(1e-10));

    CHECK_ERROR_KIND(c->eigenfunction(4, 1, Point{0.0}), ErrorKind::IndexOutOfRange);
    CHECK_ERROR_KIND(c->eigenfunction(1, 3, Point{0.0}), ErrorKind::IndexOutOfRange);
}

TEST_CASE("inner products on the quadrature")
{
    const auto c = build_model(ModelDescriptor::circle(1.0, 6));
    const auto& B = c->basis_at_nodes();
    auto col = [&](int j) {
        return std::span<const double>(B.col(j).data(), static_cast<std::size_t>(B.rows()));
    };
    CHECK(inner_product(*c, col(1), col(1)) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::fabs(inner_product(*c, col(1), col(3))) < 1e-13);
    const std::vector<double> one(c->node_count(), 1.0);
    CHECK(inner_product(*c, one, one) == doctest::Approx(two_pi).epsilon(1e-13));
    const std::vector<double> short_vec(3, 1.0);
    CHECK_ERROR_KIND(inner_product(*c, short_vec, one), ErrorKind::LengthMismatch);
}

TEST_CASE("orthonormality verification")
{
    CHECK(verify_orthonormality(*build_model(ModelDescriptor::circle(1.0, 8, 256)), 1e-12).passed);
    CHECK(verify_orthonormality(*build_model(ModelDescriptor::sphere(1.0, 6)), 1e-10).passed);
    CHECK(verify_orthonormality(*build_model(ModelDescriptor::torus({two_pi, 3.0}, 6)), 1e-12).passed);

    const auto coarse = verify_orthonormality(*build_model(ModelDescriptor::circle(1.0, 8, 8)), 1e-12);
    CHECK_FALSE(coarse.passed);
    CHECK(coarse.max_offdiag > 0.1);
}

TEST_CASE("model validation")
{
    CHECK_ERROR_KIND(build_model(ModelDescriptor::circle(1.0, 1)), ErrorKind::TruncationTooSmall);
    CHECK_ERROR_KIND(build_model(ModelDescriptor::circle(-1.0, 4)), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(build_model(ModelDescriptor::torus({}, 4)), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(manifold_kind_from_string("klein"), ErrorKind::UnsupportedKind);
}

TEST_CASE("distance and reduction")
{
    const auto c = build_model(ModelDescriptor::circle(2.0, 3));
    CHECK(c->distance(Point{0.1}, Point{two_pi - 0.1}) == doctest::Approx(0.4));
    CHECK(c->diameter() == doctest::Approx(2 * pi));
    const auto s = build_model(ModelDescriptor::sphere(1.0, 3));
    CHECK(s->distance(Point{0.0, 0.0}, Point{pi, 0.0}) == doctest::Approx(pi));
    CHECK(s->distance(Point{pi / 2, 0.0}, Point{pi / 2, pi / 2}) == doctest::Approx(pi / 2));
}

TEST_CASE("permuted model keeps the eigenspaces")
{
    const auto s = build_model(ModelDescriptor::sphere(1.0, 5));
    const auto p = s->permuted_within_eigenspaces(11);
    CHECK(eigs(*p) == eigs(*s));
    const Eigen::MatrixXd& A = s->basis_at_nodes();
    const Eigen::MatrixXd& B = p->basis_at_nodes();
    for (int k = 0; k < 5; ++k) {
        const int o = s->block_offset(k);
        const int d = s->multiplicity(k);
        const Eigen::MatrixXd ka = A.middleCols(o, d) * A.middleCols(o, d).transpose();
        const Eigen::MatrixXd kb = B.middleCols(o, d) * B.middleCols(o, d).transpose();
        CHECK((ka - kb).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("observation sets")
{
    const auto c = build_model(ModelDescriptor::circle(1.0, 8));
    const auto half = restrict_to_observation(*c, AngularInterval{0.0, pi});
    REQUIRE(half.size() > 0);
    for (const auto& x : half.nodes()) {
        CHECK(x[0] > 0.0);
        CHECK(x[0] < pi);
    }
    CHECK(half.complement_nonempty());
    CHECK_ERROR_KIND(restrict_to_observation(*c, AngularInterval{0.0, two_pi}), ErrorKind::ComplementEmpty);

    const auto s = build_model(ModelDescriptor::sphere(1.0, 8));
    const auto cap = restrict_to_observation(*s, SphericalCap{Point{0.0, 0.0}, pi / 3});
    REQUIRE(cap.size() > 0);
    for (const auto& x : cap.nodes()) {
        CHECK(x[0] < pi / 3);
    }

    const auto t = build_model(ModelDescriptor::torus({two_pi, two_pi}, 6));
    const auto box = restrict_to_observation(*t, TorusBox{{{0.5, 2.0}, {1.0, 3.0}}});
    for (const auto& x : box.nodes()) {
        CHECK(contains(box.descriptor(), x));
    }
    for (const auto& x : box.interior_samples(20)) {
        CHECK(box.contains(x));
    }
    CHECK(inner_radius(AngularInterval{0.0, pi}, Point{pi / 2}) == doctest::Approx(pi / 2));
    CHECK(inner_radius(SphericalCap{Point{0.0, 0.0}, 1.0}, Point{0.25, 0.0}) == doctest::Approx(0.75));
}

TEST_CASE("gauss-legendre integrates polynomials")
{
    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(8, x, w);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += w[i] * std::pow(x[i], 14);
    }
    CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
}
