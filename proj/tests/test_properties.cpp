// Randomized checks of the structural invariants, seeded for reproducibility.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include "check.hpp"
#include "logcal/gelfand_extraction.hpp"
#include "logcal/ucp_recovery.hpp"
#include "oracles.hpp"

using namespace logcal;

namespace {

std::mt19937_64 rng(20261016);

double uniform(double a, double b)
{
    return std::uniform_real_distribution<double>(a, b)(rng);
}

FieldCoefficients random_field(const ModelPtr& model, double decay = 0.0)
{
    std::normal_distribution<double> g;
    Eigen::VectorXd a(model->basis_size());
    for (int k = 0; k < model->truncation(); ++k) {
        const double s = std::exp(-decay * k);
        for (int l = 0; l < model->multiplicity(k); ++l) {
            a[model->block_offset(k) + l] = s * g(rng);
        }
    }
    return {model, a};
}

std::vector<ModelDescriptor> corpus()
{
    return {ModelDescriptor::circle(1.0, 12), ModelDescriptor::circle(1.7, 9),
            ModelDescriptor::torus({two_pi, two_pi}, 8), ModelDescriptor::torus({3.0, 5.0}, 10),
            ModelDescriptor::sphere(1.0, 8), ModelDescriptor::sphere(0.6, 6)};
}

// -Laplacian of phi at x by central differences, Richardson-extrapolated twice.
double minus_laplacian(const SpectralModel& model, int k, int l, const Point& x)
{
    auto f = [&](double dx, double dy) {
        auto c = x.coords();
        std::array<double, Point::max_dim> p{};
        std::copy(c.begin(), c.end(), p.begin());
        p[0] += dx;
        if (c.size() > 1) {
            p[1] += dy;
        }
        return model.eigenfunction(k, l, Point(std::span<const double>(p.data(), c.size())));
    };
    auto second = [&](int axis, double h) {
        const double dx = axis == 0 ? h : 0.0;
        const double dy = axis == 1 ? h : 0.0;
        return (f(dx, dy) - 2 * f(0, 0) + f(-dx, -dy)) / (h * h);
    };
    auto first = [&](int axis, double h) {
        const double dx = axis == 0 ? h : 0.0;
        const double dy = axis == 1 ? h : 0.0;
        return (f(dx, dy) - f(-dx, -dy)) / (2 * h);
    };
    auto richardson = [](auto op, int axis, double h) {
        const double a = op(axis, h);
        const double b = op(axis, h / 2);
        const double c = op(axis, h / 4);
        const double ab = (4 * b - a) / 3;
        const double bc = (4 * c - b) / 3;
        return (16 * bc - ab) / 15;
    };
    const double h = 0.02;
    const double R = model.descriptor().radius;
    switch (model.kind()) {
    case ManifoldKind::Circle:
        return -richardson(second, 0, h) / (R * R);
    case ManifoldKind::FlatTorus: {
        // torus points are angles; axis a has length edges[a]
        double s = 0.0;
        for (int a = 0; a < model.dimension(); ++a) {
            const double w = two_pi / model.descriptor().edges[static_cast<std::size_t>(a)];
            s += w * w * richardson(second, a, h);
        }
        return -s;
    }
    case ManifoldKind::Sphere2: {
        const double th = x[0];
        const double st = std::sin(th);
        const double lap = richardson(second, 0, h) + std::cos(th) / st * richardson(first, 0, h) +
                           richardson(second, 1, h) / (st * st);
        return -lap / (R * R);
    }
    }
    return 0.0;
}

} // namespace

TEST_CASE("eigenfunctions satisfy the eigenvalue equation")
{
    for (const auto& d : corpus()) {
        const auto model = build_model(d);
        for (int trial = 0; trial < 12; ++trial) {
            const int k = std::uniform_int_distribution<int>(0, model->truncation() - 1)(rng);
            const int l = std::uniform_int_distribution<int>(1, model->multiplicity(k))(rng);
            std::vector<double> c;
            if (model->kind() == ManifoldKind::Sphere2) {
                c = {uniform(0.3, oracle::pi - 0.3), uniform(0.0, two_pi)};
            } else {
                for (int a = 0; a < model->dimension(); ++a) {
                    c.push_back(uniform(0.0, 3.0));
                }
            }
            const Point x{std::span<const double>(c)};
            const double lam = model->eigenvalue(k);
            const double phi = model->eigenfunction(k, l, x);
            const double scale = std::max(1.0, lam) * std::max(1.0, std::fabs(phi));
            CHECK(std::fabs(minus_laplacian(*model, k, l, x) - lam * phi) < 1e-7 * scale);
        }
    }
}

TEST_CASE("orthonormality and brute-force multiplicities across the corpus")
{
    for (const auto& d : corpus()) {
        const auto model = build_model(d);
        CHECK(verify_orthonormality(*model, 1e-10).passed);
        if (d.kind == ManifoldKind::FlatTorus) {
            const auto ref = oracle::torus_lattice(d.edges, d.truncation);
            for (int k = 0; k < d.truncation; ++k) {
                CHECK(model->multiplicity(k) == ref.multiplicities[static_cast<std::size_t>(k)]);
            }
        } else {
            for (int k = 0; k < d.truncation; ++k) {
                CHECK(model->multiplicity(k) == (d.kind == ManifoldKind::Circle ? (k ? 2 : 1) : 2 * k + 1));
            }
        }
    }
}

TEST_CASE("functional calculus identities on random fields")
{
    for (const auto& d : corpus()) {
        const auto model = build_model(d);
        for (int trial = 0; trial < 5; ++trial) {
            const Mass m(uniform(1.05, 6.0));
            const auto u = random_field(model);
            const double n = u.coefficients().cwiseAbs().maxCoeff();

            const auto al = apply_A(apply_log_A(u, m), m).coefficients();
            const auto la = apply_log_A(apply_A(u, m), m).coefficients();
            // the same multiplier per coefficient, so the orders differ only by rounding
            CHECK((al - la).cwiseAbs().maxCoeff() <= 4 * std::numeric_limits<double>::epsilon() *
                                                         al.cwiseAbs().maxCoeff());
            CHECK((al - apply_L(u, m).coefficients()).cwiseAbs().maxCoeff() <= 1e-13 * al.cwiseAbs().maxCoeff());

            const double t1 = uniform(0.0, 1.0);
            const double t2 = uniform(0.0, 1.0);
            const auto two = heat_apply(heat_apply(u, m, t1), m, t2).coefficients();
            const auto one = heat_apply(u, m, t1 + t2).coefficients();
            CHECK((two - one).cwiseAbs().maxCoeff() <= 1e-14 * n);

            CHECK(l_energy(u, m) > 0.0);
            const auto lm = l_multipliers(*model, m);
            CHECK(lm.minCoeff() > 0.0);
            for (int k = 1; k < model->truncation(); ++k) {
                CHECK(l_multiplier(model->eigenvalue(k), m) > l_multiplier(model->eigenvalue(k - 1), m));
            }
        }
    }
}

TEST_CASE("the heat semigroup decays like e^{-mt}")
{
    for (const auto& d : corpus()) {
        const auto model = build_model(d);
        const auto fine = model->refined_quadrature(3);
        std::vector<double> times;
        for (int i = 0; i < 20; ++i) {
            times.push_back(1e-3 * std::pow(10.0, 4.0 * i / 19));
        }
        for (int trial = 0; trial < 3; ++trial) {
            const auto v = random_field(model, 0.2);
            // the kernel is positive with unit mass, so the constant is 1 up to sampling of the sup
            CHECK(heat_decay_ratio(v, Mass(2.0), times, fine.nodes) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("Galerkin systems are symmetric, coercive and solved to residual")
{
    for (const auto& d : corpus()) {
        const auto model = build_model(d);
        const Mass m(uniform(1.5, 4.0));
        const SchrodingerOperator one(model, m, PotentialField::constant(1.0));
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(one.matrix());
        CHECK(es.eigenvalues().minCoeff() >= m.value() * std::log(m.value()) + 1.0 - 1e-12);

        PotentialSpec s;
        s.expression = d.kind == ManifoldKind::Sphere2 ? "zonal" : "cosine";
        s.amplitude = uniform(0.1, 0.5);
        s.frequency = d.kind == ManifoldKind::Sphere2 ? 2 : 1;
        const SchrodingerOperator op(model, m, PotentialField::from_spec(s, d.kind));
        CHECK((op.matrix() - op.matrix().transpose()).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(op.invertible());
        for (int trial = 0; trial < 3; ++trial) {
            const auto f = random_field(model);
            CHECK(op.residual(op.solve(f), f) <= 1e-10);
        }
    }
}

TEST_CASE("exponent recovery on exact synthetic traces")
{
    for (int trial = 0; trial < 40; ++trial) {
        const int order = std::uniform_int_distribution<int>(1, 4)(rng);
        std::vector<double> mu;
        while (static_cast<int>(mu.size()) < order) {
            const double c = uniform(0.5, 6.0);
            if (std::all_of(mu.begin(), mu.end(), [&](double e) { return std::fabs(e - c) >= 0.5; })) {
                mu.push_back(c);
            }
        }
        std::sort(mu.begin(), mu.end());
        const int J = 2 * order + 2 + std::uniform_int_distribution<int>(0, 20)(rng);
        std::vector<double> t(static_cast<std::size_t>(J));
        for (int j = 0; j < J; ++j) {
            t[static_cast<std::size_t>(j)] = 2.0 * j / (J - 1);
        }
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(J, 2);
        for (int i = 0; i < order; ++i) {
            const double a0 = uniform(0.5, 2.0);
            const double a1 = uniform(-2.0, 2.0);
            for (int j = 0; j < J; ++j) {
                const double e = std::exp(-mu[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(j)]);
                h(j, 0) += a0 * e;
                h(j, 1) += a1 * e;
            }
        }
        const auto fit = extract_exponents(h, t);
        REQUIRE(fit.exponents.size() == mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) {
            CHECK(std::fabs(fit.exponents[i] - mu[i]) < 1e-8);
        }
    }
}

TEST_CASE("restricted eigenspaces do not depend on the source set or order")
{
    // a finer rule so that narrow bumps still cover nodes
    const auto c = build_model(ModelDescriptor::circle(1.0, 5, 128));
    const SchrodingerOperator op(c, Mass(2.0), PotentialField::zero());
    const auto set = restrict_to_observation(*c, AngularInterval{0.4, 3.4});
    const auto times = default_time_grid(*c, Mass(2.0));
    const auto exact = analytic_gelfand_data(*c, Mass(2.0), set);
    for (int trial = 0; trial < 6; ++trial) {
        SourceShape shape;
        shape.jitter = uniform(0.0, 0.4);
        shape.seed = rng();
        const auto basis = make_source_basis(c, set, std::uniform_int_distribution<int>(5, 8)(rng), shape);
        std::vector<FieldCoefficients> fs;
        for (const auto& s : basis.sources) {
            fs.push_back(s.coefficients);
        }
        std::shuffle(fs.begin(), fs.end(), rng);
        const auto data = build_gelfand_data(op, set, fs, times);
        const auto cmp = compare_gelfand(data, exact);
        CHECK(cmp.passed);
    }
}

TEST_CASE("finite-rank continuation agrees with the dense oracle")
{
    for (int K = 2; K <= 16; K += 2) {
        for (double b : {0.5, 1.0, oracle::pi / 2, oracle::pi}) {
            const auto c = build_model(ModelDescriptor::circle(1.0, K));
            const auto set = restrict_to_observation(*c, AngularInterval{0.0, b});
            const auto rep = ucp_nullspace_test(*c, Mass(2.0), set);
            const int samples = 2 * (2 * K - 1);
            CHECK(rep.null_dimension ==
                  oracle::dense_null_dimension(oracle::circle_cauchy_constraint(K, 2.0, 0.0, b, samples), 1e-9));
        }
    }
    // every catalog kind passes while the truncated space is resolvable on the set
    CHECK(ucp_nullspace_test(*build_model(ModelDescriptor::circle(1.0, 8)), Mass(2.0),
                             restrict_to_observation(*build_model(ModelDescriptor::circle(1.0, 8)),
                                                     AngularInterval{0.0, 1.0}))
              .passed);
    const auto t = build_model(ModelDescriptor::torus({two_pi, two_pi}, 6));
    CHECK(ucp_nullspace_test(*t, Mass(2.0), restrict_to_observation(*t, TorusBox{{{0.0, 3.0}, {0.0, 3.0}}})).passed);
    const auto s = build_model(ModelDescriptor::sphere(1.0, 5));
    CHECK(ucp_nullspace_test(*s, Mass(2.0), restrict_to_observation(*s, SphericalCap{Point{0.0, 0.0}, 1.2})).passed);
}

TEST_CASE("recovery error decreases with the truncation")
{
    PotentialSpec s;
    s.expression = "cosine";
    s.amplitude = 0.3;
    const auto V = PotentialField::from_spec(s, ManifoldKind::Circle);
    double previous = 1.0;
    for (int K : {16, 32, 48, 64}) {
        const auto c = build_model(ModelDescriptor::circle(1.0, K));
        const SchrodingerOperator op(c, Mass(2.0), V);
        const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi});
        const auto rec =
            recover_potential(*c, Mass(2.0), set, V.restriction(set), forward_solutions(op, make_source_basis(c, set, 6)));
        const double err = recovery_error(rec, V);
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("gauge invariance under symmetries of the observation set")
{
    const Mass m(2.0);
    {
        const auto c = build_model(ModelDescriptor::circle(1.0, 16));
        const auto set = restrict_to_observation(*c, AngularInterval{0.5, 2.5});
        PotentialSpec s;
        s.expression = "cosine";
        s.amplitude = 0.3;
        const auto V = PotentialField::from_spec(s, ManifoldKind::Circle);
        const auto rep = isometry_gauge_check(c, m, V, set, Isometry::circle_reflection(1.5), make_source_basis(c, set, 3));
        CHECK(rep.passed);
        CHECK(rep.transported_deviation <= 1e-10);
    }
    {
        const auto sph = build_model(ModelDescriptor::sphere(1.0, 9));
        const auto cap = restrict_to_observation(*sph, SphericalCap{Point{0.0, 0.0}, 1.0});
        PotentialSpec s;
        s.expression = "cosine";
        s.amplitude = 0.2;
        s.frequency = 2;
        const auto V = PotentialField::from_spec(s, ManifoldKind::Sphere2);
        const auto src = make_source_basis(sph, cap, 3);
        for (int trial = 0; trial < 3; ++trial) {
            const double a = uniform(0.0, two_pi);
            for (const auto& phi : {Isometry::sphere_rotation(a), Isometry::sphere_reflection(a)}) {
                const auto rep = isometry_gauge_check(sph, m, V, cap, phi, src);
                CHECK(rep.passed);
                CHECK(rep.intertwining_defect <= 1e-10);
                CHECK(rep.transported_deviation <= 1e-10);
            }
        }
    }
}

TEST_CASE("vanishing moments imply vanishing amplitudes")
{
    std::vector<double> s(301);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = 12.0 * static_cast<double>(i) / 300.0;
    }
    for (int trial = 0; trial < 10; ++trial) {
        const double scale = trial % 2 ? 0.0 : uniform(0.1, 2.0);
        std::vector<double> phi(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            phi[i] = scale * (std::exp(-s[i]) + 0.3 * std::exp(-2.5 * s[i]));
        }
        const auto rep = moment_completeness(s, phi, 3);
        CHECK(rep.consistent);
        CHECK(rep.moments_vanish == (scale == 0.0));
    }
}
