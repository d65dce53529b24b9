// Acceptance suite: one line per criterion, nonzero exit if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "logcal/gelfand_extraction.hpp"
#include "logcal/ucp_recovery.hpp"
#include "oracles.hpp"

using namespace logcal;

namespace {

const Mass m2(2.0);

struct Outcome {
    bool passed = false;
    std::string detail;
};

PotentialField cosine(double amplitude)
{
    PotentialSpec s;
    s.expression = "cosine";
    s.amplitude = amplitude;
    return PotentialField::from_spec(s, ManifoldKind::Circle);
}

Outcome log_identity()
{
    double worst = 0.0;
    for (double lambda : {1.0, std::exp(1.0), 10.0, 1000.0}) {
        worst = std::max(worst, std::fabs(log_identity_quadrature(lambda).value - std::log(lambda)));
    }
    return {worst <= 1e-8, fmt::format("max |error| {:.2e}", worst)};
}

Outcome pointwise_equivalence()
{
    const auto c = build_model(ModelDescriptor::circle(1.0, 16));
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> angle(0.0, two_pi);
    double worst = 0.0;
    for (int field = 0; field < 50; ++field) {
        Eigen::VectorXd a(c->basis_size());
        for (auto& x : a) {
            x = g(rng);
        }
        const FieldCoefficients u(c, a);
        const auto lu = apply_L(u, m2);
        // relative to the field's own scale so that points near a zero of L u do not dominate
        const double scale = lu.coefficients().cwiseAbs().sum() / std::sqrt(two_pi);
        for (int p = 0; p < 20; ++p) {
            const Point x{angle(rng)};
            const double dev = std::fabs(pointwise_L(u, m2, x).value - lu.evaluate(x));
            worst = std::max(worst, dev / scale);
        }
    }
    return {worst <= 1e-6, fmt::format("max relative deviation {:.2e} over 1000 evaluations", worst)};
}

Outcome forward_solver()
{
    const auto c = build_model(ModelDescriptor::circle(1.0, 32));
    const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi});
    const auto src = make_source_basis(c, set, 3);

    double diag = 0.0;
    const SchrodingerOperator zero(c, m2, PotentialField::zero());
    const Eigen::VectorXd L = l_multipliers(*c, m2);
    for (const auto& s : src.sources) {
        const Eigen::VectorXd ref = s.coefficients.coefficients().cwiseQuotient(L);
        diag = std::max(diag, (zero.solve(s.coefficients).coefficients() - ref).cwiseAbs().maxCoeff() /
                                  ref.cwiseAbs().maxCoeff());
    }

    // dense K = 64 Galerkin oracle, built independently of the library
    const Eigen::MatrixXd M = oracle::circle_galerkin(127, 2.0, [](double t) { return 0.3 * std::cos(t); }, 8192);
    double agree = 0.0;
    const SchrodingerOperator op(c, m2, cosine(0.3));
    for (const auto& s : src.sources) {
        Eigen::VectorXd fo = Eigen::VectorXd::Zero(127);
        const int nodes = 8192;
        for (int i = 0; i < nodes; ++i) {
            const double th = two_pi * i / nodes;
            const double v = s(Point{th}, ManifoldKind::Circle) * two_pi / nodes;
            if (v != 0.0) {
                for (int j = 0; j < 127; ++j) {
                    fo(j) += v * oracle::circle_basis(j, th);
                }
            }
        }
        const Eigen::VectorXd uo = M.fullPivLu().solve(fo);
        agree = std::max(agree, (op.solve(s.coefficients).coefficients() - uo.head(63)).cwiseAbs().maxCoeff());
    }
    return {diag <= 1e-12 && agree <= 1e-8,
            fmt::format("diagonal inverse {:.2e}, K=32 vs dense K=64 {:.2e}", diag, agree)};
}

Outcome heat_kernel_checks()
{
    const auto c = build_model(ModelDescriptor::circle(1.0, 40));
    double theta = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double t = 0.1 + 1.9 * i / 19.0;
        for (int j = 0; j < 9; ++j) {
            const double y = 0.3 + two_pi * j / 9.0;
            theta = std::max(theta, std::fabs(heat_kernel(c, m2, t, Point{0.3}, Point{y}).value -
                                              oracle::circle_theta_kernel(t, 0.3, y, 2.0)));
        }
    }

    const auto g = build_model(ModelDescriptor::circle(1.0, 48));
    std::vector<double> times;
    for (int i = 0; i < 50; ++i) {
        times.push_back(0.05 * std::pow(40.0, i / 49.0));
    }
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> angle(0.0, two_pi);
    std::vector<PointPair> pairs;
    for (int i = 0; i < 20; ++i) {
        pairs.push_back({Point{angle(rng)}, Point{angle(rng)}});
    }
    const auto rep = grigoryan_check(g, m2, times, pairs);
    return {theta <= 1e-8 && rep.passed && rep.violations == 0,
            fmt::format("theta oracle {:.2e}; Grigor'yan C={:.4g} c={:.4g}, {} violations on {} points", theta,
                        rep.C, rep.c, rep.violations, rep.verified)};
}

GelfandData half_circle_data(double radius)
{
    const auto c = build_model(ModelDescriptor::circle(radius, 5));
    const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi});
    const SchrodingerOperator op(c, m2, PotentialField::zero());
    return build_gelfand_data(op, set, make_source_basis(c, set, 5), default_time_grid(*c, m2));
}

Outcome gelfand_extraction()
{
    const auto data = half_circle_data(1.0);
    const auto c = build_model(ModelDescriptor::circle(1.0, 5));
    const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi});
    const auto exact = analytic_gelfand_data(*c, m2, set);
    const std::vector<double> lam{0, 1, 4, 9, 16};
    const std::vector<int> mult{1, 2, 2, 2, 2};
    if (data.eigenvalues.size() != lam.size()) {
        return {false, fmt::format("recovered {} eigenvalues", data.eigenvalues.size())};
    }
    double rel = 0.0;
    double angle = 0.0;
    for (std::size_t k = 0; k < lam.size(); ++k) {
        rel = std::max(rel, std::fabs(data.eigenvalues[k] - lam[k]) / std::max(1.0, lam[k]));
        const auto a = principal_angles(data.families[k], exact.families[k], data.weights);
        angle = std::max(angle, a.empty() ? oracle::pi / 2 : a.back());
    }
    const bool ok = rel <= 1e-6 && data.multiplicities == mult && angle <= 1e-5;
    return {ok, fmt::format("eigenvalue error {:.2e}, multiplicities {}, max angle {:.2e}", rel,
                            data.multiplicities == mult ? "exact" : "wrong", angle)};
}

Outcome discrimination()
{
    const auto cmp = compare_gelfand(half_circle_data(1.0), half_circle_data(1.01));
    const double expected = 1.0 - 1.0 / (1.01 * 1.01);
    const double gap = cmp.rows.size() > 1 ? cmp.rows[1].gap : 0.0;
    const bool ok = !cmp.passed && cmp.first_failure == 1 && std::fabs(gap - expected) <= 1e-4;
    return {ok, fmt::format("first failure k={}, gap {:.6f} (expected {:.6f})", cmp.first_failure, gap, expected)};
}

Outcome unique_continuation()
{
    int cases = 0;
    int passed = 0;
    int dominated = 0;
    auto record = [&](const UcpReport& r) {
        ++cases;
        passed += r.passed ? 1 : 0;
        dominated += r.sigma_min > r.solution_only_sigma_min ? 1 : 0;
    };
    for (int K : {8, 16, 32}) {
        const auto c = build_model(ModelDescriptor::circle(1.0, K));
        for (double fr : {0.75, 0.85, 0.9}) {
            record(ucp_nullspace_test(*c, m2, restrict_to_observation(*c, AngularInterval{0.0, two_pi * fr})));
        }
        const auto t = build_model(ModelDescriptor::torus({two_pi, two_pi}, K));
        for (double fr : {0.6, 0.75, 0.9}) {
            const double side = two_pi * std::sqrt(fr);
            record(ucp_nullspace_test(*t, m2, restrict_to_observation(*t, TorusBox{{{0.0, side}, {0.0, side}}})));
        }
        const auto s = build_model(ModelDescriptor::sphere(1.0, K));
        for (double cap : {0.75 * oracle::pi, 5.0 * oracle::pi / 6.0, 0.9 * oracle::pi}) {
            record(ucp_nullspace_test(*s, m2, restrict_to_observation(*s, SphericalCap{Point{0.0, 0.0}, cap})));
        }
    }
    return {passed == cases && dominated == cases,
            fmt::format("{}/{} null dimension 0, Cauchy pair better conditioned in {}/{}", passed, cases, dominated,
                        cases)};
}

Outcome recovery()
{
    const auto V = cosine(0.3);
    std::vector<double> errors;
    int masked = 0;
    for (int K : {16, 32, 48}) {
        const auto c = build_model(ModelDescriptor::circle(1.0, K));
        const auto set = restrict_to_observation(*c, AngularInterval{0.0, oracle::pi});
        const SchrodingerOperator op(c, m2, V);
        RecoveryOptions opt;
        opt.require_full_coverage = false;
        const auto rec =
            recover_potential(*c, m2, set, V.restriction(set), forward_solutions(op, make_source_basis(c, set, 6)), opt);
        errors.push_back(recovery_error(rec, V));
        masked += rec.masked;
    }
    const bool ok = errors[2] <= 1e-4 && errors[1] < errors[0] && errors[2] < errors[1] && masked == 0;
    return {ok, fmt::format("errors K=16/32/48: {:.2e} {:.2e} {:.2e}, masked nodes {}", errors[0], errors[1],
                            errors[2], masked)};
}

Outcome gauge()
{
    const auto s = build_model(ModelDescriptor::sphere(1.0, 12));
    const auto cap = restrict_to_observation(*s, SphericalCap{Point{0.0, 0.0}, oracle::pi / 3});
    PotentialSpec z;
    z.expression = "zonal";
    z.amplitude = 0.4;
    z.frequency = 2;
    const auto V = PotentialField::from_spec(z, ManifoldKind::Sphere2);
    const auto rep =
        isometry_gauge_check(s, m2, V, cap, Isometry::sphere_rotation(0.7), make_source_basis(s, cap, 3), 1e-10);
    const double dev = std::max(rep.transported_deviation, rep.direct_deviation);
    return {rep.passed && dev <= 1e-10,
            fmt::format("intertwining {:.2e}, record deviation {:.2e} over {} records", rep.intertwining_defect, dev,
                        rep.records)};
}

Outcome spectral_estimates()
{
    int violations = 0;
    std::string constants;
    for (const auto& d : {ModelDescriptor::circle(1.0, 32), ModelDescriptor::torus({two_pi, two_pi}, 32),
                          ModelDescriptor::sphere(1.0, 32)}) {
        const auto rep = spectral_estimate_check(*build_model(d), m2);
        violations += rep.weyl_violations + rep.sup_violations + (rep.passed ? 0 : 1);
        constants += fmt::format(" {}: Weyl {:.3g} sup {:.3g};", to_string(d.kind), rep.weyl_constant, rep.sup_constant);
    }
    return {violations == 0, fmt::format("{} violations;{}", violations, constants)};
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "logarithm identity", 1.0, log_identity},
        {2, "pointwise/spectral equivalence", 30.0, pointwise_equivalence},
        {3, "forward solver", 10.0, forward_solver},
        {4, "heat kernel", 10.0, heat_kernel_checks},
        {5, "Gel'fand extraction", 60.0, gelfand_extraction},
        {6, "cross-model discrimination", 60.0, discrimination},
        {7, "finite-rank UCP", 120.0, unique_continuation},
        {8, "potential recovery", 120.0, recovery},
        {9, "gauge obstruction", 30.0, gauge},
        {10, "spectral-estimate sanity", 10.0, spectral_estimates},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, fmt::format("error: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_seconds;
        const bool ok = out.passed && in_time;
        failures += ok ? 0 : 1;
        fmt::print("[{}] {:2d} {}: {} ({:.2f} s, limit {:.0f} s{})\n", ok ? "PASS" : "FAIL", c.id, c.name, out.detail,
                   secs, c.limit_seconds, in_time ? "" : ", too slow");
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
