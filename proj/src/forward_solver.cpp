#include "logcal/forward_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "logcal/error.hpp"
#include "logcal/parallel.hpp"

namespace logcal {

namespace {

double legendre(int n, double x)
{
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) {
        return p0;
    }
    for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// Point at geodesic distance rho from `center` in direction az (measured in the tangent
// frame obtained by rotating the north pole onto center).
Point cap_point(const Point& center, double rho, double az)
{
    const double ct = std::cos(center[0]);
    const double st = std::sin(center[0]);
    const double cp = std::cos(center[1]);
    const double sp = std::sin(center[1]);
    const double x0 = std::sin(rho) * std::cos(az);
    const double y0 = std::sin(rho) * std::sin(az);
    const double z0 = std::cos(rho);
    const double x1 = ct * x0 + st * z0;
    const double z1 = -st * x0 + ct * z0;
    const double x2 = cp * x1 - sp * y0;
    const double y2 = sp * x1 + cp * y0;
    double lon = std::atan2(y2, x2);
    if (lon < 0.0) {
        lon += two_pi;
    }
    return Point{std::acos(std::clamp(z1, -1.0, 1.0)), lon};
}

double wrap_angle(double a)
{
    double r = std::fmod(a, two_pi);
    return r < 0.0 ? r + two_pi : r;
}

} // namespace

// ---------------------------------------------------------------------------
// PotentialField

PotentialField::PotentialField(Evaluator evaluator, std::optional<ObservationDescriptor> support, std::string label)
    : eval_(std::move(evaluator)), support_(std::move(support)), label_(std::move(label))
{
    if (!eval_) {
        throw Error(ErrorKind::InvalidArgument, "potential needs an evaluator");
    }
}

PotentialField PotentialField::zero()
{
    PotentialField V([](const Point&) { return 0.0; }, std::nullopt, "zero");
    V.zero_ = true;
    return V;
}

PotentialField PotentialField::constant(double c)
{
    if (c == 0.0) {
        return zero();
    }
    return {[c](const Point&) { return c; }, std::nullopt, fmt::format("constant({})", c)};
}

PotentialField PotentialField::from_spec(const PotentialSpec& spec, ManifoldKind kind)
{
    const double amp = spec.amplitude;
    const std::string& e = spec.expression;
    PotentialField out = zero();
    if (e == "zero") {
        out = zero();
    } else if (e == "constant") {
        out = constant(amp);
    } else if (e == "cosine") {
        const int n = spec.frequency;
        const double phase = spec.phase;
        if (kind == ManifoldKind::Sphere2) {
            // Re((x + iy)^n) form, smooth through the poles
            out = PotentialField(
                [=](const Point& x) { return amp * std::pow(std::sin(x[0]), n) * std::cos(n * x[1] + phase); },
                spec.support, fmt::format("{} sin^{}(colat) cos({} lon + {})", amp, n, n, phase));
        } else {
            const int axis = spec.axis;
            if (axis < 0 || axis >= static_cast<int>(Point::max_dim)) {
                throw Error(ErrorKind::InvalidArgument, fmt::format("cosine axis {} out of range", axis));
            }
            out = PotentialField([=](const Point& x) { return amp * std::cos(n * x[axis] + phase); }, spec.support,
                                 fmt::format("{} cos({} x{} + {})", amp, n, axis, phase));
        }
    } else if (e == "zonal") {
        if (kind != ManifoldKind::Sphere2) {
            throw Error(ErrorKind::UnsupportedKind, "zonal potentials live on the sphere");
        }
        const int n = spec.frequency;
        out = PotentialField([=](const Point& x) { return amp * legendre(n, std::cos(x[0])); }, spec.support,
                             fmt::format("{} P_{}(cos colat)", amp, n));
    } else if (e == "bump") {
        if (!(spec.radius > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "bump potential needs a positive radius");
        }
        const Point c = spec.center;
        const double r = spec.radius;
        out = PotentialField([=](const Point& x) { return amp * bump_profile(angular_distance(kind, c, x) / r); },
                             spec.support, fmt::format("{} bump(r={})", amp, r));
    } else {
        throw Error(ErrorKind::InvalidArgument, fmt::format("unknown potential expression '{}'", e));
    }
    if (amp == 0.0 && e != "zero") {
        out = zero();
    }
    return out;
}

Eigen::VectorXd PotentialField::at(std::span<const Point> xs) const
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = eval_(xs[i]);
    }
    return out;
}

Eigen::VectorXd PotentialField::at_nodes(const SpectralModel& model) const
{
    return at(model.quadrature().nodes);
}

Eigen::VectorXd PotentialField::restriction(const ObservationSet& set) const
{
    return at(set.nodes());
}

void PotentialField::verify_support(const SpectralModel& model) const
{
    if (!support_) {
        return;
    }
    for (const auto& x : model.quadrature().nodes) {
        if (!contains(*support_, x) && std::fabs(eval_(x)) > std::numeric_limits<double>::epsilon()) {
            throw Error(ErrorKind::InvalidArgument,
                        fmt::format("potential {} is nonzero outside its declared support {}", label_,
                                    describe(*support_)));
        }
    }
}

// ---------------------------------------------------------------------------
// Sources

double bump_profile(double s)
{
    const double s2 = s * s;
    if (s2 >= 1.0) {
        return 0.0;
    }
    return std::exp(1.0 - 1.0 / (1.0 - s2));
}

double SourceFunction::operator()(const Point& x, ManifoldKind kind) const
{
    return bump_profile(angular_distance(kind, center, x) / radius);
}

namespace {

// L2 projection of f onto the truncated basis. The product rule is doubled until the
// coefficients settle, so the result is the projection of f itself rather than of
// its samples on the model nodes.
Eigen::VectorXd converged_projection(const SpectralModel& model, const std::function<double(const Point&)>& f)
{
    constexpr std::size_t chunk = 4096;
    Eigen::VectorXd prev;
    for (int factor = 1; factor <= 64; factor *= 2) {
        const QuadratureRule rule = factor == 1 ? model.quadrature() : model.refined_quadrature(factor);
        std::vector<Point> pts;
        std::vector<double> wf;
        for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
            const double v = f(rule.nodes[n]);
            if (v != 0.0) {
                pts.push_back(rule.nodes[n]);
                wf.push_back(rule.weights[static_cast<Eigen::Index>(n)] * v);
            }
        }
        Eigen::VectorXd c = Eigen::VectorXd::Zero(model.basis_size());
        for (std::size_t start = 0; start < pts.size(); start += chunk) {
            const std::size_t len = std::min(chunk, pts.size() - start);
            const Eigen::MatrixXd B = model.basis_values(std::span<const Point>(pts.data() + start, len));
            c += B.transpose() * Eigen::Map<const Eigen::VectorXd>(wf.data() + start, static_cast<Eigen::Index>(len));
        }
        if (prev.size() > 0 && (c - prev).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, c.cwiseAbs().maxCoeff())) {
            return c;
        }
        prev = std::move(c);
    }
    return prev;
}

} // namespace

SourceBasis make_source_basis(const ModelPtr& model, const ObservationSet& set, int count, const SourceShape& shape)
{
    if (count < 1) {
        throw Error(ErrorKind::InvalidArgument, "source count must be at least 1");
    }
    if (!(shape.jitter >= 0.0 && shape.jitter < 0.5)) {
        throw Error(ErrorKind::InvalidArgument, "source jitter must lie in [0, 0.5)");
    }
    const ManifoldKind kind = model->kind();
    std::vector<Point> centers;
    std::vector<double> radii;

    if (!shape.centers.empty()) {
        if (!(shape.radius > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "explicit source centers need a positive radius");
        }
        centers = shape.centers;
        radii.assign(centers.size(), shape.radius);
    } else {
        std::mt19937_64 rng(shape.seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const double shrink = (1.0 - 2.0 * shape.jitter) * shape.radius_fraction;
        const auto& desc = set.descriptor();
        if (const auto* iv = std::get_if<AngularInterval>(&desc)) {
            const double spacing = (iv->b - iv->a) / (count + 1);
            for (int i = 0; i < count; ++i) {
                centers.push_back(Point{wrap_angle(iv->a + spacing * (i + 1 + shape.jitter * unit(rng)))});
                radii.push_back(spacing * shrink);
            }
        } else if (const auto* box = std::get_if<TorusBox>(&desc)) {
            const auto [a0, b0] = box->axes[0];
            const bool full0 = b0 - a0 >= two_pi;
            const double spacing = full0 ? two_pi / count : (b0 - a0) / (count + 1);
            double base = spacing;
            for (std::size_t ax = 1; ax < box->axes.size(); ++ax) {
                const auto [a, b] = box->axes[ax];
                base = std::min(base, 0.5 * std::min(b - a, two_pi));
            }
            for (int i = 0; i < count; ++i) {
                std::array<double, Point::max_dim> c{};
                const double slot = full0 ? i + 0.5 : i + 1.0;
                c[0] = wrap_angle(a0 + spacing * slot + shape.jitter * base * unit(rng));
                for (std::size_t ax = 1; ax < box->axes.size(); ++ax) {
                    const auto [a, b] = box->axes[ax];
                    c[ax] = wrap_angle(0.5 * (a + std::min(b, a + two_pi)) + shape.jitter * base * unit(rng));
                }
                centers.emplace_back(std::span<const double>(c.data(), box->axes.size()));
                radii.push_back(base * shrink);
            }
        } else {
            const auto& cap = std::get<SphericalCap>(desc);
            if (count == 1) {
                centers.push_back(cap.center);
                radii.push_back(cap.radius * shape.radius_fraction);
            } else {
                const double base = 0.5 * cap.radius;
                centers.push_back(cap.center);
                radii.push_back(base * shrink);
                for (int i = 1; i < count; ++i) {
                    const double rho = base + shape.jitter * base * unit(rng);
                    const double az = two_pi * (i - 1 + 0.5 * shape.jitter * unit(rng)) / (count - 1);
                    centers.push_back(cap_point(cap.center, rho, az));
                    radii.push_back(base * shrink);
                }
            }
        }
    }

    SourceBasis out;
    const auto& nodes = model->quadrature().nodes;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double room = inner_radius(set.descriptor(), centers[i]);
        if (room < radii[i] * (1.0 - 1e-12)) {
            throw Error(ErrorKind::SupportExceedsSet,
                        fmt::format("source {} of radius {:.6g} leaves {} (room {:.6g})", i, radii[i],
                                    describe(set.descriptor()), room));
        }
        Eigen::VectorXd vals(static_cast<Eigen::Index>(nodes.size()));
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            vals[static_cast<Eigen::Index>(n)] = bump_profile(angular_distance(kind, centers[i], nodes[n]) / radii[i]);
        }
        if (vals.cwiseAbs().maxCoeff() == 0.0) {
            throw Error(ErrorKind::QuadratureUnderResolved,
                        fmt::format("source {} contains no quadrature node; refine the model", i));
        }
        const Point center = centers[i];
        const double radius = radii[i];
        FieldCoefficients coeffs(model, converged_projection(*model, [&](const Point& x) {
                                     return bump_profile(angular_distance(kind, center, x) / radius);
                                 }));
        const double defect = (coeffs.node_values() - vals).cwiseAbs().maxCoeff();
        out.sources.push_back(SourceFunction{static_cast<int>(i), centers[i], radii[i], set.descriptor(),
                                             std::move(vals), std::move(coeffs), defect});
    }

    const auto n = static_cast<Eigen::Index>(out.sources.size());
    Eigen::MatrixXd gram(n, n);
    const Eigen::VectorXd& w = model->quadrature().weights;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            gram(i, j) = gram(j, i) =
                (w.array() * out.sources[i].node_values.array() * out.sources[j].node_values.array()).sum();
        }
    }
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues();
    out.gram_condition = ev[0] > 0.0 ? ev[n - 1] / ev[0] : std::numeric_limits<double>::infinity();
    return out;
}

// ---------------------------------------------------------------------------
// Galerkin assembly

namespace {

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& B, const Eigen::VectorXd& wv)
{
    const Eigen::Index n = B.cols();
    Eigen::MatrixXd M(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
        const auto j = static_cast<Eigen::Index>(jj);
        const Eigen::VectorXd col = wv.cwiseProduct(B.col(j));
        M.col(j).noalias() = B.transpose() * col;
    });
    return 0.5 * (M + M.transpose());
}

} // namespace

Eigen::MatrixXd assemble_potential_matrix(const SpectralModel& model, const PotentialField& V,
                                          const AssemblyOptions& options)
{
    const int n = model.basis_size();
    if (V.identically_zero()) {
        return Eigen::MatrixXd::Zero(n, n);
    }
    const Eigen::VectorXd v = V.at_nodes(model);
    const double vmax = v.cwiseAbs().maxCoeff();
    if (vmax == 0.0) {
        return Eigen::MatrixXd::Zero(n, n);
    }
    const Eigen::MatrixXd M = weighted_gram(model.basis_at_nodes(), model.quadrature().weights.cwiseProduct(v));

    const QuadratureRule shifted = model.shifted_quadrature();
    const Eigen::MatrixXd Bs = model.basis_values(shifted.nodes);
    const Eigen::MatrixXd Ms = weighted_gram(Bs, shifted.weights.cwiseProduct(V.at(shifted.nodes)));
    const double defect = (M - Ms).cwiseAbs().maxCoeff();
    if (defect > options.aliasing_tolerance * vmax) {
        throw Error(ErrorKind::QuadratureUnderResolved,
                    fmt::format("potential matrix differs by {:.3e} between shifted quadratures; increase the "
                                "resolution",
                                defect));
    }
    return M;
}

// ---------------------------------------------------------------------------
// Operator

SchrodingerOperator::SchrodingerOperator(ModelPtr model, Mass m, const PotentialField& V, const SolverOptions& options)
    : model_(std::move(model)), m_(m), V_(V), options_(options)
{
    const Eigen::VectorXd lm = l_multipliers(*model_, m_);
    matrix_ = assemble_potential_matrix(*model_, V_, options_.assembly);
    matrix_.diagonal() += lm;
    scale_ = lm.cwiseAbs().maxCoeff();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorKind::EigensolverFailure, "symmetric eigensolver did not converge");
    }
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();
    min_abs_ = eigenvalues_.cwiseAbs().minCoeff();
    condition_ = min_abs_ > 0.0 ? eigenvalues_.cwiseAbs().maxCoeff() / min_abs_
                                : std::numeric_limits<double>::infinity();
    invertible_ = min_abs_ > options_.singular_threshold * scale_;
}

FieldCoefficients SchrodingerOperator::solve(const FieldCoefficients& f) const
{
    if (f.model_ptr() != model_) {
        throw Error(ErrorKind::InvalidArgument, "source lives on a different model");
    }
    if (!invertible_) {
        throw Error(ErrorKind::SingularOperator,
                    fmt::format("0 is an eigenvalue of L + V (min |eigenvalue| = {:.3e})", min_abs_));
    }
    if (condition_ > options_.condition_limit) {
        throw Error(ErrorKind::IllConditioned, fmt::format("condition number {:.3e} exceeds {:.3e}", condition_,
                                                           options_.condition_limit));
    }
    const Eigen::VectorXd& b = f.coefficients();
    Eigen::VectorXd u;
    if (V_.identically_zero()) {
        u = b.cwiseQuotient(matrix_.diagonal());
    } else {
        auto apply_inverse = [&](const Eigen::VectorXd& r) {
            return Eigen::VectorXd(eigenvectors_ * (eigenvectors_.transpose() * r).cwiseQuotient(eigenvalues_));
        };
        u = apply_inverse(b);
        u += apply_inverse(b - matrix_ * u);
    }
    FieldCoefficients out(model_, std::move(u));
    const double res = residual(out, f);
    if (res > options_.residual_tolerance * std::max(1.0, b.norm())) {
        throw Error(ErrorKind::IllConditioned, fmt::format("Galerkin residual {:.3e} above tolerance", res));
    }
    return out;
}

double SchrodingerOperator::residual(const FieldCoefficients& u, const FieldCoefficients& f) const
{
    return (matrix_ * u.coefficients() - f.coefficients()).norm();
}

FieldCoefficients solve_schrodinger(const ModelPtr& model, Mass m, const PotentialField& V,
                                    const FieldCoefficients& f, const SolverOptions& options)
{
    return SchrodingerOperator(model, m, V, options).solve(f);
}

std::vector<double> operator_spectrum(const ModelPtr& model, Mass m, const PotentialField& V,
                                      const SolverOptions& options)
{
    const SchrodingerOperator op(model, m, V, options);
    return {op.eigenvalues().data(), op.eigenvalues().data() + op.eigenvalues().size()};
}

// ---------------------------------------------------------------------------
// Cauchy data

CauchyRecord cauchy_record(const SchrodingerOperator& op, const SourceFunction& f, const ObservationSet& set)
{
    const FieldCoefficients u = op.solve(f.coefficients);
    const Eigen::MatrixXd B = set.restrict_rows(op.model().basis_at_nodes());
    CauchyRecord rec;
    rec.source_id = f.id;
    rec.nodes.assign(set.nodes().begin(), set.nodes().end());
    rec.u = B * u.coefficients();
    rec.Lu = B * apply_L(u, op.mass()).coefficients();
    rec.truncation = op.model().truncation();
    rec.mass = op.mass().value();
    return rec;
}

double cauchy_equation_defect(const SchrodingerOperator& op, const SourceFunction& f, const ObservationSet& set)
{
    const CauchyRecord rec = cauchy_record(op, f, set);
    const Eigen::MatrixXd B = set.restrict_rows(op.model().basis_at_nodes());
    const Eigen::VectorXd pf = B * f.coefficients.coefficients();
    const Eigen::VectorXd v = op.potential().restriction(set);
    return (rec.Lu + v.cwiseProduct(rec.u) - pf).cwiseAbs().maxCoeff();
}

} // namespace logcal
