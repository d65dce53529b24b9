#include "logcal/functional_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "logcal/error.hpp"

namespace logcal {

namespace {

using boost::math::quadrature::gauss_kronrod;

// (e^{-t} - e^{-t mu}) without cancellation for small t
double semigroup_difference(double t, double mu)
{
    if (mu >= 1.0) {
        return -std::exp(-t) * std::expm1(-t * (mu - 1.0));
    }
    return std::exp(-t * mu) * std::expm1(-t * (1.0 - mu));
}

void require_same_model(const FieldCoefficients& a, const FieldCoefficients& b)
{
    if (a.model_ptr() != b.model_ptr()) {
        throw Error(ErrorKind::InvalidArgument, "fields belong to different models");
    }
}

} // namespace

Mass::Mass(double m) : m_(m)
{
    if (!(m > 1.0) || !std::isfinite(m)) {
        throw Error(ErrorKind::MassInvariant, fmt::format("mass m = {} violates m > 1", m));
    }
}

long double a_multiplier(double lambda, Mass m)
{
    return static_cast<long double>(lambda) + static_cast<long double>(m.value());
}

long double log_a_multiplier(double lambda, Mass m)
{
    return std::log(a_multiplier(lambda, m));
}

long double l_multiplier(double lambda, Mass m)
{
    const long double a = a_multiplier(lambda, m);
    return a * std::log(a);
}

namespace {

template <typename F>
Eigen::VectorXd per_basis(const SpectralModel& model, F&& f)
{
    const auto& lam = model.basis_eigenvalues();
    Eigen::VectorXd out(lam.size());
    for (Eigen::Index j = 0; j < lam.size(); ++j) {
        out[j] = static_cast<double>(f(lam[j]));
    }
    return out;
}

} // namespace

Eigen::VectorXd a_multipliers(const SpectralModel& model, Mass m)
{
    return per_basis(model, [m](double l) { return a_multiplier(l, m); });
}

Eigen::VectorXd log_a_multipliers(const SpectralModel& model, Mass m)
{
    return per_basis(model, [m](double l) { return log_a_multiplier(l, m); });
}

Eigen::VectorXd l_multipliers(const SpectralModel& model, Mass m)
{
    return per_basis(model, [m](double l) { return l_multiplier(l, m); });
}

// ---------------------------------------------------------------------------
// FieldCoefficients

FieldCoefficients::FieldCoefficients(ModelPtr model, Eigen::VectorXd coefficients)
    : model_(std::move(model)), coeffs_(std::move(coefficients))
{
    if (!model_) {
        throw Error(ErrorKind::InvalidArgument, "field needs a model");
    }
    if (coeffs_.size() != model_->basis_size()) {
        throw Error(ErrorKind::LengthMismatch, fmt::format("field has {} coefficients, model basis has {}",
                                                           coeffs_.size(), model_->basis_size()));
    }
}

FieldCoefficients FieldCoefficients::zero(ModelPtr model)
{
    const int n = model->basis_size();
    return {std::move(model), Eigen::VectorXd::Zero(n)};
}

FieldCoefficients FieldCoefficients::eigenfunction(ModelPtr model, int k, int l, double scale)
{
    const int d = model->multiplicity(k);
    if (l < 1 || l > d) {
        throw Error(ErrorKind::IndexOutOfRange, fmt::format("l = {} outside [1, {}]", l, d));
    }
    FieldCoefficients f = zero(model);
    f.coeffs_[model->block_offset(k) + l - 1] = scale;
    return f;
}

FieldCoefficients FieldCoefficients::from_node_values(ModelPtr model, const Eigen::VectorXd& node_values)
{
    if (node_values.size() != static_cast<Eigen::Index>(model->node_count())) {
        throw Error(ErrorKind::LengthMismatch, "node samples do not match the model quadrature");
    }
    Eigen::VectorXd c =
        model->basis_at_nodes().transpose() * (model->quadrature().weights.array() * node_values.array()).matrix();
    return {std::move(model), std::move(c)};
}

Eigen::VectorXd FieldCoefficients::block(int k) const
{
    const int off = model_->block_offset(k);
    return coeffs_.segment(off, model_->multiplicity(k));
}

double FieldCoefficients::block_value(int k, const Point& x) const
{
    const int off = model_->block_offset(k);
    const int d = model_->multiplicity(k);
    double s = 0.0;
    for (int l = 0; l < d; ++l) {
        if (coeffs_[off + l] != 0.0) {
            s += coeffs_[off + l] * model_->basis_function(off + l, x);
        }
    }
    return s;
}

double FieldCoefficients::evaluate(const Point& x) const
{
    return model_->basis_values(x).dot(coeffs_);
}

Eigen::VectorXd FieldCoefficients::evaluate(std::span<const Point> xs) const
{
    return model_->basis_values(xs) * coeffs_;
}

Eigen::VectorXd FieldCoefficients::node_values() const
{
    return model_->basis_at_nodes() * coeffs_;
}

double FieldCoefficients::sup_norm_at_nodes() const
{
    return node_values().cwiseAbs().maxCoeff();
}

FieldCoefficients FieldCoefficients::scaled(const Eigen::VectorXd& multipliers) const
{
    return {model_, coeffs_.cwiseProduct(multipliers)};
}

FieldCoefficients operator+(const FieldCoefficients& a, const FieldCoefficients& b)
{
    require_same_model(a, b);
    return {a.model_ptr(), a.coefficients() + b.coefficients()};
}

FieldCoefficients operator-(const FieldCoefficients& a, const FieldCoefficients& b)
{
    require_same_model(a, b);
    return {a.model_ptr(), a.coefficients() - b.coefficients()};
}

FieldCoefficients operator*(double s, const FieldCoefficients& a)
{
    return {a.model_ptr(), s * a.coefficients()};
}

// ---------------------------------------------------------------------------
// Diagonal operators

FieldCoefficients project(const FieldCoefficients& field, int k)
{
    const auto& model = field.model();
    const int off = model.block_offset(k);
    const int d = model.multiplicity(k);
    FieldCoefficients out = FieldCoefficients::zero(field.model_ptr());
    out.coefficients().segment(off, d) = field.coefficients().segment(off, d);
    return out;
}

FieldCoefficients apply_A(const FieldCoefficients& field, Mass m)
{
    return field.scaled(a_multipliers(field.model(), m));
}

FieldCoefficients apply_log_A(const FieldCoefficients& field, Mass m)
{
    return field.scaled(log_a_multipliers(field.model(), m));
}

FieldCoefficients apply_L(const FieldCoefficients& field, Mass m)
{
    return field.scaled(l_multipliers(field.model(), m));
}

FieldCoefficients heat_apply(const FieldCoefficients& field, Mass m, double t)
{
    if (!(t >= 0.0)) {
        throw Error(ErrorKind::NegativeTime, fmt::format("heat semigroup time t = {} is negative", t));
    }
    const Eigen::VectorXd mu = a_multipliers(field.model(), m);
    return field.scaled((-t * mu.array()).exp().matrix());
}

double l_energy(const FieldCoefficients& field, Mass m)
{
    const Eigen::VectorXd lm = l_multipliers(field.model(), m);
    return field.coefficients().dot(lm.cwiseProduct(field.coefficients()));
}

double heat_decay_ratio(const FieldCoefficients& field, Mass m, std::span<const double> times,
                        std::span<const Point> points)
{
    const Eigen::MatrixXd B = field.model().basis_values(points);
    const double v_sup = (B * field.coefficients()).cwiseAbs().maxCoeff();
    if (v_sup == 0.0) {
        return 0.0;
    }
    double worst = 0.0;
    for (double t : times) {
        const double s = (B * heat_apply(field, m, t).coefficients()).cwiseAbs().maxCoeff();
        worst = std::max(worst, s * std::exp(m.value() * t) / v_sup);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Heat kernel

namespace {

struct CatalogLock {
    std::mutex mutex;
};

CatalogLock& catalog_lock()
{
    static CatalogLock lock;
    return lock;
}

} // namespace

HeatKernel::HeatKernel(ModelPtr model, Mass m) : model_(std::move(model)), m_(m)
{
    mu_ = a_multipliers(*model_, m_);
    extended_ = catalog_spectrum(model_->descriptor(), model_->truncation() + 32);
}

double HeatKernel::tail_bound(double t) const
{
    const int K = model_->truncation();
    const double vol = model_->volume();
    std::lock_guard lock(catalog_lock().mutex);
    for (;;) {
        double sum = 0.0;
        bool converged = false;
        for (std::size_t k = K; k < extended_.eigenvalues.size(); ++k) {
            const double term =
                extended_.multiplicities[k] * std::exp(-t * (extended_.eigenvalues[k] + m_.value())) / vol;
            sum += term;
            // eigenvalues grow at least linearly in k, so once a term is negligible against
            // the running sum the remainder is smaller still
            if (term <= 1e-18 * sum || term < std::numeric_limits<double>::min()) {
                converged = true;
                break;
            }
        }
        if (converged) {
            return sum;
        }
        extended_ = catalog_spectrum(model_->descriptor(), static_cast<int>(extended_.eigenvalues.size()) * 2);
    }
}

HeatKernelValue HeatKernel::operator()(double t, const Eigen::VectorXd& bx, const Eigen::VectorXd& by) const
{
    if (!(t > 0.0)) {
        throw Error(ErrorKind::NegativeTime, fmt::format("heat kernel needs t > 0, got {}", t));
    }
    HeatKernelValue out;
    out.value = ((-t * mu_.array()).exp() * bx.array() * by.array()).sum();
    out.tail_bound = tail_bound(t);
    return out;
}

HeatKernelValue HeatKernel::operator()(double t, const Point& x, const Point& y) const
{
    return (*this)(t, model_->basis_values(x), model_->basis_values(y));
}

double HeatKernel::rounding_floor(double t, const Eigen::VectorXd& bx, const Eigen::VectorXd& by) const
{
    const double mag = ((-t * mu_.array()).exp() * (bx.array() * by.array()).abs()).sum();
    return 64.0 * std::numeric_limits<double>::epsilon() * mag;
}

HeatKernelValue heat_kernel(const ModelPtr& model, Mass m, double t, const Point& x, const Point& y)
{
    return HeatKernel(model, m)(t, x, y);
}

// ---------------------------------------------------------------------------
// Grigor'yan bound

namespace {

struct Probe {
    double t;
    double d2;
    double value;   // |P|
    double floor;   // truncation + rounding error of |P|
};

std::vector<Probe> collect_probes(const HeatKernel& kernel, std::span<const double> times,
                                  std::span<const PointPair> pairs)
{
    const auto& model = kernel.model();
    const double m = kernel.mass().value();
    std::vector<Probe> out;
    out.reserve(times.size() * pairs.size());
    for (const auto& pair : pairs) {
        const Eigen::VectorXd bx = model.basis_values(pair.x);
        const Eigen::VectorXd by = model.basis_values(pair.y);
        const double d = model.distance(pair.x, pair.y);
        for (double t : times) {
            const HeatKernelValue v = kernel(t, bx, by);
            const double scale = std::exp(m * t);
            out.push_back({t, d * d, std::fabs(v.value) * scale,
                           (v.tail_bound + kernel.rounding_floor(t, bx, by)) * scale});
        }
    }
    return out;
}

} // namespace

GrigoryanReport grigoryan_check(const ModelPtr& model, Mass m, std::span<const double> times,
                                std::span<const PointPair> pairs, const GrigoryanOptions& options)
{
    for (double t : times) {
        if (!(t > 0.0)) {
            throw Error(ErrorKind::NegativeTime, "Grigor'yan probe times must be positive");
        }
    }
    const HeatKernel kernel(model, m);
    const double half_n = 0.5 * model->dimension();
    const auto probes = collect_probes(kernel, times, pairs);

    std::vector<const Probe*> resolved;
    for (const auto& p : probes) {
        if (p.value > p.floor) {
            resolved.push_back(&p);
        }
    }
    GrigoryanReport rep;
    rep.probes = static_cast<int>(probes.size());
    rep.resolved = static_cast<int>(resolved.size());
    if (resolved.empty()) {
        return rep;
    }

    auto log_c_for = [&](double c) {
        double best = -std::numeric_limits<double>::infinity();
        for (const Probe* p : resolved) {
            best = std::max(best, std::log(p->value) + half_n * std::log(p->t) + c * p->d2 / p->t);
        }
        return best;
    };
    auto looseness = [&](double c) {
        const double logC = log_c_for(c);
        double worst = 0.0;
        for (const Probe* p : resolved) {
            worst = std::max(worst, logC - half_n * std::log(p->t) - c * p->d2 / p->t - std::log(p->value));
        }
        return worst;
    };

    // coarse log-spaced scan, ties broken towards the sharper (larger) c
    double best_c = options.c_min;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> grid(options.c_grid);
    for (int i = 0; i < options.c_grid; ++i) {
        grid[i] = options.c_min * std::pow(options.c_max / options.c_min, double(i) / (options.c_grid - 1));
        const double v = looseness(grid[i]);
        if (v <= best_val) {
            best_val = v;
            best_c = grid[i];
        }
    }
    // golden-section refinement inside the neighbouring grid cells
    {
        const auto it = std::find(grid.begin(), grid.end(), best_c);
        double lo = it == grid.begin() ? best_c : *(it - 1);
        double hi = (it + 1) == grid.end() ? best_c : *(it + 1);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int iter = 0; iter < 80 && hi - lo > 1e-12 * hi; ++iter) {
            const double a = hi - g * (hi - lo);
            const double b = lo + g * (hi - lo);
            if (looseness(a) < looseness(b)) {
                hi = b;
            } else {
                lo = a;
            }
        }
        const double mid = 0.5 * (lo + hi);
        if (looseness(mid) < best_val) {
            best_c = mid;
            best_val = looseness(mid);
        }
    }
    rep.c = best_c;
    rep.max_looseness = best_val;

    // C is the supremum over each pair's time interval, not only over the probes:
    // interior maxima of the log-ratio are located by golden-section search.
    double log_C = log_c_for(best_c);
    std::vector<double> grid_t(times.begin(), times.end());
    std::sort(grid_t.begin(), grid_t.end());
    grid_t.erase(std::unique(grid_t.begin(), grid_t.end()), grid_t.end());
    for (const auto& pair : pairs) {
        const Eigen::VectorXd bx = model->basis_values(pair.x);
        const Eigen::VectorXd by = model->basis_values(pair.y);
        const double d = model->distance(pair.x, pair.y);
        auto ratio = [&](double t) {
            const HeatKernelValue v = kernel(t, bx, by);
            const double scale = std::exp(m.value() * t);
            const double value = std::fabs(v.value) * scale;
            if (!(value > (v.tail_bound + kernel.rounding_floor(t, bx, by)) * scale)) {
                return -std::numeric_limits<double>::infinity();
            }
            return std::log(value) + half_n * std::log(t) + best_c * d * d / t;
        };
        std::vector<double> g(grid_t.size());
        for (std::size_t i = 0; i < grid_t.size(); ++i) {
            g[i] = ratio(grid_t[i]);
        }
        for (std::size_t i = 1; i + 1 < grid_t.size(); ++i) {
            if (!std::isfinite(g[i]) || g[i] < g[i - 1] || g[i] < g[i + 1]) {
                continue;
            }
            double lo = grid_t[i - 1];
            double hi = grid_t[i + 1];
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double a = hi - gr * (hi - lo);
            double b = lo + gr * (hi - lo);
            double ga = ratio(a);
            double gb = ratio(b);
            for (int iter = 0; iter < 60; ++iter) {
                if (ga > gb) {
                    hi = b;
                    b = a;
                    gb = ga;
                    a = hi - gr * (hi - lo);
                    ga = ratio(a);
                } else {
                    lo = a;
                    a = b;
                    ga = gb;
                    b = lo + gr * (hi - lo);
                    gb = ratio(b);
                }
            }
            log_C = std::max({log_C, ga, gb});
        }
    }
    rep.C = std::exp(log_C);

    // verification grid: probe times plus geometric intermediates
    std::vector<double> sorted(times.begin(), times.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> refined;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        refined.push_back(sorted[i]);
        if (i + 1 < sorted.size()) {
            for (int r = 1; r <= options.refinement; ++r) {
                const double f = double(r) / (options.refinement + 1);
                refined.push_back(sorted[i] * std::pow(sorted[i + 1] / sorted[i], f));
            }
        }
    }
    const auto checks = collect_probes(kernel, refined, pairs);
    rep.verified = static_cast<int>(checks.size());
    for (const auto& p : checks) {
        const double bound = rep.C * std::pow(p.t, -half_n) * std::exp(-rep.c * p.d2 / p.t);
        if (p.value - p.floor > bound * (1.0 + 1e-12)) {
            ++rep.violations;
        }
    }
    rep.passed = rep.violations == 0 && rep.C > 0.0 && rep.c > 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Logarithm identity and pointwise representation

QuadratureResult log_identity_quadrature(double lambda, double tolerance)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorKind::InvalidArgument, fmt::format("log identity needs lambda > 0, got {}", lambda));
    }
    auto integrand = [lambda](double t) { return semigroup_difference(t, lambda) / t; };

    QuadratureResult out;
    double err = 0.0;
    double l1 = 0.0;
    out.value = gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 30, tolerance, &err, &l1);
    out.error_estimate = err;

    // cut [1, inf) where int_T^inf (e^{-t} + e^{-lambda t}) / t dt is negligible
    const double slow = std::min(1.0, lambda);
    double T = 1.0;
    while (std::exp(-slow * T) / (slow * T) > 0.1 * tolerance) {
        T *= 1.25;
    }
    out.value += gauss_kronrod<double, 31>::integrate(integrand, 1.0, T, 30, tolerance, &err, &l1);
    out.error_estimate += err + std::exp(-T) / T + std::exp(-lambda * T) / (lambda * T);
    return out;
}

QuadratureResult pointwise_L(const FieldCoefficients& field, Mass m, const Point& x, const QuadratureControl& control)
{
    const auto& model = field.model();
    const Eigen::VectorXd mu = a_multipliers(model, m);
    // (A u) split into its per-eigenfunction contributions at x
    const Eigen::VectorXd au_terms = mu.cwiseProduct(field.coefficients()).cwiseProduct(model.basis_values(x));
    const double scale = au_terms.cwiseAbs().sum();
    if (scale == 0.0) {
        return {0.0, 0.0};
    }

    // ((e^{-t} I - e^{-tA}) A u)(x) / t
    auto integrand = [&](double t) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < mu.size(); ++j) {
            s += au_terms[j] * semigroup_difference(t, mu[j]);
        }
        return s / t;
    };

    const double tol = control.tolerance;
    QuadratureResult out;
    double err = 0.0;
    double l1_head = 0.0;
    double l1_tail = 0.0;
    out.value = gauss_kronrod<double, 31>::integrate([&](double s) { return integrand(s * s) * 2.0 * s; }, 0.0, 1.0,
                                                     control.max_depth, 0.1 * tol, &err, &l1_head);
    out.error_estimate = err;

    const double mv = m.value();
    double T = 1.0;
    auto tail = [&](double T_) { return scale * (std::exp(-T_) / T_ + std::exp(-mv * T_) / (mv * T_)); };
    while (tail(T) > 0.1 * tol * scale) {
        T += 1.0;
    }
    out.value += gauss_kronrod<double, 31>::integrate(integrand, 1.0, T, control.max_depth, 0.1 * tol, &err, &l1_tail);
    out.error_estimate += err + tail(T);

    const double budget = tol * std::max(l1_head + l1_tail, scale);
    if (!(out.error_estimate <= budget)) {
        throw Error(ErrorKind::QuadratureNotConverged,
                    fmt::format("pointwise L quadrature error {:.3e} exceeds budget {:.3e}", out.error_estimate,
                                budget));
    }
    return out;
}

} // namespace logcal
