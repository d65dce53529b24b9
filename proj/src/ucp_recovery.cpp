#include "logcal/ucp_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "logcal/error.hpp"
#include "logcal/gelfand_extraction.hpp"
#include "logcal/parallel.hpp"

namespace logcal {

namespace {

double wrap_angle(double a)
{
    double r = std::fmod(a, two_pi);
    return r < 0.0 ? r + two_pi : r;
}

// Singular values of a tall matrix with unit-norm columns, via QR to a square factor.
Eigen::VectorXd equilibrated_singular_values(Eigen::MatrixXd a)
{
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double n = a.col(j).norm();
        if (n > 0.0) {
            a.col(j) /= n;
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    return Eigen::BDCSVD<Eigen::MatrixXd>(R).singularValues();
}

} // namespace

// ---------------------------------------------------------------------------
// UCP

UcpReport ucp_nullspace_test(const SpectralModel& model, Mass m, const ObservationSet& set, const UcpOptions& options)
{
    const int dim = model.basis_size();
    std::vector<Point> samples = options.samples;
    if (samples.empty()) {
        if (options.node_multiplier < 1) {
            throw Error(ErrorKind::Underdetermined, "node multiplier must be at least 1");
        }
        samples = set.interior_samples(static_cast<std::size_t>(options.node_multiplier) * dim);
    }
    // 2 rows per sample point against dim unknowns
    if (samples.size() < static_cast<std::size_t>(dim)) {
        throw Error(ErrorKind::Underdetermined,
                    fmt::format("{} constraint rows for a {}-dimensional space; need at least {}", 2 * samples.size(),
                                dim, 2 * dim));
    }
    const Eigen::MatrixXd phi = model.basis_values(samples);
    const Eigen::VectorXd lm = l_multipliers(model, m);
    Eigen::MatrixXd pair(2 * phi.rows(), dim);
    pair.topRows(phi.rows()) = phi;
    pair.bottomRows(phi.rows()) = phi * lm.asDiagonal();

    const Eigen::VectorXd s = equilibrated_singular_values(pair);
    const Eigen::VectorXd s0 = equilibrated_singular_values(phi);

    UcpReport rep;
    rep.truncation = model.truncation();
    rep.observation = describe(set.descriptor());
    rep.space_dimension = dim;
    rep.samples = static_cast<int>(samples.size());
    rep.sigma_max = s[0];
    rep.sigma_min = s[s.size() - 1];
    rep.solution_only_sigma_max = s0[0];
    rep.solution_only_sigma_min = s0[s0.size() - 1];
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] < options.null_threshold * s[0]) {
            ++rep.null_dimension;
        }
    }
    rep.passed = rep.null_dimension == 0;
    return rep;
}

// ---------------------------------------------------------------------------
// Moments

namespace {

// composite Simpson weights on n uniform points (3/8 rule on the last panel for even n)
std::vector<double> simpson_weights(std::size_t n, double h)
{
    std::vector<double> w(n, 0.0);
    if (n == 1) {
        return w;
    }
    if (n == 2) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    const std::size_t simpson_end = (n % 2 == 1) ? n - 1 : n - 4;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (n % 2 == 0) {
        const std::size_t i = n - 4;
        w[i] += 3.0 * h / 8.0;
        w[i + 1] += 9.0 * h / 8.0;
        w[i + 2] += 9.0 * h / 8.0;
        w[i + 3] += 3.0 * h / 8.0;
    }
    return w;
}

} // namespace

MomentReport moment_vector(std::span<const double> s, std::span<const double> phi, int k_max)
{
    if (s.size() != phi.size()) {
        throw Error(ErrorKind::LengthMismatch, "moment samples and grid differ in length");
    }
    if (s.size() < 3 || k_max < 0) {
        throw Error(ErrorKind::InvalidArgument, "moments need at least three samples and k_max >= 0");
    }
    if (s.front() < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "moment grid must be nonnegative");
    }
    const double h = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (std::fabs(s[i] - s[i - 1] - h) > 1e-9 * h) {
            throw Error(ErrorKind::InvalidArgument, "moment grid must be uniform");
        }
    }

    MomentReport rep;
    const auto w = simpson_weights(s.size(), h);
    for (int k = 0; k <= k_max; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            acc += w[i] * std::pow(s[i], k) * phi[i];
        }
        rep.moments.push_back(acc);
    }

    double peak = 0.0;
    for (double v : phi) {
        peak = std::max(peak, std::fabs(v));
    }
    if (peak == 0.0) {
        rep.decay_rate = std::numeric_limits<double>::infinity();
        rep.tail_bounds.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
        return rep;
    }

    // least-squares slope of log|phi| over the second half of the grid
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = s.size() / 2; i < s.size(); ++i) {
        if (std::fabs(phi[i]) > std::numeric_limits<double>::min()) {
            const double y = std::log(std::fabs(phi[i]));
            sx += s[i];
            sy += y;
            sxx += s[i] * s[i];
            sxy += s[i] * y;
            ++n;
        }
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n >= 3 && denom > 0.0) ? (n * sxy - sx * sy) / denom : 0.0;
    if (!(slope < 0.0)) {
        throw Error(ErrorKind::NoExponentialDecay, "samples show no exponential decay over the grid tail");
    }
    rep.decay_rate = -slope;
    for (std::size_t i = 0; i < s.size(); ++i) {
        rep.decay_constant = std::max(rep.decay_constant, std::fabs(phi[i]) * std::exp(rep.decay_rate * s[i]));
    }
    const double c = rep.decay_rate;
    const double S = s.back();
    for (int k = 0; k <= k_max; ++k) {
        rep.tail_bounds.push_back(rep.decay_constant * boost::math::tgamma(k + 1.0, c * S) / std::pow(c, k + 1));
    }
    return rep;
}

MomentCompleteness moment_completeness(std::span<const double> s, std::span<const double> phi, int K,
                                       double tolerance)
{
    MomentCompleteness out;
    const MomentReport mom = moment_vector(s, phi, std::max(0, 2 * K - 1));
    for (double v : mom.moments) {
        out.max_moment = std::max(out.max_moment, std::fabs(v));
    }
    out.moments_vanish = out.max_moment <= tolerance;

    Eigen::MatrixXd col(static_cast<Eigen::Index>(phi.size()), 1);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        col(static_cast<Eigen::Index>(i), 0) = phi[i];
    }
    try {
        ExtractionOptions opt;
        opt.max_order = K;
        const ExponentialFit fit = extract_exponents(col, s, opt);
        out.max_amplitude = fit.amplitudes.size() ? fit.amplitudes.cwiseAbs().maxCoeff() : 0.0;
    } catch (const Error&) {
        out.max_amplitude = col.cwiseAbs().maxCoeff();
    }
    out.amplitudes_vanish = out.max_amplitude <= tolerance;
    out.consistent = !out.moments_vanish || out.amplitudes_vanish;
    return out;
}

// ---------------------------------------------------------------------------
// Pairings

PairingResult nonvanishing_pairing_search(const SchrodingerOperator& op, int k,
                                          const std::vector<FieldCoefficients>& candidates, double threshold)
{
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const FieldCoefficients u = op.solve(candidates[c]);
        const double scale = u.coefficients().norm();
        if (scale == 0.0) {
            continue;
        }
        const Eigen::VectorXd b = u.block(k);
        for (Eigen::Index l = 0; l < b.size(); ++l) {
            if (std::fabs(b[l]) > threshold * scale) {
                return {static_cast<int>(c), static_cast<int>(l) + 1, b[l]};
            }
        }
    }
    throw Error(ErrorKind::AllPairingsVanish,
                fmt::format("no candidate source pairs with eigenspace {}; the data are under-excited", k));
}

// ---------------------------------------------------------------------------
// Recovery

std::vector<SolutionSample> forward_solutions(const SchrodingerOperator& op, const SourceBasis& sources)
{
    std::vector<SolutionSample> out;
    for (const auto& s : sources.sources) {
        out.push_back({s.id, op.solve(s.coefficients), s.coefficients});
    }
    return out;
}

RecoveredPotential recover_potential(const SpectralModel& model, Mass m, const ObservationSet& set,
                                     const Eigen::VectorXd& v_known_on_set,
                                     const std::vector<SolutionSample>& solutions, const RecoveryOptions& options)
{
    if (v_known_on_set.size() != static_cast<Eigen::Index>(set.size())) {
        throw Error(ErrorKind::LengthMismatch, "known potential must be sampled on the observation nodes");
    }
    if (solutions.empty()) {
        throw Error(ErrorKind::EmptyCoverage, "recovery needs at least one source");
    }
    const std::size_t N = model.node_count();
    const auto S = solutions.size();
    const Eigen::MatrixXd& B = model.basis_at_nodes();
    const Eigen::VectorXd lm = l_multipliers(model, m);

    std::vector<Eigen::VectorXd> u(S), lu(S), pf(S);
    std::vector<double> floor(S);
    for (std::size_t s = 0; s < S; ++s) {
        u[s] = B * solutions[s].u.coefficients();
        lu[s] = B * lm.cwiseProduct(solutions[s].u.coefficients());
        pf[s] = B * solutions[s].f.coefficients();
        floor[s] = options.mask_fraction * u[s].cwiseAbs().maxCoeff();
    }

    RecoveredPotential rec;
    rec.nodes = model.quadrature().nodes;
    rec.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(N), std::numeric_limits<double>::quiet_NaN());
    rec.covered.assign(N, false);
    rec.observed.assign(N, false);
    rec.contributing.assign(N, 0);
    const auto idx = set.node_indices();
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto n = static_cast<std::size_t>(idx[i]);
        rec.observed[n] = true;
        rec.covered[n] = true;
        rec.values[idx[i]] = v_known_on_set[static_cast<Eigen::Index>(i)];
    }

    std::vector<double> spread(N, 0.0);
    parallel_for(N, [&](std::size_t n) {
        if (rec.observed[n]) {
            return;
        }
        const auto e = static_cast<Eigen::Index>(n);
        std::vector<std::pair<double, double>> cand;   // (value, weight)
        for (std::size_t s = 0; s < S; ++s) {
            const double un = u[s][e];
            if (std::fabs(un) > floor[s]) {
                cand.emplace_back((pf[s][e] - lu[s][e]) / un, std::fabs(un));
            }
        }
        rec.contributing[n] = static_cast<int>(cand.size());
        if (cand.empty()) {
            return;
        }
        std::sort(cand.begin(), cand.end());
        double total = 0.0;
        for (const auto& c : cand) {
            total += c.second;
        }
        double acc = 0.0;
        double med = cand.back().first;
        for (const auto& c : cand) {
            acc += c.second;
            if (acc >= 0.5 * total) {
                med = c.first;
                break;
            }
        }
        double dev = 0.0;
        for (const auto& c : cand) {
            dev += c.second * std::fabs(c.first - med);
        }
        spread[n] = dev / total;
        rec.values[e] = med;
        rec.covered[n] = true;
    });

    double scale = v_known_on_set.size() ? v_known_on_set.cwiseAbs().maxCoeff() : 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        if (rec.covered[n]) {
            scale = std::max(scale, std::fabs(rec.values[static_cast<Eigen::Index>(n)]));
        } else {
            ++rec.masked;
        }
    }
    scale = std::max(scale, std::numeric_limits<double>::min());
    for (double sp : spread) {
        rec.max_disagreement = std::max(rec.max_disagreement, sp / scale);
    }
    if (options.require_full_coverage && rec.masked > 0) {
        throw Error(ErrorKind::EmptyCoverage,
                    fmt::format("{} complement nodes are masked for every source; add sources", rec.masked));
    }
    if (rec.max_disagreement > options.disagreement_tolerance) {
        throw Error(ErrorKind::InconsistentCandidates,
                    fmt::format("source candidates disagree by {:.3e} (relative); the truncation is too coarse",
                                rec.max_disagreement));
    }
    return rec;
}

double recovery_error(const RecoveredPotential& rec, const PotentialField& truth)
{
    const Eigen::VectorXd v = truth.at(rec.nodes);
    const double vmax = v.cwiseAbs().maxCoeff();
    double err = 0.0;
    for (std::size_t n = 0; n < rec.nodes.size(); ++n) {
        const auto e = static_cast<Eigen::Index>(n);
        if (rec.covered[n] && !rec.observed[n]) {
            err = std::max(err, std::fabs(rec.values[e] - v[e]));
        }
    }
    return vmax > 0.0 ? err / vmax : err;
}

// ---------------------------------------------------------------------------
// Heat kernels

HeatKernelComparison heat_kernel_equality_check(const SpectralModel& a, const SpectralModel& b, Mass m,
                                                const ObservationSet& set_a, const ObservationSet& set_b,
                                                std::span<const double> times, double tolerance)
{
    if (set_a.size() != set_b.size()) {
        throw Error(ErrorKind::IncompatibleGrids, "observation node sets differ in size");
    }
    for (std::size_t i = 0; i < set_a.size(); ++i) {
        const auto ca = set_a.nodes()[i].coords();
        const auto cb = set_b.nodes()[i].coords();
        bool same = ca.size() == cb.size();
        for (std::size_t c = 0; same && c < ca.size(); ++c) {
            same = std::fabs(ca[c] - cb[c]) <= 1e-12;
        }
        if (!same) {
            throw Error(ErrorKind::IncompatibleGrids, fmt::format("observation node {} differs", i));
        }
    }
    const Eigen::MatrixXd Ba = set_a.restrict_rows(a.basis_at_nodes());
    const Eigen::MatrixXd Bb = set_b.restrict_rows(b.basis_at_nodes());
    const Eigen::VectorXd mua = a_multipliers(a, m);
    const Eigen::VectorXd mub = a_multipliers(b, m);
    HeatKernelComparison out;
    for (double t : times) {
        if (!(t > 0.0)) {
            throw Error(ErrorKind::NegativeTime, "kernel comparison times must be positive");
        }
        const Eigen::VectorXd ea = (-t * mua.array()).exp();
        const Eigen::VectorXd eb = (-t * mub.array()).exp();
        const Eigen::MatrixXd Pa = Ba * ea.asDiagonal() * Ba.transpose();
        const Eigen::MatrixXd Pb = Bb * eb.asDiagonal() * Bb.transpose();
        const double dev = (Pa - Pb).cwiseAbs().maxCoeff();
        out.checked += static_cast<int>(Pa.size());
        if (dev > out.max_deviation) {
            out.max_deviation = dev;
            out.worst_time = t;
        }
    }
    out.passed = out.max_deviation <= tolerance;
    return out;
}

// ---------------------------------------------------------------------------
// Isometries

Isometry::Isometry(ManifoldKind kind, Type type, std::vector<double> params)
    : kind_(kind), type_(type), params_(std::move(params))
{
}

Isometry Isometry::identity(ManifoldKind kind)
{
    return {kind, Type::Identity, {}};
}

Isometry Isometry::circle_rotation(double alpha)
{
    return {ManifoldKind::Circle, Type::Rotation, {alpha}};
}

Isometry Isometry::circle_reflection(double beta)
{
    return {ManifoldKind::Circle, Type::Reflection, {beta}};
}

Isometry Isometry::sphere_rotation(double alpha)
{
    return {ManifoldKind::Sphere2, Type::Rotation, {alpha}};
}

Isometry Isometry::sphere_reflection(double beta)
{
    return {ManifoldKind::Sphere2, Type::Reflection, {beta}};
}

Isometry Isometry::torus_translation(std::vector<double> shift)
{
    if (shift.empty() || shift.size() > Point::max_dim) {
        throw Error(ErrorKind::InvalidArgument, "torus translation needs one shift per axis");
    }
    return {ManifoldKind::FlatTorus, Type::Translation, std::move(shift)};
}

std::string Isometry::describe() const
{
    switch (type_) {
    case Type::Identity:
        return "identity";
    case Type::Rotation:
        return fmt::format("rotation({:.6g})", params_[0]);
    case Type::Reflection:
        return fmt::format("reflection({:.6g})", params_[0]);
    case Type::Translation:
        return fmt::format("translation({:.6g})", fmt::join(params_, ", "));
    }
    return "isometry";
}

Point Isometry::apply(const Point& x) const
{
    Point y = x;
    const std::size_t angle = kind_ == ManifoldKind::Sphere2 ? 1 : 0;
    switch (type_) {
    case Type::Identity:
        break;
    case Type::Rotation:
        y[angle] = wrap_angle(x[angle] + params_[0]);
        break;
    case Type::Reflection:
        y[angle] = wrap_angle(2.0 * params_[0] - x[angle]);
        break;
    case Type::Translation:
        for (std::size_t i = 0; i < params_.size() && i < x.size(); ++i) {
            y[i] = wrap_angle(x[i] + params_[i]);
        }
        break;
    }
    return y;
}

Isometry Isometry::inverse() const
{
    switch (type_) {
    case Type::Rotation:
        return {kind_, type_, {-params_[0]}};
    case Type::Translation: {
        std::vector<double> p = params_;
        for (double& v : p) {
            v = -v;
        }
        return {kind_, type_, std::move(p)};
    }
    default:
        return *this;
    }
}

Eigen::MatrixXd Isometry::pullback(const SpectralModel& model) const
{
    if (model.kind() != kind_) {
        throw Error(ErrorKind::InvalidArgument, "isometry and model live on different manifolds");
    }
    const int n = model.basis_size();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
    if (type_ == Type::Identity) {
        return P;
    }
    const auto labels = model.labels();
    using Key = std::tuple<int, std::array<int, Point::max_dim>, int, int>;
    std::map<Key, int> sin_index;
    for (int j = 0; j < n; ++j) {
        const auto& l = labels[j];
        if (l.part == TrigPart::Sin) {
            sin_index[{l.block, l.lattice, l.degree, l.order}] = j;
        }
    }
    for (int j = 0; j < n; ++j) {
        const auto& l = labels[j];
        if (l.part != TrigPart::Cos) {
            continue;
        }
        const auto it = sin_index.find({l.block, l.lattice, l.degree, l.order});
        if (it == sin_index.end()) {
            throw Error(ErrorKind::InvalidArgument, "basis is missing the sine partner of a cosine mode");
        }
        const int s = it->second;
        double freq_phase = 0.0;
        switch (kind_) {
        case ManifoldKind::Circle:
            freq_phase = l.lattice[0];
            break;
        case ManifoldKind::Sphere2:
            freq_phase = l.order;
            break;
        case ManifoldKind::FlatTorus:
            for (std::size_t i = 0; i < params_.size(); ++i) {
                freq_phase += l.lattice[i] * params_[i];
            }
            break;
        }
        // rows: new (cos, sin) coefficients; columns: old (cos, sin)
        if (type_ == Type::Reflection) {
            const double psi = 2.0 * freq_phase * params_[0];
            P(j, j) = std::cos(psi);
            P(j, s) = std::sin(psi);
            P(s, j) = std::sin(psi);
            P(s, s) = -std::cos(psi);
        } else {
            const double psi = kind_ == ManifoldKind::FlatTorus ? freq_phase : freq_phase * params_[0];
            P(j, j) = std::cos(psi);
            P(j, s) = std::sin(psi);
            P(s, j) = -std::sin(psi);
            P(s, s) = std::cos(psi);
        }
    }
    return P;
}

GaugeReport isometry_gauge_check(const ModelPtr& model, Mass m, const PotentialField& V, const ObservationSet& set,
                                 const Isometry& phi, const SourceBasis& sources, double tolerance)
{
    if (phi.kind() != model->kind()) {
        throw Error(ErrorKind::InvalidArgument, "isometry and model live on different manifolds");
    }
    const Isometry inv = phi.inverse();
    for (const auto& x : set.nodes()) {
        if (!set.contains(phi.apply(x)) || !set.contains(inv.apply(x))) {
            throw Error(ErrorKind::IsometryPrecondition,
                        fmt::format("{} does not map {} onto itself", phi.describe(), describe(set.descriptor())));
        }
    }
    if (sources.sources.empty()) {
        throw Error(ErrorKind::InvalidArgument, "gauge check needs at least one source");
    }

    GaugeReport rep;
    const Eigen::MatrixXd P = phi.pullback(*model);
    const Eigen::MatrixXd Pinv = inv.pullback(*model);
    const Eigen::VectorXd mu = a_multipliers(*model, m);
    const Eigen::MatrixXd& B = model->basis_at_nodes();
    std::vector<Point> moved;
    for (const auto& x : model->quadrature().nodes) {
        moved.push_back(phi.apply(x));
    }
    const Eigen::MatrixXd B_moved = model->basis_values(moved);
    for (const auto& s : sources.sources) {
        const Eigen::VectorXd& c = s.coefficients.coefficients();
        const double scale = std::max(1.0, (B * c).cwiseAbs().maxCoeff());
        const double d1 = (P * mu.cwiseProduct(c) - mu.cwiseProduct(P * c)).cwiseAbs().maxCoeff();
        const double d2 = (B_moved * c - B * (P * c)).cwiseAbs().maxCoeff();
        rep.intertwining_defect = std::max(rep.intertwining_defect, std::max(d1, d2) / scale);
    }

    const SchrodingerOperator op1(model, m, V);
    const PotentialField V2([V, inv](const Point& x) { return V(inv.apply(x)); }, std::nullopt,
                            V.label() + " o " + inv.describe());
    const SchrodingerOperator op2(model, m, V2);
    const Eigen::VectorXd lm = l_multipliers(*model, m);

    std::vector<Point> moved_obs;
    for (const auto& x : set.nodes()) {
        moved_obs.push_back(phi.apply(x));
    }
    const Eigen::MatrixXd B_obs_moved = model->basis_values(moved_obs);
    for (const auto& s : sources.sources) {
        const CauchyRecord r1 = cauchy_record(op1, s, set);
        // (V o Phi^-1, f o Phi^-1) is solved by u o Phi^-1, whose value at Phi(x) is u(x)
        const FieldCoefficients f2(model, Pinv * s.coefficients.coefficients());
        const FieldCoefficients u2 = op2.solve(f2);
        const Eigen::VectorXd u2_at = B_obs_moved * u2.coefficients();
        const Eigen::VectorXd lu2_at = B_obs_moved * lm.cwiseProduct(u2.coefficients());
        rep.transported_deviation = std::max(
            {rep.transported_deviation, (u2_at - r1.u).cwiseAbs().maxCoeff(), (lu2_at - r1.Lu).cwiseAbs().maxCoeff()});

        const CauchyRecord r2 = cauchy_record(op2, s, set);
        rep.direct_deviation =
            std::max({rep.direct_deviation, (r2.u - r1.u).cwiseAbs().maxCoeff(), (r2.Lu - r1.Lu).cwiseAbs().maxCoeff()});
        ++rep.records;
    }
    rep.passed = rep.intertwining_defect <= tolerance && rep.transported_deviation <= tolerance;
    return rep;
}

} // namespace logcal
