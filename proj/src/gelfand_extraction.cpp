#include "logcal/gelfand_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "logcal/error.hpp"
#include "logcal/parallel.hpp"

namespace logcal {

std::vector<double> default_time_grid(const SpectralModel& model, Mass m)
{
    const int K = model.truncation();
    const int J = 4 * K;
    const double t_max = 8.0 / (model.eigenvalue(1) + m.value());
    const double t_min = 0.2 / (model.eigenvalue(K - 1) + m.value());
    std::vector<double> t(J);
    for (int j = 0; j < J; ++j) {
        t[j] = t_min + (t_max - t_min) * j / (J - 1);
    }
    return t;
}

HeatTrace heat_trace(const FieldCoefficients& u, Mass m, const ObservationSet& set, std::span<const double> times,
                     int source_id)
{
    for (double t : times) {
        if (!(t > 0.0)) {
            throw Error(ErrorKind::NegativeTime, "heat trace times must be positive");
        }
    }
    const auto& model = u.model();
    const Eigen::VectorXd mu = a_multipliers(model, m);
    const Eigen::VectorXd lu = l_multipliers(model, m).cwiseProduct(u.coefficients());
    const auto J = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd E(J, mu.size());
    for (Eigen::Index j = 0; j < J; ++j) {
        E.row(j) = ((-times[j] * mu.array()).exp() * lu.array()).matrix().transpose();
    }
    HeatTrace h;
    h.source_id = source_id;
    h.times.assign(times.begin(), times.end());
    h.nodes.assign(set.nodes().begin(), set.nodes().end());
    h.values = E * set.restrict_rows(model.basis_at_nodes()).transpose();
    return h;
}

HeatTrace heat_trace_of_solution(const SchrodingerOperator& op, const FieldCoefficients& f, const ObservationSet& set,
                                 std::span<const double> times, int source_id)
{
    return heat_trace(op.solve(f), op.mass(), set, times, source_id);
}

// ---------------------------------------------------------------------------
// Laplace transform

Eigen::VectorXcd laplace_transform(const FieldCoefficients& u, Mass m, std::span<const Point> xs,
                                   std::complex<double> z, double pole_radius)
{
    const auto& model = u.model();
    const Eigen::VectorXd mu = a_multipliers(model, m);
    for (int k = 0; k < model.truncation(); ++k) {
        const double mk = model.eigenvalue(k) + m.value();
        if (std::abs(z + mk) < pole_radius * mk) {
            throw Error(ErrorKind::PoleExclusion,
                        fmt::format("z = {}{:+}i lies within the exclusion radius of the pole -{}", z.real(),
                                    z.imag(), mk));
        }
    }
    const Eigen::VectorXd lu = l_multipliers(model, m).cwiseProduct(u.coefficients());
    Eigen::VectorXcd w(mu.size());
    for (Eigen::Index j = 0; j < mu.size(); ++j) {
        w[j] = lu[j] / (mu[j] + z);
    }
    return model.basis_values(xs).cast<std::complex<double>>() * w;
}

Eigen::VectorXcd laplace_transform_integral(const FieldCoefficients& u, Mass m, std::span<const Point> xs,
                                            std::complex<double> z, double tolerance)
{
    if (!(z.real() > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "the integral form needs Re z > 0");
    }
    using boost::math::quadrature::gauss_kronrod;
    const auto& model = u.model();
    const Eigen::VectorXd mu = a_multipliers(model, m);
    const Eigen::VectorXd lu = l_multipliers(model, m).cwiseProduct(u.coefficients());
    const Eigen::MatrixXd B = model.basis_values(xs);
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd out(static_cast<Eigen::Index>(xs.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const Eigen::VectorXd a = lu.cwiseProduct(B.row(i).transpose());
        auto h = [&](double t) { return (a.array() * (-t * mu.array()).exp()).sum(); };
        const double re = gauss_kronrod<double, 61>::integrate(
            [&](double t) { return h(t) * std::exp(-z.real() * t) * std::cos(z.imag() * t); }, 0.0, inf, 20,
            tolerance);
        const double im = gauss_kronrod<double, 61>::integrate(
            [&](double t) { return -h(t) * std::exp(-z.real() * t) * std::sin(z.imag() * t); }, 0.0, inf, 20,
            tolerance);
        out[i] = {re, im};
    }
    return out;
}

Eigen::VectorXd pole_residue(const FieldCoefficients& u, Mass m, int k, std::span<const Point> xs)
{
    const auto& model = u.model();
    const double mk = model.eigenvalue(k) + m.value();
    double gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < model.truncation(); ++j) {
        if (j != k) {
            gap = std::min(gap, std::fabs(model.eigenvalue(j) + m.value() - mk));
        }
    }
    const double eps = 1e-3 * std::min(gap, mk);
    auto g = [&](double e) {
        return Eigen::VectorXd((e * laplace_transform(u, m, xs, {-mk + e, 0.0})).real());
    };
    return 2.0 * g(0.5 * eps) - g(eps);
}

// ---------------------------------------------------------------------------
// Exponential fitting

namespace {

double uniform_step(std::span<const double> times)
{
    if (times.size() < 2) {
        throw Error(ErrorKind::GridTooCoarse, "exponent extraction needs at least two times");
    }
    const double h = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(h > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "time grid must be increasing");
    }
    for (std::size_t j = 1; j < times.size(); ++j) {
        if (std::fabs(times[j] - times[j - 1] - h) > 1e-9 * h) {
            throw Error(ErrorKind::InvalidArgument, "exponent extraction needs a uniform time grid");
        }
    }
    return h;
}

Eigen::MatrixXd fit_amplitudes(const std::vector<double>& exponents, const Eigen::MatrixXd& signals,
                               std::span<const double> times)
{
    const auto J = static_cast<Eigen::Index>(times.size());
    const auto r = static_cast<Eigen::Index>(exponents.size());
    Eigen::MatrixXd V(J, r);
    for (Eigen::Index j = 0; j < J; ++j) {
        for (Eigen::Index i = 0; i < r; ++i) {
            V(j, i) = std::exp(-exponents[i] * times[j]);
        }
    }
    return V.colPivHouseholderQr().solve(signals).eval();
}

double fit_residual(const std::vector<double>& exponents, const Eigen::MatrixXd& amplitudes,
                    const Eigen::MatrixXd& signals, std::span<const double> times)
{
    const double scale = signals.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        return 0.0;
    }
    Eigen::MatrixXd fit = Eigen::MatrixXd::Zero(signals.rows(), signals.cols());
    for (Eigen::Index j = 0; j < signals.rows(); ++j) {
        for (std::size_t i = 0; i < exponents.size(); ++i) {
            fit.row(j) += std::exp(-exponents[i] * times[j]) * amplitudes.row(static_cast<Eigen::Index>(i));
        }
    }
    return (fit - signals).cwiseAbs().maxCoeff() / scale;
}

} // namespace

ExponentialFit extract_exponents(const Eigen::MatrixXd& signals, std::span<const double> times,
                                 const ExtractionOptions& options)
{
    const auto J = static_cast<Eigen::Index>(times.size());
    if (signals.rows() != J) {
        throw Error(ErrorKind::LengthMismatch, "signal rows must match the time grid");
    }
    const double h = uniform_step(times);
    if (J < 4) {
        throw Error(ErrorKind::GridTooCoarse, "exponent extraction needs at least four samples");
    }

    // horizontally stacked Hankel matrices share the column space spanned by the exponentials
    const Eigen::Index L = J / 2;
    const Eigen::Index W = J - L + 1;
    const Eigen::Index S = signals.cols();
    Eigen::MatrixXd H(L, S * W);
    for (Eigen::Index s = 0; s < S; ++s) {
        for (Eigen::Index c = 0; c < W; ++c) {
            H.col(s * W + c) = signals.col(s).segment(c, L);
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU);
    const Eigen::VectorXd& sigma = svd.singularValues();

    ExponentialFit fit;
    fit.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
    if (sigma.size() == 0 || sigma[0] == 0.0) {
        fit.amplitudes.resize(0, S);
        return fit;
    }
    int r = 0;
    while (r < sigma.size() && sigma[r] > options.noise_floor * sigma[0]) {
        ++r;
    }
    if (r >= L) {
        throw Error(ErrorKind::GridTooCoarse,
                    fmt::format("{} samples cannot separate {} or more exponents; refine the time grid", J, r));
    }
    fit.gap = sigma[r] > 0.0 ? sigma[r - 1] / sigma[r] : std::numeric_limits<double>::infinity();
    if (fit.gap < options.min_gap) {
        throw Error(ErrorKind::RankAmbiguous,
                    fmt::format("singular value gap {:.3e} at rank {} is below {:.3e}", fit.gap, r, options.min_gap));
    }
    if (options.max_order > 0 && r > options.max_order) {
        throw Error(ErrorKind::RankAmbiguous,
                    fmt::format("{} exponents above the noise floor exceed the budget {}", r, options.max_order));
    }
    fit.rank = r;

    const Eigen::MatrixXd U = svd.matrixU().leftCols(r);
    const Eigen::MatrixXd Phi = U.topRows(L - 1).colPivHouseholderQr().solve(U.bottomRows(L - 1));
    Eigen::EigenSolver<Eigen::MatrixXd> es(Phi, false);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorKind::EigensolverFailure, "shift-invariance eigenproblem failed");
    }
    std::vector<double> mu;
    for (Eigen::Index i = 0; i < r; ++i) {
        const std::complex<double> z = es.eigenvalues()[i];
        if (std::fabs(z.imag()) > 1e-8 * std::abs(z) || !(z.real() > 0.0)) {
            throw Error(ErrorKind::RankAmbiguous,
                        fmt::format("pole {}{:+}i is not a decaying real exponential", z.real(), z.imag()));
        }
        mu.push_back(-std::log(z.real()) / h);
    }
    std::sort(mu.begin(), mu.end());

    std::vector<double> merged;
    for (std::size_t i = 0; i < mu.size();) {
        std::size_t j = i + 1;
        double sum = mu[i];
        while (j < mu.size() && mu[j] - mu[j - 1] <= options.cluster_gap * std::max(1.0, std::fabs(mu[j]))) {
            sum += mu[j++];
        }
        merged.push_back(sum / static_cast<double>(j - i));
        i = j;
    }
    fit.exponents = std::move(merged);
    fit.amplitudes = fit_amplitudes(fit.exponents, signals, times);
    fit.residual = fit_residual(fit.exponents, fit.amplitudes, signals, times);
    return fit;
}

// ---------------------------------------------------------------------------
// Gel'fand data

namespace {

int numerical_rank(const Eigen::MatrixXd& a, double tol)
{
    if (a.size() == 0) {
        return 0;
    }
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
    if (s.size() == 0 || s[0] == 0.0) {
        return 0;
    }
    int r = 0;
    while (r < s.size() && s[r] > tol * s[0]) {
        ++r;
    }
    return r;
}

// Gram-Schmidt over the columns of `vectors` in order, keeping at most `rank` of them.
// Returns T (kept x columns) with vectors * T^T orthonormal.
Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& vectors, int rank)
{
    const Eigen::Index n = vectors.cols();
    std::vector<Eigen::VectorXd> q;
    std::vector<Eigen::VectorXd> t;
    for (Eigen::Index s = 0; s < n && static_cast<int>(q.size()) < rank; ++s) {
        Eigen::VectorXd r = vectors.col(s);
        Eigen::VectorXd tr = Eigen::VectorXd::Unit(n, s);
        const double norm0 = r.norm();
        if (norm0 == 0.0) {
            continue;
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < q.size(); ++j) {
                const double p = q[j].dot(r);
                r -= p * q[j];
                tr -= p * t[j];
            }
        }
        const double nr = r.norm();
        if (nr > 1e-6 * norm0) {
            q.push_back(r / nr);
            t.push_back(tr / nr);
        }
    }
    Eigen::MatrixXd T(static_cast<Eigen::Index>(t.size()), n);
    for (std::size_t j = 0; j < t.size(); ++j) {
        T.row(static_cast<Eigen::Index>(j)) = t[j].transpose();
    }
    return T;
}

int match_eigenvalue(const SpectralModel& model, double lambda)
{
    for (int k = 0; k < model.truncation(); ++k) {
        if (std::fabs(model.eigenvalue(k) - lambda) <= 1e-4 * std::max(1.0, model.eigenvalue(k))) {
            return k;
        }
    }
    return -1;
}

} // namespace

GelfandData build_gelfand_data(const SchrodingerOperator& op, const ObservationSet& set,
                               const std::vector<FieldCoefficients>& sources, std::span<const double> times,
                               const GelfandOptions& options)
{
    if (sources.empty()) {
        throw Error(ErrorKind::InvalidArgument, "Gel'fand extraction needs at least one source");
    }
    const auto& model = op.model();
    const Mass m = op.mass();
    const auto N = static_cast<Eigen::Index>(set.size());
    const auto S = static_cast<Eigen::Index>(sources.size());

    std::vector<HeatTrace> traces(sources.size());
    parallel_for(sources.size(), [&](std::size_t s) {
        traces[s] = heat_trace_of_solution(op, sources[s], set, times, static_cast<int>(s));
    });
    Eigen::MatrixXd stacked(static_cast<Eigen::Index>(times.size()), S * N);
    for (Eigen::Index s = 0; s < S; ++s) {
        stacked.middleCols(s * N, N) = traces[s].values;
    }

    const ExponentialFit fit = extract_exponents(stacked, times, options.extraction);

    GelfandData out;
    out.mode = options.mode;
    out.mass = m.value();
    out.nodes.assign(set.nodes().begin(), set.nodes().end());
    out.weights = set.weights();
    out.observation = describe(set.descriptor());
    out.fit_residual = fit.residual;
    for (Eigen::Index s = 0; s < S; ++s) {
        out.source_ids.push_back(static_cast<int>(s));
    }

    const Eigen::MatrixXd B_O = set.restrict_rows(model.basis_at_nodes());
    std::vector<bool> seen(static_cast<std::size_t>(model.truncation()), false);
    for (std::size_t i = 0; i < fit.exponents.size(); ++i) {
        const double mu = fit.exponents[i];
        const double lambda = mu - m.value();
        // residues / ((lambda+m) log(lambda+m)) are the restricted projections (pi_k u_s)|_O
        Eigen::MatrixXd R(S, N);
        for (Eigen::Index s = 0; s < S; ++s) {
            R.row(s) = fit.amplitudes.row(static_cast<Eigen::Index>(i)).segment(s * N, N) / (mu * std::log(mu));
        }
        const int rank = numerical_rank(R, options.rank_tolerance);
        if (rank == 0) {
            continue;
        }

        Eigen::MatrixXd T;
        if (options.mode == GelfandMode::Internal) {
            const int k = match_eigenvalue(model, lambda);
            if (k < 0) {
                throw Error(ErrorKind::InvalidArgument,
                            fmt::format("recovered eigenvalue {:.10g} is not in the model spectrum", lambda));
            }
            seen[static_cast<std::size_t>(k)] = true;
            const int d = model.multiplicity(k);
            if (rank < d) {
                throw Error(ErrorKind::UnderExcitedEigenspace,
                            fmt::format("eigenvalue {:.10g} has multiplicity {} but the sources span only {}; add "
                                        "sources",
                                        model.eigenvalue(k), d, rank));
            }
            // lift onto the eigenspace for the ambient inner product
            const Eigen::MatrixXd Bk = B_O.middleCols(model.block_offset(k), d);
            const Eigen::MatrixXd C = Bk.colPivHouseholderQr().solve(R.transpose());
            T = gram_schmidt(C, d);
        } else {
            const Eigen::VectorXd sw = set.weights().cwiseSqrt();
            const Eigen::MatrixXd vecs = sw.asDiagonal() * R.transpose();
            T = gram_schmidt(vecs, rank);
        }
        out.eigenvalues.push_back(lambda);
        out.multiplicities.push_back(static_cast<int>(T.rows()));
        out.families.push_back(T * R);
    }

    if (options.mode == GelfandMode::Internal) {
        for (int k = 0; k < model.truncation(); ++k) {
            if (!seen[static_cast<std::size_t>(k)]) {
                throw Error(ErrorKind::UnderExcitedEigenspace,
                            fmt::format("eigenvalue {:.10g} is not excited by any source", model.eigenvalue(k)));
            }
        }
    }
    return out;
}

GelfandData build_gelfand_data(const SchrodingerOperator& op, const ObservationSet& set, const SourceBasis& sources,
                               std::span<const double> times, const GelfandOptions& options)
{
    std::vector<FieldCoefficients> fs;
    for (const auto& s : sources.sources) {
        fs.push_back(s.coefficients);
    }
    GelfandData out = build_gelfand_data(op, set, fs, times, options);
    out.source_ids.clear();
    for (const auto& s : sources.sources) {
        out.source_ids.push_back(s.id);
    }
    return out;
}

GelfandData analytic_gelfand_data(const SpectralModel& model, Mass m, const ObservationSet& set)
{
    GelfandData out;
    out.mode = GelfandMode::Internal;
    out.mass = m.value();
    out.nodes.assign(set.nodes().begin(), set.nodes().end());
    out.weights = set.weights();
    out.observation = describe(set.descriptor());
    const Eigen::MatrixXd B_O = set.restrict_rows(model.basis_at_nodes());
    for (int k = 0; k < model.truncation(); ++k) {
        out.eigenvalues.push_back(model.eigenvalue(k));
        out.multiplicities.push_back(model.multiplicity(k));
        out.families.push_back(B_O.middleCols(model.block_offset(k), model.multiplicity(k)).transpose());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Comparison

namespace {

Eigen::MatrixXd weighted_orthobasis(const Eigen::MatrixXd& rows, const Eigen::VectorXd& w)
{
    const Eigen::MatrixXd a = w.cwiseSqrt().asDiagonal() * rows.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
    const int r = std::max(1, numerical_rank(a, 1e-12));
    return svd.matrixU().leftCols(std::min<Eigen::Index>(r, svd.matrixU().cols()));
}

} // namespace

std::vector<double> principal_angles(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& w)
{
    if (a.cols() != b.cols() || a.cols() != w.size()) {
        throw Error(ErrorKind::LengthMismatch, "principal angles need families on the same nodes");
    }
    if (a.rows() == 0 || b.rows() == 0) {
        return {};
    }
    Eigen::MatrixXd qa = weighted_orthobasis(a, w);
    Eigen::MatrixXd qb = weighted_orthobasis(b, w);
    if (qa.cols() > qb.cols()) {
        std::swap(qa, qb);
    }
    // sines from the component of span(a) outside span(b)
    const Eigen::MatrixXd resid = qa - qb * (qb.transpose() * qa);
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(resid).singularValues();
    std::vector<double> out;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        out.push_back(std::asin(std::min(1.0, s[i])));
    }
    std::sort(out.begin(), out.end());
    return out;
}

GelfandComparison compare_gelfand(const GelfandData& a, const GelfandData& b, const GelfandTolerances& tol)
{
    if (a.nodes.size() != b.nodes.size()) {
        throw Error(ErrorKind::IncompatibleGrids,
                    fmt::format("node counts differ ({} vs {})", a.nodes.size(), b.nodes.size()));
    }
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        const auto ca = a.nodes[i].coords();
        const auto cb = b.nodes[i].coords();
        bool same = ca.size() == cb.size();
        for (std::size_t c = 0; same && c < ca.size(); ++c) {
            same = std::fabs(ca[c] - cb[c]) <= 1e-12;
        }
        if (!same) {
            throw Error(ErrorKind::IncompatibleGrids, fmt::format("observation node {} differs", i));
        }
    }
    GelfandComparison out;
    const std::size_t n = std::max(a.eigenvalues.size(), b.eigenvalues.size());
    for (std::size_t k = 0; k < n; ++k) {
        GelfandRow row;
        row.k = static_cast<int>(k);
        if (k >= a.eigenvalues.size() || k >= b.eigenvalues.size()) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.lambda1 = k < a.eigenvalues.size() ? a.eigenvalues[k] : nan;
            row.lambda2 = k < b.eigenvalues.size() ? b.eigenvalues[k] : nan;
            row.gap = nan;
            row.d1 = k < a.multiplicities.size() ? a.multiplicities[k] : 0;
            row.d2 = k < b.multiplicities.size() ? b.multiplicities[k] : 0;
            row.max_angle = nan;
            row.passed = false;
        } else {
            row.lambda1 = a.eigenvalues[k];
            row.lambda2 = b.eigenvalues[k];
            row.gap = std::fabs(row.lambda1 - row.lambda2);
            row.d1 = a.multiplicities[k];
            row.d2 = b.multiplicities[k];
            const auto angles = principal_angles(a.families[k], b.families[k], a.weights);
            row.max_angle = angles.empty() ? 0.0 : angles.back();
            row.passed = row.gap <= tol.eigenvalue * std::max(1.0, std::fabs(row.lambda1)) && row.d1 == row.d2 &&
                         row.max_angle <= tol.angle;
        }
        if (!row.passed && out.first_failure < 0) {
            out.first_failure = row.k;
        }
        out.rows.push_back(row);
    }
    out.passed = out.first_failure < 0;
    return out;
}

// ---------------------------------------------------------------------------
// Weyl and sup-norm sanity

SpectralEstimateReport spectral_estimate_check(const SpectralModel& model, Mass m)
{
    SpectralEstimateReport rep;
    const double half_n = 0.5 * model.dimension();
    const auto lam = model.eigenvalues();
    const auto mult = model.multiplicities();

    std::vector<std::pair<double, double>> counts;   // (lambda, N(lambda)) with lambda > 0
    double N = mult[0];
    for (std::size_t k = 1; k < lam.size(); ++k) {
        N += mult[k];
        counts.emplace_back(lam[k], N);
        rep.weyl_constant = std::max(rep.weyl_constant, N / std::pow(lam[k], half_n));
    }
    // N is constant on [lambda_k, lambda_{k+1}); check both ends of each step
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double right = i + 1 < counts.size() ? counts[i + 1].first * (1.0 - 1e-12) : counts[i].first * 2.0;
        for (double l : {counts[i].first, right}) {
            ++rep.weyl_checked;
            if (counts[i].second > rep.weyl_constant * std::pow(l, half_n) * (1.0 + 1e-12)) {
                ++rep.weyl_violations;
            }
        }
    }

    const double q = 0.25 * (model.dimension() - 1);
    const Eigen::VectorXd& bl = model.basis_eigenvalues();
    const Eigen::VectorXd sup_primary = model.basis_at_nodes().cwiseAbs().colwise().maxCoeff().transpose();
    const Eigen::MatrixXd Bs = model.basis_values(model.shifted_quadrature().nodes);
    const Eigen::VectorXd sup_shifted = Bs.cwiseAbs().colwise().maxCoeff().transpose();
    for (Eigen::Index j = 0; j < bl.size(); ++j) {
        rep.sup_constant = std::max(rep.sup_constant, sup_primary[j] / std::pow(bl[j] + m.value(), q));
    }
    for (Eigen::Index j = 0; j < bl.size(); ++j) {
        for (double s : {sup_primary[j], sup_shifted[j]}) {
            ++rep.sup_checked;
            if (s > rep.sup_constant * std::pow(bl[j] + m.value(), q) * (1.0 + 1e-12)) {
                ++rep.sup_violations;
            }
        }
    }
    rep.passed = rep.weyl_violations == 0 && rep.sup_violations == 0 && std::isfinite(rep.weyl_constant) &&
                 std::isfinite(rep.sup_constant);
    return rep;
}

} // namespace logcal
