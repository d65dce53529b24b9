#ifndef LOGCAL_GELFAND_EXTRACTION_HPP
#define LOGCAL_GELFAND_EXTRACTION_HPP

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "logcal/forward_solver.hpp"
#include "logcal/functional_calculus.hpp"
#include "logcal/observation.hpp"

namespace logcal {

/// h(t_j, x_i) = (e^{-t A} L u)(x_i) on observation nodes; rows are times.
struct HeatTrace {
    int source_id = 0;
    std::vector<double> times;
    std::vector<Point> nodes;
    Eigen::MatrixXd values;   // times x nodes
};

/// J = 4K uniform times with t_max (lambda_1 + m) = 8 and t_min (lambda_{K-1} + m) = 0.2.
std::vector<double> default_time_grid(const SpectralModel& model, Mass m);

HeatTrace heat_trace(const FieldCoefficients& u, Mass m, const ObservationSet& set, std::span<const double> times,
                     int source_id = 0);
HeatTrace heat_trace_of_solution(const SchrodingerOperator& op, const FieldCoefficients& f, const ObservationSet& set,
                                 std::span<const double> times, int source_id = 0);

/// R(z, x) = sum_j (mu_j log mu_j) u_j phi_j(x) / (mu_j + z), mu_j = lambda_j + m.
/// Throws PoleExclusion when z lies within pole_radius * mu of some -mu.
Eigen::VectorXcd laplace_transform(const FieldCoefficients& u, Mass m, std::span<const Point> xs,
                                   std::complex<double> z, double pole_radius = 1e-8);

/// int_0^inf h(t, x) e^{-z t} dt by adaptive quadrature; requires Re z > 0.
Eigen::VectorXcd laplace_transform_integral(const FieldCoefficients& u, Mass m, std::span<const Point> xs,
                                            std::complex<double> z, double tolerance = 1e-12);

/// lim_{z -> -mu_k} (z + mu_k) R(z, x), by Richardson extrapolation along the real axis.
Eigen::VectorXd pole_residue(const FieldCoefficients& u, Mass m, int k, std::span<const Point> xs);

struct ExtractionOptions {
    int max_order = 0;             // exponent budget; 0 = unlimited
    double noise_floor = 1e-10;    // singular values below noise_floor * sigma_max are noise
    double min_gap = 1e3;          // required ratio sigma_r / sigma_{r+1} at the cut
    double cluster_gap = 1e-6;     // relative gap below which exponents merge
};

struct ExponentialFit {
    std::vector<double> exponents;     // ascending
    Eigen::MatrixXd amplitudes;        // exponents x signals
    double residual = 0.0;             // max |fit - data| / max |data|
    std::vector<double> singular_values;
    int rank = 0;
    double gap = 0.0;                  // sigma_{rank-1} / sigma_rank
};

/// Joint exponential-sum fit of the columns of `signals` (times x signals) on a uniform
/// grid: one exponent set, per-column amplitudes.
ExponentialFit extract_exponents(const Eigen::MatrixXd& signals, std::span<const double> times,
                                 const ExtractionOptions& options = {});

enum class GelfandMode { Internal, Blind };

struct GelfandData {
    GelfandMode mode = GelfandMode::Internal;
    double mass = 0.0;
    std::vector<double> eigenvalues;
    std::vector<int> multiplicities;
    std::vector<Point> nodes;                  // observation nodes
    Eigen::VectorXd weights;                   // observation quadrature weights
    std::vector<Eigen::MatrixXd> families;     // d_k x nodes restricted eigenfunction samples
    std::vector<int> source_ids;
    std::string observation;
    double fit_residual = 0.0;
};

struct GelfandOptions {
    GelfandMode mode = GelfandMode::Internal;
    ExtractionOptions extraction;
    double rank_tolerance = 1e-8;     // relative to the largest singular value
};

/// Extracts eigenvalues, multiplicities and orthonormalized restricted eigenfunctions
/// from the heat traces of the solutions to L u + V u = f for the given sources.
GelfandData build_gelfand_data(const SchrodingerOperator& op, const ObservationSet& set,
                               const std::vector<FieldCoefficients>& sources, std::span<const double> times,
                               const GelfandOptions& options = {});
GelfandData build_gelfand_data(const SchrodingerOperator& op, const ObservationSet& set, const SourceBasis& sources,
                               std::span<const double> times, const GelfandOptions& options = {});

/// Exact restricted eigendata of a model on the observation nodes.
GelfandData analytic_gelfand_data(const SpectralModel& model, Mass m, const ObservationSet& set);

/// Principal angles (radians, ascending) between the row spans of a and b under the
/// weighted inner product sum_i w_i a_i b_i.
std::vector<double> principal_angles(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& w);

struct GelfandTolerances {
    double eigenvalue = 1e-6;   // on |lambda1 - lambda2| / max(1, |lambda1|)
    double angle = 1e-5;
};

struct GelfandRow {
    int k = 0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double gap = 0.0;           // |lambda1 - lambda2|
    int d1 = 0;
    int d2 = 0;
    double max_angle = 0.0;
    bool passed = false;
};

struct GelfandComparison {
    std::vector<GelfandRow> rows;
    int first_failure = -1;
    bool passed = false;
};

GelfandComparison compare_gelfand(const GelfandData& a, const GelfandData& b, const GelfandTolerances& tol = {});

struct SpectralEstimateReport {
    double weyl_constant = 0.0;   // N(lambda) <= C lambda^{n/2}
    int weyl_checked = 0;
    int weyl_violations = 0;
    double sup_constant = 0.0;    // max |phi| <= C (lambda + m)^{(n-1)/4}
    int sup_checked = 0;
    int sup_violations = 0;
    bool passed = false;
};

/// Fits the Weyl counting and eigenfunction sup-norm constants over the materialized
/// eigendata and verifies them on the primary and shifted quadrature nodes.
SpectralEstimateReport spectral_estimate_check(const SpectralModel& model, Mass m);

} // namespace logcal

#endif // LOGCAL_GELFAND_EXTRACTION_HPP
