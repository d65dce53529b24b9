#ifndef LOGCAL_UCP_RECOVERY_HPP
#define LOGCAL_UCP_RECOVERY_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "logcal/forward_solver.hpp"
#include "logcal/functional_calculus.hpp"
#include "logcal/observation.hpp"

namespace logcal {

// ---------------------------------------------------------------------------
// Finite-rank unique continuation

struct UcpOptions {
    int node_multiplier = 2;          // interior samples = multiplier x dim of the truncated space
    double null_threshold = 1e-9;     // relative to the largest singular value
    std::vector<Point> samples;       // explicit sample points (override the interior layout)
};

struct UcpReport {
    int truncation = 0;
    std::string observation;
    int space_dimension = 0;
    int samples = 0;
    int null_dimension = 0;
    double sigma_min = 0.0;           // Cauchy pair constraint, unit-norm columns
    double sigma_max = 0.0;
    double solution_only_sigma_min = 0.0;   // v|_O constraint alone, unit-norm columns
    double solution_only_sigma_max = 0.0;
    bool passed = false;
};

/// Numerical null space of v -> (v(x_i), (L v)(x_i)) on the K-truncated space, with
/// x_i interior sample points of the observation set.
UcpReport ucp_nullspace_test(const SpectralModel& model, Mass m, const ObservationSet& set,
                             const UcpOptions& options = {});

// ---------------------------------------------------------------------------
// Moments

struct MomentReport {
    std::vector<double> moments;       // int s^k phi(s) ds over the sampled range, k = 0..K
    std::vector<double> tail_bounds;   // bound on int_S^inf s^k |phi| from the fitted decay
    double decay_rate = 0.0;           // c in |phi(s)| <= C e^{-c s}
    double decay_constant = 0.0;       // C
};

/// Composite Simpson moments on a uniform grid starting at s_0 >= 0.
MomentReport moment_vector(std::span<const double> s, std::span<const double> phi, int k_max);

struct MomentCompleteness {
    double max_moment = 0.0;
    double max_amplitude = 0.0;
    bool moments_vanish = false;
    bool amplitudes_vanish = false;
    bool consistent = false;           // vanishing moments imply vanishing amplitudes
};

/// Checks that when the first 2K moments vanish the exponential-sum fit of phi has no
/// amplitude above the noise floor.
MomentCompleteness moment_completeness(std::span<const double> s, std::span<const double> phi, int K,
                                       double tolerance = 1e-10);

// ---------------------------------------------------------------------------
// Pairings

struct PairingResult {
    int candidate = 0;
    int l = 0;          // 1-based index inside the eigenspace
    double value = 0.0;
};

/// First candidate source whose solution pairs nontrivially with some phi_{k,l}.
PairingResult nonvanishing_pairing_search(const SchrodingerOperator& op, int k,
                                          const std::vector<FieldCoefficients>& candidates,
                                          double threshold = 1e-10);

// ---------------------------------------------------------------------------
// Potential recovery

/// A forward solution on the whole manifold together with its source.
struct SolutionSample {
    int source_id = 0;
    FieldCoefficients u;
    FieldCoefficients f;
};

std::vector<SolutionSample> forward_solutions(const SchrodingerOperator& op, const SourceBasis& sources);

struct RecoveryOptions {
    double mask_fraction = 1e-6;              // |u(x)| must exceed this times ||u||_inf
    double disagreement_tolerance = 1e-2;     // relative weighted spread of candidates
    bool require_full_coverage = true;
};

struct RecoveredPotential {
    std::vector<Point> nodes;                  // model quadrature nodes
    Eigen::VectorXd values;                    // NaN where masked
    std::vector<bool> covered;
    std::vector<bool> observed;                // node lies in the observation set
    std::vector<int> contributing;             // admissible sources per node
    double max_disagreement = 0.0;
    int masked = 0;
};

/// V(x) = ((P_K f)(x) - (L u)(x)) / u(x) off the observation set, aggregated over the
/// sources by the |u|-weighted median; copies the known values on the set.
RecoveredPotential recover_potential(const SpectralModel& model, Mass m, const ObservationSet& set,
                                     const Eigen::VectorXd& v_known_on_set,
                                     const std::vector<SolutionSample>& solutions,
                                     const RecoveryOptions& options = {});

/// max |V_hat - V| / max |V| over covered complement nodes.
double recovery_error(const RecoveredPotential& rec, const PotentialField& truth);

// ---------------------------------------------------------------------------
// Heat kernels

struct HeatKernelComparison {
    double max_deviation = 0.0;
    double worst_time = 0.0;
    int checked = 0;
    bool passed = false;
};

HeatKernelComparison heat_kernel_equality_check(const SpectralModel& a, const SpectralModel& b, Mass m,
                                                const ObservationSet& set_a, const ObservationSet& set_b,
                                                std::span<const double> times, double tolerance);

// ---------------------------------------------------------------------------
// Isometries

class Isometry {
public:
    enum class Type { Identity, Rotation, Reflection, Translation };

    static Isometry identity(ManifoldKind kind);
    static Isometry circle_rotation(double alpha);
    /// theta -> 2 beta - theta
    static Isometry circle_reflection(double beta);
    /// longitude -> longitude + alpha
    static Isometry sphere_rotation(double alpha);
    /// longitude -> 2 beta - longitude
    static Isometry sphere_reflection(double beta);
    static Isometry torus_translation(std::vector<double> shift);

    ManifoldKind kind() const noexcept { return kind_; }
    Type type() const noexcept { return type_; }
    std::string describe() const;

    Point apply(const Point& x) const;
    Isometry inverse() const;
    /// Matrix P with coefficients(u o Phi) = P coefficients(u).
    Eigen::MatrixXd pullback(const SpectralModel& model) const;

private:
    Isometry(ManifoldKind kind, Type type, std::vector<double> params);

    ManifoldKind kind_;
    Type type_;
    std::vector<double> params_;
};

struct GaugeReport {
    double intertwining_defect = 0.0;    // |P(A u) - A(P u)| and |u(Phi x) - (P u)(x)| on nodes
    double transported_deviation = 0.0;  // records of (V o Phi^-1, f o Phi^-1) at Phi(x) vs (V, f) at x
    double direct_deviation = 0.0;      // records of (V o Phi^-1, f) vs (V, f) on the same nodes
    int records = 0;
    bool passed = false;
};

/// Requires Phi to map the observation set onto itself.
GaugeReport isometry_gauge_check(const ModelPtr& model, Mass m, const PotentialField& V, const ObservationSet& set,
                                 const Isometry& phi, const SourceBasis& sources, double tolerance = 1e-10);

} // namespace logcal

#endif // LOGCAL_UCP_RECOVERY_HPP
