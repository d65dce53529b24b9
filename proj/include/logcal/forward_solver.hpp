#ifndef LOGCAL_FORWARD_SOLVER_HPP
#define LOGCAL_FORWARD_SOLVER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "logcal/functional_calculus.hpp"
#include "logcal/manifold_spectrum.hpp"
#include "logcal/observation.hpp"

namespace logcal {

/// Closed-form potentials addressable from a configuration file.
///
///   zero      V = 0
///   constant  V = amplitude
///   cosine    V = amplitude cos(frequency x_axis + phase)   (circle, torus; longitude on the sphere)
///   zonal     V = amplitude P_frequency(cos colatitude)     (sphere only)
///   bump      V = amplitude e exp(-1/(1 - s^2)), s = d(x, center) / radius
struct PotentialSpec {
    std::string expression = "zero";
    double amplitude = 0.0;
    int frequency = 1;
    int axis = 0;
    double phase = 0.0;
    Point center;
    double radius = 0.0;
    /// Declared support; nullopt means global.
    std::optional<ObservationDescriptor> support;
};

class PotentialField {
public:
    using Evaluator = std::function<double(const Point&)>;

    PotentialField(Evaluator evaluator, std::optional<ObservationDescriptor> support, std::string label);

    static PotentialField zero();
    static PotentialField constant(double c);
    static PotentialField from_spec(const PotentialSpec& spec, ManifoldKind kind);

    double operator()(const Point& x) const { return eval_(x); }
    Eigen::VectorXd at(std::span<const Point> xs) const;
    Eigen::VectorXd at_nodes(const SpectralModel& model) const;
    Eigen::VectorXd restriction(const ObservationSet& set) const;

    const std::optional<ObservationDescriptor>& support() const noexcept { return support_; }
    const std::string& label() const noexcept { return label_; }
    bool identically_zero() const noexcept { return zero_; }

    /// Throws InvalidArgument if a declared support is violated at some model node.
    void verify_support(const SpectralModel& model) const;

private:
    Evaluator eval_;
    std::optional<ObservationDescriptor> support_;
    std::string label_;
    bool zero_ = false;
};

/// exp(-1/(1-s^2)) scaled to peak 1, zero for |s| >= 1.
double bump_profile(double s);

/// Smooth bump supported in a ball inside an observation set.
struct SourceFunction {
    int id = 0;
    Point center;
    double radius = 0.0;
    ObservationDescriptor support;
    Eigen::VectorXd node_values;        // on the model quadrature
    FieldCoefficients coefficients;     // quadrature projection onto the truncated basis
    double projection_defect = 0.0;     // max node |f - P_K f|

    double operator()(const Point& x, ManifoldKind kind) const;
};

struct SourceShape {
    double radius_fraction = 0.999;   // of the spacing-limited radius
    double jitter = 0.0;              // relative random displacement of centers, in [0, 0.5)
    std::uint64_t seed = 0;
    std::vector<Point> centers;       // explicit centers (override the layout)
    double radius = 0.0;              // explicit radius, used with explicit centers
};

struct SourceBasis {
    std::vector<SourceFunction> sources;
    double gram_condition = 0.0;      // L2 Gram matrix condition number of the node profiles
};

SourceBasis make_source_basis(const ModelPtr& model, const ObservationSet& set, int count,
                              const SourceShape& shape = {});

struct AssemblyOptions {
    double aliasing_tolerance = 1e-8;   // relative to max |V| on the nodes
};

/// Dense Galerkin matrix <V phi_i, phi_j> by quadrature, with an aliasing check against
/// the half-cell shifted rule.
Eigen::MatrixXd assemble_potential_matrix(const SpectralModel& model, const PotentialField& V,
                                          const AssemblyOptions& options = {});

struct SolverOptions {
    double singular_threshold = 1e-10;    // relative to the largest multiplier
    double condition_limit = 1e12;
    double residual_tolerance = 1e-10;
    AssemblyOptions assembly;
};

///
/// Lambda_L + M_V on the truncated basis, with its eigendecomposition cached.
///
class SchrodingerOperator {
public:
    SchrodingerOperator(ModelPtr model, Mass m, const PotentialField& V, const SolverOptions& options = {});

    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    /// Ascending eigenvalues.
    const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
    double min_abs_eigenvalue() const noexcept { return min_abs_; }
    double condition_number() const noexcept { return condition_; }
    bool invertible() const noexcept { return invertible_; }
    const SpectralModel& model() const noexcept { return *model_; }
    const ModelPtr& model_ptr() const noexcept { return model_; }
    Mass mass() const noexcept { return m_; }
    const PotentialField& potential() const noexcept { return V_; }

    /// Coefficients u with (Lambda_L + M_V) u = f.
    FieldCoefficients solve(const FieldCoefficients& f) const;
    double residual(const FieldCoefficients& u, const FieldCoefficients& f) const;

private:
    ModelPtr model_;
    Mass m_;
    PotentialField V_;
    SolverOptions options_;
    Eigen::MatrixXd matrix_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
    double min_abs_ = 0.0;
    double condition_ = 0.0;
    double scale_ = 1.0;
    bool invertible_ = false;
};

FieldCoefficients solve_schrodinger(const ModelPtr& model, Mass m, const PotentialField& V,
                                    const FieldCoefficients& f, const SolverOptions& options = {});

std::vector<double> operator_spectrum(const ModelPtr& model, Mass m, const PotentialField& V,
                                      const SolverOptions& options = {});

struct CauchyRecord {
    int source_id = 0;
    std::vector<Point> nodes;     // observation nodes
    Eigen::VectorXd u;            // u on the nodes
    Eigen::VectorXd Lu;           // L_g u on the nodes
    int truncation = 0;
    double mass = 0.0;
};

CauchyRecord cauchy_record(const SchrodingerOperator& op, const SourceFunction& f, const ObservationSet& set);

/// Max |L u + V u - P_K f| over the observation nodes.
double cauchy_equation_defect(const SchrodingerOperator& op, const SourceFunction& f, const ObservationSet& set);

} // namespace logcal

#endif // LOGCAL_FORWARD_SOLVER_HPP
