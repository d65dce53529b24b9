#ifndef LOGCAL_MANIFOLD_SPECTRUM_HPP
#define LOGCAL_MANIFOLD_SPECTRUM_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace logcal {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

///
/// Chart coordinates of a point, in radians.
///
///   circle : (theta)                     theta in [0, 2 pi)
///   torus  : (theta_1, ..., theta_n)     each in [0, 2 pi); physical x_i = theta_i L_i / (2 pi)
///   sphere : (colatitude, longitude)     colatitude in [0, pi], longitude in [0, 2 pi)
///
class Point {
public:
    static constexpr std::size_t max_dim = 4;

    Point() = default;
    Point(std::initializer_list<double> coords);
    explicit Point(std::span<const double> coords);

    std::size_t size() const noexcept { return size_; }
    double operator[](std::size_t i) const noexcept { return coords_[i]; }
    double& operator[](std::size_t i) noexcept { return coords_[i]; }
    std::span<const double> coords() const noexcept { return {coords_.data(), size_}; }

    friend bool operator==(const Point& a, const Point& b) noexcept;

private:
    std::array<double, max_dim> coords_{};
    std::size_t size_ = 0;
};

enum class ManifoldKind { Circle, FlatTorus, Sphere2 };

std::string to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(const std::string& name);

struct ModelDescriptor {
    ManifoldKind kind = ManifoldKind::Circle;
    double radius = 1.0;          // circle and sphere
    std::vector<double> edges;    // flat torus edge lengths; size() is the dimension
    int truncation = 2;           // K, number of distinct eigenvalues materialized
    int resolution = 0;           // quadrature nodes per axis (sphere: colatitude nodes); 0 = automatic

    static ModelDescriptor circle(double radius, int truncation, int resolution = 0);
    static ModelDescriptor torus(std::vector<double> edges, int truncation, int resolution = 0);
    static ModelDescriptor sphere(double radius, int truncation, int resolution = 0);
};

/// Distinct eigenvalues of -Delta (ascending) with their multiplicities.
struct EigenCatalog {
    std::vector<double> eigenvalues;
    std::vector<int> multiplicities;
};

/// Closed-form eigendata of the first `count` distinct eigenvalues; no basis is built.
EigenCatalog catalog_spectrum(const ModelDescriptor& desc, int count);

enum class TrigPart : std::uint8_t { Constant, Cos, Sin };

/// Identifies one real orthonormal eigenfunction phi_{k,l}.
struct BasisLabel {
    int block = 0;                      // k
    TrigPart part = TrigPart::Constant;
    std::array<int, Point::max_dim> lattice{};  // circle: frequency; torus: lattice vector
    int degree = 0;                     // sphere: l
    int order = 0;                      // sphere: m >= 0
};

struct QuadratureRule {
    std::vector<Point> nodes;
    Eigen::VectorXd weights;
};

///
/// A closed model manifold with analytically known eigendecomposition of -Delta_g,
/// truncated to the first K distinct eigenvalues, together with a product quadrature
/// rule and the sampled basis on its nodes.
///
/// Immutable after construction.
///
class SpectralModel {
public:
    const ModelDescriptor& descriptor() const noexcept { return desc_; }
    ManifoldKind kind() const noexcept { return desc_.kind; }
    int dimension() const noexcept { return dimension_; }
    int truncation() const noexcept { return static_cast<int>(eigenvalues_.size()); }
    double volume() const noexcept { return volume_; }

    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    std::span<const int> multiplicities() const noexcept { return multiplicities_; }
    double eigenvalue(int k) const;
    int multiplicity(int k) const;

    /// Total number of basis functions, sum of d_k.
    int basis_size() const noexcept { return static_cast<int>(labels_.size()); }
    /// Index of phi_{k,1} in the flattened basis.
    int block_offset(int k) const;
    std::span<const BasisLabel> labels() const noexcept { return labels_; }
    /// Eigenvalue lambda of each flattened basis index.
    const Eigen::VectorXd& basis_eigenvalues() const noexcept { return basis_lambda_; }

    const QuadratureRule& quadrature() const noexcept { return quadrature_; }
    std::size_t node_count() const noexcept { return quadrature_.nodes.size(); }
    /// nodes x basis_size matrix of phi_j(x_i).
    const Eigen::MatrixXd& basis_at_nodes() const noexcept { return basis_nodes_; }

    /// Same rule translated by half a cell (longitude only on the sphere); exact on
    /// the same polynomial space, so disagreement with the primary rule signals aliasing.
    QuadratureRule shifted_quadrature() const;
    /// Product rule of the same family with `factor` times as many nodes per axis.
    QuadratureRule refined_quadrature(int factor) const;

    Eigen::VectorXd basis_values(const Point& x) const;
    Eigen::MatrixXd basis_values(std::span<const Point> xs) const;
    double basis_function(int index, const Point& x) const;
    /// phi_{k,l}(x) with 1 <= l <= d_k.
    double eigenfunction(int k, int l, const Point& x) const;

    Point reduce(Point x) const;
    double distance(const Point& x, const Point& y) const;
    /// Largest geodesic distance between two points.
    double diameter() const;

    /// Copy whose eigenspace bases are reordered by a deterministic shuffle.
    std::shared_ptr<const SpectralModel> permuted_within_eigenspaces(std::uint64_t seed) const;

private:
    friend std::shared_ptr<const SpectralModel> build_model(const ModelDescriptor& desc);
    SpectralModel() = default;
    void sample_basis();

    ModelDescriptor desc_;
    int dimension_ = 1;
    double volume_ = 0.0;
    std::vector<double> eigenvalues_;
    std::vector<int> multiplicities_;
    std::vector<int> offsets_;
    std::vector<BasisLabel> labels_;
    Eigen::VectorXd basis_lambda_;
    std::array<int, Point::max_dim> axis_nodes_{};
    int longitude_nodes_ = 0;
    QuadratureRule quadrature_;
    Eigen::MatrixXd basis_nodes_;
};

using ModelPtr = std::shared_ptr<const SpectralModel>;

ModelPtr build_model(const ModelDescriptor& desc);

double evaluate_eigenfunction(const SpectralModel& model, int k, int l, const Point& x);

/// sum_i w_i f(x_i) g(x_i) over the model quadrature.
double inner_product(const SpectralModel& model, std::span<const double> f, std::span<const double> g);

struct OrthonormalityReport {
    double max_offdiag = 0.0;
    double max_diag_error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

OrthonormalityReport verify_orthonormality(const SpectralModel& model, double tolerance);

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace logcal

#endif // LOGCAL_MANIFOLD_SPECTRUM_HPP
