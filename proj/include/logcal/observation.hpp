#ifndef LOGCAL_OBSERVATION_HPP
#define LOGCAL_OBSERVATION_HPP

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "logcal/manifold_spectrum.hpp"

namespace logcal {

/// Open arc {theta : 0 < (theta - a) mod 2pi < b - a} on the circle.
struct AngularInterval {
    double a = 0.0;
    double b = 0.0;
};

/// Open product of per-axis angular intervals on a flat torus.
struct TorusBox {
    std::vector<std::pair<double, double>> axes;
};

/// Open geodesic ball of the given angular radius on the sphere.
struct SphericalCap {
    Point center;
    double radius = 0.0;
};

using ObservationDescriptor = std::variant<AngularInterval, TorusBox, SphericalCap>;

bool contains(const ObservationDescriptor& set, const Point& x);
std::string describe(const ObservationDescriptor& set);

/// Largest chart-metric radius of a ball about `center` that stays inside the set
/// (angular units; negative if the center lies outside).
double inner_radius(const ObservationDescriptor& set, const Point& center);

/// Chart-metric distance in radians: arc angle on the circle, great-circle angle on the
/// sphere, Euclidean distance of angle tuples on the torus.
double angular_distance(ManifoldKind kind, const Point& x, const Point& y);

/// Quadrature nodes of a model that lie inside an observation set.
class ObservationSet {
public:
    const ObservationDescriptor& descriptor() const noexcept { return descriptor_; }
    std::span<const int> node_indices() const noexcept { return indices_; }
    std::span<const Point> nodes() const noexcept { return nodes_; }
    const Eigen::VectorXd& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    bool complement_nonempty() const noexcept { return complement_nonempty_; }
    bool contains(const Point& x) const { return logcal::contains(descriptor_, x); }

    /// Deterministic points strictly inside the set, independent of the model quadrature.
    std::vector<Point> interior_samples(std::size_t count) const;

    /// Rows of model.basis_at_nodes() belonging to the set.
    Eigen::MatrixXd restrict_rows(const Eigen::MatrixXd& node_matrix) const;
    Eigen::VectorXd restrict(const Eigen::VectorXd& node_values) const;

private:
    friend ObservationSet restrict_to_observation(const SpectralModel& model, const ObservationDescriptor& set);

    ObservationDescriptor descriptor_;
    ManifoldKind kind_ = ManifoldKind::Circle;
    std::vector<int> indices_;
    std::vector<Point> nodes_;
    Eigen::VectorXd weights_;
    bool complement_nonempty_ = false;
};

ObservationSet restrict_to_observation(const SpectralModel& model, const ObservationDescriptor& set);

} // namespace logcal

#endif // LOGCAL_OBSERVATION_HPP
