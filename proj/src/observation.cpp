#include "logcal/observation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "logcal/error.hpp"

namespace logcal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double wrap(double a)
{
    double r = std::fmod(a, two_pi);
    return r < 0.0 ? r + two_pi : r;
}

double arc_gap(double a, double b)
{
    const double d = wrap(a - b);
    return std::min(d, two_pi - d);
}

bool in_arc(double theta, double a, double b)
{
    const double offset = wrap(theta - a);
    return offset > 0.0 && offset < b - a;
}

double central_angle(const Point& x, const Point& y)
{
    const double lat1 = pi / 2 - x[0];
    const double lat2 = pi / 2 - y[0];
    const double dlon = y[1] - x[1];
    const double a = std::cos(lat2) * std::sin(dlon);
    const double b = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
    const double c = std::sin(lat1) * std::sin(lat2) + std::cos(lat1) * std::cos(lat2) * std::cos(dlon);
    return std::atan2(std::hypot(a, b), c);
}

ManifoldKind kind_of(const ObservationDescriptor& set)
{
    return std::visit(overloaded{
                          [](const AngularInterval&) { return ManifoldKind::Circle; },
                          [](const TorusBox&) { return ManifoldKind::FlatTorus; },
                          [](const SphericalCap&) { return ManifoldKind::Sphere2; },
                      },
                      set);
}

// Throws unless the set is a nonempty open set with nonempty closed complement.
bool validate(const ObservationDescriptor& set)
{
    return std::visit(
        overloaded{
            [](const AngularInterval& s) {
                const double len = s.b - s.a;
                if (!(len > 0.0)) {
                    throw Error(ErrorKind::EmptyObservationSet, "angular interval has nonpositive length");
                }
                if (len >= two_pi) {
                    throw Error(ErrorKind::ComplementEmpty, "angular interval covers the whole circle");
                }
                return true;
            },
            [](const TorusBox& s) {
                if (s.axes.empty()) {
                    throw Error(ErrorKind::EmptyObservationSet, "torus box has no axes");
                }
                bool proper = false;
                for (const auto& [a, b] : s.axes) {
                    if (!(b - a > 0.0)) {
                        throw Error(ErrorKind::EmptyObservationSet, "torus box has an empty axis interval");
                    }
                    proper = proper || (b - a < two_pi);
                }
                if (!proper) {
                    throw Error(ErrorKind::ComplementEmpty, "torus box covers the whole torus");
                }
                return true;
            },
            [](const SphericalCap& s) {
                if (!(s.radius > 0.0)) {
                    throw Error(ErrorKind::EmptyObservationSet, "spherical cap has nonpositive radius");
                }
                if (s.radius >= pi) {
                    throw Error(ErrorKind::ComplementEmpty, "spherical cap covers the whole sphere");
                }
                if (s.center.size() != 2) {
                    throw Error(ErrorKind::InvalidArgument, "cap center needs (colatitude, longitude)");
                }
                return true;
            },
        },
        set);
}

} // namespace

bool contains(const ObservationDescriptor& set, const Point& x)
{
    return std::visit(overloaded{
                          [&](const AngularInterval& s) { return in_arc(x[0], s.a, s.b); },
                          [&](const TorusBox& s) {
                              for (std::size_t i = 0; i < s.axes.size(); ++i) {
                                  const auto [a, b] = s.axes[i];
                                  if (b - a >= two_pi) {
                                      continue;
                                  }
                                  if (!in_arc(x[i], a, b)) {
                                      return false;
                                  }
                              }
                              return true;
                          },
                          [&](const SphericalCap& s) { return central_angle(s.center, x) < s.radius; },
                      },
                      set);
}

std::string describe(const ObservationDescriptor& set)
{
    return std::visit(overloaded{
                          [](const AngularInterval& s) { return fmt::format("interval({:.6g}, {:.6g})", s.a, s.b); },
                          [](const TorusBox& s) {
                              std::string out = "box(";
                              for (std::size_t i = 0; i < s.axes.size(); ++i) {
                                  out += fmt::format("{}[{:.6g}, {:.6g}]", i ? " x " : "", s.axes[i].first,
                                                     s.axes[i].second);
                              }
                              return out + ")";
                          },
                          [](const SphericalCap& s) {
                              return fmt::format("cap(center=({:.6g}, {:.6g}), radius={:.6g})", s.center[0],
                                                 s.center[1], s.radius);
                          },
                      },
                      set);
}

double inner_radius(const ObservationDescriptor& set, const Point& center)
{
    return std::visit(overloaded{
                          [&](const AngularInterval& s) {
                              if (!in_arc(center[0], s.a, s.b)) {
                                  return -1.0;
                              }
                              const double off = wrap(center[0] - s.a);
                              return std::min(off, (s.b - s.a) - off);
                          },
                          [&](const TorusBox& s) {
                              double r = pi;
                              for (std::size_t i = 0; i < s.axes.size(); ++i) {
                                  const auto [a, b] = s.axes[i];
                                  if (b - a >= two_pi) {
                                      continue;
                                  }
                                  if (!in_arc(center[i], a, b)) {
                                      return -1.0;
                                  }
                                  const double off = wrap(center[i] - a);
                                  r = std::min(r, std::min(off, (b - a) - off));
                              }
                              return r;
                          },
                          [&](const SphericalCap& s) { return s.radius - central_angle(s.center, center); },
                      },
                      set);
}

double angular_distance(ManifoldKind kind, const Point& x, const Point& y)
{
    switch (kind) {
    case ManifoldKind::Circle:
        return arc_gap(x[0], y[0]);
    case ManifoldKind::FlatTorus: {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = arc_gap(x[i], y[i]);
            s += d * d;
        }
        return std::sqrt(s);
    }
    case ManifoldKind::Sphere2:
        return central_angle(x, y);
    }
    return 0.0;
}

ObservationSet restrict_to_observation(const SpectralModel& model, const ObservationDescriptor& set)
{
    if (kind_of(set) != model.kind()) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("observation set {} does not live on a {}", describe(set), to_string(model.kind())));
    }
    if (const auto* box = std::get_if<TorusBox>(&set);
        box != nullptr && static_cast<int>(box->axes.size()) != model.dimension()) {
        throw Error(ErrorKind::InvalidArgument, "torus box dimension differs from the torus dimension");
    }
    ObservationSet out;
    out.complement_nonempty_ = validate(set);
    out.descriptor_ = set;
    out.kind_ = model.kind();
    const auto& q = model.quadrature();
    std::vector<double> w;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        if (contains(set, q.nodes[i])) {
            out.indices_.push_back(static_cast<int>(i));
            out.nodes_.push_back(q.nodes[i]);
            w.push_back(q.weights[static_cast<Eigen::Index>(i)]);
        }
    }
    if (out.indices_.empty()) {
        throw Error(ErrorKind::EmptyObservationSet,
                    fmt::format("no quadrature node lies inside {}", describe(set)));
    }
    out.weights_ = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    return out;
}

std::vector<Point> ObservationSet::interior_samples(std::size_t count) const
{
    std::vector<Point> out;
    if (count == 0) {
        return out;
    }
    std::visit(overloaded{
                   [&](const AngularInterval& s) {
                       for (std::size_t i = 0; i < count; ++i) {
                           out.push_back(Point{wrap(s.a + (s.b - s.a) * (i + 0.5) / count)});
                       }
                   },
                   [&](const TorusBox& s) {
                       const std::size_t d = s.axes.size();
                       const auto q = static_cast<std::size_t>(std::ceil(std::pow(double(count), 1.0 / d) - 1e-9));
                       std::size_t total = 1;
                       for (std::size_t i = 0; i < d; ++i) {
                           total *= q;
                       }
                       std::vector<std::size_t> idx(d, 0);
                       for (std::size_t t = 0; t < total; ++t) {
                           std::array<double, Point::max_dim> c{};
                           for (std::size_t i = 0; i < d; ++i) {
                               const auto [a, b] = s.axes[i];
                               const double len = std::min(b - a, two_pi);
                               c[i] = wrap(a + len * (idx[i] + 0.5) / q);
                           }
                           out.emplace_back(std::span<const double>(c.data(), d));
                           for (std::size_t i = 0; i < d; ++i) {
                               if (++idx[i] < q) {
                                   break;
                               }
                               idx[i] = 0;
                           }
                       }
                   },
                   [&](const SphericalCap& s) {
                       // equal-area spiral in the cap about the north pole, then rotated onto the center
                       const double golden = pi * (3.0 - std::sqrt(5.0));
                       const double ct = std::cos(s.center[0]);
                       const double st = std::sin(s.center[0]);
                       const double cp = std::cos(s.center[1]);
                       const double sp = std::sin(s.center[1]);
                       const double one_minus_cos = 1.0 - std::cos(s.radius);
                       for (std::size_t i = 0; i < count; ++i) {
                           const double cz = 1.0 - one_minus_cos * (i + 0.5) / count;
                           const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
                           const double az = golden * i;
                           const double x0 = sz * std::cos(az);
                           const double y0 = sz * std::sin(az);
                           const double z0 = cz;
                           // rotate about y by colatitude, then about z by longitude
                           const double x1 = ct * x0 + st * z0;
                           const double z1 = -st * x0 + ct * z0;
                           const double x2 = cp * x1 - sp * y0;
                           const double y2 = sp * x1 + cp * y0;
                           const double colat = std::acos(std::clamp(z1, -1.0, 1.0));
                           out.push_back(Point{colat, wrap(std::atan2(y2, x2))});
                       }
                   },
               },
               descriptor_);
    return out;
}

Eigen::MatrixXd ObservationSet::restrict_rows(const Eigen::MatrixXd& node_matrix) const
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(indices_.size()), node_matrix.cols());
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = node_matrix.row(indices_[i]);
    }
    return out;
}

Eigen::VectorXd ObservationSet::restrict(const Eigen::VectorXd& node_values) const
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(indices_.size()));
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = node_values[indices_[i]];
    }
    return out;
}

} // namespace logcal
