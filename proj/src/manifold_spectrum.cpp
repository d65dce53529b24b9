#include "logcal/manifold_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "logcal/error.hpp"

namespace logcal {

namespace {

double wrap_angle(double a)
{
    double r = std::fmod(a, two_pi);
    if (r < 0.0) {
        r += two_pi;
    }
    if (r >= two_pi) {
        r -= two_pi;
    }
    return r;
}

// |a - b| measured around the circle, in [0, pi].
double angular_gap(double a, double b)
{
    const double d = std::fabs(wrap_angle(a - b));
    return std::min(d, two_pi - d);
}

double torus_lattice_eigenvalue(std::span<const double> edges, std::span<const int> j)
{
    double s = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const double w = two_pi * j[i] / edges[i];
        s += w * w;
    }
    return s;
}

bool same_eigenvalue(double a, double b)
{
    return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

struct LatticeGroup {
    double eigenvalue;
    std::vector<std::array<int, Point::max_dim>> representatives;  // half-space representatives
    bool has_zero = false;
};

// Groups all lattice vectors of the first `count` distinct torus eigenvalues.
std::vector<LatticeGroup> enumerate_torus(std::span<const double> edges, int count)
{
    const std::size_t n = edges.size();
    const double min_edge = *std::min_element(edges.begin(), edges.end());
    double bound = std::pow(two_pi / min_edge, 2) * std::max(4, count);
    for (;;) {
        std::array<int, Point::max_dim> limit{};
        for (std::size_t i = 0; i < n; ++i) {
            limit[i] = static_cast<int>(std::floor(edges[i] * std::sqrt(bound) / two_pi));
        }
        std::vector<std::pair<double, std::array<int, Point::max_dim>>> vecs;
        std::array<int, Point::max_dim> j{};
        for (std::size_t i = 0; i < n; ++i) {
            j[i] = -limit[i];
        }
        for (;;) {
            const double lam = torus_lattice_eigenvalue(edges, std::span<const int>(j.data(), n));
            if (lam <= bound) {
                vecs.emplace_back(lam, j);
            }
            std::size_t axis = 0;
            while (axis < n && ++j[axis] > limit[axis]) {
                j[axis] = -limit[axis];
                ++axis;
            }
            if (axis == n) {
                break;
            }
        }
        std::sort(vecs.begin(), vecs.end(), [](const auto& a, const auto& b) {
            return a.first < b.first || (a.first == b.first && a.second < b.second);
        });
        std::vector<LatticeGroup> groups;
        for (const auto& [lam, vec] : vecs) {
            if (groups.empty() || !same_eigenvalue(groups.back().eigenvalue, lam)) {
                groups.push_back({lam, {}, false});
            }
            auto& g = groups.back();
            // first nonzero component positive selects one of each +/- pair
            int lead = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (vec[i] != 0) {
                    lead = vec[i];
                    break;
                }
            }
            if (lead == 0) {
                g.has_zero = true;
            } else if (lead > 0) {
                g.representatives.push_back(vec);
            }
        }
        if (static_cast<int>(groups.size()) >= count) {
            groups.resize(count);
            for (auto& g : groups) {
                std::sort(g.representatives.begin(), g.representatives.end());
            }
            return groups;
        }
        bound *= 2.0;
    }
}

// Fully normalized associated Legendre values pbar[l][m], l < lmax, without the
// Condon-Shortley phase; Y_l0 = pbar[l][0] on the unit sphere.
std::vector<std::vector<double>> normalized_legendre(int lmax, double colatitude)
{
    const double x = std::cos(colatitude);
    const double s = std::sin(colatitude);
    std::vector<std::vector<double>> p(lmax);
    for (int l = 0; l < lmax; ++l) {
        p[l].assign(l + 1, 0.0);
    }
    if (lmax == 0) {
        return p;
    }
    p[0][0] = 1.0 / std::sqrt(4.0 * pi);
    for (int m = 1; m < lmax; ++m) {
        p[m][m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[m - 1][m - 1];
    }
    for (int m = 0; m + 1 < lmax; ++m) {
        p[m + 1][m] = std::sqrt(2.0 * m + 3.0) * x * p[m][m];
    }
    for (int m = 0; m < lmax; ++m) {
        for (int l = m + 2; l < lmax; ++l) {
            const double ll = l;
            const double mm = m;
            const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
            const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
            p[l][m] = a * (x * p[l - 1][m] - b * p[l - 2][m]);
        }
    }
    return p;
}

double normalized_legendre_single(int l, int m, double colatitude)
{
    const double x = std::cos(colatitude);
    const double s = std::sin(colatitude);
    double pmm = 1.0 / std::sqrt(4.0 * pi);
    for (int k = 1; k <= m; ++k) {
        pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
    }
    if (l == m) {
        return pmm;
    }
    double prev = pmm;
    double cur = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int ll = m + 2; ll <= l; ++ll) {
        const double L = ll;
        const double M = m;
        const double a = std::sqrt((4.0 * L * L - 1.0) / (L * L - M * M));
        const double b = std::sqrt(((L - 1.0) * (L - 1.0) - M * M) / (4.0 * (L - 1.0) * (L - 1.0) - 1.0));
        const double next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
    }
    return cur;
}

void validate_descriptor(const ModelDescriptor& d)
{
    if (d.truncation < 2) {
        throw Error(ErrorKind::TruncationTooSmall, fmt::format("truncation K = {} (need K >= 2)", d.truncation));
    }
    if (d.resolution < 0) {
        throw Error(ErrorKind::InvalidArgument, "quadrature resolution must be nonnegative");
    }
    switch (d.kind) {
    case ManifoldKind::Circle:
    case ManifoldKind::Sphere2:
        if (!(d.radius > 0.0) || !std::isfinite(d.radius)) {
            throw Error(ErrorKind::InvalidArgument, "radius must be positive");
        }
        break;
    case ManifoldKind::FlatTorus:
        if (d.edges.empty() || d.edges.size() > Point::max_dim) {
            throw Error(ErrorKind::InvalidArgument,
                        fmt::format("torus dimension must be in [1, {}]", Point::max_dim));
        }
        for (double e : d.edges) {
            if (!(e > 0.0) || !std::isfinite(e)) {
                throw Error(ErrorKind::InvalidArgument, "torus edge lengths must be positive");
            }
        }
        break;
    default:
        throw Error(ErrorKind::UnsupportedKind, "unknown manifold kind");
    }
}

} // namespace

Point::Point(std::initializer_list<double> coords) : Point(std::span<const double>(coords.begin(), coords.size())) {}

Point::Point(std::span<const double> coords)
{
    if (coords.size() > max_dim) {
        throw Error(ErrorKind::InvalidArgument, "point has too many coordinates");
    }
    std::copy(coords.begin(), coords.end(), coords_.begin());
    size_ = coords.size();
}

bool operator==(const Point& a, const Point& b) noexcept
{
    return a.size_ == b.size_ && std::equal(a.coords_.begin(), a.coords_.begin() + a.size_, b.coords_.begin());
}

std::string to_string(ManifoldKind kind)
{
    switch (kind) {
    case ManifoldKind::Circle: return "circle";
    case ManifoldKind::FlatTorus: return "torus";
    case ManifoldKind::Sphere2: return "sphere";
    }
    return "unknown";
}

ManifoldKind manifold_kind_from_string(const std::string& name)
{
    if (name == "circle") {
        return ManifoldKind::Circle;
    }
    if (name == "torus" || name == "flat_torus") {
        return ManifoldKind::FlatTorus;
    }
    if (name == "sphere" || name == "sphere2") {
        return ManifoldKind::Sphere2;
    }
    throw Error(ErrorKind::UnsupportedKind, fmt::format("unsupported manifold kind '{}'", name));
}

ModelDescriptor ModelDescriptor::circle(double radius, int truncation, int resolution)
{
    return {ManifoldKind::Circle, radius, {}, truncation, resolution};
}

ModelDescriptor ModelDescriptor::torus(std::vector<double> edges, int truncation, int resolution)
{
    return {ManifoldKind::FlatTorus, 1.0, std::move(edges), truncation, resolution};
}

ModelDescriptor ModelDescriptor::sphere(double radius, int truncation, int resolution)
{
    return {ManifoldKind::Sphere2, radius, {}, truncation, resolution};
}

EigenCatalog catalog_spectrum(const ModelDescriptor& desc, int count)
{
    EigenCatalog cat;
    if (count <= 0) {
        return cat;
    }
    switch (desc.kind) {
    case ManifoldKind::Circle:
        for (int k = 0; k < count; ++k) {
            cat.eigenvalues.push_back(double(k) * k / (desc.radius * desc.radius));
            cat.multiplicities.push_back(k == 0 ? 1 : 2);
        }
        break;
    case ManifoldKind::Sphere2:
        for (int l = 0; l < count; ++l) {
            cat.eigenvalues.push_back(double(l) * (l + 1) / (desc.radius * desc.radius));
            cat.multiplicities.push_back(2 * l + 1);
        }
        break;
    case ManifoldKind::FlatTorus:
        for (const auto& g : enumerate_torus(desc.edges, count)) {
            cat.eigenvalues.push_back(g.eigenvalue);
            cat.multiplicities.push_back((g.has_zero ? 1 : 0) + 2 * static_cast<int>(g.representatives.size()));
        }
        break;
    }
    return cat;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) {
                break;
            }
        }
        // recompute derivative at the converged node
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

ModelPtr build_model(const ModelDescriptor& desc)
{
    validate_descriptor(desc);
    auto model = std::shared_ptr<SpectralModel>(new SpectralModel());
    SpectralModel& m = *model;
    m.desc_ = desc;
    const int K = desc.truncation;

    switch (desc.kind) {
    case ManifoldKind::Circle: {
        m.dimension_ = 1;
        m.volume_ = two_pi * desc.radius;
        for (int k = 0; k < K; ++k) {
            m.eigenvalues_.push_back(double(k) * k / (desc.radius * desc.radius));
            m.multiplicities_.push_back(k == 0 ? 1 : 2);
            if (k == 0) {
                m.labels_.push_back({0, TrigPart::Constant, {}, 0, 0});
            } else {
                BasisLabel c{k, TrigPart::Cos, {}, 0, 0};
                c.lattice[0] = k;
                BasisLabel s = c;
                s.part = TrigPart::Sin;
                m.labels_.push_back(c);
                m.labels_.push_back(s);
            }
        }
        const int n = desc.resolution > 0 ? desc.resolution : std::max(4 * K, 16);
        m.axis_nodes_[0] = n;
        m.quadrature_.weights = Eigen::VectorXd::Constant(n, m.volume_ / n);
        for (int i = 0; i < n; ++i) {
            m.quadrature_.nodes.push_back(Point{two_pi * i / n});
        }
        break;
    }
    case ManifoldKind::Sphere2: {
        m.dimension_ = 2;
        m.volume_ = 4.0 * pi * desc.radius * desc.radius;
        for (int l = 0; l < K; ++l) {
            m.eigenvalues_.push_back(double(l) * (l + 1) / (desc.radius * desc.radius));
            m.multiplicities_.push_back(2 * l + 1);
            m.labels_.push_back({l, TrigPart::Constant, {}, l, 0});
            for (int mm = 1; mm <= l; ++mm) {
                m.labels_.push_back({l, TrigPart::Cos, {}, l, mm});
                m.labels_.push_back({l, TrigPart::Sin, {}, l, mm});
            }
        }
        const int nt = desc.resolution > 0 ? desc.resolution : K + 8;
        const int np = 2 * nt;
        m.axis_nodes_[0] = nt;
        m.longitude_nodes_ = np;
        std::vector<double> x;
        std::vector<double> w;
        gauss_legendre(nt, x, w);
        m.quadrature_.weights.resize(nt * np);
        const double r2 = desc.radius * desc.radius;
        for (int i = 0; i < nt; ++i) {
            const double colat = std::acos(x[nt - 1 - i]);
            for (int j = 0; j < np; ++j) {
                m.quadrature_.nodes.push_back(Point{colat, two_pi * j / np});
                m.quadrature_.weights[i * np + j] = w[nt - 1 - i] * (two_pi / np) * r2;
            }
        }
        break;
    }
    case ManifoldKind::FlatTorus: {
        const std::size_t n = desc.edges.size();
        m.dimension_ = static_cast<int>(n);
        m.volume_ = std::accumulate(desc.edges.begin(), desc.edges.end(), 1.0, std::multiplies<>());
        std::array<int, Point::max_dim> jmax{};
        int k = 0;
        for (const auto& g : enumerate_torus(desc.edges, K)) {
            m.eigenvalues_.push_back(g.eigenvalue);
            m.multiplicities_.push_back((g.has_zero ? 1 : 0) + 2 * static_cast<int>(g.representatives.size()));
            if (g.has_zero) {
                m.labels_.push_back({k, TrigPart::Constant, {}, 0, 0});
            }
            for (const auto& rep : g.representatives) {
                for (std::size_t i = 0; i < n; ++i) {
                    jmax[i] = std::max(jmax[i], std::abs(rep[i]));
                }
                m.labels_.push_back({k, TrigPart::Cos, rep, 0, 0});
                m.labels_.push_back({k, TrigPart::Sin, rep, 0, 0});
            }
            ++k;
        }
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) {
            m.axis_nodes_[i] = desc.resolution > 0 ? desc.resolution : std::max(4 * jmax[i] + 8, 8);
            total *= m.axis_nodes_[i];
        }
        m.quadrature_.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(total), m.volume_ / total);
        std::array<int, Point::max_dim> idx{};
        for (std::size_t t = 0; t < total; ++t) {
            std::array<double, Point::max_dim> c{};
            for (std::size_t i = 0; i < n; ++i) {
                c[i] = two_pi * idx[i] / m.axis_nodes_[i];
            }
            m.quadrature_.nodes.emplace_back(std::span<const double>(c.data(), n));
            for (std::size_t i = 0; i < n; ++i) {
                if (++idx[i] < m.axis_nodes_[i]) {
                    break;
                }
                idx[i] = 0;
            }
        }
        break;
    }
    }

    m.offsets_.assign(K + 1, 0);
    for (int k = 0; k < K; ++k) {
        m.offsets_[k + 1] = m.offsets_[k] + m.multiplicities_[k];
    }
    m.basis_lambda_.resize(m.basis_size());
    for (int j = 0; j < m.basis_size(); ++j) {
        m.basis_lambda_[j] = m.eigenvalues_[m.labels_[j].block];
    }
    m.sample_basis();
    return model;
}

void SpectralModel::sample_basis()
{
    basis_nodes_ = basis_values(quadrature_.nodes);
}

double SpectralModel::eigenvalue(int k) const
{
    if (k < 0 || k >= truncation()) {
        throw Error(ErrorKind::IndexOutOfRange, fmt::format("eigen-index k = {} outside [0, {})", k, truncation()));
    }
    return eigenvalues_[k];
}

int SpectralModel::multiplicity(int k) const
{
    if (k < 0 || k >= truncation()) {
        throw Error(ErrorKind::IndexOutOfRange, fmt::format("eigen-index k = {} outside [0, {})", k, truncation()));
    }
    return multiplicities_[k];
}

int SpectralModel::block_offset(int k) const
{
    if (k < 0 || k > truncation()) {
        throw Error(ErrorKind::IndexOutOfRange, fmt::format("block k = {} outside [0, {}]", k, truncation()));
    }
    return offsets_[k];
}

QuadratureRule SpectralModel::shifted_quadrature() const
{
    QuadratureRule rule = quadrature_;
    for (auto& p : rule.nodes) {
        switch (desc_.kind) {
        case ManifoldKind::Circle:
            p[0] = wrap_angle(p[0] + pi / axis_nodes_[0]);
            break;
        case ManifoldKind::FlatTorus:
            for (int i = 0; i < dimension_; ++i) {
                p[i] = wrap_angle(p[i] + pi / axis_nodes_[i]);
            }
            break;
        case ManifoldKind::Sphere2:
            p[1] = wrap_angle(p[1] + pi / longitude_nodes_);
            break;
        }
    }
    return rule;
}

QuadratureRule SpectralModel::refined_quadrature(int factor) const
{
    if (factor < 1) {
        throw Error(ErrorKind::InvalidArgument, "refinement factor must be positive");
    }
    QuadratureRule rule;
    switch (desc_.kind) {
    case ManifoldKind::Circle: {
        const int n = axis_nodes_[0] * factor;
        rule.weights = Eigen::VectorXd::Constant(n, volume_ / n);
        for (int i = 0; i < n; ++i) {
            rule.nodes.push_back(Point{two_pi * i / n});
        }
        break;
    }
    case ManifoldKind::Sphere2: {
        const int nt = axis_nodes_[0] * factor;
        const int np = longitude_nodes_ * factor;
        std::vector<double> x;
        std::vector<double> w;
        gauss_legendre(nt, x, w);
        rule.weights.resize(static_cast<Eigen::Index>(nt) * np);
        const double r2 = desc_.radius * desc_.radius;
        for (int i = 0; i < nt; ++i) {
            const double colat = std::acos(x[nt - 1 - i]);
            for (int j = 0; j < np; ++j) {
                rule.nodes.push_back(Point{colat, two_pi * j / np});
                rule.weights[static_cast<Eigen::Index>(i) * np + j] = w[nt - 1 - i] * (two_pi / np) * r2;
            }
        }
        break;
    }
    case ManifoldKind::FlatTorus: {
        const auto n = static_cast<std::size_t>(dimension_);
        std::array<int, Point::max_dim> counts{};
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) {
            counts[i] = axis_nodes_[i] * factor;
            total *= static_cast<std::size_t>(counts[i]);
        }
        rule.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(total), volume_ / total);
        rule.nodes.reserve(total);
        std::array<int, Point::max_dim> idx{};
        for (std::size_t t = 0; t < total; ++t) {
            std::array<double, Point::max_dim> c{};
            for (std::size_t i = 0; i < n; ++i) {
                c[i] = two_pi * idx[i] / counts[i];
            }
            rule.nodes.emplace_back(std::span<const double>(c.data(), n));
            for (std::size_t i = 0; i < n; ++i) {
                if (++idx[i] < counts[i]) {
                    break;
                }
                idx[i] = 0;
            }
        }
        break;
    }
    }
    return rule;
}

Eigen::VectorXd SpectralModel::basis_values(const Point& x) const
{
    Eigen::VectorXd out(basis_size());
    switch (desc_.kind) {
    case ManifoldKind::Circle: {
        const double r = desc_.radius;
        const double c0 = 1.0 / std::sqrt(two_pi * r);
        const double c1 = 1.0 / std::sqrt(pi * r);
        for (int j = 0; j < basis_size(); ++j) {
            const auto& lab = labels_[j];
            switch (lab.part) {
            case TrigPart::Constant: out[j] = c0; break;
            case TrigPart::Cos: out[j] = c1 * std::cos(lab.lattice[0] * x[0]); break;
            case TrigPart::Sin: out[j] = c1 * std::sin(lab.lattice[0] * x[0]); break;
            }
        }
        break;
    }
    case ManifoldKind::FlatTorus: {
        const double c0 = 1.0 / std::sqrt(volume_);
        const double c1 = std::sqrt(2.0 / volume_);
        for (int j = 0; j < basis_size(); ++j) {
            const auto& lab = labels_[j];
            double phase = 0.0;
            for (int i = 0; i < dimension_; ++i) {
                phase += lab.lattice[i] * x[i];
            }
            switch (lab.part) {
            case TrigPart::Constant: out[j] = c0; break;
            case TrigPart::Cos: out[j] = c1 * std::cos(phase); break;
            case TrigPart::Sin: out[j] = c1 * std::sin(phase); break;
            }
        }
        break;
    }
    case ManifoldKind::Sphere2: {
        const auto p = normalized_legendre(truncation(), x[0]);
        const double inv_r = 1.0 / desc_.radius;
        for (int j = 0; j < basis_size(); ++j) {
            const auto& lab = labels_[j];
            const double plm = p[lab.degree][lab.order] * inv_r;
            switch (lab.part) {
            case TrigPart::Constant: out[j] = plm; break;
            case TrigPart::Cos: out[j] = std::sqrt(2.0) * plm * std::cos(lab.order * x[1]); break;
            case TrigPart::Sin: out[j] = std::sqrt(2.0) * plm * std::sin(lab.order * x[1]); break;
            }
        }
        break;
    }
    }
    return out;
}

Eigen::MatrixXd SpectralModel::basis_values(std::span<const Point> xs) const
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), basis_size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = basis_values(xs[i]).transpose();
    }
    return out;
}

double SpectralModel::basis_function(int index, const Point& x) const
{
    if (index < 0 || index >= basis_size()) {
        throw Error(ErrorKind::IndexOutOfRange, fmt::format("basis index {} outside [0, {})", index, basis_size()));
    }
    const auto& lab = labels_[index];
    switch (desc_.kind) {
    case ManifoldKind::Circle: {
        const double r = desc_.radius;
        switch (lab.part) {
        case TrigPart::Constant: return 1.0 / std::sqrt(two_pi * r);
        case TrigPart::Cos: return std::cos(lab.lattice[0] * x[0]) / std::sqrt(pi * r);
        case TrigPart::Sin: return std::sin(lab.lattice[0] * x[0]) / std::sqrt(pi * r);
        }
        break;
    }
    case ManifoldKind::FlatTorus: {
        double phase = 0.0;
        for (int i = 0; i < dimension_; ++i) {
            phase += lab.lattice[i] * x[i];
        }
        switch (lab.part) {
        case TrigPart::Constant: return 1.0 / std::sqrt(volume_);
        case TrigPart::Cos: return std::sqrt(2.0 / volume_) * std::cos(phase);
        case TrigPart::Sin: return std::sqrt(2.0 / volume_) * std::sin(phase);
        }
        break;
    }
    case ManifoldKind::Sphere2: {
        const double plm = normalized_legendre_single(lab.degree, lab.order, x[0]) / desc_.radius;
        switch (lab.part) {
        case TrigPart::Constant: return plm;
        case TrigPart::Cos: return std::sqrt(2.0) * plm * std::cos(lab.order * x[1]);
        case TrigPart::Sin: return std::sqrt(2.0) * plm * std::sin(lab.order * x[1]);
        }
        break;
    }
    }
    return 0.0;
}

double SpectralModel::eigenfunction(int k, int l, const Point& x) const
{
    const int d = multiplicity(k);
    if (l < 1 || l > d) {
        throw Error(ErrorKind::IndexOutOfRange, fmt::format("l = {} outside [1, {}] for k = {}", l, d, k));
    }
    return basis_function(offsets_[k] + l - 1, x);
}

Point SpectralModel::reduce(Point x) const
{
    switch (desc_.kind) {
    case ManifoldKind::Circle:
        x[0] = wrap_angle(x[0]);
        break;
    case ManifoldKind::FlatTorus:
        for (int i = 0; i < dimension_; ++i) {
            x[i] = wrap_angle(x[i]);
        }
        break;
    case ManifoldKind::Sphere2: {
        double colat = std::fmod(x[0], two_pi);
        double lon = x[1];
        if (colat < 0.0) {
            colat += two_pi;
        }
        if (colat > pi) {
            colat = two_pi - colat;
            lon += pi;
        }
        x[0] = colat;
        x[1] = wrap_angle(lon);
        break;
    }
    }
    return x;
}

double SpectralModel::distance(const Point& x, const Point& y) const
{
    switch (desc_.kind) {
    case ManifoldKind::Circle:
        return desc_.radius * angular_gap(x[0], y[0]);
    case ManifoldKind::FlatTorus: {
        double s = 0.0;
        for (int i = 0; i < dimension_; ++i) {
            const double d = desc_.edges[i] / two_pi * angular_gap(x[i], y[i]);
            s += d * d;
        }
        return std::sqrt(s);
    }
    case ManifoldKind::Sphere2: {
        // Vincenty form of the central angle
        const double lat1 = pi / 2 - x[0];
        const double lat2 = pi / 2 - y[0];
        const double dlon = y[1] - x[1];
        const double a = std::cos(lat2) * std::sin(dlon);
        const double b = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
        const double c = std::sin(lat1) * std::sin(lat2) + std::cos(lat1) * std::cos(lat2) * std::cos(dlon);
        return desc_.radius * std::atan2(std::hypot(a, b), c);
    }
    }
    return 0.0;
}

double SpectralModel::diameter() const
{
    switch (desc_.kind) {
    case ManifoldKind::Circle:
    case ManifoldKind::Sphere2:
        return pi * desc_.radius;
    case ManifoldKind::FlatTorus: {
        double s = 0.0;
        for (double e : desc_.edges) {
            s += 0.25 * e * e;
        }
        return std::sqrt(s);
    }
    }
    return 0.0;
}

ModelPtr SpectralModel::permuted_within_eigenspaces(std::uint64_t seed) const
{
    auto copy = std::shared_ptr<SpectralModel>(new SpectralModel(*this));
    std::mt19937_64 rng(seed);
    for (int k = 0; k < truncation(); ++k) {
        std::shuffle(copy->labels_.begin() + offsets_[k], copy->labels_.begin() + offsets_[k + 1], rng);
    }
    copy->sample_basis();
    return copy;
}

double evaluate_eigenfunction(const SpectralModel& model, int k, int l, const Point& x)
{
    return model.eigenfunction(k, l, x);
}

double inner_product(const SpectralModel& model, std::span<const double> f, std::span<const double> g)
{
    const std::size_t n = model.node_count();
    if (f.size() != n || g.size() != n) {
        throw Error(ErrorKind::LengthMismatch,
                    fmt::format("samples have lengths {} and {}, quadrature has {} nodes", f.size(), g.size(), n));
    }
    const auto& w = model.quadrature().weights;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += w[static_cast<Eigen::Index>(i)] * f[i] * g[i];
    }
    return s;
}

OrthonormalityReport verify_orthonormality(const SpectralModel& model, double tolerance)
{
    const auto& B = model.basis_at_nodes();
    const Eigen::MatrixXd gram = B.transpose() * model.quadrature().weights.asDiagonal() * B;
    OrthonormalityReport rep;
    rep.tolerance = tolerance;
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
        for (Eigen::Index j = 0; j < gram.cols(); ++j) {
            if (i == j) {
                rep.max_diag_error = std::max(rep.max_diag_error, std::fabs(gram(i, j) - 1.0));
            } else {
                rep.max_offdiag = std::max(rep.max_offdiag, std::fabs(gram(i, j)));
            }
        }
    }
    rep.passed = rep.max_offdiag <= tolerance && rep.max_diag_error <= tolerance;
    return rep;
}

} // namespace logcal
