#include "logcal/serialization.hpp"

#include <fstream>
#include <sstream>

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

json vector_to_json(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json matrix_to_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        rows.push_back(vector_to_json(m.row(i).transpose()));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Eigen::VectorXd row = vector_from_json(j[i]);
        if (row.size() != cols) {
            throw Error(ErrorKind::Io, "matrix rows have inconsistent lengths");
        }
        m.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return m;
}

json nodes_to_json(const std::vector<Point>& nodes)
{
    json out = json::array();
    for (const auto& p : nodes) {
        out.push_back(point_to_json(p));
    }
    return out;
}

std::vector<Point> nodes_from_json(const json& j)
{
    std::vector<Point> out;
    for (const auto& p : j) {
        out.push_back(point_from_json(p));
    }
    return out;
}

std::string coords_cells(const Point& p)
{
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        out += fmt::format("{:.17g}\t", p[i]);
    }
    return out;
}

std::string coords_header(std::size_t dim)
{
    std::string out;
    for (std::size_t i = 0; i < dim; ++i) {
        out += fmt::format("x{}\t", i);
    }
    return out;
}

} // namespace

json point_to_json(const Point& p)
{
    return std::vector<double>(p.coords().begin(), p.coords().end());
}

Point point_from_json(const json& j)
{
    const auto v = j.get<std::vector<double>>();
    if (v.empty() || v.size() > Point::max_dim) {
        throw Error(ErrorKind::Io, "point must have between 1 and 4 coordinates");
    }
    return Point(std::span<const double>(v));
}

json to_json(const ModelDescriptor& d)
{
    json j;
    j["kind"] = to_string(d.kind);
    j["radius"] = d.radius;
    j["edges"] = d.edges;
    j["truncation"] = d.truncation;
    j["resolution"] = d.resolution;
    return j;
}

ModelDescriptor model_descriptor_from_json(const json& j)
{
    ModelDescriptor d;
    d.kind = manifold_kind_from_string(j.at("kind").get<std::string>());
    d.radius = j.value("radius", 1.0);
    d.edges = j.value("edges", std::vector<double>{});
    d.truncation = j.at("truncation").get<int>();
    d.resolution = j.value("resolution", 0);
    return d;
}

json spectrum_to_json(const SpectralModel& model)
{
    json j;
    j["model"] = to_json(model.descriptor());
    j["dimension"] = model.dimension();
    j["volume"] = model.volume();
    j["eigenvalues"] = std::vector<double>(model.eigenvalues().begin(), model.eigenvalues().end());
    j["multiplicities"] = std::vector<int>(model.multiplicities().begin(), model.multiplicities().end());
    j["basis_size"] = model.basis_size();
    j["quadrature_nodes"] = model.node_count();
    return j;
}

json to_json(const ObservationDescriptor& d)
{
    return std::visit(overloaded{
                          [](const AngularInterval& s) {
                              json j;
                              j["type"] = "interval";
                              j["a"] = s.a;
                              j["b"] = s.b;
                              return j;
                          },
                          [](const TorusBox& s) {
                              json j;
                              j["type"] = "box";
                              json axes = json::array();
                              for (const auto& [a, b] : s.axes) {
                                  axes.push_back({a, b});
                              }
                              j["axes"] = axes;
                              return j;
                          },
                          [](const SphericalCap& s) {
                              json j;
                              j["type"] = "cap";
                              j["center"] = point_to_json(s.center);
                              j["radius"] = s.radius;
                              return j;
                          },
                      },
                      d);
}

ObservationDescriptor observation_from_json(const json& j)
{
    const std::string type = j.at("type").get<std::string>();
    if (type == "interval") {
        return AngularInterval{j.at("a").get<double>(), j.at("b").get<double>()};
    }
    if (type == "box") {
        TorusBox box;
        for (const auto& ax : j.at("axes")) {
            box.axes.emplace_back(ax.at(0).get<double>(), ax.at(1).get<double>());
        }
        return box;
    }
    if (type == "cap") {
        return SphericalCap{point_from_json(j.at("center")), j.at("radius").get<double>()};
    }
    throw Error(ErrorKind::ConfigInvalid, fmt::format("unknown observation type '{}'", type));
}

json to_json(const CauchyRecord& r)
{
    json j;
    j["source_id"] = r.source_id;
    j["truncation"] = r.truncation;
    j["mass"] = r.mass;
    j["nodes"] = nodes_to_json(r.nodes);
    j["u"] = vector_to_json(r.u);
    j["Lu"] = vector_to_json(r.Lu);
    return j;
}

CauchyRecord cauchy_record_from_json(const json& j)
{
    CauchyRecord r;
    r.source_id = j.at("source_id").get<int>();
    r.truncation = j.at("truncation").get<int>();
    r.mass = j.at("mass").get<double>();
    r.nodes = nodes_from_json(j.at("nodes"));
    r.u = vector_from_json(j.at("u"));
    r.Lu = vector_from_json(j.at("Lu"));
    if (r.u.size() != static_cast<Eigen::Index>(r.nodes.size()) || r.Lu.size() != r.u.size()) {
        throw Error(ErrorKind::Io, "Cauchy record arrays are not aligned with its nodes");
    }
    return r;
}

json to_json(const GelfandData& g)
{
    json j;
    j["mode"] = g.mode == GelfandMode::Internal ? "internal" : "blind";
    j["mass"] = g.mass;
    j["observation"] = g.observation;
    j["fit_residual"] = g.fit_residual;
    j["eigenvalues"] = g.eigenvalues;
    j["multiplicities"] = g.multiplicities;
    j["source_ids"] = g.source_ids;
    j["nodes"] = nodes_to_json(g.nodes);
    j["weights"] = vector_to_json(g.weights);
    json fams = json::array();
    for (const auto& f : g.families) {
        fams.push_back(matrix_to_json(f));
    }
    j["families"] = fams;
    return j;
}

GelfandData gelfand_from_json(const json& j)
{
    GelfandData g;
    g.mode = j.at("mode").get<std::string>() == "blind" ? GelfandMode::Blind : GelfandMode::Internal;
    g.mass = j.at("mass").get<double>();
    g.observation = j.value("observation", "");
    g.fit_residual = j.value("fit_residual", 0.0);
    g.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    g.multiplicities = j.at("multiplicities").get<std::vector<int>>();
    g.source_ids = j.value("source_ids", std::vector<int>{});
    g.nodes = nodes_from_json(j.at("nodes"));
    g.weights = vector_from_json(j.at("weights"));
    const auto n = static_cast<Eigen::Index>(g.nodes.size());
    for (const auto& f : j.at("families")) {
        g.families.push_back(matrix_from_json(f, n));
    }
    if (g.families.size() != g.eigenvalues.size() || g.multiplicities.size() != g.eigenvalues.size()) {
        throw Error(ErrorKind::Io, "Gel'fand data lists differ in length");
    }
    return g;
}

json to_json(const GelfandComparison& c)
{
    json j;
    j["passed"] = c.passed;
    j["first_failure"] = c.first_failure;
    json rows = json::array();
    for (const auto& r : c.rows) {
        json row;
        row["k"] = r.k;
        row["lambda1"] = r.lambda1;
        row["lambda2"] = r.lambda2;
        row["gap"] = r.gap;
        row["d1"] = r.d1;
        row["d2"] = r.d2;
        row["max_angle"] = r.max_angle;
        row["passed"] = r.passed;
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

json to_json(const UcpReport& r)
{
    json j;
    j["passed"] = r.passed;
    j["truncation"] = r.truncation;
    j["observation"] = r.observation;
    j["space_dimension"] = r.space_dimension;
    j["samples"] = r.samples;
    j["null_dimension"] = r.null_dimension;
    j["sigma_min"] = r.sigma_min;
    j["sigma_max"] = r.sigma_max;
    j["solution_only_sigma_min"] = r.solution_only_sigma_min;
    j["solution_only_sigma_max"] = r.solution_only_sigma_max;
    return j;
}

json to_json(const GaugeReport& r)
{
    json j;
    j["passed"] = r.passed;
    j["intertwining_defect"] = r.intertwining_defect;
    j["transported_deviation"] = r.transported_deviation;
    j["direct_deviation"] = r.direct_deviation;
    j["records"] = r.records;
    return j;
}

json to_json(const GrigoryanReport& r)
{
    json j;
    j["passed"] = r.passed;
    j["C"] = r.C;
    j["c"] = r.c;
    j["probes"] = r.probes;
    j["resolved"] = r.resolved;
    j["verified"] = r.verified;
    j["violations"] = r.violations;
    j["max_looseness"] = r.max_looseness;
    return j;
}

json to_json(const HeatKernelComparison& r)
{
    json j;
    j["passed"] = r.passed;
    j["max_deviation"] = r.max_deviation;
    j["worst_time"] = r.worst_time;
    j["checked"] = r.checked;
    return j;
}

json to_json(const SpectralEstimateReport& r)
{
    json j;
    j["passed"] = r.passed;
    j["weyl_constant"] = r.weyl_constant;
    j["weyl_checked"] = r.weyl_checked;
    j["weyl_violations"] = r.weyl_violations;
    j["sup_constant"] = r.sup_constant;
    j["sup_checked"] = r.sup_checked;
    j["sup_violations"] = r.sup_violations;
    return j;
}

json to_json(const FieldCoefficients& u)
{
    json j;
    j["model"] = to_json(u.model().descriptor());
    j["coefficients"] = vector_to_json(u.coefficients());
    return j;
}

std::string heat_trace_table(const HeatTrace& h)
{
    std::ostringstream out;
    const std::size_t dim = h.nodes.empty() ? 1 : h.nodes.front().size();
    out << "source\tt\t" << coords_header(dim) << "h\n";
    for (std::size_t j = 0; j < h.times.size(); ++j) {
        for (std::size_t i = 0; i < h.nodes.size(); ++i) {
            out << fmt::format("{}\t{:.17g}\t{}{:.17g}\n", h.source_id, h.times[j], coords_cells(h.nodes[i]),
                               h.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
        }
    }
    return out.str();
}

std::string recovered_potential_table(const RecoveredPotential& r)
{
    std::ostringstream out;
    const std::size_t dim = r.nodes.empty() ? 1 : r.nodes.front().size();
    out << coords_header(dim) << "value\tcovered\tobserved\tsources\n";
    for (std::size_t n = 0; n < r.nodes.size(); ++n) {
        const double v = r.values[static_cast<Eigen::Index>(n)];
        out << coords_cells(r.nodes[n]) << (r.covered[n] ? fmt::format("{:.17g}", v) : std::string("nan")) << '\t'
            << int(r.covered[n]) << '\t' << int(r.observed[n]) << '\t' << r.contributing[n] << '\n';
    }
    return out.str();
}

std::string comparison_table(const GelfandComparison& c)
{
    std::ostringstream out;
    out << "k\tlambda1\tlambda2\tgap\td1\td2\tmax_angle\tpassed\n";
    for (const auto& r : c.rows) {
        out << fmt::format("{}\t{:.17g}\t{:.17g}\t{:.6e}\t{}\t{}\t{:.6e}\t{}\n", r.k, r.lambda1, r.lambda2, r.gap, r.d1,
                           r.d2, r.max_angle, int(r.passed));
    }
    return out.str();
}

std::string spectrum_table(const SpectralModel& model)
{
    std::ostringstream out;
    out << "k\tlambda\tmultiplicity\n";
    for (int k = 0; k < model.truncation(); ++k) {
        out << fmt::format("{}\t{:.17g}\t{}\n", k, model.eigenvalue(k), model.multiplicity(k));
    }
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error(ErrorKind::Io, fmt::format("cannot write {}", path.string()));
    }
    f << text;
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f) {
        throw Error(ErrorKind::Io, fmt::format("cannot read {}", path.string()));
    }
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Io, fmt::format("{}: {}", path.string(), e.what()));
    }
}

} // namespace logcal
