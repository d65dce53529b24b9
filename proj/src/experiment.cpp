#include "logcal/experiment.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "logcal/error.hpp"
#include "logcal/observation.hpp"
#include "logcal/ucp_recovery.hpp"

namespace logcal {

namespace {

std::string join_path(const std::string& prefix, const std::string& key)
{
    return prefix.empty() ? key : prefix + "." + key;
}

[[noreturn]] void bad_field(const std::string& path, const std::string& what)
{
    throw Error(ErrorKind::ConfigInvalid, fmt::format("config field '{}': {}", path, what));
}

template <typename T>
T required(const json& obj, const std::string& prefix, const std::string& key)
{
    const std::string path = join_path(prefix, key);
    if (!obj.is_object() || !obj.contains(key)) {
        bad_field(path, "missing");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        bad_field(path, fmt::format("has the wrong type ({})", obj.at(key).type_name()));
    }
}

template <typename T>
T optional(const json& obj, const std::string& prefix, const std::string& key, T fallback)
{
    if (!obj.is_object() || !obj.contains(key)) {
        return fallback;
    }
    return required<T>(obj, prefix, key);
}

const json& section(const json& obj, const std::string& key)
{
    static const json empty = json::object();
    if (obj.contains(key)) {
        if (!obj.at(key).is_object()) {
            bad_field(key, "must be an object");
        }
        return obj.at(key);
    }
    return empty;
}

void require_positive(double v, const std::string& path)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        bad_field(path, "must be positive");
    }
}

ModelDescriptor parse_model(const json& j, const std::string& prefix)
{
    if (!j.is_object()) {
        bad_field(prefix, "must be an object");
    }
    ModelDescriptor d;
    const std::string kind = required<std::string>(j, prefix, "kind");
    try {
        d.kind = manifold_kind_from_string(kind);
    } catch (const Error&) {
        bad_field(join_path(prefix, "kind"), fmt::format("unknown manifold '{}'", kind));
    }
    d.truncation = required<int>(j, prefix, "truncation");
    if (d.truncation < 2) {
        bad_field(join_path(prefix, "truncation"), "must be at least 2");
    }
    d.resolution = optional<int>(j, prefix, "resolution", 0);
    if (d.kind == ManifoldKind::FlatTorus) {
        d.edges = required<std::vector<double>>(j, prefix, "edges");
        if (d.edges.empty() || d.edges.size() > Point::max_dim) {
            bad_field(join_path(prefix, "edges"), "needs between 1 and 4 edge lengths");
        }
        for (double e : d.edges) {
            require_positive(e, join_path(prefix, "edges"));
        }
    } else {
        d.radius = optional<double>(j, prefix, "radius", 1.0);
        require_positive(d.radius, join_path(prefix, "radius"));
    }
    return d;
}

ObservationDescriptor parse_observation(const json& j)
{
    const std::string type = required<std::string>(j, "observation", "type");
    if (type == "interval") {
        return AngularInterval{required<double>(j, "observation", "a"), required<double>(j, "observation", "b")};
    }
    if (type == "box") {
        TorusBox box;
        const auto axes = required<std::vector<std::vector<double>>>(j, "observation", "axes");
        for (std::size_t i = 0; i < axes.size(); ++i) {
            if (axes[i].size() != 2) {
                bad_field(fmt::format("observation.axes[{}]", i), "needs [a, b]");
            }
            box.axes.emplace_back(axes[i][0], axes[i][1]);
        }
        return box;
    }
    if (type == "cap") {
        const auto c = required<std::vector<double>>(j, "observation", "center");
        if (c.size() != 2) {
            bad_field("observation.center", "needs [colatitude, longitude]");
        }
        const double r = required<double>(j, "observation", "radius");
        require_positive(r, "observation.radius");
        return SphericalCap{Point{c[0], c[1]}, r};
    }
    bad_field("observation.type", fmt::format("unknown observation type '{}'", type));
}

std::vector<double> time_grid(const ExperimentConfig& cfg, const SpectralModel& model)
{
    if (cfg.time_grid.automatic) {
        return default_time_grid(model, Mass(cfg.mass));
    }
    std::vector<double> t(static_cast<std::size_t>(cfg.time_grid.count));
    for (int j = 0; j < cfg.time_grid.count; ++j) {
        t[static_cast<std::size_t>(j)] =
            cfg.time_grid.t_min + (cfg.time_grid.t_max - cfg.time_grid.t_min) * j / (cfg.time_grid.count - 1);
    }
    return t;
}

struct Pipeline {
    ModelPtr model;
    Mass m;
    PotentialField V;
};

Pipeline make_pipeline(const ExperimentConfig& cfg)
{
    ModelPtr model = build_model(cfg.model);
    return {model, Mass(cfg.mass), PotentialField::from_spec(cfg.potential, model->kind())};
}

ObservationSet observation_for(const ExperimentConfig& cfg, const SpectralModel& model)
{
    if (!cfg.observation) {
        throw Error(ErrorKind::ConfigInvalid, "config field 'observation': missing (required by this subcommand)");
    }
    return restrict_to_observation(model, *cfg.observation);
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

Isometry make_isometry(const GaugeSpec& g, ManifoldKind kind)
{
    if (g.type == "identity") {
        return Isometry::identity(kind);
    }
    if (g.type == "rotation") {
        if (kind == ManifoldKind::Circle) {
            return Isometry::circle_rotation(g.angle);
        }
        if (kind == ManifoldKind::Sphere2) {
            return Isometry::sphere_rotation(g.angle);
        }
    }
    if (g.type == "reflection") {
        if (kind == ManifoldKind::Circle) {
            return Isometry::circle_reflection(g.angle);
        }
        if (kind == ManifoldKind::Sphere2) {
            return Isometry::sphere_reflection(g.angle);
        }
    }
    if (g.type == "translation" && kind == ManifoldKind::FlatTorus) {
        return Isometry::torus_translation(g.shift);
    }
    throw Error(ErrorKind::ConfigInvalid,
                fmt::format("config field 'gauge.type': '{}' is not a catalog isometry of the {}", g.type,
                            to_string(kind)));
}

Point random_point(std::mt19937_64& rng, const SpectralModel& model)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (model.kind()) {
    case ManifoldKind::Circle:
        return Point{two_pi * u(rng)};
    case ManifoldKind::Sphere2: {
        const double z = 2.0 * u(rng) - 1.0;
        return Point{std::acos(z), two_pi * u(rng)};
    }
    case ManifoldKind::FlatTorus: {
        std::array<double, Point::max_dim> c{};
        for (int i = 0; i < model.dimension(); ++i) {
            c[static_cast<std::size_t>(i)] = two_pi * u(rng);
        }
        return Point(std::span<const double>(c.data(), static_cast<std::size_t>(model.dimension())));
    }
    }
    return Point{0.0};
}

// ---------------------------------------------------------------------------
// Subcommands

RunOutcome run_spectrum(const ExperimentConfig& cfg, const RunContext& ctx)
{
    const ModelPtr model = build_model(cfg.model);
    RunOutcome out;
    write_text(ctx.out / "spectrum.tsv", spectrum_table(*model));
    write_text(ctx.out / "model.json", dump(spectrum_to_json(*model)));
    out.artifacts = {"spectrum.tsv", "model.json"};
    for (int k = 0; k < model->truncation(); ++k) {
        out.summary.push_back(fmt::format("lambda_{} = {:.12g}  multiplicity {}", k, model->eigenvalue(k),
                                          model->multiplicity(k)));
    }
    const auto ortho = verify_orthonormality(*model, 1e-10);
    out.summary.push_back(fmt::format("orthonormality: offdiag {:.3e}, diag {:.3e}", ortho.max_offdiag,
                                      ortho.max_diag_error));
    out.passed = ortho.passed;
    return out;
}

RunOutcome run_solve(const ExperimentConfig& cfg, const RunContext& ctx)
{
    const Pipeline p = make_pipeline(cfg);
    const ObservationSet set = observation_for(cfg, *p.model);
    const SourceBasis sources = make_source_basis(p.model, set, cfg.source_count, cfg.shape);
    const SchrodingerOperator op(p.model, p.m, p.V);
    RunOutcome out;
    json all = json::array();
    for (const auto& s : sources.sources) {
        const FieldCoefficients u = op.solve(s.coefficients);
        json j = to_json(u);
        j["source_id"] = s.id;
        j["residual"] = op.residual(u, s.coefficients);
        const Eigen::VectorXd nodes = u.node_values();
        j["node_values"] = std::vector<double>(nodes.begin(), nodes.end());
        all.push_back(j);
        out.summary.push_back(fmt::format("source {}: residual {:.3e}, sup |u| {:.6e}", s.id,
                                          op.residual(u, s.coefficients), u.sup_norm_at_nodes()));
    }
    json doc;
    doc["model"] = to_json(cfg.model);
    doc["mass"] = cfg.mass;
    doc["potential"] = p.V.label();
    doc["min_abs_eigenvalue"] = op.min_abs_eigenvalue();
    doc["condition_number"] = op.condition_number();
    doc["solutions"] = all;
    write_text(ctx.out / "solutions.json", dump(doc));
    out.artifacts = {"solutions.json"};
    out.passed = true;
    return out;
}

RunOutcome run_cauchy(const ExperimentConfig& cfg, const RunContext& ctx)
{
    const Pipeline p = make_pipeline(cfg);
    const ObservationSet set = observation_for(cfg, *p.model);
    const SourceBasis sources = make_source_basis(p.model, set, cfg.source_count, cfg.shape);
    const SchrodingerOperator op(p.model, p.m, p.V);
    RunOutcome out;
    json manifest;
    manifest["model"] = to_json(cfg.model);
    manifest["mass"] = cfg.mass;
    manifest["potential"] = p.V.label();
    manifest["observation"] = to_json(set.descriptor());
    manifest["records"] = json::array();
    double worst = 0.0;
    for (const auto& s : sources.sources) {
        const CauchyRecord rec = cauchy_record(op, s, set);
        const std::string name = fmt::format("records/record_{}.json", s.id);
        write_text(ctx.out / name, dump(to_json(rec)));
        manifest["records"].push_back(name);
        out.artifacts.push_back(name);
        worst = std::max(worst, cauchy_equation_defect(op, s, set));
    }
    manifest["max_equation_defect"] = worst;
    write_text(ctx.out / "manifest.json", dump(manifest));
    out.artifacts.push_back("manifest.json");
    out.summary.push_back(fmt::format("{} records, max |L u + V u - f| on the set {:.3e}", sources.sources.size(), worst));
    out.passed = worst <= cfg.tolerances.cauchy;
    return out;
}

RunOutcome run_extract(const ExperimentConfig& cfg, const RunContext& ctx)
{
    const Pipeline p = make_pipeline(cfg);
    const ObservationSet set = observation_for(cfg, *p.model);
    const SourceBasis sources = make_source_basis(p.model, set, cfg.source_count, cfg.shape);
    const SchrodingerOperator op(p.model, p.m, p.V);
    const auto times = time_grid(cfg, *p.model);
    GelfandOptions opt;
    opt.mode = cfg.mode;
    const GelfandData data = build_gelfand_data(op, set, sources, times, opt);
    RunOutcome out;
    write_text(ctx.out / "gelfand.json", dump(to_json(data)));
    out.artifacts.push_back("gelfand.json");
    for (const auto& s : sources.sources) {
        const std::string name = fmt::format("traces/trace_{}.tsv", s.id);
        write_text(ctx.out / name, heat_trace_table(heat_trace_of_solution(op, s.coefficients, set, times, s.id)));
        out.artifacts.push_back(name);
    }
    for (std::size_t k = 0; k < data.eigenvalues.size(); ++k) {
        out.summary.push_back(fmt::format("lambda = {:.12g}  d = {}", data.eigenvalues[k], data.multiplicities[k]));
    }
    out.passed = true;
    if (cfg.mode == GelfandMode::Internal) {
        const GelfandComparison cmp = compare_gelfand(data, analytic_gelfand_data(*p.model, p.m, set),
                                                      {cfg.tolerances.eigenvalue, cfg.tolerances.angle});
        write_text(ctx.out / "analytic_comparison.tsv", comparison_table(cmp));
        out.artifacts.push_back("analytic_comparison.tsv");
        out.summary.push_back(fmt::format("agreement with the analytic eigendata: {}", cmp.passed ? "yes" : "no"));
        out.passed = cmp.passed;
    }
    return out;
}

RunOutcome run_compare(const ExperimentConfig& cfg, const RunContext& ctx)
{
    std::vector<std::string> files = ctx.inputs.empty() ? cfg.compare_files : ctx.inputs;
    if (files.size() != 2) {
        throw Error(ErrorKind::ConfigInvalid, "config field 'compare.files': compare needs exactly two Gel'fand files");
    }
    const GelfandData a = gelfand_from_json(read_json(files[0]));
    const GelfandData b = gelfand_from_json(read_json(files[1]));
    const GelfandComparison cmp = compare_gelfand(a, b, {cfg.tolerances.eigenvalue, cfg.tolerances.angle});
    RunOutcome out;
    write_text(ctx.out / "comparison.tsv", comparison_table(cmp));
    write_text(ctx.out / "comparison.json", dump(to_json(cmp)));
    out.artifacts = {"comparison.tsv", "comparison.json"};
    for (const auto& r : cmp.rows) {
        out.summary.push_back(fmt::format("k={} gap {:.3e} d {}/{} angle {:.3e} {}", r.k, r.gap, r.d1, r.d2,
                                          r.max_angle, r.passed ? "ok" : "MISMATCH"));
    }
    out.passed = cmp.passed;
    return out;
}

RunOutcome run_ucp(const ExperimentConfig& cfg, const RunContext& ctx)
{
    const Pipeline p = make_pipeline(cfg);
    const ObservationSet set = observation_for(cfg, *p.model);
    UcpOptions opt;
    opt.node_multiplier = cfg.ucp_multiplier;
    opt.null_threshold = cfg.tolerances.ucp_null;
    const UcpReport rep = ucp_nullspace_test(*p.model, p.m, set, opt);
    RunOutcome out;
    write_text(ctx.out / "ucp.json", dump(to_json(rep)));
    out.artifacts = {"ucp.json"};
    out.summary.push_back(fmt::format("null dimension {} (sigma ratio {:.3e}, solution-only {:.3e})",
                                      rep.null_dimension, rep.sigma_min / rep.sigma_max,
                                      rep.solution_only_sigma_min / rep.solution_only_sigma_max));
    out.passed = rep.passed;
    return out;
}

RunOutcome run_recover(const ExperimentConfig& cfg, const RunContext& ctx)
{
    const Pipeline p = make_pipeline(cfg);
    const ObservationSet set = observation_for(cfg, *p.model);
    const SourceBasis sources = make_source_basis(p.model, set, cfg.source_count, cfg.shape);
    const SchrodingerOperator op(p.model, p.m, p.V);
    const RecoveredPotential rec =
        recover_potential(*p.model, p.m, set, p.V.restriction(set), forward_solutions(op, sources));
    const double err = recovery_error(rec, p.V);
    RunOutcome out;
    write_text(ctx.out / "recovered.tsv", recovered_potential_table(rec));
    json j;
    j["passed"] = err <= cfg.tolerances.recovery;
    j["relative_error"] = err;
    j["masked"] = rec.masked;
    j["max_disagreement"] = rec.max_disagreement;
    write_text(ctx.out / "recovery.json", dump(j));
    out.artifacts = {"recovered.tsv", "recovery.json"};
    out.summary.push_back(fmt::format("max relative error {:.3e}, masked nodes {}", err, rec.masked));
    out.passed = err <= cfg.tolerances.recovery;
    return out;
}

RunOutcome run_gauge(const ExperimentConfig& cfg, const RunContext& ctx)
{
    const Pipeline p = make_pipeline(cfg);
    const ObservationSet set = observation_for(cfg, *p.model);
    const SourceBasis sources = make_source_basis(p.model, set, cfg.source_count, cfg.shape);
    const GaugeReport rep = isometry_gauge_check(p.model, p.m, p.V, set, make_isometry(cfg.gauge, p.model->kind()),
                                                 sources, cfg.tolerances.gauge);
    RunOutcome out;
    write_text(ctx.out / "gauge.json", dump(to_json(rep)));
    out.artifacts = {"gauge.json"};
    out.summary.push_back(fmt::format("intertwining {:.3e}, transported records {:.3e}, direct records {:.3e}",
                                      rep.intertwining_defect, rep.transported_deviation, rep.direct_deviation));
    out.passed = rep.passed;
    return out;
}

RunOutcome run_heatcheck(const ExperimentConfig& cfg, const RunContext& ctx)
{
    const Pipeline p = make_pipeline(cfg);
    std::mt19937_64 rng(cfg.seed);
    std::vector<PointPair> pairs;
    for (int i = 0; i < cfg.probe_pairs; ++i) {
        pairs.push_back({random_point(rng, *p.model), random_point(rng, *p.model)});
    }
    std::vector<double> times;
    for (int i = 0; i < cfg.probe_times; ++i) {
        times.push_back(0.05 * std::pow(40.0, double(i) / std::max(1, cfg.probe_times - 1)));
    }
    const GrigoryanReport grig = grigoryan_check(p.model, p.m, times, pairs);
    const SpectralEstimateReport est = spectral_estimate_check(*p.model, p.m);

    json j;
    j["grigoryan"] = to_json(grig);
    j["spectral_estimates"] = to_json(est);
    bool passed = grig.passed && est.passed;
    RunOutcome out;
    out.summary.push_back(fmt::format("Grigor'yan C = {:.6g}, c = {:.6g}, violations {}", grig.C, grig.c,
                                      grig.violations));
    out.summary.push_back(fmt::format("Weyl C = {:.6g}, sup-norm C = {:.6g}", est.weyl_constant, est.sup_constant));

    if (cfg.observation) {
        const ObservationSet set = observation_for(cfg, *p.model);
        ModelPtr other = cfg.reference_model ? build_model(*cfg.reference_model)
                                             : p.model->permuted_within_eigenspaces(cfg.seed);
        const ObservationSet other_set = restrict_to_observation(*other, *cfg.observation);
        std::vector<double> kt;
        for (int i = 0; i < 8; ++i) {
            kt.push_back(0.05 * std::pow(40.0, i / 7.0));
        }
        const HeatKernelComparison cmp =
            heat_kernel_equality_check(*p.model, *other, p.m, set, other_set, kt, cfg.tolerances.heat);
        j["kernel_equality"] = to_json(cmp);
        out.summary.push_back(fmt::format("kernel equality on the set: deviation {:.3e}", cmp.max_deviation));
        passed = passed && cmp.passed;
    }
    j["passed"] = passed;
    write_text(ctx.out / "heatcheck.json", dump(j));
    out.artifacts = {"heatcheck.json"};
    out.passed = passed;
    return out;
}

} // namespace

ExperimentConfig parse_config(const json& j)
{
    if (!j.is_object()) {
        throw Error(ErrorKind::ConfigInvalid, "config must be an object");
    }
    ExperimentConfig cfg;
    if (!j.contains("model")) {
        bad_field("model", "missing");
    }
    cfg.model = parse_model(j.at("model"), "model");
    cfg.mass = required<double>(j, "", "mass");
    if (!(cfg.mass > 1.0)) {
        bad_field("mass", "must exceed 1");
    }

    const json& pot = section(j, "potential");
    cfg.potential.expression = optional<std::string>(pot, "potential", "expression", "zero");
    cfg.potential.amplitude = optional<double>(pot, "potential", "amplitude", 0.0);
    cfg.potential.frequency = optional<int>(pot, "potential", "frequency", 1);
    cfg.potential.axis = optional<int>(pot, "potential", "axis", 0);
    cfg.potential.phase = optional<double>(pot, "potential", "phase", 0.0);
    cfg.potential.radius = optional<double>(pot, "potential", "radius", 0.0);
    if (pot.contains("center")) {
        const auto c = required<std::vector<double>>(pot, "potential", "center");
        if (c.empty() || c.size() > Point::max_dim) {
            bad_field("potential.center", "needs 1 to 4 coordinates");
        }
        cfg.potential.center = Point(std::span<const double>(c));
    }
    try {
        (void)PotentialField::from_spec(cfg.potential, cfg.model.kind);
    } catch (const Error& e) {
        bad_field("potential", e.what());
    }

    if (j.contains("observation")) {
        cfg.observation = parse_observation(j.at("observation"));
    }

    const json& src = section(j, "sources");
    cfg.source_count = optional<int>(src, "sources", "count", 5);
    if (cfg.source_count < 1) {
        bad_field("sources.count", "must be at least 1");
    }
    cfg.shape.radius_fraction = optional<double>(src, "sources", "radius_fraction", 0.999);
    if (!(cfg.shape.radius_fraction > 0.0 && cfg.shape.radius_fraction <= 1.0)) {
        bad_field("sources.radius_fraction", "must lie in (0, 1]");
    }
    cfg.shape.jitter = optional<double>(src, "sources", "jitter", 0.0);
    if (!(cfg.shape.jitter >= 0.0 && cfg.shape.jitter < 0.5)) {
        bad_field("sources.jitter", "must lie in [0, 0.5)");
    }

    const json& tg = section(j, "time_grid");
    cfg.time_grid.automatic = !tg.contains("count");
    if (!cfg.time_grid.automatic) {
        cfg.time_grid.count = required<int>(tg, "time_grid", "count");
        cfg.time_grid.t_min = required<double>(tg, "time_grid", "t_min");
        cfg.time_grid.t_max = required<double>(tg, "time_grid", "t_max");
        if (cfg.time_grid.count < 4) {
            bad_field("time_grid.count", "must be at least 4");
        }
        require_positive(cfg.time_grid.t_min, "time_grid.t_min");
        if (!(cfg.time_grid.t_max > cfg.time_grid.t_min)) {
            bad_field("time_grid.t_max", "must exceed t_min");
        }
    }

    const json& tol = section(j, "tolerances");
    auto tol_field = [&](const char* key, double& slot) {
        slot = optional<double>(tol, "tolerances", key, slot);
        require_positive(slot, join_path("tolerances", key));
    };
    tol_field("eigenvalue", cfg.tolerances.eigenvalue);
    tol_field("angle", cfg.tolerances.angle);
    tol_field("ucp_null", cfg.tolerances.ucp_null);
    tol_field("gauge", cfg.tolerances.gauge);
    tol_field("heat", cfg.tolerances.heat);
    tol_field("recovery", cfg.tolerances.recovery);
    tol_field("cauchy", cfg.tolerances.cauchy);

    const std::string mode = optional<std::string>(j, "", "mode", "internal");
    if (mode != "internal" && mode != "blind") {
        bad_field("mode", "must be 'internal' or 'blind'");
    }
    cfg.mode = mode == "blind" ? GelfandMode::Blind : GelfandMode::Internal;

    const json& ucp = section(j, "ucp");
    cfg.ucp_multiplier = optional<int>(ucp, "ucp", "node_multiplier", 2);
    if (cfg.ucp_multiplier < 1) {
        bad_field("ucp.node_multiplier", "must be at least 1");
    }

    const json& gauge = section(j, "gauge");
    cfg.gauge.type = optional<std::string>(gauge, "gauge", "type", "identity");
    cfg.gauge.angle = optional<double>(gauge, "gauge", "angle", 0.0);
    cfg.gauge.shift = optional<std::vector<double>>(gauge, "gauge", "shift", {});

    if (j.contains("reference_model")) {
        cfg.reference_model = parse_model(j.at("reference_model"), "reference_model");
    }
    const json& cmp = section(j, "compare");
    cfg.compare_files = optional<std::vector<std::string>>(cmp, "compare", "files", {});

    const json& heat = section(j, "heatcheck");
    cfg.probe_times = optional<int>(heat, "heatcheck", "times", 50);
    cfg.probe_pairs = optional<int>(heat, "heatcheck", "pairs", 20);
    if (cfg.probe_times < 2 || cfg.probe_pairs < 1) {
        bad_field("heatcheck", "needs at least 2 times and 1 pair");
    }

    cfg.output_dir = optional<std::string>(j, "", "output", "out");
    cfg.seed = optional<std::uint64_t>(j, "", "seed", 0);
    cfg.shape.seed = cfg.seed;
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    return parse_config(read_json(path));
}

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names = {"spectrum", "solve", "cauchy", "extract", "compare",
                                                   "ucp",      "recover", "gauge", "heatcheck"};
    return names;
}

RunOutcome run_experiment(const std::string& subcommand, const ExperimentConfig& config, const RunContext& ctx)
{
    if (subcommand == "spectrum") {
        return run_spectrum(config, ctx);
    }
    if (subcommand == "solve") {
        return run_solve(config, ctx);
    }
    if (subcommand == "cauchy") {
        return run_cauchy(config, ctx);
    }
    if (subcommand == "extract") {
        return run_extract(config, ctx);
    }
    if (subcommand == "compare") {
        return run_compare(config, ctx);
    }
    if (subcommand == "ucp") {
        return run_ucp(config, ctx);
    }
    if (subcommand == "recover") {
        return run_recover(config, ctx);
    }
    if (subcommand == "gauge") {
        return run_gauge(config, ctx);
    }
    if (subcommand == "heatcheck") {
        return run_heatcheck(config, ctx);
    }
    throw Error(ErrorKind::InvalidArgument, fmt::format("unknown subcommand '{}'", subcommand));
}

} // namespace logcal
