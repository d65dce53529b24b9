#ifndef LOGCAL_EXPERIMENT_HPP
#define LOGCAL_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "logcal/forward_solver.hpp"
#include "logcal/gelfand_extraction.hpp"
#include "logcal/serialization.hpp"

namespace logcal {

struct TimeGridSpec {
    bool automatic = true;
    double t_min = 0.0;
    double t_max = 0.0;
    int count = 0;
};

struct ExperimentTolerances {
    double eigenvalue = 1e-6;
    double angle = 1e-5;
    double ucp_null = 1e-9;
    double gauge = 1e-10;
    double heat = 1e-8;
    double recovery = 1e-4;
    double cauchy = 1e-8;
};

struct GaugeSpec {
    std::string type = "identity";   // identity | rotation | reflection | translation
    double angle = 0.0;
    std::vector<double> shift;
};

struct ExperimentConfig {
    ModelDescriptor model;
    double mass = 0.0;
    PotentialSpec potential;
    std::optional<ObservationDescriptor> observation;
    int source_count = 5;
    SourceShape shape;
    TimeGridSpec time_grid;
    ExperimentTolerances tolerances;
    GelfandMode mode = GelfandMode::Internal;
    int ucp_multiplier = 2;
    GaugeSpec gauge;
    std::optional<ModelDescriptor> reference_model;
    std::vector<std::string> compare_files;
    int probe_times = 50;
    int probe_pairs = 20;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
};

/// Validates a parsed configuration; errors name the offending field path.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunContext {
    std::filesystem::path out;
    bool quiet = false;
    std::vector<std::string> inputs;   // extra positional files (compare)
};

struct RunOutcome {
    bool passed = false;
    std::vector<std::string> summary;
    std::vector<std::string> artifacts;
};

const std::vector<std::string>& subcommands();

RunOutcome run_experiment(const std::string& subcommand, const ExperimentConfig& config, const RunContext& ctx);

} // namespace logcal

#endif // LOGCAL_EXPERIMENT_HPP
