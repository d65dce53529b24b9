#ifndef LOGCAL_SERIALIZATION_HPP
#define LOGCAL_SERIALIZATION_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "logcal/forward_solver.hpp"
#include "logcal/functional_calculus.hpp"
#include "logcal/gelfand_extraction.hpp"
#include "logcal/manifold_spectrum.hpp"
#include "logcal/ucp_recovery.hpp"

namespace logcal {

using json = nlohmann::ordered_json;

json point_to_json(const Point& p);
Point point_from_json(const json& j);

json to_json(const ModelDescriptor& d);
ModelDescriptor model_descriptor_from_json(const json& j);
json spectrum_to_json(const SpectralModel& model);

json to_json(const ObservationDescriptor& d);
ObservationDescriptor observation_from_json(const json& j);

json to_json(const CauchyRecord& r);
CauchyRecord cauchy_record_from_json(const json& j);

json to_json(const GelfandData& g);
GelfandData gelfand_from_json(const json& j);

json to_json(const GelfandComparison& c);
json to_json(const UcpReport& r);
json to_json(const GaugeReport& r);
json to_json(const GrigoryanReport& r);
json to_json(const HeatKernelComparison& r);
json to_json(const SpectralEstimateReport& r);
json to_json(const FieldCoefficients& u);

/// Columnar text with a header row; one row per (time, node).
std::string heat_trace_table(const HeatTrace& h);
/// node coordinates, value, covered, observed, contributing sources.
std::string recovered_potential_table(const RecoveredPotential& r);
std::string comparison_table(const GelfandComparison& c);
std::string spectrum_table(const SpectralModel& model);

void write_text(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);

} // namespace logcal

#endif // LOGCAL_SERIALIZATION_HPP
