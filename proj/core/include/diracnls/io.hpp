#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "diracnls/bootstrap.hpp"
#include "diracnls/fields.hpp"
#include "diracnls/linear_spectrum.hpp"
#include "diracnls/perturbation.hpp"

namespace diracnls {

/// Ordered key/value pairs written at the top of every output file.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest representation that reads back to the same double.
std::string format_double(double x);
/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_escape(const std::string& field);

void write_field_csv(const std::filesystem::path& path, const BlochField& field, const Metadata& meta);
/// Throws StructuralError unless the rows match the given index set.
BlochField read_field_csv(const std::filesystem::path& path, std::shared_ptr<const IndexSet> set);

/// Rows: index, eigenvalue, class, residual.
void write_spectrum_csv(const std::filesystem::path& path, const ClassifiedSpectrum& spectrum, const Metadata& meta);

void write_report_json(const std::filesystem::path& path, const PerturbationReport& report, const Metadata& meta);
PerturbationReport read_report_json(const std::filesystem::path& path);

/// Mode scalars go to JSON; the field is referenced by file name and written next to it.
void write_mode(const std::filesystem::path& json_path, const std::filesystem::path& field_path,
                const ModeResult& mode, const std::string& label, const Metadata& meta);
/// Reads a mode JSON and the field CSV it names.
ModeResult read_mode(const std::filesystem::path& json_path, std::shared_ptr<const IndexSet> set);

void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve, const Metadata& meta);
void write_landscape_csv(const std::filesystem::path& path, const std::vector<LandscapePoint>& points,
                         const Metadata& meta);

}  // namespace diracnls
