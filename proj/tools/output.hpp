#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrwp/experiments.hpp"
#include "mrwp/flooding.hpp"
#include "mrwp/zones.hpp"

namespace mrwp::cli {

using nlohmann::json;

/// Shortest round-trip decimal form, independent of the locale.
std::string format_double(double x);

json to_json(const WorldParams& p);
json to_json(const AssumptionReport& a);
/// Summary of one run; wall time is left out so repeated runs compare equal byte for byte.
json to_json(const RunRecord& r);
json to_json(const ScalingRow& row);
json to_json(const LowerBoundResult& r);
json to_json(const SweepRow& row);

/// Metadata block embedded in every output.
json metadata(const json& resolved_config);

class CsvWriter {
public:
    CsvWriter(std::vector<std::string> header, const json& meta);

    CsvWriter& cell(double x);
    CsvWriter& cell(std::int64_t x);
    CsvWriter& cell(int x) { return cell(static_cast<std::int64_t>(x)); }
    CsvWriter& cell(std::string_view s);
    void end_row();

    const std::string& str() const { return out_; }

private:
    std::string out_;
    bool row_open_ = false;
};

/// Grayscale raster with black at the maximum value; `values` is row-major with row 0 at the bottom.
std::string grayscale_svg(int cols, int rows, std::span<const double> values, const json& meta, double pixel = 6.0);

std::string zone_map_svg(const ZoneMap& z, const json& meta);

/// Writes atomically enough for a CLI: throws std::runtime_error naming the path on failure.
void write_file(const std::filesystem::path& path, const std::string& contents);

} // namespace mrwp::cli
