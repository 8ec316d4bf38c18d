#include "output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace mrwp::cli {

namespace {

json optional_int(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string xml_escape(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string svg_header(double width, double height, const json& meta)
{
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_double(width) + "\" height=\"" +
                    format_double(height) + "\" viewBox=\"0 0 " + format_double(width) + " " +
                    format_double(height) + "\" shape-rendering=\"crispEdges\">\n";
    s += "<metadata>" + xml_escape(meta.dump()) + "</metadata>\n";
    return s;
}

std::string gray(double level)
{
    // level 1 is black
    const int g = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(level, 0.0, 1.0))));
    char buf[8];
    constexpr char hex[] = "0123456789abcdef";
    buf[0] = '#';
    for (int i = 0; i < 3; ++i) {
        buf[1 + 2 * i] = hex[g >> 4];
        buf[2 + 2 * i] = hex[g & 15];
    }
    return {buf, 7};
}

} // namespace

std::string format_double(double x)
{
    if (!std::isfinite(x)) {
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

json to_json(const WorldParams& p)
{
    return {{"n", p.n},   {"L", p.L},   {"R", p.R},   {"v", p.v},
            {"seed", p.seed}, {"c1", p.c1}, {"c2", p.c2}, {"eta", p.eta}};
}

json to_json(const AssumptionReport& a)
{
    return {{"radius_ok", a.radius_ok},
            {"speed_ok", a.speed_ok},
            {"radius_threshold", a.radius_threshold},
            {"radius_slack", a.radius_slack},
            {"speed_limit", a.speed_limit},
            {"speed_slack", a.speed_slack}};
}

json to_json(const RunRecord& r)
{
    json init = {{"mode", to_string(r.init.kind)}};
    if (r.init.kind == InitMode::Kind::Warmup) {
        init["warmup_steps"] = r.init.warmup_steps.value_or(default_warmup_steps(r.params));
    }
    return {{"params", to_json(r.params)},
            {"init", init},
            {"source_rule", to_string(r.source_rule)},
            {"source", r.source},
            {"max_steps", r.max_steps},
            {"steps_run", r.steps_run},
            {"status", r.timed_out ? "TIMEOUT" : "COMPLETE"},
            {"flooding_time", optional_int(r.flooding_time)},
            {"cz_spread_time", optional_int(r.cz_spread_time)},
            {"theoretical_bound", r.theoretical_bound ? finite_or_null(*r.theoretical_bound) : json(nullptr)},
            {"constants", {{"a", r.constants.a}, {"b", r.constants.b}}},
            {"assumptions", to_json(r.assumptions)},
            {"zones_available", r.zones_available},
            {"d_far", r.d_far},
            {"frontier_bound", r.frontier_bound},
            {"violations",
             {{"frontier", r.violations.frontier},
              {"stability", r.violations.stability},
              {"stability_checks", r.violations.stability_checks}}},
            {"rng_algorithm", r.rng_algorithm}};
}

json to_json(const ScalingRow& row)
{
    return {{"n", row.n},
            {"source_rule", to_string(row.source)},
            {"params", to_json(row.params)},
            {"m", row.m},
            {"S", row.S},
            {"bound", row.bound},
            {"median_T", finite_or_null(row.median_T)},
            {"median_Tc", finite_or_null(row.median_Tc)},
            {"ratio", finite_or_null(row.ratio)},
            {"spread_constant", finite_or_null(row.spread_constant)},
            {"timeouts", row.timeouts},
            {"frontier_violations", row.frontier_violations},
            {"stability_violations", row.stability_violations},
            {"stability_checks", row.stability_checks}};
}

json to_json(const LowerBoundResult& r)
{
    return {{"d", r.scenario.d},
            {"trials", r.trials},
            {"hits", r.hits},
            {"empirical_pb", r.empirical_pb},
            {"exact_pb", r.exact_pb},
            {"bound", r.bound},
            {"floods", r.floods},
            {"f_reached", r.f_reached},
            {"completed", r.completed},
            {"violations", r.violations},
            {"min_f_time", optional_int(r.min_f_time)},
            {"min_flooding_time", optional_int(r.min_flooding_time)}};
}

json to_json(const SweepRow& row)
{
    return {{"params", to_json(row.params)},
            {"zones_ok", row.zones_ok},
            {"m", row.m},
            {"cz_size", row.cz_size},
            {"suburb_size", row.suburb_size},
            {"cz_rows", row.rows_columns.rows},
            {"cz_columns", row.rows_columns.columns},
            {"row_column_bound", row.rows_columns.bound},
            {"expansion_checked", row.expansion_checked},
            {"expansion_violations", row.expansion_violations},
            {"suburb_violations", row.suburb_violations},
            {"density_violations", row.density_violations},
            {"turn_windows", row.turns.windows},
            {"turn_violations", row.turns.violations}};
}

json metadata(const json& resolved_config)
{
    return {{"version", kVersion},
            {"rng_algorithm", RngStream::algorithm_id},
            {"seed", resolved_config.value("seed", json(nullptr))},
            {"config", resolved_config}};
}

CsvWriter::CsvWriter(std::vector<std::string> header, const json& meta)
{
    out_ = "# " + meta.dump() + "\n";
    for (std::size_t i = 0; i < header.size(); ++i) {
        out_ += (i ? "," : "") + header[i];
    }
    out_ += "\n";
}

CsvWriter& CsvWriter::cell(double x)
{
    out_ += row_open_ ? "," : "";
    out_ += format_double(x);
    row_open_ = true;
    return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t x)
{
    out_ += row_open_ ? "," : "";
    out_ += std::to_string(x);
    row_open_ = true;
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view s)
{
    out_ += row_open_ ? "," : "";
    out_ += s;
    row_open_ = true;
    return *this;
}

void CsvWriter::end_row()
{
    out_ += "\n";
    row_open_ = false;
}

std::string grayscale_svg(int cols, int rows, std::span<const double> values, const json& meta, double pixel)
{
    const double vmax = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    std::string s = svg_header(cols * pixel, rows * pixel, meta);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double v = values[static_cast<std::size_t>(r * cols + c)];
            const double level = vmax > 0.0 ? v / vmax : 0.0;
            s += "<rect x=\"" + format_double(c * pixel) + "\" y=\"" + format_double((rows - 1 - r) * pixel) +
                 "\" width=\"" + format_double(pixel) + "\" height=\"" + format_double(pixel) + "\" fill=\"" +
                 gray(level) + "\"/>\n";
        }
    }
    s += "</svg>\n";
    return s;
}

std::string zone_map_svg(const ZoneMap& z, const json& meta)
{
    const int m = z.m();
    const double pixel = std::max(2.0, 600.0 / m);
    std::vector<double> probs(static_cast<std::size_t>(z.cell_count()));
    for (int id = 0; id < z.cell_count(); ++id) {
        probs[static_cast<std::size_t>(id)] = z.probability(id);
    }
    std::string s = grayscale_svg(m, m, probs, meta, pixel);
    s.erase(s.size() - 7); // drop "</svg>\n"
    for (int id = 0; id < z.cell_count(); ++id) {
        if (z.is_central(id)) {
            continue;
        }
        s += "<rect x=\"" + format_double(z.col_of(id) * pixel) + "\" y=\"" +
             format_double((m - 1 - z.row_of(id)) * pixel) + "\" width=\"" + format_double(pixel) + "\" height=\"" +
             format_double(pixel) + "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& contents)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open output file " + path.string());
    }
    f << contents;
    f.close();
    if (!f) {
        throw std::runtime_error("failed writing output file " + path.string());
    }
}

} // namespace mrwp::cli
