#pragma once

// CSV ingestion and serialization. Numbers are written in fixed-point with
// std::to_chars, independent of the process locale.

#include "pvdg/errors.hpp"
#include "pvdg/scenario.hpp"
#include "pvdg/solar_model.hpp"
#include "pvdg/timestamp.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace pvdg {

namespace csv {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

/// Fixed-point with the given number of decimals; never prints "-0.000000".
inline std::string fixed(double v, int decimals = 6)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    std::string s(buf, res.ptr);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

/// Reads a file into lines; throws DataError when it cannot be opened.
inline std::vector<std::string> read_lines(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

inline DataError row_error(const std::filesystem::path& path, std::size_t line_no, const std::string& msg)
{
    return DataError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
}

inline bool blank(std::string_view s) { return trim(s).empty(); }

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << content;
    if (!out) throw DataError(path.string() + ": write failed");
}

} // namespace csv

/// Columns timestamp,G,Gb,Gd,Ta with optional trailing Gt and/or alpha_g (in that order).
inline std::vector<WeatherRecord> load_weather_csv(const std::filesystem::path& path)
{
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw csv::row_error(path, 1, "missing header");
    const auto header = csv::split(lines[0]);
    const std::vector<std::string_view> required{"timestamp", "G", "Gb", "Gd", "Ta"};
    if (header.size() < required.size() || !std::equal(required.begin(), required.end(), header.begin()))
        throw csv::row_error(path, 1, "header must start with timestamp,G,Gb,Gd,Ta");
    int col_gt = -1, col_alpha = -1;
    for (std::size_t c = required.size(); c < header.size(); ++c) {
        if (header[c] == "Gt" && col_gt < 0 && col_alpha < 0)
            col_gt = static_cast<int>(c);
        else if (header[c] == "alpha_g" && col_alpha < 0)
            col_alpha = static_cast<int>(c);
        else
            throw csv::row_error(path, 1, "unexpected column '" + std::string(header[c]) + "'");
    }

    std::vector<WeatherRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (csv::blank(lines[i])) continue;
        const auto f = csv::split(lines[i]);
        if (f.size() != header.size())
            throw csv::row_error(path, line_no, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
        WeatherRecord r;
        const auto ts = parse_timestamp(f[0]);
        if (!ts) throw csv::row_error(path, line_no, "invalid timestamp '" + std::string(f[0]) + "'");
        r.timestamp = *ts;
        auto num = [&](std::size_t c, const char* name) {
            const auto v = csv::parse_double(f[c]);
            if (!v) throw csv::row_error(path, line_no, std::string("invalid number in column ") + name);
            return *v;
        };
        r.global = num(1, "G");
        r.beam = num(2, "Gb");
        r.diffuse = num(3, "Gd");
        r.ambient_temp = num(4, "Ta");
        if (r.global < 0.0 || r.beam < 0.0 || r.diffuse < 0.0)
            throw csv::row_error(path, line_no, "irradiance must be non-negative");
        if (r.beam + r.diffuse > r.global * (1.0 + kSplitSlack))
            throw csv::row_error(path, line_no, "beam+diffuse exceeds global");
        if (col_gt >= 0) {
            r.tilted = num(static_cast<std::size_t>(col_gt), "Gt");
            if (*r.tilted < 0.0) throw csv::row_error(path, line_no, "Gt must be non-negative");
        }
        if (col_alpha >= 0) {
            const auto a = f[static_cast<std::size_t>(col_alpha)];
            if (a != "0" && a != "1") throw csv::row_error(path, line_no, "alpha_g must be 0 or 1");
            r.grid_status = a == "1" ? 1 : 0;
        }
        if (!out.empty() && r.timestamp <= out.back().timestamp)
            throw csv::row_error(path, line_no, "timestamps must be strictly increasing");
        if (out.size() >= 2 && r.timestamp - out.back().timestamp != out[1].timestamp - out[0].timestamp)
            throw csv::row_error(path, line_no, "non-uniform time step");
        out.push_back(r);
    }
    return out;
}

/// Columns timestamp,P_load with an optional trailing alpha_g.
inline std::vector<LoadRecord> load_load_csv(const std::filesystem::path& path)
{
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw csv::row_error(path, 1, "missing header");
    const auto header = csv::split(lines[0]);
    const bool with_alpha = header.size() == 3 && header[2] == "alpha_g";
    if (header.size() < 2 || header[0] != "timestamp" || header[1] != "P_load" || (header.size() > 2 && !with_alpha))
        throw csv::row_error(path, 1, "header must be timestamp,P_load[,alpha_g]");

    std::vector<LoadRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (csv::blank(lines[i])) continue;
        const auto f = csv::split(lines[i]);
        if (f.size() != header.size())
            throw csv::row_error(path, line_no, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
        LoadRecord r;
        const auto ts = parse_timestamp(f[0]);
        if (!ts) throw csv::row_error(path, line_no, "invalid timestamp '" + std::string(f[0]) + "'");
        r.timestamp = *ts;
        const auto p = csv::parse_double(f[1]);
        if (!p) throw csv::row_error(path, line_no, "invalid number in column P_load");
        if (*p < 0.0) throw csv::row_error(path, line_no, "load must be non-negative");
        r.load_kw = *p;
        if (with_alpha) {
            if (f[2] != "0" && f[2] != "1") throw csv::row_error(path, line_no, "alpha_g must be 0 or 1");
            r.grid_status = f[2] == "1" ? 1 : 0;
        }
        if (!out.empty() && r.timestamp <= out.back().timestamp)
            throw csv::row_error(path, line_no, "timestamps must be strictly increasing");
        if (out.size() >= 2 && r.timestamp - out.back().timestamp != out[1].timestamp - out[0].timestamp)
            throw csv::row_error(path, line_no, "non-uniform time step");
        out.push_back(r);
    }
    return out;
}

inline std::string weather_csv_text(std::span<const WeatherRecord> weather)
{
    std::string s = "timestamp,G,Gb,Gd,Ta\n";
    for (const auto& w : weather) {
        s += format_timestamp(w.timestamp) + ',' + csv::fixed(w.global) + ',' + csv::fixed(w.beam) + ',' +
             csv::fixed(w.diffuse) + ',' + csv::fixed(w.ambient_temp) + '\n';
    }
    return s;
}

inline std::string load_csv_text(std::span<const LoadRecord> load)
{
    std::string s = "timestamp,P_load\n";
    for (const auto& l : load) s += format_timestamp(l.timestamp) + ',' + csv::fixed(l.load_kw) + '\n';
    return s;
}

inline std::string dispatch_csv_header(std::span<const DieselGenSpec> fleet)
{
    std::string s = "timestamp,P_load,P_av_pv,alpha_g,P_disp_g,P_exp,P_disp_pv,P_curtail";
    for (const auto& g : fleet) s += ",S_" + g.id + ",P_disp_dg_" + g.id + ",fuel_" + g.id;
    return s + '\n';
}

/// One row per step; per-generator columns S, P_disp_dg and fuel follow the fixed columns.
inline std::string dispatch_csv_text(const ScenarioResult& r)
{
    std::string s = dispatch_csv_header(r.fleet);
    for (std::size_t t = 0; t < r.schedule.size(); ++t) {
        const auto& in = r.steps[t].inputs;
        const auto& d = r.schedule[t];
        s += format_timestamp(r.steps[t].timestamp);
        for (double v : {in.load_kw, in.pv_available_kw}) s += ',' + csv::fixed(v);
        s += ',' + std::to_string(in.grid_status);
        for (double v : {d.grid_import_kw, d.export_kw, d.pv_dispatch_kw, d.curtail_kw}) s += ',' + csv::fixed(v);
        for (std::size_t i = 0; i < r.fleet.size(); ++i)
            s += std::string(",") + (d.state[i] ? "1" : "0") + ',' + csv::fixed(d.dg_kw[i]) + ',' + csv::fixed(d.fuel_lph[i]);
        s += '\n';
    }
    return s;
}

inline void write_dispatch_csv(const ScenarioResult& r, const std::filesystem::path& path)
{
    csv::write_file(path, dispatch_csv_text(r));
}

struct DispatchRow {
    Timestamp timestamp{};
    double load_kw = 0.0;
    double pv_available_kw = 0.0;
    int grid_status = 0;
    double grid_import_kw = 0.0;
    double export_kw = 0.0;
    double pv_dispatch_kw = 0.0;
    double curtail_kw = 0.0;
    std::vector<int> status;
    std::vector<double> dg_kw;
    std::vector<double> fuel_lph;
};

struct DispatchTable {
    std::vector<std::string> generator_ids;
    std::vector<DispatchRow> rows;
};

inline DispatchTable read_dispatch_csv(const std::filesystem::path& path)
{
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw csv::row_error(path, 1, "missing header");
    const auto header = csv::split(lines[0]);
    constexpr std::size_t fixed_cols = 8;
    if (header.size() < fixed_cols || (header.size() - fixed_cols) % 3 != 0)
        throw csv::row_error(path, 1, "unexpected dispatch header");
    DispatchTable table;
    for (std::size_t c = fixed_cols; c < header.size(); c += 3) {
        const auto h = header[c];
        if (h.substr(0, 2) != "S_") throw csv::row_error(path, 1, "expected S_<id> column");
        table.generator_ids.emplace_back(h.substr(2));
    }
    const std::size_t n = table.generator_ids.size();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (csv::blank(lines[i])) continue;
        const auto f = csv::split(lines[i]);
        if (f.size() != header.size()) throw csv::row_error(path, line_no, "field count mismatch");
        auto num = [&](std::size_t c) {
            const auto v = csv::parse_double(f[c]);
            if (!v) throw csv::row_error(path, line_no, "invalid number in column " + std::string(header[c]));
            return *v;
        };
        DispatchRow r;
        const auto ts = parse_timestamp(f[0]);
        if (!ts) throw csv::row_error(path, line_no, "invalid timestamp");
        r.timestamp = *ts;
        r.load_kw = num(1);
        r.pv_available_kw = num(2);
        r.grid_status = static_cast<int>(num(3));
        r.grid_import_kw = num(4);
        r.export_kw = num(5);
        r.pv_dispatch_kw = num(6);
        r.curtail_kw = num(7);
        for (std::size_t g = 0; g < n; ++g) {
            r.status.push_back(static_cast<int>(num(fixed_cols + 3 * g)));
            r.dg_kw.push_back(num(fixed_cols + 3 * g + 1));
            r.fuel_lph.push_back(num(fixed_cols + 3 * g + 2));
        }
        table.rows.push_back(std::move(r));
    }
    return table;
}

namespace detail {

struct SummaryRow {
    const char* key;
    const char* label;
    double (*get)(const CaseSummary&);
    bool needs_pv;
};

inline const std::vector<SummaryRow>& summary_rows()
{
    static const std::vector<SummaryRow> rows{
        {"E_disp_g_MWh", "E_disp.g (MWh)", [](const CaseSummary& s) { return s.energy.grid; }, false},
        {"E_disp_dg_MWh", "E_disp.dg (MWh)", [](const CaseSummary& s) { return s.energy.diesel; }, false},
        {"E_disp_pv_MWh", "E_disp.pv (MWh)", [](const CaseSummary& s) { return s.energy.pv; }, true},
        {"E_exp_MWh", "E_exp (MWh)", [](const CaseSummary& s) { return s.energy.exported; }, true},
        {"E_curtail_MWh", "E_curtail (MWh)", [](const CaseSummary& s) { return s.energy.curtailed; }, true},
        {"C_disp_g_k$", "C_disp.g (k$)", [](const CaseSummary& s) { return s.cost.grid; }, false},
        {"C_disp_dg_k$", "C_disp.dg (k$)", [](const CaseSummary& s) { return s.cost.diesel; }, false},
        {"C_fuel_k$", "  fuel (k$)", [](const CaseSummary& s) { return s.cost.fuel; }, false},
        {"C_startstop_k$", "  start/stop (k$)", [](const CaseSummary& s) { return s.cost.transitions; }, false},
        {"C_om_k$", "  O&M (k$)", [](const CaseSummary& s) { return s.cost.om; }, false},
        {"C_export_credit_k$", "Export credit (k$)", [](const CaseSummary& s) { return s.cost.export_credit; }, true},
        {"Total_k$", "Total (k$)", [](const CaseSummary& s) { return s.cost.total; }, false},
    };
    return rows;
}

inline std::string pad_left(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string pad_right(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

} // namespace detail

/// Metrics table, one column per case.
inline std::string summary_csv_text(std::span<const CaseSummary> summaries)
{
    std::string s = "metric";
    for (const auto& c : summaries) s += ',' + c.name;
    s += '\n';
    for (const auto& row : detail::summary_rows()) {
        s += row.key;
        for (const auto& c : summaries) s += ',' + ((row.needs_pv && !c.has_pv) ? std::string("N/A") : csv::fixed(row.get(c)));
        s += '\n';
    }
    return s;
}

inline std::string reductions_csv_text(std::span<const CaseSummary> summaries, const ComparisonReport& report)
{
    std::string s = "case,baseline,reduction_pct\n";
    for (const auto& r : report.reductions)
        s += summaries[r.case_index].name + ',' + summaries[r.baseline_index].name + ',' + csv::fixed(r.percent, 2) + '\n';
    return s;
}

/// Aligned text table with a cost-reduction footer.
inline std::string summary_table_text(std::span<const CaseSummary> summaries, const ComparisonReport* report)
{
    constexpr std::size_t label_w = 20, col_w = 12;
    std::string s = detail::pad_right("", label_w);
    for (const auto& c : summaries) s += detail::pad_left(c.name, col_w);
    s += '\n';
    for (const auto& row : detail::summary_rows()) {
        s += detail::pad_right(row.label, label_w);
        for (const auto& c : summaries)
            s += detail::pad_left((row.needs_pv && !c.has_pv) ? std::string("N/A") : csv::fixed(row.get(c), 2), col_w);
        s += '\n';
    }
    if (report && !report->reductions.empty()) {
        s += '\n';
        std::optional<std::size_t> current;
        for (const auto& r : report->reductions) {
            if (current != r.case_index) {
                if (current) s += '\n';
                s += summaries[r.case_index].name + " cost reduction: ";
                current = r.case_index;
            } else {
                s += " / ";
            }
            s += r.text + " vs " + summaries[r.baseline_index].name;
        }
        s += '\n';
    }
    return s;
}

/// Writes `path` (CSV metrics), `path` with .txt (aligned table) and, when a comparison is given,
/// `<stem>_reductions.csv`.
inline void write_summary(std::span<const CaseSummary> summaries, const ComparisonReport* report,
                          const std::filesystem::path& path)
{
    csv::write_file(path, summary_csv_text(summaries));
    auto txt = path;
    txt.replace_extension(".txt");
    csv::write_file(txt, summary_table_text(summaries, report));
    if (report) {
        auto red = path;
        red.replace_filename(path.stem().string() + "_reductions.csv");
        csv::write_file(red, reductions_csv_text(summaries, *report));
    }
}

} // namespace pvdg
