#pragma once

// Minimal deterministic SVG line charts of a scenario's dispatch.

#include "pvdg/csv_io.hpp"
#include "pvdg/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

namespace pvdg {

struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<double> values;
    double stroke_width = 1.0;
    bool dashed = false;
};

struct Plot {
    std::string title;
    std::string y_label;
    std::vector<PlotSeries> series;
};

inline std::string xml_escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string render_svg(const Plot& plot, std::size_t points)
{
    constexpr double width = 1000, height = 320, left = 70, right = 170, top = 40, bottom = 40;
    const double plot_w = width - left - right, plot_h = height - top - bottom;

    double y_max = 0.0;
    for (const auto& s : plot.series)
        for (double v : s.values) y_max = std::max(y_max, v);
    if (y_max <= 0.0) y_max = 1.0;
    const double x_span = points > 1 ? static_cast<double>(points - 1) : 1.0;
    auto fx = [&](std::size_t i) { return csv::fixed(left + plot_w * static_cast<double>(i) / x_span, 2); };
    auto fy = [&](double v) { return csv::fixed(top + plot_h * (1.0 - std::max(0.0, v) / y_max), 2); };
    auto num = [](double v) { return csv::fixed(v, 0); };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(left) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" + xml_escape(plot.title) + "</text>\n";
    s += "<g stroke=\"black\" stroke-width=\"1\">\n";
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" + num(top + plot_h) + "\"/>\n";
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(left + plot_w) + "\" y2=\"" +
         num(top + plot_h) + "\"/>\n";
    s += "</g>\n";
    s += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(top + 4) + "\" text-anchor=\"end\">" + csv::fixed(y_max, 1) + "</text>\n";
    s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(top + plot_h + 4) + "\" text-anchor=\"end\">0</text>\n";
    s += "<text x=\"" + num(left) + "\" y=\"" + num(height - 12) + "\">step 0</text>\n";
    s += "<text x=\"" + num(left + plot_w) + "\" y=\"" + num(height - 12) + "\" text-anchor=\"end\">step " +
         std::to_string(points == 0 ? 0 : points - 1) + "</text>\n";
    s += "<text x=\"14\" y=\"" + num(top + plot_h / 2) + "\" transform=\"rotate(-90 14 " + num(top + plot_h / 2) +
         ")\" text-anchor=\"middle\">" + xml_escape(plot.y_label) + "</text>\n";
    s += "</g>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& ser = plot.series[k];
        s += "<polyline fill=\"none\" stroke=\"" + ser.color + "\" stroke-width=\"" + csv::fixed(ser.stroke_width, 1) + "\"";
        if (ser.dashed) s += " stroke-dasharray=\"6 3\"";
        s += " points=\"";
        for (std::size_t i = 0; i < ser.values.size(); ++i) {
            if (i) s += ' ';
            s += fx(i) + ',' + fy(ser.values[i]);
        }
        s += "\"/>\n";
        const double ly = top + 14.0 + 18.0 * static_cast<double>(k);
        s += "<line x1=\"" + num(width - right + 10) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(width - right + 34) +
             "\" y2=\"" + num(ly) + "\" stroke=\"" + ser.color + "\" stroke-width=\"" + csv::fixed(ser.stroke_width, 1) + "\"" +
             (ser.dashed ? " stroke-dasharray=\"6 3\"" : "") + "/>\n";
        s += "<text x=\"" + num(width - right + 40) + "\" y=\"" + num(ly + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + xml_escape(ser.label) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

/// The four dispatch panels: load vs available supply, grid, PV, per-generator power.
inline std::vector<std::pair<std::string, Plot>> dispatch_plots(const ScenarioResult& r)
{
    const std::size_t n = r.schedule.size();
    std::vector<double> load(n), available(n), grid_cap(n), grid(n), pv_av(n), pv_disp(n), pv_exp(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& in = r.steps[t].inputs;
        const auto& d = r.schedule[t];
        load[t] = in.load_kw;
        grid_cap[t] = in.grid_capability_kw();
        available[t] = in.pv_available_kw + grid_cap[t];
        grid[t] = d.grid_import_kw;
        pv_av[t] = in.pv_available_kw;
        pv_disp[t] = d.pv_dispatch_kw;
        pv_exp[t] = d.export_kw;
    }
    static const char* palette[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#8c564b"};

    std::vector<std::pair<std::string, Plot>> out;
    out.push_back({"panel_a_load.svg",
                   Plot{r.name + ": load and available power", "kW",
                        {{"load", "#1f77b4", load, 1.0, true}, {"PV + grid available", "#d62728", available, 1.0, false}}}});
    out.push_back({"panel_b_grid.svg",
                   Plot{r.name + ": grid", "kW",
                        {{"grid available", "#1f77b4", grid_cap, 1.0, true}, {"grid dispatched", "#d62728", grid, 1.0, false}}}});
    out.push_back({"panel_c_pv.svg", Plot{r.name + ": PV array", "kW",
                                          {{"PV available", "#1f77b4", pv_av, 1.0, true},
                                           {"PV to load", "#d62728", pv_disp, 1.0, false},
                                           {"PV exported", "#d62728", pv_exp, 2.5, false}}}});
    Plot dg{r.name + ": diesel generators", "kW", {}};
    for (std::size_t i = 0; i < r.fleet.size(); ++i) {
        std::vector<double> p(n);
        for (std::size_t t = 0; t < n; ++t) p[t] = r.schedule[t].dg_kw[i];
        dg.series.push_back({r.fleet[i].id, palette[i % 6], std::move(p), 1.0, false});
    }
    out.push_back({"panel_d_diesel.svg", std::move(dg)});
    return out;
}

/// Writes one SVG document per panel into `output_dir`; returns the written paths.
inline std::vector<std::filesystem::path> render_plots(const ScenarioResult& r, const std::filesystem::path& output_dir)
{
    std::vector<std::filesystem::path> written;
    for (const auto& [file, plot] : dispatch_plots(r)) {
        const auto path = output_dir / file;
        csv::write_file(path, render_svg(plot, r.schedule.size()));
        written.push_back(path);
    }
    return written;
}

} // namespace pvdg
