#include "fastcharge/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "fastcharge/csv.hpp"
#include "fastcharge/errors.hpp"
#include "fastcharge/text_util.hpp"

namespace fastcharge {

namespace {

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v, double step)
{
    const int digits = std::max(0, -static_cast<int>(std::floor(std::log10(step) + 1e-9)));
    return format("%.*f", digits, v);
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target)
{
    if (!(hi > lo)) {
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
        lo -= pad;
        hi += pad;
    }
    const double raw = (hi - lo) / std::max(target, 1);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double t = std::floor(lo / step) * step; t <= hi + step * 0.5; t += step) ticks.push_back(t);
    return ticks;
}

std::string render_svg(const Chart& chart, int width, int height)
{
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : chart.series)
        for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    if (!std::isfinite(x0)) throw EmptySeries("chart '" + chart.title + "' has no finite points");
    const auto xt = nice_ticks(x0, x1);
    const auto yt = nice_ticks(y0, y1);
    x0 = xt.front();
    x1 = xt.back();
    y0 = yt.front();
    y1 = yt.back();

    const double left = 70, right = 170, top = 40, bottom = 55;
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double x) {
        const double f = (x - x0) / (x1 - x0);
        return left + (chart.reverse_x ? 1.0 - f : f) * pw;
    };
    auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::string svg = format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                             "font-family=\"sans-serif\" font-size=\"12\">\n", width, height);
    svg += format("<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n", width, height);
    svg += format("<text x=\"%.1f\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">%s</text>\n",
                  left + pw / 2, escape(chart.title).c_str());
    const double xstep = xt.size() > 1 ? xt[1] - xt[0] : 1.0;
    const double ystep = yt.size() > 1 ? yt[1] - yt[0] : 1.0;
    for (double t : xt) {
        svg += format("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#e0e0e0\"/>\n", px(t), top,
                      px(t), top + ph);
        svg += format("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n", px(t), top + ph + 16,
                      tick_label(t, xstep).c_str());
    }
    for (double t : yt) {
        svg += format("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#e0e0e0\"/>\n", left, py(t),
                      left + pw, py(t));
        svg += format("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%s</text>\n", left - 6, py(t) + 4,
                      tick_label(t, ystep).c_str());
    }
    svg += format("<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                  left, top, pw, ph);
    svg += format("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n", left + pw / 2,
                  double(height) - 14, escape(chart.x_label).c_str());
    svg += format("<text transform=\"translate(18,%.1f) rotate(-90)\" text-anchor=\"middle\">%s</text>\n",
                  top + ph / 2, escape(chart.y_label).c_str());

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const char* colour = palette[i % std::size(palette)];
        std::string points;
        for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k)
            if (std::isfinite(s.x[k]) && std::isfinite(s.y[k]))
                points += format("%.2f,%.2f ", px(s.x[k]), py(s.y[k]));
        svg += format("<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.6\" points=\"%s\"/>\n", colour,
                      points.c_str());
        const double ly = top + 14 + 18.0 * double(i);
        svg += format("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                      left + pw + 12, ly, left + pw + 34, ly, colour);
        svg += format("<text x=\"%.1f\" y=\"%.1f\">%s</text>\n", left + pw + 40, ly + 4, escape(s.label).c_str());
    }
    svg += "</svg>\n";
    return svg;
}

void write_svg(const Chart& chart, const std::filesystem::path& path)
{
    const std::string svg = render_svg(chart);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << svg;
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::vector<double> column(const CsvTable& t, const std::string& name, const std::string& where)
{
    const std::size_t c = t.column(name);
    std::vector<double> v;
    v.reserve(t.rows.size());
    for (const auto& r : t.rows) v.push_back(r[c] == "nan" ? std::nan("") : parse_double(r[c], where));
    return v;
}

/// Splits rows into one series per value of `group` (in first-seen order).
std::vector<Series> grouped(const CsvTable& t, const std::string& group, const std::string& xs,
                            const std::string& ys, const std::string& where, const std::string& filter_col = {},
                            const std::string& filter_val = {})
{
    const std::size_t g = t.column(group);
    const std::size_t fc = filter_col.empty() ? 0 : t.column(filter_col);
    const auto x = column(t, xs, where);
    const auto y = column(t, ys, where);
    std::vector<Series> out;
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        if (!filter_col.empty() && t.rows[k][fc] != filter_val) continue;
        const std::string& key = t.rows[k][g];
        auto [it, inserted] = index.try_emplace(key, out.size());
        if (inserted) out.push_back({key, {}, {}});
        out[it->second].x.push_back(x[k]);
        out[it->second].y.push_back(y[k]);
    }
    return out;
}

std::string header_of(const CsvTable& t)
{
    std::string h;
    for (std::size_t k = 0; k < t.header.size(); ++k) h += (k ? "," : "") + t.header[k];
    return h;
}

}  // namespace

std::vector<std::filesystem::path> plot_file(const std::filesystem::path& csv)
{
    const CsvTable t = read_csv(csv);
    const std::string h = header_of(t);
    const std::string where = csv.string();
    const std::string stem = csv.stem().string();
    auto out = [&](const std::string& suffix) { return csv.parent_path() / (stem + suffix + ".svg"); };
    std::vector<std::filesystem::path> written;
    auto emit = [&](const Chart& c, const std::filesystem::path& p) {
        write_svg(c, p);
        written.push_back(p);
    };

    if (h == "soh,v_cutoff") {
        emit({"Charge cut-off voltage vs SoH", "SoH", "V_cutoff (V)",
              {{"CC-COP map", column(t, "soh", where), column(t, "v_cutoff", where)}}, true},
             out(""));
    } else if (h == "episode,reward,max_V,min_eta_side,charge_minutes") {
        const auto ep = column(t, "episode", where);
        emit({"Evaluation reward", "episode", "cumulative reward", {{"reward", ep, column(t, "reward", where)}}},
             out("_reward"));
        emit({"Charge cut-off voltage", "episode", "max voltage (V)", {{"max V", ep, column(t, "max_V", where)}}},
             out("_voltage"));
        emit({"Minimum anode overpotential", "episode", "min eta_side (V)",
              {{"min eta_side", ep, column(t, "min_eta_side", where)}}},
             out("_eta"));
        emit({"Charging time", "episode", "minutes", {{"charge time", ep, column(t, "charge_minutes", where)}}},
             out("_time"));
    } else if (h == "strategy,cycle,efc,soh") {
        emit({"SoH vs equivalent full cycles", "EFC", "SoH", grouped(t, "strategy", "efc", "soh", where)}, out(""));
    } else if (h == "strategy,cycle,soh,charge_minutes") {
        Chart c{"Charging time vs SoH", "SoH", "charge time (min)",
                grouped(t, "strategy", "soh", "charge_minutes", where), true};
        emit(c, out(""));
    } else if (t.header.size() > 2 && t.header[0] == "strategy" && t.header[1] == "cycle" && t.header[2] == "t_s") {
        const std::size_t cc = t.column("cycle");
        std::vector<std::string> cycles;
        for (const auto& r : t.rows)
            if (std::find(cycles.begin(), cycles.end(), r[cc]) == cycles.end()) cycles.push_back(r[cc]);
        for (const auto& cy : cycles) {
            emit({"Charging current, cycle " + cy, "time (s)", "current (A)",
                  grouped(t, "strategy", "t_s", "I_A", where, "cycle", cy)},
                 out("_current_cycle" + cy));
            emit({"Anode overpotential, cycle " + cy, "time (s)", "eta_side (V)",
                  grouped(t, "strategy", "t_s", "eta_side_V", where, "cycle", cy)},
                 out("_eta_cycle" + cy));
        }
    } else if (h == trace_header) {
        const auto ts = column(t, "t_s", where);
        emit({"Terminal voltage", "time (s)", "V", {{"V", ts, column(t, "V_V", where)}}}, out("_voltage"));
        emit({"Current", "time (s)", "A", {{"I", ts, column(t, "I_A", where)}}}, out("_current"));
        emit({"Anode overpotential", "time (s)", "V", {{"eta_side", ts, column(t, "eta_side_V", where)}}},
             out("_eta"));
        emit({"State of charge", "time (s)", "SoC", {{"SoC", ts, column(t, "SoC", where)}}}, out("_soc"));
    }
    return written;
}

std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> csvs;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") csvs.push_back(e.path());
    std::sort(csvs.begin(), csvs.end());
    std::vector<std::filesystem::path> written;
    for (const auto& c : csvs) {
        auto w = plot_file(c);
        written.insert(written.end(), w.begin(), w.end());
    }
    return written;
}

}  // namespace fastcharge
