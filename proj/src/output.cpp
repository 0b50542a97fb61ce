#include "khsim/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "khsim/errors.hpp"

namespace khsim {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_num(std::string_view s) {
    if (s == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InputError("bad number '" + std::string(s) + "' in CSV");
    }
    return v;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write '" + path + "'");
    }
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw InputError("write to '" + path + "' failed");
    }
}

}  // namespace

void write_csv(const TimeSeries& series, const std::string& path, const Metadata& metadata) {
    if (series.size() == 0) {
        throw InputError("cannot write an empty series");
    }
    auto out = open_out(path);
    for (const auto& [key, value] : metadata) {
        out << "# " << key << ": " << value << '\n';
    }
    out << "# t_ref: " << num(series.t_ref) << '\n';
    for (int k = 0; k < series.n_dof(); ++k) {
        const auto ku = static_cast<std::size_t>(k);
        out << "# scale." << series.labels[ku] << ": " << num(series.charge_scale[ku]) << ','
            << num(series.flux_scale[ku]) << '\n';
    }
    out << "t,t_norm";
    for (const auto& label : series.labels) {
        out << ",q" << label << ",phi" << label;
    }
    out << ",energy,dissipation\n";
    const auto nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << num(series.times[i]) << ',' << num(series.times[i] / series.t_ref);
        for (int k = 0; k < series.n_dof(); ++k) {
            const auto ku = static_cast<std::size_t>(k);
            out << ',' << num(series.charge[ku][i]) << ',' << num(series.flux[ku][i]);
        }
        out << ',' << num(i < series.energy.size() ? series.energy[i] : nan) << ','
            << num(i < series.dissipation.size() ? series.dissipation[i] : nan) << '\n';
    }
    finish(out, path);
}

CsvContents read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    CsvContents c;
    std::map<std::string, std::pair<double, double>> scales;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ");
            if (colon == std::string::npos) {
                continue;
            }
            const std::string key = line.substr(2, colon - 2);
            const std::string value = line.substr(colon + 2);
            if (key == "t_ref") {
                c.series.t_ref = parse_num(value);
            } else if (key.rfind("scale.", 0) == 0) {
                const auto parts = split_commas(value);
                if (parts.size() != 2) {
                    throw InputError("bad scale line in CSV");
                }
                scales[key.substr(6)] = {parse_num(parts[0]), parse_num(parts[1])};
            } else {
                c.metadata[key] = value;
            }
            continue;
        }
        const auto cells = split_commas(line);
        if (!header) {
            if (cells.size() < 4 || cells.size() % 2 != 0 || cells[0] != "t" || cells[1] != "t_norm") {
                throw InputError("unexpected CSV header");
            }
            for (std::size_t i = 2; i + 2 < cells.size(); i += 2) {
                const std::string label = cells[i].substr(1);
                c.series.labels.push_back(label);
                const auto it = scales.find(label);
                c.series.charge_scale.push_back(it == scales.end() ? 1.0 : it->second.first);
                c.series.flux_scale.push_back(it == scales.end() ? 1.0 : it->second.second);
            }
            c.series.charge.resize(c.series.labels.size());
            c.series.flux.resize(c.series.labels.size());
            header = true;
            continue;
        }
        if (cells.size() != 4 + 2 * c.series.labels.size()) {
            throw InputError("CSV row has the wrong number of cells");
        }
        c.series.times.push_back(parse_num(cells[0]));
        for (std::size_t k = 0; k < c.series.labels.size(); ++k) {
            c.series.charge[k].push_back(parse_num(cells[2 + 2 * k]));
            c.series.flux[k].push_back(parse_num(cells[3 + 2 * k]));
        }
        c.series.energy.push_back(parse_num(cells[cells.size() - 2]));
        c.series.dissipation.push_back(parse_num(cells.back()));
    }
    if (!header) {
        throw InputError("CSV has no header");
    }
    return c;
}

void write_svg(const TimeSeries& series, std::pair<int, int> pair, const std::string& path, const std::string& title) {
    if (series.size() < 2) {
        throw InputError("plot needs at least 2 points");
    }
    const auto [ka, kb] = pair;
    if (ka < 0 || kb < 0 || ka >= series.n_dof() || kb >= series.n_dof()) {
        throw InputError("plot pair out of range");
    }
    constexpr double width = 900.0;
    constexpr double height = 360.0;
    constexpr double left = 60.0;
    constexpr double right = 20.0;
    constexpr double top = 30.0;
    constexpr double bottom = 40.0;
    const double x0 = series.times.front() / series.t_ref;
    const double x1 = series.times.back() / series.t_ref;
    double ymax = 0.0;
    for (const int k : {ka, kb}) {
        for (double v : series.charge[static_cast<std::size_t>(k)]) {
            ymax = std::max(ymax, std::abs(v));
        }
    }
    ymax = ymax > 0.0 ? 1.05 * ymax : 1.0;
    const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
    const auto py = [&](double y) { return top + (ymax - y) / (2.0 * ymax) * (height - top - bottom); };

    // at most ~4000 vertices per trace
    const std::size_t stride = std::max<std::size_t>(1, series.size() / 4000);
    auto out = open_out(path);
    char buf[320];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        out << "<text x=\"" << left << "\" y=\"18\">" << title << "</text>\n";
    }
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
                  py(0.0), width - right, py(0.0));
    out << buf;
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
                  top, left, height - bottom);
    out << buf;
    for (const double y : {-ymax / 1.05, ymax / 1.05}) {
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n", left - 4,
                      py(y) + 4, y);
        out << buf;
    }
    for (int i = 0; i <= 5; ++i) {
        const double x = x0 + (x1 - x0) * i / 5.0;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.4g</text>\n", px(x),
                      height - bottom + 16, x);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">t / t_ref</text>\n",
                  (left + width - right) / 2, height - 6);
    out << buf;

    const char* colors[2] = {"#1f77b4", "#d62728"};
    int slot = 0;
    for (const int k : {ka, kb}) {
        const auto ku = static_cast<std::size_t>(k);
        out << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << colors[slot] << "\" points=\"";
        for (std::size_t i = 0; i < series.size(); i += stride) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(series.times[i] / series.t_ref),
                          py(series.charge[ku][i]));
            out << buf;
        }
        out << "\"/>\n";
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\">&lt;q%s&gt;/Q0</text>\n",
                      width - 150, top + 8 + 16 * slot, width - 130, top + 8 + 16 * slot, colors[slot], width - 125,
                      top + 12 + 16 * slot, series.labels[ku].c_str());
        out << buf;
        ++slot;
    }
    out << "</svg>\n";
    finish(out, path);
}

}  // namespace khsim
