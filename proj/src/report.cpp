#include "patchpert/report.hpp"
#include "patchpert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace patchpert {

std::string csv_path(const std::string& out_dir, const std::string& scenario) {
    return out_dir + "/" + scenario + ".csv";
}

void write_csv(const std::vector<SweepRecord>& records, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoFailure("cannot open " + path + " for writing");
    const auto cols = sweep_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        f << (i ? "," : "") << cols[i];
    f << "\n";
    f.precision(17);
    for (const auto& r : records) {
        bool first = true;
        for (const auto& c : cols) {
            f << (first ? "" : ",") << record_column(r, c);
            first = false;
        }
        f << "\n";
    }
    if (!f) throw IoFailure("failed writing " + path);
}

std::vector<SweepRecord> parse_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoFailure("cannot open " + path);
    std::string header;
    if (!std::getline(f, header)) throw IoFailure("empty CSV " + path);
    std::vector<std::string> cols;
    {
        std::istringstream hs(header);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    std::vector<SweepRecord> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        SweepRecord r;
        for (const auto& c : cols) {
            if (!std::getline(ls, cell, ','))
                throw IoFailure("short CSV row in " + path);
            const double v = std::strtod(cell.c_str(), nullptr);
            if (c == "eps") r.eps = v;
            else if (c == "cap_value") r.cap_value = v;
            else if (c == "e_value") r.e_value = v;
            else if (c == "chi_energy") r.chi_energy = v;
            else if (c == "zeta_energy") r.zeta_energy = v;
            else if (c == "u0_at_x") r.u0_at_x = v;
            else if (c == "ueps_at_x") r.ueps_at_x = v;
            else if (c == "predicted_delta") r.predicted_delta = v;
            else if (c == "computed_delta") r.computed_delta = v;
            else if (c == "residual_ratio") r.residual_ratio = v;
            else if (c == "compliance_0") r.compliance_0 = v;
            else if (c == "compliance_eps") r.compliance_eps = v;
            else if (c == "wall_time") r.wall_time = v;
            else if (c == "cap_flat") r.cap_flat = v;
            else if (c == "e_flat") r.e_flat = v;
            else if (c == "op_resid_dirichlet") r.op_resid_dirichlet = v;
            else if (c == "op_resid_neumann") r.op_resid_neumann = v;
            else if (c == "veps_identity_resid") r.veps_identity_resid = v;
            else if (c == "failed") r.failed = (v != 0.0);
        }
        out.push_back(r);
    }
    return out;
}

namespace {

struct Series {
    std::string name;
    std::string color;
    std::vector<double> x, y;
};

// log-log plot with slope guide lines; one polyline per series
void write_svg(const std::vector<Series>& series, const std::string& path) {
    const int W = 720, H = 480, ml = 70, mr = 170, mt = 30, mb = 50;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.y[i] > 0.0) || !(s.x[i] > 0.0)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x1 > 0.0)) {
        x0 = y0 = 0.1;
        x1 = y1 = 1.0;
    }
    if (y0 == y1) {
        y0 *= 0.5;
        y1 *= 2.0;
    }
    const double lx0 = std::log10(x0), lx1 = std::log10(x1);
    const double ly0 = std::log10(y0) - 0.1, ly1 = std::log10(y1) + 0.1;
    auto tx = [&](double x) {
        return ml + (std::log10(x) - lx0) / (lx1 - lx0) * (W - ml - mr);
    };
    auto ty = [&](double y) {
        return H - mb - (std::log10(y) - ly0) / (ly1 - ly0) * (H - mt - mb);
    };

    std::ofstream f(path);
    if (!f) throw IoFailure("cannot open " + path + " for writing");
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\">\n";
    f << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << H - mb << "\" stroke=\"black\"/>\n";
    f << "<text x=\"" << (W - mr + ml) / 2 << "\" y=\"" << H - 12
      << "\" font-size=\"13\">eps (log)</text>\n";

    // slope guides through the mid-range: eps^1 and eps^2
    for (int slope : {1, 2}) {
        const double xm = std::sqrt(x0 * x1), ym = std::sqrt(y0 * y1);
        std::ostringstream pts;
        for (double t : {x0, x1}) {
            const double yy = ym * std::pow(t / xm, slope);
            pts << tx(t) << "," << ty(std::min(std::max(yy, y0 * 1e-2), y1 * 1e2)) << " ";
        }
        f << "<polyline points=\"" << pts.str()
          << "\" fill=\"none\" stroke=\"#bbbbbb\" stroke-dasharray=\"6,4\"/>\n";
        f << "<text x=\"" << W - mr + 8 << "\" y=\"" << 360 + 20 * slope
          << "\" font-size=\"12\" fill=\"#888888\">slope " << slope << " guide</text>\n";
    }

    int li = 0;
    for (const auto& s : series) {
        std::ostringstream pts;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (s.y[i] > 0.0) pts << tx(s.x[i]) << "," << ty(s.y[i]) << " ";
        f << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\""
          << s.color << "\" stroke-width=\"1.6\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (s.y[i] > 0.0)
                f << "<circle cx=\"" << tx(s.x[i]) << "\" cy=\"" << ty(s.y[i])
                  << "\" r=\"2.6\" fill=\"" << s.color << "\"/>\n";
        f << "<text x=\"" << W - mr + 8 << "\" y=\"" << mt + 16 * li + 10
          << "\" font-size=\"12\" fill=\"" << s.color << "\">" << s.name
          << "</text>\n";
        ++li;
    }
    f << "</svg>\n";
}

} // namespace

void emit_report(const std::vector<SweepRecord>& records,
                 const std::vector<FitResult>& fits, const std::string& out_dir,
                 const std::string& scenario) {
    std::filesystem::create_directories(out_dir);
    write_csv(records, csv_path(out_dir, scenario));

    const std::vector<std::pair<std::string, std::string>> plot_cols = {
        {"cap_value", "#1f77b4"},   {"e_value", "#ff7f0e"},
        {"chi_energy", "#2ca02c"},  {"zeta_energy", "#d62728"},
        {"computed_delta", "#9467bd"}, {"predicted_delta", "#8c564b"},
        {"cap_flat", "#e377c2"},    {"e_flat", "#7f7f7f"},
        {"op_resid_dirichlet", "#bcbd22"}, {"op_resid_neumann", "#17becf"},
    };
    std::vector<Series> series;
    for (const auto& [col, color] : plot_cols) {
        Series s;
        s.name = col;
        s.color = color;
        for (const auto& r : records) {
            const double v = record_column(r, col);
            if (r.failed || !std::isfinite(v)) continue;
            s.x.push_back(r.eps);
            s.y.push_back(std::abs(v));
        }
        if (!s.x.empty()) series.push_back(s);
    }
    write_svg(series, out_dir + "/" + scenario + ".svg");

    std::ofstream md(out_dir + "/" + scenario + ".md");
    if (!md) throw IoFailure("cannot open markdown report");
    md << "# Sweep report: " << scenario << "\n\n";
    md << "Rows: " << records.size() << "\n\n";
    md << "Operator-norm residual columns use the discrete l2-induced matrix norm "
          "as a proxy for the H^{+-1/2} operator norms.\n\n";
    if (!fits.empty()) {
        md << "| model | coefficient | exponent | window | max rel dev |\n";
        md << "|---|---|---|---|---|\n";
        for (const auto& f : fits)
            md << "| " << (f.model == FitResult::Model::PowerLaw ? "PowerLaw" : "LogLaw")
               << " | " << f.coefficient << " | "
               << (f.model == FitResult::Model::PowerLaw ? f.exponent : 0.0) << " | ["
               << f.first_row << ", " << f.last_row << "] | " << f.goodness << " |\n";
    }
    for (const auto& r : records)
        if (r.failed)
            md << "\n- row eps=" << r.eps << " failed: " << r.message << "\n";
}

void write_acceptance_report(const std::vector<CriterionResult>& results,
                             const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream md(out_dir + "/acceptance.md");
    if (!md) throw IoFailure("cannot open acceptance report");
    md << "# Acceptance criteria\n\n";
    for (const auto& c : results)
        md << (c.passed ? "PASS" : "FAIL") << " | " << c.id << ". " << c.name << " | "
           << c.detail << "\n";
}

} // namespace patchpert
