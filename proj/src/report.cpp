#include "codei/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>

#include "codei/geom.hpp"
#include "codei/io.hpp"

namespace codei::report {

namespace {

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string num(double x) { return fmt("%.10g", x); }

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string deg(double rad) { return fmt("%.1f", rad * 180.0 / geom::kPi); }

}  // namespace

std::string csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + num(r[i]);
    out += "\n";
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back({i, j});
  return out;
}

std::string svg_pairs(const std::string& title, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows,
                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  const int pw = 260, ph = 220, margin = 44, cols = 3;
  const int n_rows = static_cast<int>((pairs.size() + cols - 1) / cols);
  const int width = cols * pw, height = 30 + std::max(1, n_rows) * ph;
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                  "\" height=\"" + std::to_string(height) + "\" font-family=\"monospace\" font-size=\"10\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"8\" y=\"18\" font-size=\"13\">" + escape(title) + "</text>\n";
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [cx, cy] = pairs[k];
    const double ox = (k % cols) * pw, oy = 30 + (k / cols) * ph;
    const double x0 = ox + margin, x1 = ox + pw - 12, y0 = oy + ph - margin + 8, y1 = oy + 12;
    double lo[2] = {0, 0}, hi[2] = {1, 1};
    bool first = true;
    for (const auto& r : rows) {
      double v[2] = {r[cx], r[cy]};
      for (int a = 0; a < 2; ++a) {
        if (!std::isfinite(v[a])) continue;
        lo[a] = first ? v[a] : std::min(lo[a], v[a]);
        hi[a] = first ? v[a] : std::max(hi[a], v[a]);
      }
      first = false;
    }
    for (int a = 0; a < 2; ++a) {
      const double pad = hi[a] > lo[a] ? 0.08 * (hi[a] - lo[a]) : std::max(1.0, std::abs(lo[a]) * 0.1);
      lo[a] -= pad;
      hi[a] += pad;
    }
    auto px = [&](double v) { return x0 + (v - lo[0]) / (hi[0] - lo[0]) * (x1 - x0); };
    auto py = [&](double v) { return y0 - (v - lo[1]) / (hi[1] - lo[1]) * (y0 - y1); };
    s += "<g>\n<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
         num(y0 - y1) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double vx = lo[0] + t * (hi[0] - lo[0]) / 4, vy = lo[1] + t * (hi[1] - lo[1]) / 4;
      s += "<text x=\"" + num(px(vx)) + "\" y=\"" + num(y0 + 12) + "\" text-anchor=\"middle\">" +
           fmt("%.4g", vx) + "</text>\n";
      s += "<text x=\"" + num(x0 - 3) + "\" y=\"" + num(py(vy) + 3) + "\" text-anchor=\"end\">" +
           fmt("%.4g", vy) + "</text>\n";
    }
    s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(y0 + 26) + "\" text-anchor=\"middle\">" +
         escape(columns[cx]) + "</text>\n";
    s += "<text x=\"" + num(ox + 10) + "\" y=\"" + num((y0 + y1) / 2) + "\" transform=\"rotate(-90 " +
         num(ox + 10) + " " + num((y0 + y1) / 2) + ")\" text-anchor=\"middle\">" + escape(columns[cy]) +
         "</text>\n";
    for (const auto& r : rows)
      if (std::isfinite(r[cx]) && std::isfinite(r[cy]))
        s += "<circle cx=\"" + fmt("%.2f", px(r[cx])) + "\" cy=\"" + fmt("%.2f", py(r[cy])) +
             "\" r=\"3\" fill=\"steelblue\"/>\n";
    s += "</g>\n";
  }
  return s + "</svg>\n";
}

namespace {

std::string mount_table(const std::vector<percperf::MountedPipeline>& ms, const catalog::Catalog& cat) {
  std::string s;
  if (ms.empty()) return "    (no sensors)\n";
  for (const auto& m : ms) {
    const auto& pp = cat.pipeline(m.pipeline_id);
    char line[256];
    std::snprintf(line, sizeof line, "    %-10s yaw %7s deg  pitch %6s deg  %-8s %s\n", m.mount.c_str(),
                  deg(m.yaw).c_str(), deg(m.pitch).c_str(), percperf::to_string(pp.kind).c_str(),
                  m.pipeline_id.c_str());
    s += line;
  }
  return s;
}

std::string resources_line(const std::vector<std::string>& names, const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "  " : "") + names[i] + " " + num(v[i]);
  return s;
}

}  // namespace

std::string front_summary(const select::ParetoFront& f, const design::SelectionProblem& sp,
                          const catalog::Catalog& cat) {
  const std::vector<std::string> names{"price_chf", "mass_kg", "power_w", "compute_gflops"};
  std::string s;
  if (f.infeasible) {
    s += "infeasible: " + f.infeasible->message + "\n";
    return s;
  }
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    s += "point " + std::to_string(i + 1) + ": " + resources_line(names, f.points[i].resources) + "\n";
    for (std::size_t k = 0; k < f.points[i].selections.size(); ++k) {
      s += "  selection " + std::to_string(k + 1) + "\n";
      std::vector<percperf::MountedPipeline> ms;
      for (auto l : f.points[i].selections[k].chosen) ms.push_back(sp.mounted.at(l));
      s += mount_table(ms, cat);
    }
  }
  return s;
}

std::string solutions_summary(const codesign::Antichain& a, const catalog::Catalog& cat) {
  std::string s;
  if (a.empty()) return "no design meets the demand\n";
  auto sols = codesign::design_solutions(a);
  for (std::size_t i = 0; i < sols.size(); ++i) {
    s += "point " + std::to_string(i + 1) + ": " + resources_line(codesign::kCodeiResources, sols[i].resources) +
         "\n";
    for (std::size_t k = 0; k < sols[i].impls.size(); ++k) {
      auto d = io::describe(sols[i].impls[k]);
      s += "  design " + std::to_string(k + 1) + ": body " + d.body + ", planner " + d.planner + ", computer " +
           d.computer + "\n";
      s += mount_table(d.mounted, cat);
    }
  }
  return s;
}

}  // namespace codei::report
