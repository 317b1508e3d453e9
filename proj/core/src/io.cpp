#include "exradon/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace exradon {

namespace {

using nlohmann::json;

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

json condition_json(const ConditionReport& c) {
  return json{{"pass", c.pass},
              {"worst", c.worst},
              {"growth_ratio", std::isfinite(c.growth_ratio) ? json(c.growth_ratio) : json("inf")},
              {"note", c.note}};
}

}  // namespace

std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::IoFailure, "cannot open " + tmp.string());
    out << content;
    if (!out.good()) raise(Errc::IoFailure, "short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string sinogram_csv(const Sinogram& s) {
  std::ostringstream out;
  out << "theta_rad,p,value,mask,err_estimate\n";
  for (int it = 0; it < s.theta.count; ++it) {
    for (int ip = 0; ip < s.p.count; ++ip) {
      const int c = s.idx(it, ip);
      out << sci(s.theta.at(it)) << ',' << sci(s.p.at(ip)) << ',' << sci(s.values[c]) << ','
          << to_string(s.mask[c]) << ',' << sci(s.err[c]) << '\n';
    }
  }
  return out.str();
}

std::string moment_table_csv(const MomentTable& t) {
  std::ostringstream out;
  out << "k,theta_rad,p,value,origin,err_budget\n";
  const char* origin = t.origin == MomentTable::Origin::Direct ? "direct" : "recursed";
  for (int k = 0; k <= t.k_max; ++k) {
    for (int it = 0; it < t.theta.count; ++it) {
      for (int ip = 0; ip < t.p.count; ++ip) {
        if (!t.valid_at(k, it, ip)) continue;
        out << k << ',' << sci(t.theta.at(it)) << ',' << sci(t.p.at(ip)) << ','
            << sci(t.value_at(k, it, ip)) << ',' << origin << ','
            << sci(t.err_budget[t.idx(k, it, ip)]) << '\n';
      }
    }
  }
  return out.str();
}

std::string discrepancy_report_json(double max_abs, double max_rel, int cells_checked,
                                    double tolerance, bool pass) {
  json j{{"max_abs", max_abs},
         {"max_rel", max_rel},
         {"cells_checked", cells_checked},
         {"tolerance", tolerance},
         {"pass", pass}};
  return j.dump(2) + "\n";
}

std::string convolution_report_json(const ConvolutionReport& r) {
  json j{{"max_abs", r.max_abs},        {"max_rel", r.max_rel},
         {"cells_checked", r.cells_checked}, {"tolerance", r.tolerance},
         {"pass", r.pass},              {"max_rel_refined", r.max_rel_refined}};
  return j.dump(2) + "\n";
}

std::string helgason_report_json(const HelgasonReport& r) {
  json j{{"k_max", r.k_max},
         {"lambda", r.lambda},
         {"residuals", r.residuals},
         {"tolerance", r.tolerance},
         {"pass", r.pass}};
  return j.dump(2) + "\n";
}

std::string recovery_report_json(const RecoveryReport& r) {
  json per_k = json::array();
  for (const auto& pk : r.per_k) {
    per_k.push_back(json{{"k", pk.k},
                         {"max_rel_err", pk.max_rel_err},
                         {"valid_theta_range",
                          json::array({pk.valid_theta_range.first, pk.valid_theta_range.second})}});
  }
  json j{{"per_k", per_k},
         {"convergence",
          json{{"h", r.h_theta}, {"h_half", r.h_theta_half}, {"ratio", r.convergence_ratio}}}};
  return j.dump(2) + "\n";
}

std::string laplace_report_json(const std::vector<LaplaceReportEntry>& entries,
                                const MomentList& moments, MomentVerdict verdict) {
  json arr = json::array();
  for (const auto& e : entries) {
    arr.push_back(json{{"s", e.s},
                       {"N", e.N},
                       {"L_quadrature", e.L_quadrature},
                       {"S_N", e.S_N},
                       {"bound_neg_axis", e.bound_neg_axis},
                       {"bound_pos_axis", e.bound_pos_axis},
                       {"satisfied", e.satisfied}});
  }
  json j{{"entries", arr},
         {"moments", moments.values},
         {"moment_errors", moments.errors},
         {"moment_abs_scales", moments.abs_scales},
         {"verdict", to_string(verdict)}};
  return j.dump(2) + "\n";
}

std::string probe_report_json(const ScanProbeReport& r) {
  json j{{"condition_b", condition_json(r.b)},
         {"condition_c", condition_json(r.c)},
         {"condition_d", condition_json(r.d)},
         {"condition_e", condition_json(r.e)},
         {"mu_used", r.mu_used},
         {"quantifier_note", r.quantifier_note},
         {"anchor_values", r.anchor_values},
         {"all_pass", r.all_pass()}};
  return j.dump(2) + "\n";
}

std::string sinogram_svg(const Sinogram& s) {
  const int cw = std::max(2, 640 / std::max(1, s.p.count));
  const int ch = std::max(2, 480 / std::max(1, s.theta.count));
  const int w = cw * s.p.count + 120;
  const int h = ch * s.theta.count + 60;
  double vmax = 0.0;
  for (size_t i = 0; i < s.values.size(); ++i) {
    if (s.mask[i] == CellMask::Exterior && std::isfinite(s.values[i]))
      vmax = std::max(vmax, std::abs(s.values[i]));
  }
  if (vmax == 0.0) vmax = 1.0;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int it = 0; it < s.theta.count; ++it) {
    for (int ip = 0; ip < s.p.count; ++ip) {
      const int c = s.idx(it, ip);
      std::string fill = "rgb(220,220,220)";
      if (s.mask[c] == CellMask::Divergent) {
        fill = "rgb(40,40,40)";
      } else if (std::isfinite(s.values[c])) {
        const double t = std::clamp(s.values[c] / vmax, -1.0, 1.0);
        const int r = t >= 0 ? 255 : static_cast<int>(255 * (1.0 + t));
        const int b = t <= 0 ? 255 : static_cast<int>(255 * (1.0 - t));
        const int g = static_cast<int>(255 * (1.0 - std::abs(t)));
        char buf[40];
        std::snprintf(buf, sizeof buf, "rgb(%d,%d,%d)", r, g, b);
        fill = buf;
      }
      out << "<rect x=\"" << 80 + ip * cw << "\" y=\"" << 20 + it * ch << "\" width=\"" << cw
          << "\" height=\"" << ch << "\" fill=\"" << fill << "\"/>\n";
      if (s.mask[c] == CellMask::IntersectsHole)
        out << "<rect x=\"" << 80 + ip * cw << "\" y=\"" << 20 + it * ch << "\" width=\"" << cw
            << "\" height=\"" << ch
            << "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
  }
  out << "<text x=\"10\" y=\"" << 20 + ch * s.theta.count / 2
      << "\" font-size=\"12\">theta</text>\n";
  out << "<text x=\"" << 80 + cw * s.p.count / 2 << "\" y=\"" << h - 20
      << "\" font-size=\"12\">p</text>\n";
  out << "<text x=\"10\" y=\"14\" font-size=\"11\">|max| = " << sci(vmax) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string polyline_svg(const std::vector<double>& xs,
                         const std::vector<std::pair<std::string, std::vector<double>>>& series,
                         const std::string& x_label, const std::string& y_label) {
  const int w = 640, h = 420, ml = 70, mb = 50, mt = 20, mr = 20;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (double x : xs) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  for (const auto& [name, ys] : series) {
    for (double y : ys) {
      if (!std::isfinite(y)) continue;
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mb - mt); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
  int si = 0;
  for (const auto& [name, ys] : series) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[si % 5] << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
      if (!std::isfinite(ys[i])) continue;
      out << px(xs[i]) << ',' << py(ys[i]) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << w - mr - 150 << "\" y=\"" << mt + 16 * (si + 1)
        << "\" font-size=\"11\" fill=\"" << colors[si % 5] << "\">" << name << "</text>\n";
    ++si;
  }
  out << "<text x=\"" << (w - ml) / 2 << "\" y=\"" << h - 12 << "\" font-size=\"12\">" << x_label
      << "</text>\n";
  out << "<text x=\"8\" y=\"" << h / 2 << "\" font-size=\"12\">" << y_label << "</text>\n";
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"%d\" font-size=\"10\">[%g, %g] x [%g, %g]</text>\n", ml,
                mt - 6, xmin, xmax, ymin, ymax);
  out << buf << "</svg>\n";
  return out.str();
}

std::string manifest_json(const std::string& command, std::uint64_t seed,
                          const std::vector<ManifestEntry>& files) {
  json arr = json::array();
  for (const auto& f : files) {
    // Names relative to the run directory keep manifests byte-identical
    // across output locations.
    const std::string name = std::filesystem::path(f.path).filename().string();
    arr.push_back(json{{"path", name}, {"bytes", f.bytes}, {"fnv1a64", f.hash}});
  }
  json j{{"command", command}, {"seed", seed}, {"outputs", arr}};
  return j.dump(2) + "\n";
}

}  // namespace exradon
