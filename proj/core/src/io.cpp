#include "stabreg/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stabreg/errors.hpp"
#include "stabreg/version.hpp"

namespace stabreg {

namespace {

std::string header_comments(const Provenance& prov) {
  std::ostringstream out;
  out << "# stabreg " << kVersion << "\n";
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(prov.config_hash));
  out << "# config_hash " << hex << "\n";
  out << "# base_seed " << prov.base_seed << "\n";
  return out.str();
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SimError("cannot write " + tmp.string());
    out << content;
    if (!out) throw SimError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw SimError("cannot replace " + path);
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string region_csv(const Region2D& region) {
  std::ostringstream out;
  out << "row_type,x,y\n";
  for (const auto& p : region.vertices) {
    out << "vertex," << format_double(p[0]) << "," << format_double(p[1]) << "\n";
  }
  out << "area," << format_double(region.area) << ",\n";
  return out.str();
}

std::string reserve_csv(const std::vector<std::pair<double, double>>& theta_eps) {
  std::ostringstream out;
  out << "theta,eps_max\n";
  for (const auto& [theta, eps] : theta_eps) {
    out << format_double(theta) << "," << format_double(eps) << "\n";
  }
  return out.str();
}

std::string trace_csv(const Trace& tr) {
  std::ostringstream out;
  out << "t,movement,x,phase_active,s_true,s_hat,stacked_total\n";
  const std::size_t T = static_cast<std::size_t>(tr.horizon);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t m = 0; m < tr.x[t].size(); ++m) {
      out << t << "," << m << "," << format_double(tr.x[t][m]) << ","
          << (tr.green[t][m] ? 1 : 0) << "," << format_double(tr.s_true[t][m]) << ",";
      if (!tr.s_hat[t].empty()) out << format_double(tr.s_hat[t][m]);
      out << "," << tr.stacked_total[t] << "\n";
    }
  }
  return out.str();
}

std::string ramp_csv(const RampReport& report, const Provenance& prov) {
  std::ostringstream out;
  out << header_comments(prov);
  out << "row_type,threshold,replication,seed,crossing_interval,ramp_steps,"
         "eps_hat_veh_interval,eps_hat_veh_h,censored,n,min,q1,median,q3,max,mean,sd\n";
  for (const RampRow& r : report.rows) {
    out << "detail," << r.threshold << "," << r.replication << "," << r.seed << ","
        << r.crossing_interval << "," << r.ramp_steps << ","
        << format_double(r.eps_hat) << "," << format_double(r.eps_hat_veh_h) << ","
        << (r.censored ? 1 : 0) << ",,,,,,,,\n";
  }
  for (std::size_t k = 0; k < report.thresholds.size(); ++k) {
    const BoxSummary& b = report.summary[k];
    out << "summary," << report.thresholds[k] << ",,,,,,,," << b.n << ","
        << format_double(b.min) << "," << format_double(b.q1) << ","
        << format_double(b.median) << "," << format_double(b.q3) << ","
        << format_double(b.max) << "," << format_double(b.mean) << ","
        << format_double(b.sd) << "\n";
  }
  return out.str();
}

std::string delay_csv(const DelayReport& report, const Provenance& prov) {
  std::ostringstream out;
  out << header_comments(prov);
  out << "row_type,controller,theta,guess,replication,seed,eta_analytic,hit_rate,"
         "mean_delay_s,rate_stat,strong_stat,n,delay_mean,delay_sd,hit_rate_mean\n";
  for (const DelayRow& r : report.rows) {
    out << "detail," << r.controller << "," << format_double(r.theta) << "," << r.guess
        << "," << r.replication << "," << r.seed << ","
        << format_double(r.eta_analytic) << "," << format_double(r.hit_rate) << ","
        << format_double(r.mean_delay_s) << "," << format_double(r.rate_stat) << ","
        << format_double(r.strong_stat) << ",,,,\n";
  }
  for (const DelayCellSummary& s : report.summary) {
    out << "summary," << s.controller << "," << format_double(s.theta) << ","
        << s.guess << ",,,,,,,," << s.n << "," << format_double(s.delay_mean) << ","
        << format_double(s.delay_sd) << "," << format_double(s.hit_rate_mean) << "\n";
  }
  return out.str();
}

std::string region_svg(const std::vector<std::pair<std::string, Region2D>>& named) {
  double max_x = 1e-9, max_y = 1e-9;
  for (const auto& [label, region] : named) {
    for (const auto& p : region.vertices) {
      max_x = std::max(max_x, p[0]);
      max_y = std::max(max_y, p[1]);
    }
  }
  constexpr double kSize = 480, kMargin = 48;
  const double scale_x = (kSize - 2 * kMargin) / max_x;
  const double scale_y = (kSize - 2 * kMargin) / max_y;
  const auto px = [&](double x) { return kMargin + x * scale_x; };
  const auto py = [&](double y) { return kSize - kMargin - y * scale_y; };

  static const char* kColors[] = {"#1b6ca8", "#d1495b", "#3a7d44", "#8d6b94"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize
      << "\" height=\"" << kSize << "\" viewBox=\"0 0 " << kSize << " " << kSize
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << py(0) << "\" x2=\"" << kSize - kMargin
      << "\" y2=\"" << py(0) << "\" stroke=\"#333\"/>\n";
  out << "<line x1=\"" << px(0) << "\" y1=\"" << kMargin << "\" x2=\"" << px(0)
      << "\" y2=\"" << kSize - kMargin << "\" stroke=\"#333\"/>\n";
  std::size_t ci = 0;
  for (const auto& [label, region] : named) {
    const char* color = kColors[ci % 4];
    out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : region.vertices) {
      out << format_double(px(p[0])) << "," << format_double(py(p[1])) << " ";
    }
    out << "\"/>\n";
    out << "<text x=\"" << kSize - kMargin - 4 << "\" y=\"" << kMargin + 16 * (ci + 1)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\" fill=\""
        << color << "\">" << label << "</text>\n";
    ++ci;
  }
  out << "<text x=\"" << kSize - kMargin << "\" y=\"" << py(0) + 28
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"#333\">demand rate, movement 1</text>\n";
  out << "<text x=\"" << px(0) - 28 << "\" y=\"" << kMargin - 8
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">movement "
         "2</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace stabreg
