#include "peck/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "peck/errors.hpp"
#include "peck/special.hpp"

namespace peck {

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt_exact(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt_p(double p) {
  if (p < 0.001) return "<0.001";
  return fmt(p, "%.3f");
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::vector<PreferenceRow> preference_rows(const std::vector<PreferenceSeries>& series) {
  std::vector<PreferenceRow> rows;
  for (const PreferenceSeries& s : series) {
    for (Metric m : kAllMetrics) {
      for (const BinPreference& b : s.bins) {
        rows.push_back({s.chick_id, b.bin, m, b.value(m), s.chance(m), b.truncated});
      }
      rows.push_back({s.chick_id, 0, m, s.session.value(m), s.chance(m), s.session.truncated});
    }
  }
  return rows;
}

void write_preferences_csv(const std::vector<PreferenceRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << "chick_id,bin,metric,value,chance,missing,truncated\n";
  for (const PreferenceRow& r : rows) {
    out << r.chick_id << ',';
    if (r.bin == 0) {
      out << "session";
    } else {
      out << r.bin;
    }
    out << ',' << to_string(r.metric) << ',';
    if (r.value) out << fmt_exact(*r.value);
    out << ',' << fmt_exact(r.chance) << ',' << (r.value ? 0 : 1) << ','
        << (r.truncated ? 1 : 0) << '\n';
  }
}

std::vector<PreferenceRow> read_preferences_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty preference table '" + path + "'");
  std::vector<PreferenceRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() < 7) throw DataError("malformed preference row: " + line);
    PreferenceRow r;
    r.chick_id = cells[0];
    r.bin = (cells[1] == "session") ? 0 : std::stoi(cells[1]);
    r.metric = metric_from_string(cells[2]);
    if (!cells[3].empty()) r.value = std::stod(cells[3]);
    r.chance = std::stod(cells[4]);
    r.truncated = cells[6] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

ModelData model_data_from_rows(const std::vector<PreferenceRow>& rows, Metric metric) {
  ModelData data;
  bool have_chance = false;
  for (const PreferenceRow& r : rows) {
    if (r.metric != metric) continue;
    if (!have_chance) {
      data.chance = r.chance;
      have_chance = true;
    }
    if (r.bin == 0 || !r.value) continue;  // session rows and missing bins are not modeled
    data.obs.push_back({r.chick_id, r.bin, *r.value});
  }
  return data;
}

void write_qc_table_csv(const std::vector<QcTableRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << "chick_id,file,total_frames,good_frames,good_fraction,threshold_likelihood,"
         "min_fraction,passed,rejected_rows,max_gap_s,n_interpolated,n_clamped,status,"
         "reason\n";
  for (const QcTableRow& r : rows) {
    out << r.chick_id << ',' << r.file << ',' << r.qc.total_frames << ',' << r.qc.good_frames
        << ',' << fmt_exact(r.qc.good_fraction) << ',' << fmt_exact(r.qc.threshold_likelihood)
        << ',' << fmt_exact(r.qc.min_fraction) << ',' << (r.qc.passed ? 1 : 0) << ','
        << r.rejected_rows << ',' << r.max_gap_s << ',' << r.n_interpolated << ','
        << r.n_clamped << ',' << r.status << ',' << r.reason << '\n';
  }
}

std::string render_fit_report(Metric metric, const ModelFit& fit, const WaldResult& wald,
                              const EmmResult& emm, long sv_n) {
  std::ostringstream os;
  os << "=== " << to_string(metric) << " preference: Beta mixed-effects fit ===\n";
  os << "observations: " << fit.n_obs << "  chicks: " << fit.n_chicks
     << "  sv_n: " << sv_n << "  n_quad: " << fit.n_quad << "\n";
  os << "log-likelihood: " << fmt(fit.loglik) << "  AIC: " << fmt(fit.aic) << "\n";
  os << "converged: " << (fit.converged ? "yes" : "NO")
     << "  grad max-norm: " << fmt(fit.grad_max_norm, "%.3e")
     << "  clamp events: " << fit.clamp_events << "\n";
  os << "phi: " << fmt(std::exp(fit.log_phi)) << "  sigma: " << fmt(std::exp(fit.log_sigma))
     << "\n\n";

  os << "fixed effects (logit scale, bin " << fit.bins[0] << " reference):\n";
  for (std::size_t i = 0; i < fit.beta.size(); ++i) {
    const std::string name =
        (i == 0) ? "(intercept)" : "bin" + std::to_string(fit.bins[i]);
    os << "  " << name << ": " << fmt(fit.beta[i]);
    if (fit.vcov_ok) os << "  SE " << fmt(std::sqrt(fit.vcov[i][i]));
    os << "\n";
  }
  os << "\nType III Wald test of the time effect: chi2(" << wald.df << ") = "
     << fmt(wald.chi2, "%.3f") << ", p = " << fmt_p(wald.p) << "\n\n";

  os << "estimated marginal means (response scale), chance = " << fmt(emm.chance, "%.3f")
     << ":\n";
  for (const BinEmm& b : emm.bins) {
    os << "  bin " << b.bin << ": mean = " << fmt(b.mean, "%.3f") << " (SE "
       << fmt(b.se_mean, "%.3f") << "), z = " << fmt(b.z_vs_chance, "%.3f")
       << ", p = " << fmt_p(b.p_vs_chance) << "\n";
  }
  os << "  overall: mean = " << fmt(emm.overall_mean, "%.3f") << " (SE "
     << fmt(emm.overall_se_mean, "%.3f") << "), z = " << fmt(emm.z_vs_chance, "%.3f")
     << ", p = " << fmt_p(emm.p_vs_chance) << "\n";
  return os.str();
}

namespace {

struct FigureGeom {
  double width = 640, height = 420;
  double ml = 70, mr = 110, mt = 40, mb = 50;

  double x(double bin_pos, double n) const {
    return ml + (width - ml - mr) * (bin_pos + 0.5) / n;
  }
  double y(double value) const {  // value in [0,1]
    return mt + (height - mt - mb) * (1.0 - value);
  }
};

}  // namespace

void write_preference_figure_svg(Metric metric, const EmmResult& emm,
                                 const std::string& title, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  FigureGeom geom;
  const double n = static_cast<double>(emm.bins.size());

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << geom.width
      << "\" height=\"" << geom.height << "\" data-metric=\"" << to_string(metric)
      << "\" data-chance=\"" << fmt(emm.chance, "%.3f") << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <text x=\"" << geom.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // axes
  out << "  <line x1=\"" << geom.ml << "\" y1=\"" << geom.y(0.0) << "\" x2=\""
      << geom.width - geom.mr << "\" y2=\"" << geom.y(0.0)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "  <line x1=\"" << geom.ml << "\" y1=\"" << geom.y(0.0) << "\" x2=\"" << geom.ml
      << "\" y2=\"" << geom.y(1.0) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (double tick = 0.0; tick <= 1.0001; tick += 0.25) {
    out << "  <text x=\"" << geom.ml - 8 << "\" y=\"" << geom.y(tick) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(tick, "%.2f") << "</text>\n";
  }

  // chance level (dashed red, like the published figures)
  out << "  <line class=\"chance\" x1=\"" << geom.ml << "\" y1=\"" << geom.y(emm.chance)
      << "\" x2=\"" << geom.width - geom.mr << "\" y2=\"" << geom.y(emm.chance)
      << "\" stroke=\"red\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";
  out << "  <text x=\"" << geom.width - geom.mr + 4 << "\" y=\"" << geom.y(emm.chance) + 4
      << "\" fill=\"red\" font-family=\"sans-serif\" font-size=\"11\">chance "
      << fmt(emm.chance, "%.3f") << "</text>\n";

  // per-bin means with SE bars, connected
  std::ostringstream pts;
  for (std::size_t i = 0; i < emm.bins.size(); ++i) {
    const BinEmm& b = emm.bins[i];
    const double cx = geom.x(static_cast<double>(i), n);
    const double cy = geom.y(b.mean);
    pts << (i ? " " : "") << cx << ',' << cy;
    const double y_lo = geom.y(std::max(0.0, b.mean - b.se_mean));
    const double y_hi = geom.y(std::min(1.0, b.mean + b.se_mean));
    out << "  <line x1=\"" << cx << "\" y1=\"" << y_lo << "\" x2=\"" << cx << "\" y2=\""
        << y_hi << "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
    out << "  <circle cx=\"" << cx << "\" cy=\"" << cy
        << "\" r=\"4\" fill=\"steelblue\"/>\n";
    out << "  <text x=\"" << cx << "\" y=\"" << geom.y(0.0) + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << b.bin << "</text>\n";
  }
  out << "  <polyline points=\"" << pts.str()
      << "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";

  // overall EMM, offset to the right
  const double ox = geom.width - geom.mr + 40;
  out << "  <line x1=\"" << ox << "\" y1=\""
      << geom.y(std::max(0.0, emm.overall_mean - emm.overall_se_mean)) << "\" x2=\"" << ox
      << "\" y2=\"" << geom.y(std::min(1.0, emm.overall_mean + emm.overall_se_mean))
      << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  out << "  <circle cx=\"" << ox << "\" cy=\"" << geom.y(emm.overall_mean)
      << "\" r=\"4\" fill=\"black\"/>\n";
  out << "  <text x=\"" << ox << "\" y=\"" << geom.y(0.0) + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">overall"
      << "</text>\n";
  out << "  <text x=\"" << geom.width / 2 << "\" y=\"" << geom.height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << "time bin (5 min)</text>\n";
  out << "</svg>\n";
}

void write_figure_data_csv(Metric metric, const EmmResult& emm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << "metric,bin,mean,se,z_vs_chance,p_vs_chance,chance\n";
  for (const BinEmm& b : emm.bins) {
    out << to_string(metric) << ',' << b.bin << ',' << fmt_exact(b.mean) << ','
        << fmt_exact(b.se_mean) << ',' << fmt_exact(b.z_vs_chance) << ','
        << fmt_exact(b.p_vs_chance) << ',' << fmt_exact(emm.chance) << '\n';
  }
  out << to_string(metric) << ",overall," << fmt_exact(emm.overall_mean) << ','
      << fmt_exact(emm.overall_se_mean) << ',' << fmt_exact(emm.z_vs_chance) << ','
      << fmt_exact(emm.p_vs_chance) << ',' << fmt_exact(emm.chance) << '\n';
}

}  // namespace peck
