#include "ousparse/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "ousparse/errors.hpp"
#include "ousparse/trajectory_io.hpp"

namespace ousparse::report {

namespace {

constexpr const char* kEol = "\r\n";

std::string num(double v) { return std::isnan(v) ? std::string() : io::format_double(v); }

double parse_or_nan(const std::string& s) {
  return s.empty() ? std::numeric_limits<double>::quiet_NaN() : io::parse_double(s);
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

bool same_value(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_runs_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << kRunsHeader << kEol;
  for (const auto& r : records) {
    out << csv_field(r.scenario_hash) << ',' << csv_field(r.sweep_param) << ','
        << num(r.sweep_value) << ',' << r.seed << ',' << csv_field(r.estimator) << ','
        << csv_field(r.tuning) << ',' << csv_field(r.status) << ',' << num(r.lambda) << ','
        << num(r.b_radius) << ',' << num(r.eta) << ',' << num(r.kept_fraction) << ','
        << num(r.l1) << ',' << num(r.l2) << ',' << r.correct << ',' << r.missed << ','
        << r.spurious << ',' << r.iters << kEol;
  }
}

std::vector<RunRecord> read_runs_csv(std::istream& in) {
  std::string line;
  const auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line() || line != kRunsHeader) throw LookupError("runs.csv: unexpected header");
  std::vector<RunRecord> records;
  while (next_line()) {
    if (line.empty()) continue;
    const auto f = io::split_csv_line(line);
    if (f.size() != 17) throw LookupError("runs.csv: row with " + std::to_string(f.size()) + " fields");
    RunRecord r;
    try {
      r.scenario_hash = f[0];
      r.sweep_param = f[1];
      r.sweep_value = parse_or_nan(f[2]);
      r.seed = std::stoull(f[3]);
      r.estimator = f[4];
      r.tuning = f[5];
      r.status = f[6];
      r.lambda = parse_or_nan(f[7]);
      r.b_radius = parse_or_nan(f[8]);
      r.eta = parse_or_nan(f[9]);
      r.kept_fraction = parse_or_nan(f[10]);
      r.l1 = parse_or_nan(f[11]);
      r.l2 = parse_or_nan(f[12]);
      r.correct = std::stoll(f[13]);
      r.missed = std::stoll(f[14]);
      r.spurious = std::stoll(f[15]);
      r.iters = std::stoi(f[16]);
    } catch (const std::exception& e) {
      throw LookupError(std::string("runs.csv: malformed row: ") + e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

Stat describe(std::vector<double> values) {
  Stat s;
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan};
  }
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  s.median = values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
  return s;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  struct Acc {
    SummaryRow row;
    std::vector<double> l1, l2, kept, lambda, spurious, missed;
  };
  std::vector<Acc> accs;
  for (const auto& r : records) {
    auto it = std::find_if(accs.begin(), accs.end(), [&](const Acc& a) {
      return same_value(a.row.sweep_value, r.sweep_value) && a.row.estimator == r.estimator;
    });
    if (it == accs.end()) {
      Acc a;
      a.row.sweep_param = r.sweep_param;
      a.row.sweep_value = r.sweep_value;
      a.row.estimator = r.estimator;
      accs.push_back(std::move(a));
      it = std::prev(accs.end());
    }
    if (r.status != "ok") {
      ++it->row.failed;
      continue;
    }
    ++it->row.ok;
    it->l1.push_back(r.l1);
    it->l2.push_back(r.l2);
    it->kept.push_back(r.kept_fraction);
    it->lambda.push_back(r.lambda);
    it->spurious.push_back(static_cast<double>(r.spurious));
    it->missed.push_back(static_cast<double>(r.missed));
  }
  std::vector<SummaryRow> rows;
  for (auto& a : accs) {
    a.row.l1 = describe(a.l1);
    a.row.l2 = describe(a.l2);
    a.row.kept_fraction = describe(a.kept);
    a.row.lambda = describe(a.lambda);
    a.row.spurious = describe(a.spurious);
    a.row.missed = describe(a.missed);
    rows.push_back(a.row);
  }
  return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "sweep_param,sweep_value,estimator,ok,failed";
  for (const char* m : {"l1", "l2", "kept_fraction", "lambda", "spurious", "missed"}) {
    out << ',' << m << "_mean," << m << "_std," << m << "_median";
  }
  out << kEol;
  for (const auto& r : rows) {
    out << csv_field(r.sweep_param) << ',' << num(r.sweep_value) << ',' << csv_field(r.estimator)
        << ',' << r.ok << ',' << r.failed;
    for (const Stat* s : {&r.l1, &r.l2, &r.kept_fraction, &r.lambda, &r.spurious, &r.missed}) {
      out << ',' << num(s->mean) << ',' << num(s->std) << ',' << num(s->median);
    }
    out << kEol;
  }
}

void write_timings_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << "sweep_value,seed,estimator,status,wall_time" << kEol;
  for (const auto& r : records) {
    out << num(r.sweep_value) << ',' << r.seed << ',' << csv_field(r.estimator) << ','
        << csv_field(r.status) << ',' << num(r.wall_time) << kEol;
  }
}

void write_cv_csv(const std::vector<CellResult>& cells, std::ostream& out) {
  out << "sweep_value,seed,estimator,lambda,validation_score,iters,selected" << kEol;
  for (const auto& c : cells) {
    for (const auto& t : c.cv) {
      for (const auto& row : t.result.table) {
        out << num(t.sweep_value) << ',' << t.seed << ',' << csv_field(t.family) << ','
            << num(row.lambda) << ',' << num(row.validation_score) << ',' << row.iters << ','
            << (row.lambda == t.result.best_lambda ? 1 : 0) << kEol;
      }
    }
  }
}

std::string svg_plot(const std::vector<SummaryRow>& rows, PlotMetric metric, const std::string& title) {
  constexpr double width = 720, height = 440;
  constexpr double left = 70, right = 170, top = 40, bottom = 55;
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  const auto stat_of = [&](const SummaryRow& r) -> const Stat& {
    switch (metric) {
      case PlotMetric::L1: return r.l1;
      case PlotMetric::L2: return r.l2;
      case PlotMetric::KeptFraction: return r.kept_fraction;
    }
    return r.l2;
  };

  // series in first-seen order; x = sweep value (0 when there is no sweep)
  std::vector<std::string> names;
  std::map<std::string, std::vector<std::pair<double, Stat>>> series;
  for (const auto& r : rows) {
    if (r.ok == 0) continue;
    if (!series.count(r.estimator)) names.push_back(r.estimator);
    const double x = std::isnan(r.sweep_value) ? 0.0 : r.sweep_value;
    series[r.estimator].emplace_back(x, stat_of(r));
  }
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (auto& [_, pts] : series) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [x, s] : pts) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, s.mean - s.std);
      yhi = std::max(yhi, s.mean + s.std);
    }
  }
  if (names.empty()) {
    xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  }
  ylo = std::max(0.0, ylo);
  if (!(xhi > xlo)) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  if (!(yhi > ylo)) yhi = ylo + 1.0;
  const double pad = 0.05 * (yhi - ylo);
  yhi += pad;
  ylo = std::max(0.0, ylo - pad);

  const auto sx = [&](double x) { return left + (x - xlo) / (xhi - xlo) * pw; };
  const auto sy = [&](double y) { return top + (1.0 - (y - ylo) / (yhi - ylo)) * ph; };

  std::ostringstream svg;
  svg.precision(6);
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";

  for (int k = 0; k <= 5; ++k) {
    const double yv = ylo + (yhi - ylo) * k / 5.0;
    const double xv = xlo + (xhi - xlo) * k / 5.0;
    svg << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << sy(yv) << "\" y2=\""
        << sy(yv) << "\" stroke=\"#e0e0e0\"/>\n"
        << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">"
        << short_num(yv) << "</text>\n"
        << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << short_num(xv) << "</text>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  const std::string xlabel = rows.empty() || rows.front().sweep_param.empty() ? "" : rows.front().sweep_param;
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
      << xml_escape(xlabel) << "</text>\n";

  for (std::size_t i = 0; i < names.size(); ++i) {
    const char* color = palette[i % std::size(palette)];
    const auto& pts = series[names[i]];
    svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (const auto& [x, s] : pts) svg << sx(x) << ',' << sy(std::max(ylo, s.mean + s.std)) << ' ';
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      svg << sx(it->first) << ',' << sy(std::max(ylo, it->second.mean - it->second.std)) << ' ';
    }
    svg << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, s] : pts) svg << sx(x) << ',' << sy(s.mean) << ' ';
    svg << "\"/>\n";
    for (const auto& [x, s] : pts) {
      svg << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(s.mean) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    const double ly = top + 14 + 20.0 * static_cast<double>(i);
    svg << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 36 << "\" y1=\"" << ly - 4
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly << "\">" << xml_escape(names[i])
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace ousparse::report
