#include "ousparse/trajectory_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "ousparse/errors.hpp"

namespace ousparse::io {

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& in, const char* what) {
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw DomainError(std::string(what) + ": empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != table.header.size()) {
      throw DomainError(std::string(what) + ": row " + std::to_string(table.rows.size() + 2) +
                        " has " + std::to_string(cells.size()) + " fields, expected " +
                        std::to_string(table.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_header(std::ostream& out, const char* prefix, Eigen::Index d) {
  out << 't';
  for (Eigen::Index i = 1; i <= d; ++i) out << ',' << prefix << i;
  out << "\r\n";
}

void write_columns(std::ostream& out, const Matrix& cols, double dt, Eigen::Index time_offset) {
  for (Eigen::Index k = 0; k < cols.cols(); ++k) {
    out << format_double(static_cast<double>(k + time_offset) * dt);
    for (Eigen::Index i = 0; i < cols.rows(); ++i) out << ',' << format_double(cols(i, k));
    out << "\r\n";
  }
}

Matrix to_columns(const Table& t) {
  const auto d = static_cast<Eigen::Index>(t.header.size()) - 1;
  Matrix m(d, static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    for (Eigen::Index i = 0; i < d; ++i) m(i, static_cast<Eigen::Index>(k)) = t.rows[k][static_cast<std::size_t>(i + 1)];
  }
  return m;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view token) {
  while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
  while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
  if (token == "inf" || token == "+inf" || token == "Infinity") return std::numeric_limits<double>::infinity();
  if (token == "-inf" || token == "-Infinity") return -std::numeric_limits<double>::infinity();
  if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw DomainError("cannot parse number '" + std::string(token) + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& states, std::ostream& ledger) {
  write_header(states, "x_", traj.dim());
  write_columns(states, traj.states, traj.dt_fine, 0);
  write_header(ledger, "j_", traj.dim());
  write_columns(ledger, traj.jump_ledger, traj.dt_fine, 1);
}

Trajectory read_trajectory_csv(std::istream& states, std::istream& ledger) {
  const Table s = read_table(states, "trajectory states");
  const Table l = read_table(ledger, "jump ledger");
  if (s.header.size() < 2 || s.header.size() != l.header.size()) {
    throw DimensionError("trajectory and ledger CSVs disagree on dimension");
  }
  if (s.rows.size() < 2 || l.rows.size() + 1 != s.rows.size()) {
    throw DimensionError("ledger must have exactly one row fewer than the states");
  }
  Trajectory traj;
  traj.dt_fine = s.rows[1][0];  // written as 1 * dt
  traj.states = to_columns(s);
  traj.jump_ledger = to_columns(l);
  return traj;
}

void write_observations_csv(const ObservationSet& obs, std::ostream& states,
                            std::ostream* cont_increments) {
  write_header(states, "x_", obs.dim());
  write_columns(states, obs.obs, obs.delta_n, 0);
  if (cont_increments) {
    if (!obs.cont_increments) throw UnsupportedError("observation set has no continuous increments");
    write_header(*cont_increments, "xc_", obs.dim());
    write_columns(*cont_increments, *obs.cont_increments, obs.delta_n, 1);
  }
}

ObservationSet read_observations_csv(std::istream& states, std::istream* cont_increments) {
  const Table s = read_table(states, "observations");
  if (s.header.size() < 2 || s.rows.size() < 2) throw DimensionError("observation CSV too small");
  std::optional<Matrix> cont;
  if (cont_increments) {
    const Table c = read_table(*cont_increments, "continuous increments");
    if (c.header.size() != s.header.size() || c.rows.size() + 1 != s.rows.size()) {
      throw DimensionError("continuous-increment CSV does not match the observations");
    }
    cont = to_columns(c);
  }
  return make_observations(to_columns(s), s.rows[1][0], std::move(cont));
}

}  // namespace ousparse::io
