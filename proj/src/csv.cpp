#include "epps/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace epps::csv {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::string format_value(double v) {
  if (std::isnan(v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_curve(const std::string& path, const CorrelationCurve& curve) {
  std::ofstream out = open_out(path);
  out << "h_seconds,rho,ci_low,ci_high,n_effective\n";
  for (const CurveRow& r : curve.rows) {
    out << format_value(r.h) << ',' << format_value(r.rho) << ','
        << format_value(r.ci_low) << ',' << format_value(r.ci_high) << ','
        << r.n_effective << '\n';
  }
}

void write_curve_with_reference(const std::string& path, const CorrelationCurve& curve,
                                const std::vector<double>& mc_se,
                                const std::vector<double>& rho_reference) {
  if (mc_se.size() != curve.rows.size() || rho_reference.size() != curve.rows.size()) {
    throw std::invalid_argument("write_curve_with_reference: column length mismatch");
  }
  std::ofstream out = open_out(path);
  out << "h_seconds,rho,ci_low,ci_high,n_effective,mc_se,rho_closed_form\n";
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    const CurveRow& r = curve.rows[i];
    out << format_value(r.h) << ',' << format_value(r.rho) << ','
        << format_value(r.ci_low) << ',' << format_value(r.ci_high) << ','
        << r.n_effective << ',' << format_value(mc_se[i]) << ','
        << format_value(rho_reference[i]) << '\n';
  }
}

void write_prices(const std::string& path, const PriceSeries& s1,
                  const PriceSeries& s2) {
  if (s1.mids.size() != s2.mids.size() || s1.dt != s2.dt) {
    throw std::invalid_argument("write_prices: series are not aligned");
  }
  std::ofstream out = open_out(path);
  out << "t_seconds,mid_1,mid_2\n";
  for (std::size_t i = 0; i < s1.mids.size(); ++i) {
    out << format_value(static_cast<double>(i) * s1.dt) << ','
        << format_value(s1.mids[i]) << ',' << format_value(s2.mids[i]) << '\n';
  }
}

CurveFile read_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("'" + path + "' is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);
  std::size_t h_col = header.size(), rho_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "h_seconds") h_col = i;
    if (header[i] == "rho") rho_col = i;
  }
  if (h_col == header.size() || rho_col == header.size()) {
    throw std::runtime_error("'" + path + "' lacks h_seconds/rho columns");
  }

  std::size_t n_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "n_effective") n_col = i;
  }

  CurveFile file;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() <= std::max(h_col, rho_col)) {
      throw std::runtime_error("'" + path + "' has a short row: " + line);
    }
    file.h_text.push_back(fields[h_col]);
    file.h.push_back(std::stod(fields[h_col]));
    file.rho.push_back(std::stod(fields[rho_col]));
    file.n_effective.push_back(
        n_col < fields.size() ? std::stoll(fields[n_col]) : -1);
  }
  return file;
}

void write_joined_curves(const std::string& path, const std::vector<CurveFile>& files,
                         const std::vector<std::string>& labels) {
  if (files.size() < 2 || files.size() != labels.size()) {
    throw std::invalid_argument("write_joined_curves: need >= 2 labelled curves");
  }

  // Join on the raw h text of the first file; later files are indexed by it.
  std::vector<std::map<std::string, double>> lookup(files.size());
  for (std::size_t f = 1; f < files.size(); ++f) {
    for (std::size_t i = 0; i < files[f].h_text.size(); ++i) {
      lookup[f][files[f].h_text[i]] = files[f].rho[i];
    }
  }

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < files[0].h_text.size(); ++i) {
    bool in_all = true;
    for (std::size_t f = 1; f < files.size() && in_all; ++f) {
      in_all = lookup[f].count(files[0].h_text[i]) > 0;
    }
    if (in_all) kept.push_back(i);
  }
  if (kept.empty()) {
    throw std::runtime_error("write_joined_curves: curve grids share no h values");
  }

  std::ofstream out = open_out(path);
  out << "h_seconds";
  for (const std::string& label : labels) out << ",rho_" << label;
  out << '\n';
  for (const std::size_t i : kept) {
    out << files[0].h_text[i];
    out << ',' << format_value(files[0].rho[i]);
    for (std::size_t f = 1; f < files.size(); ++f) {
      out << ',' << format_value(lookup[f][files[0].h_text[i]]);
    }
    out << '\n';
  }
}

void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out = open_out(path);
  for (const auto& [key, value] : entries) {
    out << key << " = " << value << '\n';
  }
}

}  // namespace epps::csv
