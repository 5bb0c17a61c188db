#pragma once

#include <string>
#include <vector>

#include "epps/analysis.hpp"

namespace epps::csv {

// 10-significant-digit representation with '.' decimal separator; NaN maps
// to the empty field (the not-applicable sentinel).
std::string format_value(double v);

// Schema: h_seconds,rho,ci_low,ci_high,n_effective  (LF line endings).
void write_curve(const std::string& path, const CorrelationCurve& curve);

// Same plus mc_se and rho_closed_form columns for Monte Carlo runs.
void write_curve_with_reference(const std::string& path, const CorrelationCurve& curve,
                                const std::vector<double>& mc_se,
                                const std::vector<double>& rho_reference);

// Schema: t_seconds,mid_1,mid_2.
void write_prices(const std::string& path, const PriceSeries& s1, const PriceSeries& s2);

// A parsed curve file: the h column kept as raw text (join key) plus the
// rho column; n_effective when the file carries it (-1 otherwise).
struct CurveFile {
  std::vector<std::string> h_text;
  std::vector<double> h;
  std::vector<double> rho;
  std::vector<std::int64_t> n_effective;
};

CurveFile read_curve(const std::string& path);

// Inner join of several curve files on the h column; one rho column per
// input, named rho_<label>. Throws if the grids share no rows.
void write_joined_curves(const std::string& path, const std::vector<CurveFile>& files,
                         const std::vector<std::string>& labels);

// Sidecar metadata: `key = value` lines describing the effective
// configuration of the command that produced an output.
void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace epps::csv
