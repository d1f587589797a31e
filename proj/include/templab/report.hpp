#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace templab {

inline constexpr int kSchemaVersion = 1;

// Formats a double with 17 significant digits (round-trip exact, stable).
std::string format_double(double v);

struct FitResult {
    std::string model;
    double exponent = 0.0;
    double constant = 0.0;
    double residual = 0.0; // relative residual of the fit
    std::map<std::string, double> extra;
};

// Named scalar diagnostics plus optional time series and fit. `pass` is
// determined solely from the recorded scalars/fit and recorded thresholds.
struct EstimateReport {
    std::string name;
    std::map<std::string, double> scalars;
    std::map<std::string, double> thresholds;
    std::vector<std::string> series_columns;
    std::vector<std::vector<double>> series;
    std::optional<FitResult> fit;
    bool pass = true;

    nlohmann::json to_json() const;
    void write_series_csv(std::ostream& os) const;

    // Records `value`, compares it against `limit` (value <= limit) and
    // accumulates into `pass`.
    bool check_le(const std::string& key, double value, double limit);
    bool check_ge(const std::string& key, double value, double limit);
};

// Least-squares fits -------------------------------------------------------

// y ~ C * x^p via linear regression in log-log space. Residual is the
// relative RMS of (y - C x^p) / y. Requires positive data.
FitResult power_fit(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& model = "C*x^p");

// d ~ a*|t-s| + b*sqrt(eps)*|sqrt(t)-sqrt(s)| with a,b >= 0 over a dataset of
// rows (dt_abs, sqrt_term, d). Residual is ||model - d||_2 / ||d||_2.
FitResult modulus_fit(const std::vector<std::array<double, 3>>& rows);

// log y ~ a + slope * x linear regression.
FitResult line_fit(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& model = "a+slope*x");

} // namespace templab
