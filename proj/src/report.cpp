#include "templab/report.hpp"

#include <array>
#include <cmath>
#include <cstdio>

namespace templab {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json EstimateReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = name;
    j["pass"] = pass;
    j["scalars"] = scalars;
    j["thresholds"] = thresholds;
    if (fit) {
        nlohmann::json f;
        f["model"] = fit->model;
        f["exponent"] = fit->exponent;
        f["constant"] = fit->constant;
        f["residual"] = fit->residual;
        for (const auto& [k, v] : fit->extra) f[k] = v;
        j["fit"] = f;
    }
    if (!series_columns.empty()) j["series_columns"] = series_columns;
    return j;
}

void EstimateReport::write_series_csv(std::ostream& os) const {
    for (size_t c = 0; c < series_columns.size(); ++c) {
        if (c) os << ',';
        os << series_columns[c];
    }
    os << '\n';
    for (const auto& row : series) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            os << format_double(row[c]);
        }
        os << '\n';
    }
}

bool EstimateReport::check_le(const std::string& key, double value, double limit) {
    scalars[key] = value;
    thresholds[key + "_max"] = limit;
    bool ok = value <= limit;
    pass = pass && ok;
    return ok;
}

bool EstimateReport::check_ge(const std::string& key, double value, double limit) {
    scalars[key] = value;
    thresholds[key + "_min"] = limit;
    bool ok = value >= limit;
    pass = pass && ok;
    return ok;
}

FitResult power_fit(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& model) {
    FitResult r;
    r.model = model;
    const size_t m = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t used = 0;
    for (size_t i = 0; i < m; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++used;
    }
    if (used < 2) {
        r.residual = 0.0;
        r.extra["points"] = static_cast<double>(used);
        return r;
    }
    double denom = used * sxx - sx * sx;
    r.exponent = (used * sxy - sx * sy) / denom;
    double logc = (sy - r.exponent * sx) / used;
    r.constant = std::exp(logc);
    double num = 0, den = 0;
    for (size_t i = 0; i < m; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        double fitv = r.constant * std::pow(x[i], r.exponent);
        num += (y[i] - fitv) * (y[i] - fitv);
        den += y[i] * y[i];
    }
    r.residual = den > 0 ? std::sqrt(num / den) : 0.0;
    r.extra["points"] = static_cast<double>(used);
    return r;
}

FitResult modulus_fit(const std::vector<std::array<double, 3>>& rows) {
    FitResult r;
    r.model = "a*|t-s| + b*sqrt(eps)*|sqrt(t)-sqrt(s)|";
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (const auto& row : rows) {
        a11 += row[0] * row[0];
        a12 += row[0] * row[1];
        a22 += row[1] * row[1];
        b1 += row[0] * row[2];
        b2 += row[1] * row[2];
    }
    double det = a11 * a22 - a12 * a12;
    double a = 0, b = 0;
    if (std::abs(det) > 1e-300) {
        a = (a22 * b1 - a12 * b2) / det;
        b = (a11 * b2 - a12 * b1) / det;
    }
    // clamp to the nonnegative quadrant, refitting the free coefficient
    if (a < 0 && b < 0) {
        a = b = 0;
    } else if (a < 0) {
        a = 0;
        b = a22 > 0 ? b2 / a22 : 0;
        if (b < 0) b = 0;
    } else if (b < 0) {
        b = 0;
        a = a11 > 0 ? b1 / a11 : 0;
        if (a < 0) a = 0;
    }
    double num = 0, den = 0;
    for (const auto& row : rows) {
        double fitv = a * row[0] + b * row[1];
        num += (row[2] - fitv) * (row[2] - fitv);
        den += row[2] * row[2];
    }
    r.constant = a;
    r.exponent = b; // reused slot: second coefficient
    r.extra["a"] = a;
    r.extra["b"] = b;
    r.extra["points"] = static_cast<double>(rows.size());
    r.residual = den > 0 ? std::sqrt(num / den) : 0.0;
    return r;
}

FitResult line_fit(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& model) {
    FitResult r;
    r.model = model;
    const size_t m = x.size();
    if (m < 2) return r;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = m * sxx - sx * sx;
    r.exponent = (m * sxy - sx * sy) / denom; // slope
    r.constant = (sy - r.exponent * sx) / m;  // intercept
    double num = 0, den = 0;
    for (size_t i = 0; i < m; ++i) {
        double fitv = r.constant + r.exponent * x[i];
        num += (y[i] - fitv) * (y[i] - fitv);
        den += y[i] * y[i];
    }
    r.residual = den > 0 ? std::sqrt(num / den) : 0.0;
    r.extra["points"] = static_cast<double>(m);
    return r;
}

} // namespace templab
