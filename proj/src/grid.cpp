#include "templab/grid.hpp"

#include <cmath>

namespace templab {

GridField GridField::zeros(double x0, double dx, int cells, int comps, double t) {
    GridField f;
    f.x0 = x0;
    f.dx = dx;
    f.t = t;
    f.comps = comps;
    f.data.assign(static_cast<size_t>(cells) * comps, 0.0);
    return f;
}

GridField GridField::sample(double x_min, double x_max, int cells,
                            const std::function<Vec(double)>& fn, double t) {
    double dx = (x_max - x_min) / (cells - 1);
    Vec v0 = fn(x_min);
    GridField f = zeros(x_min, dx, cells, static_cast<int>(v0.size()), t);
    f.set_state(0, v0);
    for (int j = 1; j < cells; ++j) f.set_state(j, fn(f.x(j)));
    return f;
}

GridField GridField::sample_scalar(double x_min, double x_max, int cells,
                                   const std::function<double(double)>& fn, double t) {
    return sample(
        x_min, x_max, cells,
        [&](double x) {
            Vec v(1);
            v[0] = fn(x);
            return v;
        },
        t);
}

bool GridField::same_grid(const GridField& o) const {
    return comps == o.comps && cells() == o.cells() && std::abs(x0 - o.x0) < 1e-12 &&
           std::abs(dx - o.dx) < 1e-14;
}

bool GridField::finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double GridField::interp(double x) const {
    const int N = cells();
    double s = (x - x0) / dx;
    if (s <= 0) return data[0];
    if (s >= N - 1) return data[N - 1];
    int j = static_cast<int>(s);
    double w = s - j;
    return (1.0 - w) * data[j] + w * data[j + 1];
}

double l1_norm(const GridField& f) {
    double acc = 0.0;
    const int N = f.cells();
    for (int j = 0; j < N; ++j) acc += f.state(j).norm();
    return acc * f.dx;
}

double l2_norm(const GridField& f) {
    double acc = 0.0;
    const int N = f.cells();
    for (int j = 0; j < N; ++j) acc += f.state(j).squaredNorm();
    return std::sqrt(acc * f.dx);
}

double lp_norm(const GridField& f, double p) {
    double acc = 0.0;
    const int N = f.cells();
    for (int j = 0; j < N; ++j) acc += std::pow(f.state(j).norm(), p);
    return std::pow(acc * f.dx, 1.0 / p);
}

double linf_norm(const GridField& f) {
    double m = 0.0;
    const int N = f.cells();
    for (int j = 0; j < N; ++j) m = std::max(m, f.state(j).norm());
    return m;
}

double l1_distance(const GridField& a, const GridField& b) {
    if (!a.same_grid(b)) throw GridMismatch("l1_distance: incompatible grids");
    double acc = 0.0;
    const int N = a.cells();
    for (int j = 0; j < N; ++j) acc += (a.state(j) - b.state(j)).norm();
    return acc * a.dx;
}

double linf_distance(const GridField& a, const GridField& b) {
    if (!a.same_grid(b)) throw GridMismatch("linf_distance: incompatible grids");
    double m = 0.0;
    const int N = a.cells();
    for (int j = 0; j < N; ++j) m = std::max(m, (a.state(j) - b.state(j)).norm());
    return m;
}

double total_variation(const GridField& f) {
    double acc = 0.0;
    const int N = f.cells();
    for (int j = 0; j + 1 < N; ++j) acc += (f.state(j + 1) - f.state(j)).norm();
    return acc;
}

Vec integral(const GridField& f) {
    Vec acc = Vec::Zero(f.comps);
    const int N = f.cells();
    for (int j = 0; j < N; ++j) acc += f.state(j);
    return acc * f.dx;
}

GridField derivative(const GridField& f) {
    const int N = f.cells();
    GridField d = GridField::zeros(f.x0, f.dx, N, f.comps, f.t);
    for (int j = 0; j < N; ++j) {
        int jm = std::max(0, j - 1), jp = std::min(N - 1, j + 1);
        for (int c = 0; c < f.comps; ++c) {
            d.at(j, c) = (f.at(jp, c) - f.at(jm, c)) / (2.0 * f.dx);
        }
    }
    return d;
}

GridField second_derivative(const GridField& f) {
    const int N = f.cells();
    GridField d = GridField::zeros(f.x0, f.dx, N, f.comps, f.t);
    for (int j = 0; j < N; ++j) {
        int jm = std::max(0, j - 1), jp = std::min(N - 1, j + 1);
        for (int c = 0; c < f.comps; ++c) {
            d.at(j, c) = (f.at(jp, c) - 2.0 * f.at(j, c) + f.at(jm, c)) / (f.dx * f.dx);
        }
    }
    return d;
}

GridField operator+(const GridField& a, const GridField& b) {
    if (!a.same_grid(b)) throw GridMismatch("operator+: incompatible grids");
    GridField out = a;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

GridField operator-(const GridField& a, const GridField& b) {
    if (!a.same_grid(b)) throw GridMismatch("operator-: incompatible grids");
    GridField out = a;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
    return out;
}

GridField operator*(double s, const GridField& a) {
    GridField out = a;
    for (double& v : out.data) v *= s;
    return out;
}

EstimateReport diagnostics(const GridField& u, std::optional<Vec> u_star) {
    EstimateReport rep;
    rep.name = "diagnostics";
    Vec ref = u_star ? *u_star : Vec(u.state(0));
    rep.scalars["tv"] = total_variation(u);
    GridField ux = derivative(u);
    rep.scalars["ux_l1"] = l1_norm(ux);
    rep.scalars["ux_linf"] = linf_norm(ux);
    rep.scalars["uxx_l1"] = l1_norm(second_derivative(u));
    double m = 0.0;
    for (int j = 0; j < u.cells(); ++j) m = std::max(m, (u.state(j) - ref).norm());
    rep.scalars["dev_linf"] = m;
    rep.scalars["t"] = u.t;
    return rep;
}

} // namespace templab
