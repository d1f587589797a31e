#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "templab/errors.hpp"
#include "templab/report.hpp"

namespace templab {

using Vec = Eigen::VectorXd;

// Uniform 1-D grid carrying `comps`-vector values at a time stamp.
// Values are stored cell-major: data[j*comps + c].
struct GridField {
    double x0 = 0.0;
    double dx = 1.0;
    double t = 0.0;
    int comps = 1;
    std::vector<double> data;

    static GridField zeros(double x0, double dx, int cells, int comps, double t = 0.0);
    // Samples fn at cell nodes x_j = x0 + j*dx, j = 0..cells-1.
    static GridField sample(double x_min, double x_max, int cells,
                            const std::function<Vec(double)>& fn, double t = 0.0);
    static GridField sample_scalar(double x_min, double x_max, int cells,
                                   const std::function<double(double)>& fn, double t = 0.0);

    int cells() const { return comps > 0 ? static_cast<int>(data.size()) / comps : 0; }
    double x(int j) const { return x0 + j * dx; }
    double x_last() const { return x(cells() - 1); }

    double& at(int j, int c) { return data[static_cast<size_t>(j) * comps + c]; }
    double at(int j, int c) const { return data[static_cast<size_t>(j) * comps + c]; }
    Eigen::Map<const Vec> state(int j) const {
        return Eigen::Map<const Vec>(data.data() + static_cast<size_t>(j) * comps, comps);
    }
    void set_state(int j, const Vec& v) {
        for (int c = 0; c < comps; ++c) at(j, c) = v[c];
    }

    bool same_grid(const GridField& o) const;
    bool finite() const;
    // Linear interpolation (clamped at the ends); comps must be 1.
    double interp(double x) const;
};

// Norms use the rectangle rule (dx * sum) with the Euclidean norm per cell.
double l1_norm(const GridField& f);
double l2_norm(const GridField& f);
double lp_norm(const GridField& f, double p);
double linf_norm(const GridField& f);
double l1_distance(const GridField& a, const GridField& b);
double linf_distance(const GridField& a, const GridField& b);
// sum_j |u_{j+1} - u_j|_2
double total_variation(const GridField& f);
// integral of each component (rectangle rule)
Vec integral(const GridField& f);

// Central-difference first derivative (constant-extension ghosts).
GridField derivative(const GridField& f);
// Second difference (constant-extension ghosts).
GridField second_derivative(const GridField& f);

GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);
GridField operator*(double s, const GridField& a);

// TV, ||u_x||_L1, ||u_xx||_L1, ||u_x||_Linf, ||u - u*||_Linf. `u_star`
// defaults to the left-edge state.
EstimateReport diagnostics(const GridField& u, std::optional<Vec> u_star = std::nullopt);

} // namespace templab
