#include "templab/transform.hpp"

#include <cmath>

namespace templab {

std::vector<GridField> transform_T(const SystemSpec& sys, const GridField& u,
                                   const std::vector<GridField>& f) {
    const int n = sys.n;
    const int N = u.cells();
    if (static_cast<int>(f.size()) != n)
        throw GridMismatch("transform_T: expected one scalar field per family");
    for (const GridField& fi : f) {
        if (fi.comps != 1 || fi.cells() != N)
            throw GridMismatch("transform_T: fields must be scalar on the state grid");
    }

    // mu_i along the state field
    std::vector<std::vector<double>> mu(n, std::vector<double>(N));
    for (int j = 0; j < N; ++j) {
        EigenFrame fr = compute_frame(sys, u.state(j));
        for (int i = 0; i < n; ++i) {
            if (!(fr.mu[i] > 0.0))
                throw NonPositiveViscosity("mu_" + std::to_string(i + 1) +
                                           " <= 0 along the field");
            mu[i][j] = fr.mu[i];
        }
    }

    std::vector<GridField> out;
    out.reserve(n);
    std::vector<double> X(N);
    for (int i = 0; i < n; ++i) {
        X[0] = 0.0;
        for (int j = 1; j < N; ++j) {
            X[j] = X[j - 1] + 0.5 * u.dx * (1.0 / std::sqrt(mu[i][j - 1]) +
                                            1.0 / std::sqrt(mu[i][j]));
        }
        double dy = X[N - 1] / (N - 1);
        GridField g = GridField::zeros(0.0, dy, N, 1, u.t);
        int seg = 0;
        for (int k = 0; k < N; ++k) {
            double y = k * dy;
            while (seg + 2 < N && X[seg + 1] < y) ++seg;
            double span = X[seg + 1] - X[seg];
            double frac = span > 0 ? (y - X[seg]) / span : 0.0;
            frac = std::min(1.0, std::max(0.0, frac));
            g.data[k] = (1.0 - frac) * f[i].data[seg] + frac * f[i].data[seg + 1];
        }
        out.push_back(std::move(g));
    }
    return out;
}

} // namespace templab
