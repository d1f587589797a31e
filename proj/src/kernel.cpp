#include "templab/kernel.hpp"

#include <cmath>

namespace templab {

double InteractionKernel::operator()(double s) const {
    if (s >= 0) return 1.0 / c;
    return std::exp(c * s / (2.0 * c1)) / c;
}

double interaction_potential(const GridField& z, const GridField& zsharp,
                             const InteractionKernel& k) {
    if (!z.same_grid(zsharp) || z.comps != 1)
        throw GridMismatch("interaction_potential: need two scalar fields on one grid");
    const int N = z.cells();
    const double dx = z.dx;
    const double decay = std::exp(-k.c * dx / (2.0 * k.c1));

    // prefix[j] = sum_{m <= j} |z#_m|, suffix[j] = sum_{m > j} e^{c(x_j-x_m)/(2c1)} |z#_m|
    double acc = 0.0;
    std::vector<double> prefix(N), suffix(N);
    double run = 0.0;
    for (int j = 0; j < N; ++j) {
        run += std::abs(zsharp.data[j]);
        prefix[j] = run;
    }
    suffix[N - 1] = 0.0;
    for (int j = N - 2; j >= 0; --j) {
        suffix[j] = decay * (std::abs(zsharp.data[j + 1]) + suffix[j + 1]);
    }
    for (int j = 0; j < N; ++j) {
        acc += std::abs(z.data[j]) * (prefix[j] + suffix[j]);
    }
    return acc * dx * dx / k.c;
}

double interaction_potential_direct(const GridField& z, const GridField& zsharp,
                                    const InteractionKernel& k) {
    if (!z.same_grid(zsharp) || z.comps != 1)
        throw GridMismatch("interaction_potential: need two scalar fields on one grid");
    const int N = z.cells();
    double acc = 0.0;
    for (int j = 0; j < N; ++j) {
        double zj = std::abs(z.data[j]);
        if (zj == 0.0) continue;
        for (int m = 0; m < N; ++m) {
            acc += k(z.x(j) - zsharp.x(m)) * zj * std::abs(zsharp.data[m]);
        }
    }
    return acc * z.dx * z.dx;
}

} // namespace templab
