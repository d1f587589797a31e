#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "templab/errors.hpp"
#include "templab/report.hpp"

namespace templab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Tolerances {
    double frame_tol = 1e-10;       // eigenpair residuals, biorthogonality
    double commutation_tol = 1e-10; // ||AB - BA||_F
    double temple_tol = 1e-6;       // max |r_i . grad r_i|
    double gap_min = 1e-6;          // minimal eigenvalue separation
    double jacobian_tol = 1e-6;     // finite-difference Dflux vs A
    double bullet_step = 1e-5;      // default directional-derivative step
};

// Axis-aligned box approximating the admissible state region.
struct Box {
    Vec lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Vec& u, double margin = 0.0) const;
    Vec center() const { return 0.5 * (lo + hi); }
    double min_width() const { return (hi - lo).minCoeff(); }
    // Deterministic lattice with `per_axis` points per axis, inset from the
    // faces so finite-difference stencils stay inside.
    std::vector<Vec> lattice(int per_axis, double inset = 0.05) const;
};

using MatrixFn = std::function<Mat(const Vec&)>;
using FluxFn = std::function<Vec(const Vec&)>;

// Exact scalar decoupling of a constant-frame system: w = Rinv*u evolves as n
// independent scalar laws w_c,t + g_c(w_c)_x = eps*(mu_c(w_c) w_c,x)_x.
struct DecoupledForm {
    Mat R, Rinv;
    std::vector<std::function<double(double)>> lambda_c; // g_c' = lambda_c
    std::vector<std::function<double(double)>> mu_c;
};

struct SystemSpec {
    std::string name;
    int n = 0;
    MatrixFn A;
    MatrixFn B;
    std::optional<FluxFn> flux; // present iff A = Dflux
    Box domain_box;
    double c0 = 1.0; // lower bound for B's eigenvalues
    Tolerances tol;

    // Optional local bound on max|lambda_i(u)| used for Rusanov dissipation;
    // falls back to the global box bound when absent.
    std::function<double(const Vec&)> char_speed_bound;

    std::optional<DecoupledForm> decoupled;
};

// Spectral data of A(u) (shared with B(u) by commutation).
struct EigenFrame {
    Vec u;
    Vec lambda;  // strictly increasing
    Vec mu;      // B-eigenvalues in the A-frame
    Mat right;   // columns r_i, |r_i| = 1, largest-magnitude component positive
    Mat left;    // rows l_i, l_i . r_j = delta_ij
};

// Diagonalizes A(u), orders eigenvalues increasingly, fixes signs, and reads
// off mu_i = (l_i B r_i)/(l_i r_i). Throws NonReal, DegenerateSpectrum or
// CommutationViolation.
EigenFrame compute_frame(const SystemSpec& sys, const Vec& u);

// Same, but with (r_i, l_i) sign-aligned against the columns of `ref_right`
// so frames vary continuously along curves in state space.
EigenFrame compute_frame_aligned(const SystemSpec& sys, const Vec& u, const Mat& ref_right);

// Central-difference directional derivative (g(u+step z) - g(u-step z))/(2 step).
// The template works for any value type supporting +,-,* by scalar.
// Throws OutOfDomain when the stencil leaves the domain box.
void require_in_domain(const SystemSpec& sys, const Vec& u);

template <class F>
auto directional_derivative(const SystemSpec& sys, F&& g, const Vec& u, const Vec& zeta,
                            double step) {
    Vec up = u + step * zeta;
    Vec um = u - step * zeta;
    require_in_domain(sys, up);
    require_in_domain(sys, um);
    auto gp = g(up);
    auto gm = g(um);
    return ((gp - gm) / (2.0 * step)).eval();
}

// max over samples and families of |r_i . grad r_i| (sign-consistent frames
// along the direction r_i); pass iff below temple_tol.
EstimateReport check_temple(const SystemSpec& sys, const std::vector<Vec>& samples,
                            double step = 1e-5);

// SystemSpec invariants (H_A1, H_B, commutation, flux Jacobian consistency)
// over a sample set. Reports the worst residual per check.
EstimateReport check_system(const SystemSpec& sys, const std::vector<Vec>& samples);

// Bundled corpus ------------------------------------------------------------

// The Temple-class corpus (all pass check_temple and check_system).
std::vector<SystemSpec> bundled_systems();

// Genuinely nonlinear p-system; passes check_system, fails check_temple.
SystemSpec negative_control();

// All registry names (corpus + negative control).
std::vector<std::string> list_system_names();

// Resolves a registry name or a path to a declarative JSON definition.
SystemSpec get_system(const std::string& name_or_path);

// Loads a custom system from a JSON definition file (see README for schema).
SystemSpec load_system_file(const std::string& path);

} // namespace templab
