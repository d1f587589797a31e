#pragma once

#include <vector>

#include "templab/grid.hpp"
#include "templab/system.hpp"

namespace templab {

// Coefficient tensors of the gradient-component equations at a state u.
//
// The decomposed gradient v_i = l_i . u_x satisfies
//   v_{i,t} + (lambda_i v_i)_x - eps (mu_i v_i)_{xx}
//     = sum_{jk} p^i_{jk} v_j v_k + eps sum_{jk} q^i_{jk} v_{j,x} v_k
//       + eps sum_{jkl} s^i_{jkl} v_j v_k v_l,
// and the first-variation components h_i = l_i . h satisfy
//   h_{i,t} + (lambda_i h_i)_x - eps (mu_i h_i)_{xx}
//     = sum_i l . [ phat_{ij} h_i v_j + eps qhat_{ijk} h_i v_j v_k
//                   + eps shat_{ij} h_{i,x} v_j + eps what_{ij} h_i v_{j,x} ].
//
// p,q,s are stored projected (p[i](j,k) = l_i . p_{jk}); the hat tensors are
// stored as state-space vectors. All diagonal entries p^i_{kk}, q^i_{kk},
// s^i_{kkk}, phat_{kk}, qhat_{kkk}, shat_{kk}, what_{kk} vanish for Temple
// systems.
struct SourceCoefficients {
    int n = 0;
    std::vector<Mat> p;                            // [i](j,k)
    std::vector<Mat> q;                            // [i](j,k)
    std::vector<std::vector<Mat>> s;               // [i][j](k,l)
    std::vector<std::vector<Vec>> phat;            // [i][j]
    std::vector<std::vector<std::vector<Vec>>> qhat; // [i][j][k]
    std::vector<std::vector<Vec>> shat;            // [i][j]
    std::vector<std::vector<Vec>> what;            // [i][j]

    // worst |diagonal| entry across all seven vanishing identities
    double max_diagonal_violation() const;
};

// Evaluates all tensors with nested central differences (aligned frames).
// `step` <= 0 uses sys.tol.bullet_step. Throws OutOfDomain when stencils
// leave the domain box.
SourceCoefficients source_coefficients(const SystemSpec& sys, const Vec& u, double step = 0.0);

// phi_i(u, v, v_x) for the v-equation above; eps multiplies the q and s parts.
Vec eval_phi(const SourceCoefficients& c, const Vec& v, const Vec& vx, double eps);

// L1 norm per family of sum_i |phi_i| over a state field (used for the
// phi-budget monitors). Returns dx * sum_j sum_i |phi_i(x_j)|.
double phi_l1(const SystemSpec& sys, const GridField& u, double eps, int stride = 1);

// Discrete consistency check of the v-equation along a trajectory of >= 3
// uniformly spaced records: reports the L1 mismatch (interior cells) between
// the discrete left side and phi per family; first-order convergent under
// simultaneous dx, dt refinement.
EstimateReport residual_v_equation(const SystemSpec& sys,
                                   const std::vector<GridField>& u_traj, double epsilon);

} // namespace templab
