#include "templab/coefficients.hpp"

#include <cmath>

#include "templab/solver.hpp"

namespace templab {

namespace {

// All first derivatives of the eigen-fields along the base directions r_j,
// with every displaced frame sign-aligned to `ref`.
struct FrameDerivatives {
    std::vector<std::vector<Vec>> brr; // [j][i] = r_j . grad r_i
    std::vector<std::vector<double>> bmu; // [j][i] = r_j . grad mu_i
};

FrameDerivatives frame_derivatives(const SystemSpec& sys, const Vec& u, const Mat& ref,
                                   double h) {
    const int n = sys.n;
    FrameDerivatives d;
    d.brr.assign(n, std::vector<Vec>(n));
    d.bmu.assign(n, std::vector<double>(n, 0.0));
    for (int j = 0; j < n; ++j) {
        Vec dir = ref.col(j);
        EigenFrame fp = compute_frame_aligned(sys, u + h * dir, ref);
        EigenFrame fm = compute_frame_aligned(sys, u - h * dir, ref);
        for (int i = 0; i < n; ++i) {
            d.brr[j][i] = (fp.right.col(i) - fm.right.col(i)) / (2.0 * h);
            d.bmu[j][i] = (fp.mu[i] - fm.mu[i]) / (2.0 * h);
        }
    }
    return d;
}

// derivative of the field u' -> r_k(u') along an arbitrary direction w
Vec bullet_r_along(const SystemSpec& sys, const Vec& u, const Mat& ref, int k, const Vec& w,
                   double h) {
    double nw = w.norm();
    if (nw < 1e-300) return Vec::Zero(sys.n);
    Vec d = w / nw;
    EigenFrame fp = compute_frame_aligned(sys, u + h * d, ref);
    EigenFrame fm = compute_frame_aligned(sys, u - h * d, ref);
    return ((fp.right.col(k) - fm.right.col(k)) * (nw / (2.0 * h))).eval();
}

Mat bullet_mat(const MatrixFn& M, const Vec& u, const Vec& w, double h, int n) {
    double nw = w.norm();
    if (nw < 1e-300) return Mat::Zero(n, n);
    Vec d = w / nw;
    return ((M(u + h * d) - M(u - h * d)) * (nw / (2.0 * h))).eval();
}

Mat d2_mat(const MatrixFn& M, const Vec& u, const Vec& a, const Vec& b, double h) {
    return ((M(u + h * (a + b)) - M(u + h * (a - b)) - M(u - h * (a - b)) +
             M(u - h * (a + b))) /
            (4.0 * h * h))
        .eval();
}

} // namespace

SourceCoefficients source_coefficients(const SystemSpec& sys, const Vec& u, double step) {
    const int n = sys.n;
    const double h = step > 0 ? step : sys.tol.bullet_step;
    // Nested second differences divide eigensolver noise by 4 h2^2; a larger
    // step keeps the noise floor well below the coefficient tolerances.
    const double h2 = std::max(h, 2e-3);
    require_in_domain(sys, u);

    EigenFrame f0 = compute_frame(sys, u);
    const Mat& ref = f0.right;
    FrameDerivatives d = frame_derivatives(sys, u, ref, h);

    // (w_{lj} . grad) r_k with w_{lj} = r_l . grad r_j
    std::vector<std::vector<std::vector<Vec>>> bw(n);
    for (int l = 0; l < n; ++l) {
        bw[l].assign(n, std::vector<Vec>(n));
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                bw[l][j][k] = bullet_r_along(sys, u, ref, k, d.brr[l][j], h);
            }
        }
    }

    // nested[l][k][j] = r_l . grad( u' -> (r_k . grad r_j)(u') )
    std::vector<std::vector<std::vector<Vec>>> nested(n);
    for (int l = 0; l < n; ++l) {
        Vec dir = ref.col(l);
        FrameDerivatives dp = frame_derivatives(sys, u + h2 * dir, ref, h2);
        FrameDerivatives dm = frame_derivatives(sys, u - h2 * dir, ref, h2);
        nested[l].assign(n, std::vector<Vec>(n));
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                nested[l][k][j] = (dp.brr[k][j] - dm.brr[k][j]) / (2.0 * h2);
    }

    // directional derivatives of A and B along the frame directions
    std::vector<Mat> bA(n), bB(n);
    for (int j = 0; j < n; ++j) {
        bA[j] = bullet_mat(sys.A, u, ref.col(j), h, n);
        bB[j] = bullet_mat(sys.B, u, ref.col(j), h, n);
    }

    SourceCoefficients c;
    c.n = n;
    c.p.assign(n, Mat::Zero(n, n));
    c.q.assign(n, Mat::Zero(n, n));
    c.s.assign(n, std::vector<Mat>(n, Mat::Zero(n, n)));
    c.phat.assign(n, std::vector<Vec>(n));
    c.shat.assign(n, std::vector<Vec>(n));
    c.what.assign(n, std::vector<Vec>(n));
    c.qhat.assign(n, std::vector<std::vector<Vec>>(n, std::vector<Vec>(n)));

    auto brr = [&](int a, int b) -> const Vec& { return d.brr[a][b]; };
    auto bmu = [&](int a, int b) { return d.bmu[a][b]; };

    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            Vec pv = -f0.lambda[j] * (brr(k, j) - brr(j, k));
            Vec qv = 2.0 * f0.mu[j] * brr(k, j) + (f0.mu[k] - f0.mu[j]) * brr(j, k);
            for (int i = 0; i < n; ++i) {
                c.p[i](j, k) = f0.left.row(i).dot(pv);
                c.q[i](j, k) = f0.left.row(i).dot(qv);
            }
            for (int l = 0; l < n; ++l) {
                Vec sv = 2.0 * bmu(k, j) * brr(l, j) +
                         f0.mu[j] * (nested[l][k][j] - bw[l][j][k]) -
                         bmu(l, k) * brr(k, j);
                for (int i = 0; i < n; ++i) c.s[i][j](k, l) = f0.left.row(i).dot(sv);
            }
        }
    }

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            c.phat[i][j] = (f0.lambda[j] - f0.lambda[i]) * brr(j, i) + bA[j] * ref.col(i) -
                           bA[i] * ref.col(j);
            c.shat[i][j] = 2.0 * f0.mu[i] * brr(j, i) + bB[i] * ref.col(j) -
                           bB[j] * ref.col(i);
            c.what[i][j] = (f0.mu[i] - f0.mu[j]) * brr(j, i) - bB[j] * ref.col(i) +
                           bB[i] * ref.col(j);
            for (int k = 0; k < n; ++k) {
                Vec qv = -bmu(k, j) * brr(j, i) - f0.mu[j] * bw[k][j][i] +
                         2.0 * bmu(k, i) * brr(j, i) + f0.mu[i] * nested[k][j][i] +
                         bullet_mat(sys.B, u, brr(k, i), h, n) * ref.col(j) -
                         bullet_mat(sys.B, u, brr(k, j), h, n) * ref.col(i) +
                         bB[i] * brr(k, j) - bB[j] * brr(k, i) +
                         d2_mat(sys.B, u, ref.col(j), ref.col(i), h) * ref.col(k) -
                         d2_mat(sys.B, u, ref.col(j), ref.col(k), h) * ref.col(i);
                c.qhat[i][j][k] = qv;
            }
        }
    }
    return c;
}

double SourceCoefficients::max_diagonal_violation() const {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(p[i](k, k)));
            worst = std::max(worst, std::abs(q[i](k, k)));
            worst = std::max(worst, std::abs(s[i][k](k, k)));
        }
    }
    for (int k = 0; k < n; ++k) {
        worst = std::max(worst, phat[k][k].cwiseAbs().maxCoeff());
        worst = std::max(worst, qhat[k][k][k].cwiseAbs().maxCoeff());
        worst = std::max(worst, shat[k][k].cwiseAbs().maxCoeff());
        worst = std::max(worst, what[k][k].cwiseAbs().maxCoeff());
    }
    return worst;
}

Vec eval_phi(const SourceCoefficients& c, const Vec& v, const Vec& vx, double eps) {
    Vec phi = Vec::Zero(c.n);
    for (int i = 0; i < c.n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < c.n; ++j) {
            for (int k = 0; k < c.n; ++k) {
                acc += c.p[i](j, k) * v[j] * v[k];
                acc += eps * c.q[i](j, k) * vx[j] * v[k];
                for (int l = 0; l < c.n; ++l) {
                    acc += eps * c.s[i][j](k, l) * v[j] * v[k] * v[l];
                }
            }
        }
        phi[i] = acc;
    }
    return phi;
}

double phi_l1(const SystemSpec& sys, const GridField& u, double eps, int stride) {
    std::vector<GridField> v = gradient_decompose(sys, u);
    const int N = u.cells();
    Vec vj(sys.n), vxj(sys.n);
    double acc = 0.0;
    int counted = 0;
    for (int j = 1; j + 1 < N; j += stride) {
        for (int i = 0; i < sys.n; ++i) {
            vj[i] = v[i].data[j];
            vxj[i] = (v[i].data[j + 1] - v[i].data[j - 1]) / (2.0 * u.dx);
        }
        SourceCoefficients c = source_coefficients(sys, u.state(j));
        acc += eval_phi(c, vj, vxj, eps).cwiseAbs().sum();
        ++counted;
    }
    if (counted == 0) return 0.0;
    // stride-adjusted rectangle rule
    return acc * u.dx * (static_cast<double>(N - 2) / counted);
}

EstimateReport residual_v_equation(const SystemSpec& sys,
                                   const std::vector<GridField>& u_traj, double epsilon) {
    if (u_traj.size() < 3)
        throw InsufficientRecords("residual_v_equation needs >= 3 records");
    const double dt = u_traj[1].t - u_traj[0].t;
    for (size_t m = 1; m + 1 < u_traj.size(); ++m) {
        double d = u_traj[m + 1].t - u_traj[m].t;
        if (std::abs(d - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw InsufficientRecords("residual_v_equation needs uniformly spaced records");
    }

    const int n = sys.n;
    const int N = u_traj.front().cells();
    const double dx = u_traj.front().dx;

    std::vector<double> mismatch(n, 0.0);
    int used = 0;
    for (size_t m = 1; m + 1 < u_traj.size(); ++m) {
        const GridField& um = u_traj[m];
        std::vector<GridField> vprev = gradient_decompose(sys, u_traj[m - 1]);
        std::vector<GridField> vmid = gradient_decompose(sys, um);
        std::vector<GridField> vnext = gradient_decompose(sys, u_traj[m + 1]);

        // lambda_i v_i and mu_i v_i as fields at the middle record
        std::vector<std::vector<double>> lv(n, std::vector<double>(N));
        std::vector<std::vector<double>> mv(n, std::vector<double>(N));
        std::vector<SourceCoefficients> coeffs(N);
        for (int j = 0; j < N; ++j) {
            EigenFrame f = compute_frame(sys, um.state(j));
            for (int i = 0; i < n; ++i) {
                lv[i][j] = f.lambda[i] * vmid[i].data[j];
                mv[i][j] = f.mu[i] * vmid[i].data[j];
            }
        }
        Vec vj(n), vxj(n);
        for (int j = 2; j + 2 < N; ++j) {
            for (int i = 0; i < n; ++i) {
                vj[i] = vmid[i].data[j];
                vxj[i] = (vmid[i].data[j + 1] - vmid[i].data[j - 1]) / (2.0 * dx);
            }
            SourceCoefficients c = source_coefficients(sys, um.state(j));
            Vec phi = eval_phi(c, vj, vxj, epsilon);
            for (int i = 0; i < n; ++i) {
                double vt = (vnext[i].data[j] - vprev[i].data[j]) / (2.0 * dt);
                double lvx = (lv[i][j + 1] - lv[i][j - 1]) / (2.0 * dx);
                double mvxx =
                    (mv[i][j + 1] - 2.0 * mv[i][j] + mv[i][j - 1]) / (dx * dx);
                mismatch[i] += std::abs(vt + lvx - epsilon * mvxx - phi[i]);
            }
        }
        ++used;
    }

    EstimateReport rep;
    rep.name = "residual_v_equation:" + sys.name;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double mi = mismatch[i] * dx / std::max(1, used);
        rep.scalars["mismatch_l1_family" + std::to_string(i + 1)] = mi;
        total += mi;
    }
    rep.scalars["mismatch_l1_total"] = total;
    rep.scalars["dx"] = dx;
    rep.scalars["dt"] = dt;
    rep.scalars["records_used"] = used;
    return rep;
}

} // namespace templab
