#include "templab/solver.hpp"

#include <algorithm>
#include <cmath>

namespace templab {

namespace {

constexpr double kTimeSnap = 1e-12;

std::vector<double> normalize_records(const SolveConfig& cfg) {
    std::vector<double> rec = cfg.record_times;
    if (rec.empty()) rec.push_back(cfg.t_end);
    std::sort(rec.begin(), rec.end());
    return rec;
}

int wrap(int j, int N) { return (j % N + N) % N; }

struct Stepper {
    const SystemSpec& sys;
    const SolveConfig& cfg;
    int N;
    double dx;
    bool periodic;
    bool flux_form;
    StabilityBounds bounds;
    double dt_base;

    // workspace
    std::vector<Vec> fbuf;      // flux at cells
    std::vector<double> abuf;   // local speed bound at cells
    std::vector<double> gbuf;   // scalar flux cache
    std::vector<Mat> Bbuf;      // B at interfaces, index i between cells i-1,i

    Stepper(const SystemSpec& s, const GridField& u0, const SolveConfig& c)
        : sys(s), cfg(c), N(u0.cells()), dx(u0.dx),
          periodic(c.boundary == Boundary::Periodic),
          flux_form(c.use_flux_form && s.flux.has_value()) {
        bounds = stability_bounds(sys);
        double dt_adv = dx / std::max(bounds.lambda_max, 1e-300);
        double dt_diff = cfg.epsilon > 0
                             ? dx * dx / (2.0 * cfg.epsilon * std::max(bounds.mu_max, 1e-300))
                             : std::numeric_limits<double>::infinity();
        dt_base = cfg.cfl * std::min(dt_adv, dt_diff);
        if (!(dt_base > 0) || !std::isfinite(dt_base)) {
            throw Instability("non-positive time step (degenerate speed bounds?)");
        }
    }

    int left(int j) const { return periodic ? wrap(j - 1, N) : std::max(0, j - 1); }
    int right(int j) const { return periodic ? wrap(j + 1, N) : std::min(N - 1, j + 1); }

    void check_state(const GridField& u) const {
        for (int j = 0; j < N; ++j) {
            for (int c = 0; c < u.comps; ++c) {
                if (!std::isfinite(u.at(j, c)))
                    throw Instability("non-finite value at t=" + std::to_string(u.t));
            }
            if (!sys.domain_box.contains(u.state(j), 1e-9)) {
                throw DomainExit("state left domain_box at t=" + std::to_string(u.t) +
                                 ", x=" + std::to_string(u.x(j)));
            }
        }
    }

    double local_speed(const Vec& u) const {
        return sys.char_speed_bound ? sys.char_speed_bound(u) : bounds.lambda_max;
    }

    // du <- N-cell RHS evaluated at u
    void rhs(const GridField& u, GridField& du) {
        const int n = u.comps;
        const double eps = cfg.epsilon;

        // Interface index i in [0, N] sits between cells i-1 and i. With
        // constant extension the outermost interfaces see equal states.
        auto cellL = [&](int i) { return periodic ? wrap(i - 1, N) : std::max(0, i - 1); };
        auto cellR = [&](int i) { return periodic ? wrap(i, N) : std::min(N - 1, i); };

        if (flux_form) {
            if (fbuf.empty()) fbuf.assign(N, Vec());
            if (abuf.empty()) abuf.assign(N, 0.0);
            const auto& flux = *sys.flux;
            for (int j = 0; j < N; ++j) {
                fbuf[j] = flux(u.state(j));
                abuf[j] = local_speed(u.state(j));
            }
            Vec FL(n), FR(n);
            auto iface = [&](int i, Vec& F) {
                int jl = cellL(i), jr = cellR(i);
                double a = std::max(abuf[jl], abuf[jr]);
                F = 0.5 * (fbuf[jl] + fbuf[jr]) - 0.5 * a * (u.state(jr) - u.state(jl));
            };
            iface(0, FL);
            for (int j = 0; j < N; ++j) {
                iface(j + 1, FR);
                for (int c = 0; c < n; ++c) du.at(j, c) = -(FR[c] - FL[c]) / dx;
                FL.swap(FR);
            }
        } else {
            // characteristic upwinding of the nonconservative product
            for (int j = 0; j < N; ++j) {
                EigenFrame f = compute_frame(sys, u.state(j));
                Vec dm = (u.state(j) - u.state(left(j))) / dx;
                Vec dp = (u.state(right(j)) - u.state(j)) / dx;
                Vec conv = Vec::Zero(n);
                for (int i = 0; i < n; ++i) {
                    const Vec& d = f.lambda[i] >= 0 ? dm : dp;
                    conv += f.lambda[i] * f.left.row(i).dot(d) * f.right.col(i);
                }
                for (int c = 0; c < n; ++c) du.at(j, c) = -conv[c];
            }
        }

        if (eps > 0) {
            // flux form [B(u_{j+1/2})(u_{j+1}-u_j)/dx] differences
            if (Bbuf.size() != static_cast<size_t>(N) + 1) Bbuf.assign(N + 1, Mat());
            for (int i = 0; i <= N; ++i) {
                int jl = cellL(i), jr = cellR(i);
                Bbuf[i] = sys.B(0.5 * (u.state(jl) + u.state(jr)));
            }
            Vec gl(n), gr(n);
            for (int j = 0; j < N; ++j) {
                int jl = cellL(j), jr = cellR(j + 1);
                gl = Bbuf[j] * (u.state(j) - u.state(jl));
                gr = Bbuf[j + 1] * (u.state(jr) - u.state(j));
                for (int c = 0; c < n; ++c) du.at(j, c) += eps * (gr[c] - gl[c]) / (dx * dx);
            }
        }
    }

    // specialized kernel for scalar systems with a decoupled form; avoids the
    // Eigen machinery in the inner loop
    void rhs_scalar(const GridField& u, GridField& du) {
        const auto& lam = sys.decoupled->lambda_c[0];
        const auto& mu = sys.decoupled->mu_c[0];
        const double eps = cfg.epsilon;

        auto uat = [&](int j) { return u.data[static_cast<size_t>(j)]; };

        // cache flux values g(u_j); g' = lam
        if (gbuf.size() != static_cast<size_t>(N)) gbuf.assign(N, 0.0);
        Vec tmp(1);
        if (flux_form) {
            const auto& flux = *sys.flux;
            for (int j = 0; j < N; ++j) {
                tmp[0] = uat(j);
                gbuf[j] = flux(tmp)[0];
            }
        }

        for (int j = 0; j < N; ++j) {
            int jl = left(j), jr = right(j);
            double ul = uat(jl), uc = uat(j), ur = uat(jr);
            if (flux_form) {
                double al = std::max(std::abs(lam(ul)), std::abs(lam(uc)));
                double ar = std::max(std::abs(lam(uc)), std::abs(lam(ur)));
                double Fl = 0.5 * (gbuf[jl] + gbuf[j]) - 0.5 * al * (uc - ul);
                double Fr = 0.5 * (gbuf[j] + gbuf[jr]) - 0.5 * ar * (ur - uc);
                du.data[j] = -(Fr - Fl) / dx;
            } else {
                double lj = lam(uc);
                du.data[j] = lj >= 0 ? -lj * (uc - ul) / dx : -lj * (ur - uc) / dx;
            }
            if (eps > 0) {
                double ml = mu(0.5 * (ul + uc));
                double mr = mu(0.5 * (uc + ur));
                du.data[j] += eps * (mr * (ur - uc) - ml * (uc - ul)) / (dx * dx);
            }
        }
    }

    bool scalar_fast() const {
        return sys.n == 1 && sys.decoupled.has_value() && sys.decoupled->lambda_c.size() == 1;
    }
};

} // namespace

StabilityBounds stability_bounds(const SystemSpec& sys) {
    StabilityBounds b;
    for (const Vec& u : sys.domain_box.lattice(5, 0.0)) {
        EigenFrame f = compute_frame(sys, u);
        b.lambda_max = std::max(b.lambda_max, f.lambda.cwiseAbs().maxCoeff());
        b.mu_max = std::max(b.mu_max, f.mu.maxCoeff());
    }
    // small safety margin for states between lattice nodes
    b.lambda_max *= 1.05;
    b.mu_max *= 1.05;
    return b;
}

std::vector<GridField> solve_viscous(const SystemSpec& sys, const GridField& u0,
                                     const SolveConfig& cfg) {
    if (u0.comps != sys.n) throw GridMismatch("solve_viscous: field has wrong state dimension");
    if (!(cfg.cfl > 0 && cfg.cfl < 1)) throw ConfigError("cfl must be in (0,1)");
    if (!(cfg.epsilon >= 0)) throw ConfigError("epsilon must be >= 0");
    if (!u0.finite()) throw Instability("initial data not finite");

    Stepper st(sys, u0, cfg);
    st.check_state(u0);

    std::vector<double> rec = normalize_records(cfg);
    std::vector<GridField> out;
    GridField u = u0;
    GridField du = GridField::zeros(u.x0, u.dx, u.cells(), u.comps, 0.0);
    const bool fast = st.scalar_fast();

    size_t ri = 0;
    while (ri < rec.size() && rec[ri] <= u.t + kTimeSnap) {
        GridField snap = u;
        snap.t = rec[ri++];
        out.push_back(std::move(snap));
    }

    int steps_since_check = 0;
    while (ri < rec.size()) {
        double target = rec[ri];
        double dt = std::min(st.dt_base, target - u.t);
        if (fast)
            st.rhs_scalar(u, du);
        else
            st.rhs(u, du);
        for (size_t k = 0; k < u.data.size(); ++k) u.data[k] += dt * du.data[k];
        u.t += dt;
        if (++steps_since_check >= 8) {
            st.check_state(u);
            steps_since_check = 0;
        }
        if (target - u.t <= kTimeSnap * std::max(1.0, target)) {
            u.t = target;
            st.check_state(u);
            steps_since_check = 0;
            out.push_back(u);
            ++ri;
        }
    }
    return out;
}

std::vector<GridField> gradient_decompose(const SystemSpec& sys, const GridField& u) {
    if (u.comps != sys.n) throw GridMismatch("gradient_decompose: wrong state dimension");
    const int N = u.cells();
    GridField ux = derivative(u);
    std::vector<GridField> v(sys.n, GridField::zeros(u.x0, u.dx, N, 1, u.t));
    for (int j = 0; j < N; ++j) {
        EigenFrame f = compute_frame(sys, u.state(j));
        for (int i = 0; i < sys.n; ++i) {
            v[i].data[j] = f.left.row(i).dot(ux.state(j));
        }
    }
    return v;
}

namespace {

// one linearized step: dh/dt terms of the first-variation equation at cell j
struct LinearizedStepper {
    const SystemSpec& sys;
    double eps;
    double dx;
    int N, n;
    bool periodic;
    double bstep; // state-space step for directional derivatives

    int left(int j) const { return periodic ? wrap(j - 1, N) : std::max(0, j - 1); }
    int right(int j) const { return periodic ? wrap(j + 1, N) : std::min(N - 1, j + 1); }

    Mat dmat(const MatrixFn& M, const Vec& u, const Vec& dir) const {
        double nrm = dir.norm();
        if (nrm < 1e-300) return Mat::Zero(n, n);
        Vec d = dir / nrm;
        return ((M(u + bstep * d) - M(u - bstep * d)) * (nrm / (2.0 * bstep))).eval();
    }

    Mat d2B(const Vec& u, const Vec& a0, const Vec& b0) const {
        double na = a0.norm(), nb = b0.norm();
        if (na < 1e-300 || nb < 1e-300) return Mat::Zero(n, n);
        Vec a = a0 / na, b = b0 / nb;
        Mat out = (sys.B(u + bstep * (a + b)) - sys.B(u + bstep * (a - b)) -
                   sys.B(u - bstep * (a - b)) + sys.B(u + bstep * (-a - b)));
        return (out * (na * nb / (4.0 * bstep * bstep))).eval();
    }

    void rhs(const GridField& u, const GridField& h, GridField& dh) const {
        GridField ux = derivative(u);
        GridField uxx = second_derivative(u);
        GridField hx = derivative(h);
        for (int j = 0; j < N; ++j) {
            Vec uj = u.state(j);
            Vec uxj = ux.state(j);
            Vec uxxj = uxx.state(j);
            Vec hj = h.state(j);
            Vec hxj = hx.state(j);

            Vec acc = Vec::Zero(n);
            // convective part: -(h . grad A) u_x - A h_x (upwinded per family)
            acc -= dmat(sys.A, uj, hj) * uxj;
            EigenFrame f = compute_frame(sys, uj);
            Vec dm = (h.state(j) - h.state(left(j))) / dx;
            Vec dp = (h.state(right(j)) - h.state(j)) / dx;
            for (int i = 0; i < n; ++i) {
                const Vec& d = f.lambda[i] >= 0 ? dm : dp;
                acc -= f.lambda[i] * f.left.row(i).dot(d) * f.right.col(i);
            }
            if (eps > 0) {
                Vec hxxj = (h.state(right(j)) - 2.0 * h.state(j) + h.state(left(j))) /
                           (dx * dx);
                acc += eps * (sys.B(uj) * hxxj);
                acc += eps * (dmat(sys.B, uj, hj) * uxxj);
                acc += eps * (d2B(uj, uxj, hj) * uxj);
                acc += eps * (dmat(sys.B, uj, uxj) * hxj);
                acc += eps * (dmat(sys.B, uj, hxj) * uxj);
            }
            for (int c = 0; c < n; ++c) dh.at(j, c) = acc[c];
        }
    }
};

} // namespace

std::vector<GridField> solve_linearized(const SystemSpec& sys,
                                        const std::vector<GridField>& u_traj,
                                        const GridField& h0, const SolveConfig& cfg) {
    if (u_traj.empty()) throw InsufficientRecords("solve_linearized: empty u trajectory");
    const GridField& u0 = u_traj.front();
    if (!u0.same_grid(h0) || u0.comps != sys.n)
        throw GridMismatch("solve_linearized: h0 grid incompatible with trajectory");

    Stepper st(sys, u0, cfg);
    LinearizedStepper lin{sys,
                          cfg.epsilon,
                          u0.dx,
                          u0.cells(),
                          sys.n,
                          cfg.boundary == Boundary::Periodic,
                          sys.tol.bullet_step};

    std::vector<double> rec = normalize_records(cfg);
    std::vector<GridField> out;
    GridField u = u0;
    GridField h = h0;
    h.t = u.t;
    GridField du = GridField::zeros(u.x0, u.dx, u.cells(), u.comps, 0.0);
    GridField dh = du;
    const bool fast = st.scalar_fast();

    size_t ri = 0;
    while (ri < rec.size() && rec[ri] <= u.t + kTimeSnap) {
        GridField snap = h;
        snap.t = rec[ri++];
        out.push_back(std::move(snap));
    }
    while (ri < rec.size()) {
        double target = rec[ri];
        double dt = std::min(st.dt_base, target - u.t);
        if (fast)
            st.rhs_scalar(u, du);
        else
            st.rhs(u, du);
        lin.rhs(u, h, dh);
        for (size_t k = 0; k < u.data.size(); ++k) {
            u.data[k] += dt * du.data[k];
            h.data[k] += dt * dh.data[k];
        }
        u.t += dt;
        h.t = u.t;
        if (!h.finite()) throw Instability("linearized field became non-finite");
        if (target - u.t <= kTimeSnap * std::max(1.0, target)) {
            u.t = target;
            h.t = target;
            out.push_back(h);
            ++ri;
        }
    }
    return out;
}

} // namespace templab
