#include "templab/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace templab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec aligned_r(const SystemSpec& sys, const Vec& u, int family, const Mat& ref) {
    return compute_frame_aligned(sys, u, ref).right.col(family);
}

} // namespace

Vec rarefaction_curve(const SystemSpec& sys, int family, const Vec& u_minus, double sigma,
                      double curve_step) {
    require_in_domain(sys, u_minus);
    if (sigma == 0.0) return u_minus;
    int steps = std::max(1, static_cast<int>(std::ceil(std::abs(sigma) / curve_step)));
    double ds = sigma / steps;
    Vec u = u_minus;
    Mat ref = compute_frame(sys, u).right;
    for (int s = 0; s < steps; ++s) {
        Vec k1 = aligned_r(sys, u, family, ref);
        Vec k2 = aligned_r(sys, u + 0.5 * ds * k1, family, ref);
        Vec k3 = aligned_r(sys, u + 0.5 * ds * k2, family, ref);
        Vec k4 = aligned_r(sys, u + ds * k3, family, ref);
        u += (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        require_in_domain(sys, u);
        ref = compute_frame_aligned(sys, u, ref).right;
    }
    return u;
}

namespace {

std::vector<Vec> compose_curves(const SystemSpec& sys, const Vec& u_l, const Vec& sigma) {
    std::vector<Vec> w;
    w.push_back(u_l);
    for (int i = 0; i < sigma.size(); ++i) {
        w.push_back(rarefaction_curve(sys, i, w.back(), sigma[i]));
    }
    return w;
}

} // namespace

WaveDecomposition wave_decomposition(const SystemSpec& sys, const Vec& u_l, const Vec& u_r,
                                     double newton_tol, int max_iter) {
    const int n = sys.n;
    EigenFrame fl = compute_frame(sys, u_l);
    Vec sigma(n);
    for (int i = 0; i < n; ++i) sigma[i] = fl.left.row(i).dot(u_r - u_l);

    auto phi = [&](const Vec& s, std::vector<Vec>& w_out) {
        w_out = compose_curves(sys, u_l, s);
        return (w_out.back() - u_r).eval();
    };

    std::vector<Vec> w;
    Vec res = phi(sigma, w);
    double rn = res.norm();
    int iter = 0;
    const double fd = 1e-7;
    while (rn > newton_tol) {
        if (++iter > max_iter)
            throw NoConvergence("wave_decomposition: no convergence after " +
                                std::to_string(max_iter) + " iterations (residual " +
                                std::to_string(rn) + ")");
        Mat J(n, n);
        std::vector<Vec> wtmp;
        for (int k = 0; k < n; ++k) {
            Vec sp = sigma;
            sp[k] += fd;
            J.col(k) = (phi(sp, wtmp) - res) / fd;
        }
        Vec delta = J.fullPivLu().solve(-res);
        double step = 1.0;
        for (;;) {
            Vec trial = sigma + step * delta;
            try {
                Vec tres = phi(trial, wtmp);
                double tn = tres.norm();
                if (tn < rn || step < 1.0 / 1024.0) {
                    sigma = trial;
                    res = tres;
                    rn = tn;
                    w = wtmp;
                    break;
                }
            } catch (const OutOfDomain&) {
                // fall through to damping
            }
            step *= 0.5;
            if (step < 1e-12)
                throw NoConvergence("wave_decomposition: damped step collapsed");
        }
    }
    if (w.empty()) w = compose_curves(sys, u_l, sigma);

    WaveDecomposition out;
    out.sigma = sigma;
    out.w = w;
    out.iterations = iter;
    out.residual = rn;
    return out;
}

// ScalarFlux ------------------------------------------------------------------

namespace {

int locate(const std::vector<double>& xs, double x) {
    // greatest index j with xs[j] <= x, clamped to [0, size-2]
    int lo = 0, hi = static_cast<int>(xs.size()) - 2;
    if (x <= xs.front()) return 0;
    if (x >= xs[hi]) return hi;
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (xs[mid] <= x)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

double interp_at(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    int j = locate(xs, x);
    double t = (x - xs[j]) / (xs[j + 1] - xs[j]);
    t = std::clamp(t, 0.0, 1.0);
    return (1.0 - t) * ys[j] + t * ys[j + 1];
}

} // namespace

double ScalarFlux::F_at(double w) const { return interp_at(omega, F, w); }
double ScalarFlux::lambda_at(double w) const { return interp_at(omega, lambda, w); }

Vec ScalarFlux::state_at(double w) const {
    int j = locate(omega, w);
    double t = std::clamp((w - omega[j]) / (omega[j + 1] - omega[j]), 0.0, 1.0);
    return ((1.0 - t) * states[j] + t * states[j + 1]).eval();
}

ScalarFlux scalar_flux(const SystemSpec& sys, int family, const Vec& w_prev,
                       double sigma_max, int intervals, double curve_step) {
    if (sigma_max == 0.0) sigma_max = 1e-12; // degenerate span, single tiny cell
    const int M = std::max(intervals, 4);
    double lo = std::min(0.0, sigma_max);
    double hi = std::max(0.0, sigma_max);
    double dsf = (hi - lo) / M;

    ScalarFlux out;
    out.family = family;
    out.base = w_prev;
    out.omega.resize(M + 1);
    out.F.assign(M + 1, 0.0);
    out.lambda.resize(M + 1);
    out.states.resize(M + 1);

    // tabulate states and lambda at nodes and interval midpoints by marching
    // the curve from 0 in each direction
    std::vector<double> lam_mid(M);
    int zero_idx = static_cast<int>(std::round(-lo / dsf));
    zero_idx = std::clamp(zero_idx, 0, M);

    auto lam_of = [&](const Vec& u) {
        return compute_frame(sys, u).lambda[family];
    };

    auto march = [&](int dir) {
        // dir = +1 tabulates indices zero_idx..M, dir = -1 tabulates down to 0
        Vec u = w_prev;
        out.states[zero_idx] = u;
        out.lambda[zero_idx] = lam_of(u);
        int m = zero_idx;
        while ((dir > 0 && m < M) || (dir < 0 && m > 0)) {
            Vec umid = rarefaction_curve(sys, family, u, dir * 0.5 * dsf, curve_step);
            lam_mid[dir > 0 ? m : m - 1] = lam_of(umid);
            u = rarefaction_curve(sys, family, umid, dir * 0.5 * dsf, curve_step);
            m += dir;
            out.states[m] = u;
            out.lambda[m] = lam_of(u);
        }
    };
    march(+1);
    march(-1);
    for (int m = 0; m <= M; ++m) out.omega[m] = lo + m * dsf;

    // cumulative Simpson from omega = 0
    for (int m = zero_idx; m < M; ++m) {
        out.F[m + 1] =
            out.F[m] + dsf / 6.0 * (out.lambda[m] + 4.0 * lam_mid[m] + out.lambda[m + 1]);
    }
    for (int m = zero_idx; m > 0; --m) {
        out.F[m - 1] =
            out.F[m] - dsf / 6.0 * (out.lambda[m] + 4.0 * lam_mid[m - 1] + out.lambda[m - 1]);
    }

    out.convexity.resize(M);
    for (int m = 0; m < M; ++m) {
        double d = out.lambda[m + 1] - out.lambda[m];
        out.convexity[m] = d > 0 ? 1 : (d < 0 ? -1 : 0);
    }
    return out;
}

ScalarFlux tabulate_flux(const std::function<double(double)>& F, int family,
                         double sigma_max, int intervals) {
    const int M = std::max(intervals, 4);
    double lo = std::min(0.0, sigma_max);
    double hi = std::max(0.0, sigma_max);
    double dsf = (hi - lo) / M;
    ScalarFlux out;
    out.family = family;
    out.omega.resize(M + 1);
    out.F.resize(M + 1);
    out.lambda.resize(M + 1);
    double F0 = F(0.0);
    for (int m = 0; m <= M; ++m) {
        double w = lo + m * dsf;
        out.omega[m] = w;
        out.F[m] = F(w) - F0;
    }
    const double h = dsf; // derivative of the tabulation, 2nd order throughout
    for (int m = 1; m < M; ++m) out.lambda[m] = (out.F[m + 1] - out.F[m - 1]) / (2.0 * h);
    out.lambda[0] = (-3.0 * out.F[0] + 4.0 * out.F[1] - out.F[2]) / (2.0 * h);
    out.lambda[M] = (3.0 * out.F[M] - 4.0 * out.F[M - 1] + out.F[M - 2]) / (2.0 * h);
    out.convexity.resize(M);
    for (int m = 0; m < M; ++m) {
        double d = out.lambda[m + 1] - out.lambda[m];
        out.convexity[m] = d > 0 ? 1 : (d < 0 ? -1 : 0);
    }
    return out;
}

// ScalarProfile ---------------------------------------------------------------

double ScalarProfile::operator()(double xi) const {
    if (waves.empty()) return 0.0;
    double z = waves.front().z_lo;
    for (const Wave& w : waves) {
        if (xi < w.speed_lo) return z;
        if (xi <= w.speed_hi && w.type == WaveType::Rarefaction) {
            const auto& tab = w.fan_table;
            // binary search on nondecreasing speeds
            size_t lo = 0, hi = tab.size() - 1;
            while (lo + 1 < hi) {
                size_t mid = (lo + hi) / 2;
                if (tab[mid].first <= xi)
                    lo = mid;
                else
                    hi = mid;
            }
            double s0 = tab[lo].first, s1 = tab[hi].first;
            double t = s1 > s0 ? (xi - s0) / (s1 - s0) : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            return tab[lo].second + t * (tab[hi].second - tab[lo].second);
        }
        if (xi <= w.speed_hi) return w.z_hi; // on a discontinuity, right value
        z = w.z_hi;
    }
    return z;
}

double ScalarProfile::min_speed() const {
    return waves.empty() ? kInf : waves.front().speed_lo;
}

double ScalarProfile::max_speed() const {
    return waves.empty() ? -kInf : waves.back().speed_hi;
}

ScalarProfile scalar_riemann(const ScalarFlux& flux, double flat_tol) {
    ScalarProfile prof;
    const double sigma = flux.omega.back() > -flux.omega.front() ? flux.omega.back()
                                                                 : flux.omega.front();
    prof.sigma = sigma;
    if (std::abs(sigma) < 1e-13) return prof;

    // Normalize to increasing data (0 on the left, s > 0 on the right). For
    // sigma < 0 reflect: zeta = -z with flux H(zeta) = -F(-zeta); the entropy
    // profile of the reflected problem maps back with unchanged speeds
    // (H'(zeta) = F'(-zeta)).
    const bool reflect = sigma < 0;
    const auto& om = flux.omega;
    const auto& Fv = flux.F;
    const auto& lamv = flux.lambda;
    const int M = static_cast<int>(om.size()) - 1;
    if (M < 1) throw DegenerateFlux("scalar_riemann: flux tabulation too small");

    std::vector<double> zs, gs, lam;
    if (!reflect) {
        // 0 is the left tabulation endpoint by construction
        for (int m = 0; m <= M; ++m) {
            zs.push_back(om[m]);
            gs.push_back(Fv[m]);
            lam.push_back(lamv[m]);
        }
    } else {
        for (int m = M; m >= 0; --m) {
            zs.push_back(-om[m]);
            gs.push_back(-Fv[m]);
            lam.push_back(lamv[m]);
        }
    }
    const int K = static_cast<int>(zs.size()) - 1;

    // lower convex hull over (zs, gs); collinear middle nodes are popped
    std::vector<int> hull;
    for (int m = 0; m <= K; ++m) {
        while (hull.size() >= 2) {
            int a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            double s1 = (gs[b] - gs[a]) / (zs[b] - zs[a]);
            double s2 = (gs[m] - gs[b]) / (zs[m] - zs[b]);
            if (s1 >= s2)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(m);
    }

    struct Edge {
        int a, b;
        double slope;
        bool adjacent;
        double dev; // max deviation of skipped nodes above the chord
    };
    std::vector<Edge> edges;
    for (size_t e = 0; e + 1 < hull.size(); ++e) {
        Edge ed;
        ed.a = hull[e];
        ed.b = hull[e + 1];
        ed.slope = (gs[ed.b] - gs[ed.a]) / (zs[ed.b] - zs[ed.a]);
        ed.adjacent = (ed.b == ed.a + 1);
        ed.dev = 0.0;
        for (int m = ed.a + 1; m < ed.b; ++m) {
            double chord = gs[ed.a] + ed.slope * (zs[m] - zs[ed.a]);
            ed.dev = std::max(ed.dev, gs[m] - chord);
        }
        edges.push_back(ed);
    }

    const double gscale = std::max({1.0, std::abs(gs.front()), std::abs(gs.back())});
    auto unreflect = [&](double z) { return reflect ? -z : z; };

    double prev_speed = -kInf;
    size_t e = 0;
    while (e < edges.size()) {
        if (edges[e].adjacent) {
            // maximal run of adjacent (envelope-contact) edges
            size_t e2 = e;
            while (e2 < edges.size() && edges[e2].adjacent) ++e2;
            int a = edges[e].a, b = edges[e2 - 1].b;
            // rarefaction speeds come from the exact tabulated derivative
            double slo = std::max(lam[a], prev_speed);
            double shi = std::max(lam[b], slo);
            Wave w;
            w.z_lo = unreflect(zs[a]);
            w.z_hi = unreflect(zs[b]);
            if (shi - slo <= flat_tol * std::max(1.0, std::abs(slo))) {
                w.type = WaveType::Contact;
                w.speed_lo = w.speed_hi = 0.5 * (slo + shi);
            } else {
                w.type = WaveType::Rarefaction;
                w.speed_lo = slo;
                w.speed_hi = shi;
                w.fan_table.reserve(b - a + 1);
                double run = slo;
                for (int m = a; m <= b; ++m) {
                    run = std::max(run, std::min(lam[m], shi));
                    w.fan_table.emplace_back(run, unreflect(zs[m]));
                }
                w.fan_table.front() = {slo, unreflect(zs[a])};
                w.fan_table.back() = {shi, unreflect(zs[b])};
            }
            prev_speed = w.speed_hi;
            prof.waves.push_back(std::move(w));
            e = e2;
        } else {
            Wave w;
            w.type = edges[e].dev <= flat_tol * gscale ? WaveType::Contact : WaveType::Shock;
            w.speed_lo = w.speed_hi = std::max(edges[e].slope, prev_speed);
            w.z_lo = unreflect(zs[edges[e].a]);
            w.z_hi = unreflect(zs[edges[e].b]);
            prev_speed = w.speed_hi;
            prof.waves.push_back(std::move(w));
            ++e;
        }
    }

    // roundoff on collinear tabulations can split one discontinuity into
    // several waves with coinciding speeds; merge those back
    std::vector<Wave> merged;
    for (Wave& w : prof.waves) {
        if (!merged.empty()) {
            Wave& pw = merged.back();
            bool both_disc = pw.type != WaveType::Rarefaction && w.type != WaveType::Rarefaction;
            if (both_disc &&
                std::abs(w.speed_lo - pw.speed_hi) <=
                    flat_tol * std::max(1.0, std::abs(pw.speed_hi))) {
                pw.z_hi = w.z_hi;
                if (w.type == WaveType::Shock) pw.type = WaveType::Shock;
                continue;
            }
        }
        merged.push_back(std::move(w));
    }
    prof.waves = std::move(merged);
    return prof;
}

// RiemannFan ------------------------------------------------------------------

Vec RiemannFan::eval(double xi) const {
    const int n = static_cast<int>(sigma.size());
    int sector = 0;
    while (sector < n - 1 && xi > lambda_bar[sector]) ++sector;
    if (z[sector].trivial()) return w[sector];
    double zv = z[sector](xi);
    return fluxes[sector].state_at(zv);
}

Vec RiemannFan::eval(double t, double x) const { return eval(x / t); }

nlohmann::json RiemannFan::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["u_l"] = std::vector<double>(u_l.data(), u_l.data() + u_l.size());
    j["u_r"] = std::vector<double>(u_r.data(), u_r.data() + u_r.size());
    j["sigma"] = std::vector<double>(sigma.data(), sigma.data() + sigma.size());
    j["lambda_bar"] = lambda_bar;
    j["refinement_converged"] = refinement_converged;
    nlohmann::json ws = nlohmann::json::array();
    for (const Vec& wi : w) ws.push_back(std::vector<double>(wi.data(), wi.data() + wi.size()));
    j["w"] = ws;
    nlohmann::json fams = nlohmann::json::array();
    for (size_t i = 0; i < z.size(); ++i) {
        nlohmann::json waves = nlohmann::json::array();
        for (const Wave& wv : z[i].waves) {
            nlohmann::json e;
            e["type"] = wv.type == WaveType::Shock
                            ? "shock"
                            : (wv.type == WaveType::Rarefaction ? "rarefaction" : "contact");
            e["speed_lo"] = wv.speed_lo;
            e["speed_hi"] = wv.speed_hi;
            e["z_lo"] = wv.z_lo;
            e["z_hi"] = wv.z_hi;
            waves.push_back(e);
        }
        nlohmann::json fam;
        fam["family"] = i + 1;
        fam["sigma"] = sigma[static_cast<int>(i)];
        fam["waves"] = waves;
        fams.push_back(fam);
    }
    j["families"] = fams;
    return j;
}

namespace {

double profile_discrepancy(const ScalarProfile& a, const ScalarProfile& b) {
    if (a.waves.size() != b.waves.size()) return kInf;
    double worst = 0.0;
    for (size_t k = 0; k < a.waves.size(); ++k) {
        const Wave& wa = a.waves[k];
        const Wave& wb = b.waves[k];
        if (wa.type != wb.type) return kInf;
        worst = std::max(worst, std::abs(wa.speed_lo - wb.speed_lo));
        worst = std::max(worst, std::abs(wa.speed_hi - wb.speed_hi));
        worst = std::max(worst, std::abs(wa.z_lo - wb.z_lo));
        worst = std::max(worst, std::abs(wa.z_hi - wb.z_hi));
    }
    return worst;
}

} // namespace

RiemannFan solve_riemann(const SystemSpec& sys, const Vec& u_l, const Vec& u_r) {
    const int n = sys.n;
    WaveDecomposition dec = wave_decomposition(sys, u_l, u_r);

    RiemannFan fan;
    fan.u_l = u_l;
    fan.u_r = u_r;
    fan.sigma = dec.sigma;
    fan.w = dec.w;
    fan.z.resize(n);
    fan.fluxes.resize(n);

    const double sigma_tiny = 1e-13;
    for (int i = 0; i < n; ++i) {
        if (std::abs(dec.sigma[i]) < sigma_tiny) {
            fan.fluxes[i] = scalar_flux(sys, i, dec.w[i], 0.0, 8);
            fan.z[i] = ScalarProfile{};
            continue;
        }
        int intervals = 256;
        ScalarFlux fl = scalar_flux(sys, i, dec.w[i], dec.sigma[i], intervals);
        ScalarProfile prof = scalar_riemann(fl);
        bool converged = false;
        while (intervals < 4096) {
            intervals *= 2;
            ScalarFlux fl2 = scalar_flux(sys, i, dec.w[i], dec.sigma[i], intervals);
            ScalarProfile prof2 = scalar_riemann(fl2);
            double disc = profile_discrepancy(prof, prof2);
            fl = std::move(fl2);
            prof = std::move(prof2);
            if (disc <= 1e-10 * std::max(1.0, std::abs(dec.sigma[i]))) {
                converged = true;
                break;
            }
        }
        fan.refinement_converged = fan.refinement_converged && converged;
        fan.fluxes[i] = std::move(fl);
        fan.z[i] = std::move(prof);
    }

    // sector boundaries at gap midpoints; trivial families use the local
    // characteristic speed
    std::vector<double> smin(n), smax(n);
    for (int i = 0; i < n; ++i) {
        if (fan.z[i].trivial()) {
            double lam = compute_frame(sys, fan.w[i]).lambda[i];
            smin[i] = smax[i] = lam;
        } else {
            smin[i] = fan.z[i].min_speed();
            smax[i] = fan.z[i].max_speed();
        }
    }
    fan.lambda_bar.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        if (smax[i] >= smin[i + 1]) {
            throw SectorOverlap("family " + std::to_string(i + 1) + " speeds reach " +
                                std::to_string(smax[i]) + " >= family " +
                                std::to_string(i + 2) + " at " + std::to_string(smin[i + 1]));
        }
        fan.lambda_bar[i] = 0.5 * (smax[i] + smin[i + 1]);
    }
    return fan;
}

// GluedEvolution --------------------------------------------------------------

GluedEvolution glued_evolution(const SystemSpec& sys, const std::vector<double>& xs,
                               const std::vector<Vec>& states) {
    if (xs.size() + 1 != states.size() || xs.empty())
        throw ConfigError("glued_evolution: need K jumps and K+1 states");
    for (size_t k = 0; k + 1 < xs.size(); ++k) {
        if (!(xs[k] < xs[k + 1])) throw ConfigError("glued_evolution: jumps must increase");
    }
    GluedEvolution g;
    g.xs = xs;
    g.states = states;
    for (size_t k = 0; k < xs.size(); ++k) {
        g.fans.push_back(solve_riemann(sys, states[k], states[k + 1]));
    }
    g.horizon = kInf;
    for (size_t k = 0; k + 1 < xs.size(); ++k) {
        double smax = -kInf;
        for (const auto& p : g.fans[k].z) smax = std::max(smax, p.max_speed());
        double smin = kInf;
        for (const auto& p : g.fans[k + 1].z) smin = std::min(smin, p.min_speed());
        double rel = smax - smin;
        if (rel > 0) g.horizon = std::min(g.horizon, (xs[k + 1] - xs[k]) / rel);
    }
    return g;
}

Vec GluedEvolution::eval(double t, double x) const {
    if (t > horizon)
        throw InteractionReached("t=" + std::to_string(t) + " exceeds safe horizon " +
                                 std::to_string(horizon));
    if (t <= 0) {
        size_t k = 0;
        while (k < xs.size() && x >= xs[k]) ++k;
        return states[k];
    }
    for (int k = static_cast<int>(xs.size()) - 1; k >= 0; --k) {
        double xi = (x - xs[k]) / t;
        double smax = -kInf, smin = kInf;
        for (const auto& p : fans[k].z) {
            smax = std::max(smax, p.max_speed());
            smin = std::min(smin, p.min_speed());
        }
        if (xi >= smax) return states[k + 1];
        if (xi > smin) return fans[k].eval(xi);
    }
    return states[0];
}

GridField sample_fan(const RiemannFan& fan, const GridField& like, double t, double jump_x) {
    GridField out = GridField::zeros(like.x0, like.dx, like.cells(), like.comps, t);
    for (int j = 0; j < like.cells(); ++j) {
        out.set_state(j, fan.eval(t, like.x(j) - jump_x));
    }
    return out;
}

} // namespace templab
