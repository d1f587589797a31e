#include "templab/studies.hpp"

#include <algorithm>
#include <cmath>

namespace templab {

namespace {

std::vector<double> linspace(double a, double b, int k) {
    std::vector<double> out(k);
    for (int i = 0; i < k; ++i) out[i] = a + (b - a) * i / (k - 1);
    return out;
}

double trapz(const std::vector<double>& t, const std::vector<double>& y) {
    double acc = 0.0;
    for (size_t k = 0; k + 1 < t.size(); ++k)
        acc += 0.5 * (y[k] + y[k + 1]) * (t[k + 1] - t[k]);
    return acc;
}

// per-family |phi_i| L1 at a record (strided quadrature)
Vec phi_l1_per_family(const SystemSpec& sys, const GridField& u, double eps, int stride) {
    std::vector<GridField> v = gradient_decompose(sys, u);
    const int N = u.cells();
    Vec acc = Vec::Zero(sys.n);
    Vec vj(sys.n), vxj(sys.n);
    int counted = 0;
    for (int j = 1; j + 1 < N; j += stride) {
        for (int i = 0; i < sys.n; ++i) {
            vj[i] = v[i].data[j];
            vxj[i] = (v[i].data[j + 1] - v[i].data[j - 1]) / (2.0 * u.dx);
        }
        SourceCoefficients c = source_coefficients(sys, u.state(j));
        acc += eval_phi(c, vj, vxj, eps).cwiseAbs();
        ++counted;
    }
    if (counted == 0) return acc;
    return acc * u.dx * (static_cast<double>(N - 2) / counted);
}

} // namespace

EstimateReport transversal_decay_check(const SystemSpec& sys, const GridField& u0,
                                       const TransversalParams& p) {
    const int fi = p.family_i, fj = p.family_j;
    if (fi == fj) throw SpeedGapViolated("transversal check needs two distinct families");

    SolveConfig cfg = p.solve;
    cfg.record_times = linspace(0.0, cfg.t_end, p.records);
    std::vector<GridField> traj = solve_viscous(sys, u0, cfg);
    const size_t R = traj.size();

    // decomposed fields plus lambda/mu ranges along the run
    std::vector<GridField> vi(R), vj(R);
    double sup_li = -1e300, inf_lj = 1e300, mu_sup = 0.0;
    for (size_t r = 0; r < R; ++r) {
        std::vector<GridField> v = gradient_decompose(sys, traj[r]);
        vi[r] = std::move(v[fi]);
        vj[r] = std::move(v[fj]);
        for (int c = 0; c < traj[r].cells(); ++c) {
            EigenFrame f = compute_frame(sys, traj[r].state(c));
            sup_li = std::max(sup_li, f.lambda[fi]);
            inf_lj = std::min(inf_lj, f.lambda[fj]);
            mu_sup = std::max(mu_sup, std::max(f.mu[fi], f.mu[fj]));
        }
    }
    double gap = inf_lj - sup_li;
    if (gap <= 0)
        throw SpeedGapViolated("families " + std::to_string(fi + 1) + "," +
                               std::to_string(fj + 1) + " have no speed gap (" +
                               std::to_string(gap) + ")");

    InteractionKernel ker;
    ker.c = gap;
    ker.c1 = std::max(cfg.epsilon * mu_sup, 1e-300);

    std::vector<double> ts(R), Q(R), cross(R), phi_i(R), phi_j(R), mass_i(R), mass_j(R);
    for (size_t r = 0; r < R; ++r) {
        ts[r] = traj[r].t;
        Q[r] = interaction_potential(vi[r], vj[r], ker);
        double cr = 0.0;
        for (int c = 0; c < vi[r].cells(); ++c)
            cr += std::abs(vi[r].data[c] * vj[r].data[c]);
        cross[r] = cr * vi[r].dx;
        Vec ph = phi_l1_per_family(sys, traj[r], cfg.epsilon, p.phi_stride);
        phi_i[r] = ph[fi];
        phi_j[r] = ph[fj];
        mass_i[r] = l1_norm(vi[r]);
        mass_j[r] = l1_norm(vj[r]);
    }

    EstimateReport rep;
    rep.name = "transversal:" + sys.name;
    rep.series_columns = {"t", "Q", "cross_rate", "D"};
    double cum = 0.0;
    std::vector<double> D(R);
    for (size_t r = 0; r < R; ++r) {
        if (r > 0) cum += 0.5 * (cross[r - 1] + cross[r]) * (ts[r] - ts[r - 1]);
        D[r] = Q[r] + cum;
        rep.series.push_back({ts[r], Q[r], cross[r], D[r]});
    }

    // monotonicity within the phi budget
    double worst = -1e300;
    const double T = ts.back() - ts.front();
    for (size_t r = 0; r + 1 < R; ++r) {
        double dt = ts[r + 1] - ts[r];
        double budget =
            (0.5 * (phi_i[r] * mass_j[r] + phi_i[r + 1] * mass_j[r + 1]) +
             0.5 * (phi_j[r] * mass_i[r] + phi_j[r + 1] * mass_i[r + 1])) *
            dt / ker.c;
        double slack = p.budget_rel * Q[0] * dt / T;
        worst = std::max(worst, D[r + 1] - D[r] - budget - slack);
    }
    rep.check_le("max_increase_beyond_budget", worst, 0.0);

    // transversal bound with margin
    double total_cross = trapz(ts, cross);
    double E1 = mass_i[0] + trapz(ts, phi_i);
    double E2 = mass_j[0] + trapz(ts, phi_j);
    double bound = E1 * E2 / ker.c;
    rep.scalars["total_cross"] = total_cross;
    rep.scalars["bound_E1E2_over_c"] = bound;
    rep.scalars["E1"] = E1;
    rep.scalars["E2"] = E2;
    rep.scalars["speed_gap_c"] = ker.c;
    rep.scalars["c1"] = ker.c1;
    double margin = total_cross > 0 ? bound / total_cross - 1.0 : 1e300;
    rep.check_ge("margin", margin, p.margin_min);
    return rep;
}

EstimateReport bv_study(const SystemSpec& sys, const GridField& u0, const BvParams& p) {
    EstimateReport rep;
    rep.name = "bv:" + sys.name;
    double tv0 = total_variation(u0);
    rep.scalars["tv0"] = tv0;
    rep.series_columns = {"eps", "sup_tv", "ratio", "phi_budget"};

    double worst_ratio = 0.0, worst_budget = 0.0, sup_tv_abs = 0.0;
    for (double eps : p.eps_list) {
        SolveConfig cfg = p.solve;
        cfg.epsilon = eps;
        cfg.record_times = linspace(0.0, cfg.t_end, p.records);
        std::vector<GridField> traj = solve_viscous(sys, u0, cfg);
        double sup_tv = 0.0;
        std::vector<double> ts, phis;
        for (const GridField& u : traj) {
            sup_tv = std::max(sup_tv, total_variation(u));
            ts.push_back(u.t);
            phis.push_back(phi_l1(sys, u, eps, p.phi_stride));
        }
        double budget = trapz(ts, phis);
        double ratio = tv0 > 0 ? sup_tv / tv0 : 0.0;
        rep.series.push_back({eps, sup_tv, ratio, budget});
        worst_ratio = std::max(worst_ratio, ratio);
        worst_budget = std::max(worst_budget, budget);
        sup_tv_abs = std::max(sup_tv_abs, sup_tv);
    }
    if (tv0 > 0) {
        rep.check_le("sup_ratio", worst_ratio, p.ratio_limit);
    } else {
        rep.check_le("sup_tv", sup_tv_abs, 1e-12);
    }
    rep.check_le("phi_budget", worst_budget, 0.5 * p.delta0);
    rep.scalars["L1_fitted"] = worst_ratio;
    return rep;
}

EstimateReport stability_study(const SystemSpec& sys, const GridField& u0, const GridField& v0,
                               const StabilityParams& p) {
    EstimateReport rep;
    rep.name = "stability:" + sys.name;
    double d0 = l1_distance(u0, v0);
    rep.scalars["initial_l1_distance"] = d0;

    SolveConfig cfg = p.solve;
    cfg.epsilon = p.eps;
    cfg.record_times = linspace(0.0, cfg.t_end, p.records);
    std::vector<GridField> qu = solve_viscous(sys, u0, cfg);
    std::vector<GridField> qv = solve_viscous(sys, v0, cfg);

    rep.series_columns = {"t", "l1_distance", "ratio"};
    double worst_ratio = 0.0, final_dist = 0.0;
    for (size_t r = 0; r < qu.size(); ++r) {
        double d = l1_distance(qu[r], qv[r]);
        double ratio = d0 > 0 ? d / d0 : 0.0;
        rep.series.push_back({qu[r].t, d, ratio});
        worst_ratio = std::max(worst_ratio, ratio);
        final_dist = d;
    }
    if (d0 > 0) {
        rep.check_le("sup_ratio", worst_ratio, p.ratio_limit);
    } else {
        rep.check_le("sup_distance", final_dist, 1e-14);
        return rep;
    }

    // homotopy route: ||u(T)-v(T)|| <= mean_theta ||h^theta(T)|| + slack
    GridField h0 = v0 - u0;
    double hsum = 0.0;
    for (int k = 0; k < p.theta_count; ++k) {
        double theta = (k + 0.5) / p.theta_count;
        GridField utheta = u0;
        for (size_t m = 0; m < utheta.data.size(); ++m)
            utheta.data[m] = (1.0 - theta) * u0.data[m] + theta * v0.data[m];
        SolveConfig hcfg = cfg;
        hcfg.record_times = {cfg.t_end};
        std::vector<GridField> h = solve_linearized(sys, {utheta}, h0, hcfg);
        hsum += l1_norm(h.back());
    }
    double hbar = hsum / p.theta_count;
    rep.scalars["homotopy_mean_h_l1"] = hbar;
    rep.scalars["final_l1_distance"] = final_dist;
    rep.check_le("homotopy_gap", final_dist - hbar, p.homotopy_slack_rel * d0);
    return rep;
}

EstimateReport time_continuity_study(const SystemSpec& sys, const GridField& u0,
                                     const TimeContinuityParams& p) {
    EstimateReport rep;
    rep.name = "time_continuity:" + sys.name;
    std::vector<double> times;
    for (auto [t, s] : p.time_pairs) {
        times.push_back(t);
        times.push_back(s);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    std::vector<std::array<double, 3>> rows;
    rep.series_columns = {"eps", "t", "s", "distance"};
    for (double eps : p.eps_list) {
        SolveConfig cfg = p.solve;
        cfg.epsilon = eps;
        cfg.record_times = times;
        cfg.t_end = times.back();
        std::vector<GridField> traj = solve_viscous(sys, u0, cfg);
        auto at = [&](double t) -> const GridField& {
            for (const GridField& g : traj)
                if (std::abs(g.t - t) < 1e-10) return g;
            throw InsufficientRecords("record not found");
        };
        for (auto [t, s] : p.time_pairs) {
            double d = l1_distance(at(t), at(s));
            rows.push_back({std::abs(t - s),
                            std::sqrt(eps) * std::abs(std::sqrt(t) - std::sqrt(s)), d});
            rep.series.push_back({eps, t, s, d});
        }
    }
    FitResult fit = modulus_fit(rows);
    rep.fit = fit;
    rep.check_le("fit_residual", fit.residual, p.residual_limit);
    return rep;
}

EstimateReport propagation_study(const SystemSpec& sys, const GridField& u0,
                                 const GridField& v0, const PropagationParams& p) {
    EstimateReport rep;
    rep.name = "propagation:" + sys.name;
    double dev0 = linf_distance(u0, v0);
    rep.scalars["initial_linf_distance"] = dev0;
    double beta1 = 2.0 * stability_bounds(sys).lambda_max;
    rep.scalars["beta1"] = beta1;
    if (dev0 == 0.0) {
        // identical data: the difference stays identically zero
        SolveConfig cfg = p.solve;
        cfg.epsilon = p.eps_list.front();
        cfg.t_end = p.t;
        cfg.record_times = {p.t};
        GridField ut = solve_viscous(sys, u0, cfg).back();
        GridField vt = solve_viscous(sys, v0, cfg).back();
        rep.check_le("final_linf_distance", linf_distance(ut, vt), 0.0);
        return rep;
    }

    std::vector<double> slopes;
    rep.series_columns = {"eps", "outside_sup", "tail_slope"};
    for (double eps : p.eps_list) {
        SolveConfig cfg = p.solve;
        cfg.epsilon = eps;
        cfg.t_end = p.t;
        cfg.record_times = {p.t};
        GridField ut = solve_viscous(sys, u0, cfg).back();
        GridField vt = solve_viscous(sys, v0, cfg).back();

        double margin = 10.0 * std::sqrt(eps * p.t);
        double lo = p.a - beta1 * p.t - margin;
        double hi = p.b + beta1 * p.t + margin;
        double outside = 0.0;
        std::vector<double> xs, logd;
        for (int j = 0; j < ut.cells(); ++j) {
            double x = ut.x(j);
            double d = (ut.state(j) - vt.state(j)).norm();
            if (x < lo || x > hi) outside = std::max(outside, d);
            if (x > p.b + beta1 * p.t && d > 1e-220) {
                xs.push_back(x);
                logd.push_back(std::log(d));
            }
        }
        double slope = 0.0;
        if (xs.size() >= 8) {
            FitResult lf = line_fit(xs, logd);
            slope = lf.exponent;
        }
        slopes.push_back(slope);
        rep.series.push_back({eps, outside, slope});
        rep.check_le("outside_sup_eps_" + format_double(eps), outside,
                     p.tail_limit_rel * dev0);
        rep.check_le("tail_slope_eps_" + format_double(eps), slope, -1e-12);
        rep.scalars["c_star_eps_" + format_double(eps)] = -slope * eps;
    }
    // decay rate ~ 1/eps across consecutive halvings
    for (size_t k = 0; k + 1 < p.eps_list.size(); ++k) {
        double expect = p.eps_list[k] / p.eps_list[k + 1];
        double got = slopes[k + 1] / slopes[k];
        rep.scalars["rate_ratio_" + std::to_string(k)] = got;
        rep.check_le("rate_ratio_deviation_" + std::to_string(k),
                     std::abs(got / expect - 1.0), p.rate_scale_tol);
    }
    return rep;
}

EstimateReport vanishing_viscosity_study(const SystemSpec& sys, const GridField& u0,
                                         const std::function<GridField(double)>& reference,
                                         const VanishingViscosityParams& p) {
    if (!reference) throw NoReference("vanishing_viscosity_study: no exact reference");
    EstimateReport rep;
    rep.name = "vanishing_viscosity:" + sys.name;
    GridField ref = reference(p.t_star);

    std::vector<double> es;
    rep.series_columns = {"eps", "error_l1"};
    for (double eps : p.eps_list) {
        SolveConfig cfg = p.solve;
        cfg.epsilon = eps;
        cfg.t_end = p.t_star;
        cfg.record_times = {p.t_star};
        GridField ut = solve_viscous(sys, u0, cfg).back();
        double e = l1_distance(ut, ref);
        es.push_back(e);
        rep.series.push_back({eps, e});
    }

    double max_e = *std::max_element(es.begin(), es.end());
    if (max_e < 1e-12) {
        rep.check_le("max_error", max_e, 1e-12);
        return rep;
    }
    double worst_increase = 0.0;
    for (size_t k = 0; k + 1 < es.size(); ++k) {
        // eps_list decreasing: e must not increase beyond the slack
        worst_increase = std::max(worst_increase, es[k + 1] / es[k] - 1.0);
    }
    rep.check_le("max_monotonicity_violation", worst_increase, p.monotone_slack);
    FitResult fit = power_fit(p.eps_list, es, "e(eps)=C*eps^p");
    rep.fit = fit;
    rep.check_ge("fit_exponent", fit.exponent, p.p_lo);
    rep.check_le("fit_exponent_hi", fit.exponent, p.p_hi);
    return rep;
}

namespace {

EstimateReport decay_fit(const std::string& name, const std::vector<double>& ts,
                         const std::vector<double>& ys, const DecayParams& p) {
    EstimateReport rep;
    rep.name = name;
    rep.series_columns = {"t", "norm"};
    for (size_t k = 0; k < ts.size(); ++k) rep.series.push_back({ts[k], ys[k]});
    FitResult fit = power_fit(ts, ys, "C*t^p");
    rep.fit = fit;
    rep.check_ge("fit_exponent", fit.exponent, p.exp_lo);
    rep.check_le("fit_exponent_hi", fit.exponent, p.exp_hi);
    return rep;
}

} // namespace

EstimateReport decay_study_uxx(const SystemSpec& sys, const GridField& u0,
                               const DecayParams& p) {
    SolveConfig cfg = p.solve;
    cfg.record_times = linspace(p.t_min_frac * cfg.t_end, cfg.t_end, p.samples);
    std::vector<GridField> traj = solve_viscous(sys, u0, cfg);
    std::vector<double> ts, ys;
    for (const GridField& u : traj) {
        ts.push_back(u.t);
        ys.push_back(l1_norm(second_derivative(u)));
    }
    return decay_fit("decay_uxx:" + sys.name, ts, ys, p);
}

EstimateReport decay_study_hx(const SystemSpec& sys, const GridField& u0, const GridField& h0,
                              const DecayParams& p) {
    SolveConfig cfg = p.solve;
    cfg.record_times = linspace(p.t_min_frac * cfg.t_end, cfg.t_end, p.samples);
    std::vector<GridField> traj = solve_linearized(sys, {u0}, h0, cfg);
    std::vector<double> ts, ys;
    for (const GridField& h : traj) {
        ts.push_back(h.t);
        ys.push_back(l1_norm(derivative(h)));
    }
    return decay_fit("decay_hx:" + sys.name, ts, ys, p);
}

} // namespace templab
