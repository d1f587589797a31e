#include "templab/system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "templab/expr.hpp"

namespace templab {

bool Box::contains(const Vec& u, double margin) const {
    for (int i = 0; i < dim(); ++i) {
        if (u[i] < lo[i] - margin || u[i] > hi[i] + margin) return false;
    }
    return true;
}

std::vector<Vec> Box::lattice(int per_axis, double inset) const {
    const int d = dim();
    std::vector<Vec> out;
    std::vector<int> idx(d, 0);
    for (;;) {
        Vec u(d);
        for (int i = 0; i < d; ++i) {
            double a = lo[i] + inset * (hi[i] - lo[i]);
            double b = hi[i] - inset * (hi[i] - lo[i]);
            double t = per_axis == 1 ? 0.5 : static_cast<double>(idx[i]) / (per_axis - 1);
            u[i] = a + t * (b - a);
        }
        out.push_back(u);
        int k = 0;
        while (k < d && ++idx[k] == per_axis) idx[k++] = 0;
        if (k == d) break;
    }
    return out;
}

void require_in_domain(const SystemSpec& sys, const Vec& u) {
    if (!sys.domain_box.contains(u, 1e-12)) {
        throw OutOfDomain("state left the domain box of system '" + sys.name + "'");
    }
}

namespace {

// Sign convention: largest-magnitude component positive (ties: lowest index).
void fix_sign(Vec& r, Eigen::RowVectorXd& l) {
    int imax = 0;
    for (int i = 1; i < r.size(); ++i) {
        if (std::abs(r[i]) > std::abs(r[imax])) imax = i;
    }
    if (r[imax] < 0) {
        r = -r;
        l = -l;
    }
}

} // namespace

EigenFrame compute_frame(const SystemSpec& sys, const Vec& u) {
    const int n = sys.n;
    Mat A = sys.A(u);
    Mat B = sys.B(u);

    double scaleA = std::max(1.0, A.norm());
    double comm = (A * B - B * A).norm();
    if (comm > sys.tol.commutation_tol * std::max(1.0, scaleA * std::max(1.0, B.norm()))) {
        throw CommutationViolation("||AB-BA||_F = " + std::to_string(comm) + " at a state of '" +
                                   sys.name + "'");
    }

    EigenFrame f;
    f.u = u;
    f.lambda.resize(n);
    f.mu.resize(n);
    f.right.resize(n, n);
    f.left.resize(n, n);

    if (n == 1) {
        f.lambda[0] = A(0, 0);
        f.mu[0] = B(0, 0);
        f.right(0, 0) = 1.0;
        f.left(0, 0) = 1.0;
        return f;
    }

    Eigen::EigenSolver<Mat> es(A);
    if (es.info() != Eigen::Success) {
        throw NonReal("eigensolver failed on A(u) for '" + sys.name + "'");
    }
    Eigen::VectorXcd ev = es.eigenvalues();
    for (int i = 0; i < n; ++i) {
        if (std::abs(ev[i].imag()) > 1e-9 * scaleA) {
            throw NonReal("complex eigenvalue of A(u) detected for '" + sys.name + "'");
        }
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return ev[a].real() < ev[b].real(); });

    for (int i = 0; i < n; ++i) {
        f.lambda[i] = ev[order[i]].real();
        Vec r = es.eigenvectors().col(order[i]).real();
        f.right.col(i) = r / r.norm();
    }
    for (int i = 0; i + 1 < n; ++i) {
        if (f.lambda[i + 1] - f.lambda[i] < sys.tol.gap_min) {
            throw DegenerateSpectrum("eigenvalue gap " +
                                     std::to_string(f.lambda[i + 1] - f.lambda[i]) +
                                     " below gap_min for '" + sys.name + "'");
        }
    }

    f.left = f.right.inverse();
    for (int i = 0; i < n; ++i) {
        Vec r = f.right.col(i);
        Eigen::RowVectorXd l = f.left.row(i);
        fix_sign(r, l);
        f.right.col(i) = r;
        f.left.row(i) = l;
    }

    // mu in the A-frame; this enforces shared eigenvectors even under roundoff
    for (int i = 0; i < n; ++i) {
        double lr = f.left.row(i).dot(f.right.col(i));
        f.mu[i] = f.left.row(i).dot((B * f.right.col(i)).eval()) / lr;
    }
    return f;
}

EigenFrame compute_frame_aligned(const SystemSpec& sys, const Vec& u, const Mat& ref_right) {
    EigenFrame f = compute_frame(sys, u);
    for (int i = 0; i < sys.n; ++i) {
        if (f.right.col(i).dot(ref_right.col(i)) < 0) {
            f.right.col(i) = -f.right.col(i);
            f.left.row(i) = -f.left.row(i);
        }
    }
    return f;
}

EstimateReport check_temple(const SystemSpec& sys, const std::vector<Vec>& samples,
                            double step) {
    EstimateReport rep;
    rep.name = "temple_check:" + sys.name;
    double worst = 0.0;
    for (const Vec& u : samples) {
        EigenFrame f = compute_frame(sys, u);
        for (int i = 0; i < sys.n; ++i) {
            Vec ri = f.right.col(i);
            auto field = [&](const Vec& v) {
                return compute_frame_aligned(sys, v, f.right).right.col(i).eval();
            };
            Vec d = directional_derivative(sys, field, u, ri, step);
            worst = std::max(worst, d.norm());
        }
    }
    rep.check_le("max_self_bullet", worst, sys.tol.temple_tol);
    rep.scalars["samples"] = static_cast<double>(samples.size());
    rep.scalars["step"] = step;
    return rep;
}

EstimateReport check_system(const SystemSpec& sys, const std::vector<Vec>& samples) {
    EstimateReport rep;
    rep.name = "system_check:" + sys.name;
    double worst_gap = std::numeric_limits<double>::infinity();
    double worst_comm = 0.0;
    double worst_mu = std::numeric_limits<double>::infinity();
    double worst_frame = 0.0;
    double worst_jac = 0.0;
    for (const Vec& u : samples) {
        Mat A = sys.A(u);
        Mat B = sys.B(u);
        worst_comm = std::max(worst_comm, (A * B - B * A).norm());
        EigenFrame f = compute_frame(sys, u);
        for (int i = 0; i < sys.n; ++i) {
            worst_mu = std::min(worst_mu, f.mu[i]);
            worst_frame = std::max(
                worst_frame, (A * f.right.col(i) - f.lambda[i] * f.right.col(i)).norm());
            worst_frame = std::max(
                worst_frame, (B * f.right.col(i) - f.mu[i] * f.right.col(i)).norm());
            for (int j = 0; j < sys.n; ++j) {
                double d = f.left.row(i).dot(f.right.col(j)) - (i == j ? 1.0 : 0.0);
                worst_frame = std::max(worst_frame, std::abs(d));
            }
            if (i + 1 < sys.n) worst_gap = std::min(worst_gap, f.lambda[i + 1] - f.lambda[i]);
        }
        if (sys.flux) {
            const double h = 1e-6;
            Mat J(sys.n, sys.n);
            for (int j = 0; j < sys.n; ++j) {
                Vec e = Vec::Zero(sys.n);
                e[j] = 1.0;
                Vec df = directional_derivative(sys, *sys.flux, u, e, h);
                J.col(j) = df;
            }
            worst_jac = std::max(worst_jac, (J - A).norm());
        }
    }
    if (sys.n > 1) rep.check_ge("min_eigen_gap", worst_gap, sys.tol.gap_min);
    rep.check_le("max_commutator", worst_comm, sys.tol.commutation_tol);
    // c0 is allowed to be attained; leave roundoff headroom below it
    rep.check_ge("min_mu", worst_mu, sys.c0 * (1.0 - 1e-12));
    rep.check_le("max_frame_residual", worst_frame, sys.tol.frame_tol);
    if (sys.flux) rep.check_le("max_flux_jacobian_residual", worst_jac, sys.tol.jacobian_tol);
    rep.scalars["samples"] = static_cast<double>(samples.size());
    return rep;
}

// Bundled corpus -------------------------------------------------------------

namespace {

Mat rotation2(double theta) {
    Mat R(2, 2);
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return R;
}

Mat rotation3(double a, double b) {
    Mat R1 = Mat::Identity(3, 3), R2 = Mat::Identity(3, 3);
    R1(0, 0) = std::cos(a);
    R1(0, 1) = -std::sin(a);
    R1(1, 0) = std::sin(a);
    R1(1, 1) = std::cos(a);
    R2(1, 1) = std::cos(b);
    R2(1, 2) = -std::sin(b);
    R2(2, 1) = std::sin(b);
    R2(2, 2) = std::cos(b);
    return R1 * R2;
}

SystemSpec make_burgers() {
    SystemSpec s;
    s.name = "burgers";
    s.n = 1;
    s.A = [](const Vec& u) {
        Mat A(1, 1);
        A(0, 0) = u[0];
        return A;
    };
    s.B = [](const Vec& u) {
        Mat B(1, 1);
        B(0, 0) = 1.0 + u[0] * u[0] / 4.0;
        return B;
    };
    s.flux = [](const Vec& u) {
        Vec f(1);
        f[0] = 0.5 * u[0] * u[0];
        return f;
    };
    s.domain_box.lo = Vec::Constant(1, -1.5);
    s.domain_box.hi = Vec::Constant(1, 1.5);
    s.c0 = 1.0;
    s.char_speed_bound = [](const Vec& u) { return std::abs(u[0]); };
    DecoupledForm d;
    d.R = Mat::Identity(1, 1);
    d.Rinv = d.R;
    d.lambda_c = {[](double w) { return w; }};
    d.mu_c = {[](double w) { return 1.0 + w * w / 4.0; }};
    s.decoupled = d;
    return s;
}

// A(u) = R diag(lam_c(w_c)) R^-1, B(u) = R diag(mu_c(w_c)) R^-1, w = R^-1 u.
SystemSpec make_rotated(const std::string& name, Mat R,
                        std::vector<std::function<double(double)>> lam,
                        std::vector<std::function<double(double)>> mu,
                        std::vector<std::function<double(double)>> g, const Box& box,
                        double c0, double speed_cap) {
    const int n = static_cast<int>(lam.size());
    Mat Rinv = R.inverse();
    SystemSpec s;
    s.name = name;
    s.n = n;
    s.A = [R, Rinv, lam, n](const Vec& u) {
        Vec w = Rinv * u;
        Mat D = Mat::Zero(n, n);
        for (int c = 0; c < n; ++c) D(c, c) = lam[c](w[c]);
        return (R * D * Rinv).eval();
    };
    s.B = [R, Rinv, mu, n](const Vec& u) {
        Vec w = Rinv * u;
        Mat D = Mat::Zero(n, n);
        for (int c = 0; c < n; ++c) D(c, c) = mu[c](w[c]);
        return (R * D * Rinv).eval();
    };
    s.flux = [R, Rinv, g, n](const Vec& u) {
        Vec w = Rinv * u;
        Vec gw(n);
        for (int c = 0; c < n; ++c) gw[c] = g[c](w[c]);
        return (R * gw).eval();
    };
    s.domain_box = box;
    s.c0 = c0;
    s.char_speed_bound = [speed_cap](const Vec&) { return speed_cap; };
    DecoupledForm d;
    d.R = R;
    d.Rinv = Rinv;
    d.lambda_c = lam;
    d.mu_c = mu;
    s.decoupled = d;
    return s;
}

SystemSpec make_rotated2() {
    Mat R = rotation2(std::numbers::pi / 6.0);
    Box box;
    box.lo = Vec::Constant(2, -0.5);
    box.hi = Vec::Constant(2, 0.5);
    return make_rotated(
        "rotated2", R,
        {[](double w) { return w; }, [](double w) { return 2.0 + w; }},
        {[](double w) { return 1.0 + 0.5 * w * w; }, [](double w) { return 1.5 + 0.5 * w; }},
        {[](double w) { return 0.5 * w * w; }, [](double w) { return 2.0 * w + 0.5 * w * w; }},
        box, 1.0, 3.0);
}

SystemSpec make_rotated3() {
    Mat R = rotation3(0.35, 0.6);
    Box box;
    box.lo = Vec::Constant(3, -0.4);
    box.hi = Vec::Constant(3, 0.4);
    return make_rotated(
        "rotated3", R,
        {[](double w) { return w; }, [](double w) { return 2.0 + w; },
         [](double w) { return 4.0 + w; }},
        {[](double w) { return 1.0 + 0.25 * w * w; }, [](double w) { return 1.25 + 0.25 * w; },
         [](double w) { return 1.5 + w * w / 3.0; }},
        {[](double w) { return 0.5 * w * w; }, [](double w) { return 2.0 * w + 0.5 * w * w; },
         [](double w) { return 4.0 * w + 0.5 * w * w; }},
        box, 1.0, 5.0);
}

// Langmuir chromatography, f_i(u) = k_i u_i / (1 + u1 + u2), with a commuting
// viscosity B = b(u) A + c(u) I.
SystemSpec make_chromatography() {
    const double k1 = 1.0, k2 = 2.0;
    SystemSpec s;
    s.name = "chromatography";
    s.n = 2;
    auto Afn = [k1, k2](const Vec& u) {
        double S = 1.0 + u[0] + u[1];
        Mat A(2, 2);
        A(0, 0) = k1 * (S - u[0]) / (S * S);
        A(0, 1) = -k1 * u[0] / (S * S);
        A(1, 0) = -k2 * u[1] / (S * S);
        A(1, 1) = k2 * (S - u[1]) / (S * S);
        return A;
    };
    s.A = Afn;
    s.B = [Afn](const Vec& u) {
        double b = (2.0 + u[0]) / 8.0;
        double c = 2.0 + u[1] * u[1] / 10.0;
        Mat B = b * Afn(u);
        B(0, 0) += c;
        B(1, 1) += c;
        return B;
    };
    s.flux = [k1, k2](const Vec& u) {
        double S = 1.0 + u[0] + u[1];
        Vec f(2);
        f[0] = k1 * u[0] / S;
        f[1] = k2 * u[1] / S;
        return f;
    };
    s.domain_box.lo = Vec::Constant(2, 0.2);
    s.domain_box.hi = Vec::Constant(2, 1.0);
    s.c0 = 2.0;
    s.char_speed_bound = [k2](const Vec&) { return k2; };
    return s;
}

SystemSpec make_psystem() {
    SystemSpec s;
    s.name = "psystem";
    s.n = 2;
    // v_t - w_x = 0, w_t + p(v)_x = 0 with p(v) = v^-2
    s.A = [](const Vec& u) {
        Mat A(2, 2);
        double v = u[0];
        A << 0.0, -1.0, -2.0 / (v * v * v), 0.0;
        return A;
    };
    s.B = [](const Vec&) { return Mat::Identity(2, 2).eval(); };
    s.flux = [](const Vec& u) {
        Vec f(2);
        f[0] = -u[1];
        f[1] = 1.0 / (u[0] * u[0]);
        return f;
    };
    s.domain_box.lo = Vec(2);
    s.domain_box.hi = Vec(2);
    s.domain_box.lo << 0.8, -0.5;
    s.domain_box.hi << 1.6, 0.5;
    s.c0 = 1.0;
    s.char_speed_bound = [](const Vec& u) {
        return std::sqrt(2.0 / std::pow(u[0], 3));
    };
    return s;
}

} // namespace

std::vector<SystemSpec> bundled_systems() {
    std::vector<SystemSpec> out;
    out.push_back(make_burgers());
    out.push_back(make_rotated2());
    out.push_back(make_rotated3());
    out.push_back(make_chromatography());
    return out;
}

SystemSpec negative_control() { return make_psystem(); }

std::vector<std::string> list_system_names() {
    return {"burgers", "rotated2", "rotated3", "chromatography", "psystem"};
}

SystemSpec get_system(const std::string& name_or_path) {
    if (name_or_path == "burgers") return make_burgers();
    if (name_or_path == "rotated2") return make_rotated2();
    if (name_or_path == "rotated3") return make_rotated3();
    if (name_or_path == "chromatography") return make_chromatography();
    if (name_or_path == "psystem") return make_psystem();
    std::ifstream probe(name_or_path);
    if (!probe.good()) {
        throw ConfigError("unknown system '" + name_or_path +
                          "' (not a registry name and not a readable file)");
    }
    return load_system_file(name_or_path);
}

namespace {

MatrixFn matrix_from_exprs(std::vector<std::vector<ExprPtr>> rows, int n) {
    return [rows = std::move(rows), n](const Vec& u) {
        Mat M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = rows[i][j]->eval(u);
        return M;
    };
}

} // namespace

SystemSpec load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ConfigError("cannot open system file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }

    SystemSpec s;
    try {
        s.name = j.value("name", path);
        s.n = j.at("n").get<int>();
        if (s.n < 1) throw ConfigError("n must be >= 1 in '" + path + "'");

        auto parse_matrix = [&](const char* key) {
            const auto& rows = j.at(key);
            if (static_cast<int>(rows.size()) != s.n)
                throw ConfigError(std::string(key) + " must have n rows in '" + path + "'");
            std::vector<std::vector<ExprPtr>> out(s.n);
            for (int i = 0; i < s.n; ++i) {
                const auto& row = rows[i];
                if (static_cast<int>(row.size()) != s.n)
                    throw ConfigError(std::string(key) + " row " + std::to_string(i) +
                                      " must have n entries in '" + path + "'");
                for (int c = 0; c < s.n; ++c) {
                    std::string where = std::string(key) + "[" + std::to_string(i) + "][" +
                                        std::to_string(c) + "]";
                    out[i].push_back(parse_expr(row[c].get<std::string>(), s.n, where));
                }
            }
            return out;
        };

        s.A = matrix_from_exprs(parse_matrix("A"), s.n);
        s.B = matrix_from_exprs(parse_matrix("B"), s.n);

        if (j.contains("flux")) {
            const auto& fl = j.at("flux");
            if (static_cast<int>(fl.size()) != s.n)
                throw ConfigError("flux must have n entries in '" + path + "'");
            std::vector<ExprPtr> comps;
            for (int i = 0; i < s.n; ++i) {
                comps.push_back(parse_expr(fl[i].get<std::string>(), s.n,
                                           "flux[" + std::to_string(i) + "]"));
            }
            int n = s.n;
            s.flux = [comps, n](const Vec& u) {
                Vec f(n);
                for (int i = 0; i < n; ++i) f[i] = comps[i]->eval(u);
                return f;
            };
        }

        const auto& box = j.at("domain_box");
        auto lo = box.at("lo").get<std::vector<double>>();
        auto hi = box.at("hi").get<std::vector<double>>();
        if (static_cast<int>(lo.size()) != s.n || static_cast<int>(hi.size()) != s.n)
            throw ConfigError("domain_box lo/hi must have n entries in '" + path + "'");
        s.domain_box.lo = Eigen::Map<Vec>(lo.data(), s.n);
        s.domain_box.hi = Eigen::Map<Vec>(hi.data(), s.n);
        for (int i = 0; i < s.n; ++i) {
            if (!(s.domain_box.lo[i] < s.domain_box.hi[i]))
                throw ConfigError("domain_box must have lo < hi in '" + path + "'");
        }

        s.c0 = j.at("c0").get<double>();
        if (!(s.c0 > 0)) throw ConfigError("c0 must be positive in '" + path + "'");

        if (j.contains("tolerances")) {
            const auto& t = j["tolerances"];
            s.tol.frame_tol = t.value("frame_tol", s.tol.frame_tol);
            s.tol.commutation_tol = t.value("commutation_tol", s.tol.commutation_tol);
            s.tol.temple_tol = t.value("temple_tol", s.tol.temple_tol);
            s.tol.gap_min = t.value("gap_min", s.tol.gap_min);
            s.tol.jacobian_tol = t.value("jacobian_tol", s.tol.jacobian_tol);
            s.tol.bullet_step = t.value("bullet_step", s.tol.bullet_step);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid system file '" + path + "': " + e.what());
    }
    return s;
}

} // namespace templab
