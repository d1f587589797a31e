#include "templab/front_tracking.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace templab {

namespace {

// Appends the fronts of the Riemann problem a | b (node indices) in
// increasing-speed order: convex hull below for a < b, concave hull above
// for a > b (entropy solution for a piecewise-linear flux).
void riemann_fronts(const std::vector<double>& z, const std::vector<double>& g, int a, int b,
                    std::vector<std::pair<int, int>>& pairs) {
    pairs.clear();
    if (a == b) return;
    auto slope = [&](int i, int j) { return (g[j] - g[i]) / (z[j] - z[i]); };
    std::vector<int> hull;
    if (a < b) {
        for (int m = a; m <= b; ++m) {
            while (hull.size() >= 2 &&
                   slope(hull[hull.size() - 2], hull.back()) >= slope(hull.back(), m))
                hull.pop_back();
            hull.push_back(m);
        }
        for (size_t k = 0; k + 1 < hull.size(); ++k) pairs.emplace_back(hull[k], hull[k + 1]);
    } else {
        // upper concave hull on [b..a]; traversed from a down to b the chord
        // slopes increase
        for (int m = b; m <= a; ++m) {
            while (hull.size() >= 2 &&
                   slope(hull[hull.size() - 2], hull.back()) <= slope(hull.back(), m))
                hull.pop_back();
            hull.push_back(m);
        }
        for (size_t k = hull.size(); k >= 2; --k) pairs.emplace_back(hull[k - 1], hull[k - 2]);
    }
}

} // namespace

int ScalarFrontTracker::quantize(double v) const {
    const double z0 = z_nodes.front();
    const double dz = z_nodes[1] - z_nodes[0];
    int idx = static_cast<int>(std::lround((v - z0) / dz));
    return std::clamp(idx, 0, static_cast<int>(z_nodes.size()) - 1);
}

std::vector<ScalarFrontTracker::Front> ScalarFrontTracker::evolve(
    const std::vector<double>& xs, const std::vector<int>& vals, double t_target) const {
    if (vals.size() != xs.size() + 1)
        throw ConfigError("front tracking: need K jumps and K+1 values");

    struct Node {
        Front f;
        int prev = -1, next = -1;
        long version = 0;
        bool alive = false;
    };
    std::vector<Node> nodes;
    nodes.reserve(xs.size() * 4);

    auto speed_of = [&](int a, int b) {
        return (g_nodes[b] - g_nodes[a]) / (z_nodes[b] - z_nodes[a]);
    };

    int head = -1, tail = -1;
    auto append = [&](double x0, int a, int b) {
        Node nd;
        nd.f = Front{x0, speed_of(a, b), a, b};
        nd.alive = true;
        nd.prev = tail;
        nodes.push_back(nd);
        int id = static_cast<int>(nodes.size()) - 1;
        if (tail >= 0) nodes[tail].next = id;
        tail = id;
        if (head < 0) head = id;
        return id;
    };

    std::vector<std::pair<int, int>> pairs;
    for (size_t k = 0; k < xs.size(); ++k) {
        riemann_fronts(z_nodes, g_nodes, vals[k], vals[k + 1], pairs);
        for (auto [a, b] : pairs) append(xs[k], a, b);
    }

    struct Event {
        double t;
        int left, right;
        long vl, vr;
        bool operator<(const Event& o) const { return t > o.t; } // min-heap
    };
    std::priority_queue<Event> events;

    auto collision_time = [&](int l, int r, double now) -> double {
        const Front& fl = nodes[l].f;
        const Front& fr = nodes[r].f;
        double ds = fl.speed - fr.speed;
        if (ds <= 0) return -1.0;
        double t = (fr.x0 - fl.x0) / ds;
        return std::max(t, now);
    };

    auto schedule = [&](int l, double now) {
        if (l < 0) return;
        int r = nodes[l].next;
        if (r < 0) return;
        double t = collision_time(l, r, now);
        if (t >= 0 && t <= t_target)
            events.push(Event{t, l, r, nodes[l].version, nodes[r].version});
    };

    for (int id = head; id >= 0; id = nodes[id].next) schedule(id, 0.0);

    long processed = 0;
    while (!events.empty()) {
        Event ev = events.top();
        events.pop();
        if (ev.left < 0 || ev.right < 0) continue;
        if (!nodes[ev.left].alive || !nodes[ev.right].alive) continue;
        if (nodes[ev.left].version != ev.vl || nodes[ev.right].version != ev.vr) continue;
        if (nodes[ev.left].next != ev.right) continue;
        if (++processed > max_events)
            throw FrontBudgetExceeded("front tracking: event budget exhausted");

        double tc = ev.t;
        double xc = nodes[ev.left].f.x0 + nodes[ev.left].f.speed * tc;
        int a = nodes[ev.left].f.left;
        int b = nodes[ev.right].f.right;
        int before = nodes[ev.left].prev;
        int after = nodes[ev.right].next;

        nodes[ev.left].alive = false;
        nodes[ev.right].alive = false;

        riemann_fronts(z_nodes, g_nodes, a, b, pairs);
        int prev = before;
        for (auto [pa, pb] : pairs) {
            Node nd;
            nd.f = Front{xc - speed_of(pa, pb) * tc, speed_of(pa, pb), pa, pb};
            nd.alive = true;
            nd.prev = prev;
            nd.next = -1;
            nodes.push_back(nd);
            int id = static_cast<int>(nodes.size()) - 1;
            if (static_cast<int>(nodes.size()) > max_fronts)
                throw FrontBudgetExceeded("front tracking: front budget exhausted");
            if (prev >= 0)
                nodes[prev].next = id;
            else
                head = id;
            prev = id;
        }
        if (prev >= 0)
            nodes[prev].next = after;
        else
            head = after;
        if (after >= 0)
            nodes[after].prev = prev;
        else
            tail = prev;
        if (before >= 0) ++nodes[before].version;
        if (after >= 0) ++nodes[after].version;

        // new collision candidates around the inserted fan
        schedule(before, tc);
        int run = before >= 0 ? nodes[before].next : head;
        while (run >= 0 && run != after) {
            schedule(run, tc);
            run = nodes[run].next;
        }
    }

    std::vector<Front> out;
    for (int id = head; id >= 0; id = nodes[id].next) {
        if (nodes[id].alive) out.push_back(nodes[id].f);
    }
    std::stable_sort(out.begin(), out.end(), [&](const Front& a, const Front& b) {
        return a.x0 + a.speed * t_target < b.x0 + b.speed * t_target;
    });
    return out;
}

double ScalarFrontTracker::value_at(const std::vector<Front>& fronts, double t, double x,
                                    int left_value) const {
    int val = left_value;
    for (const Front& f : fronts) {
        if (f.x0 + f.speed * t <= x)
            val = f.right;
        else
            break;
    }
    return z_nodes[val];
}

ScalarFrontTracker make_tracker(const DecoupledForm& dec, int comp, double w_min,
                                double w_max, int flux_nodes) {
    ScalarFrontTracker tr;
    double range = std::max(w_max - w_min, 1e-12);
    double pad = 0.05 * range;
    double lo = w_min - pad, hi = w_max + pad;
    int M = std::max(flux_nodes, 8);
    double dz = (hi - lo) / M;
    tr.z_nodes.resize(M + 1);
    tr.g_nodes.assign(M + 1, 0.0);
    const auto& lam = dec.lambda_c[comp];
    for (int m = 0; m <= M; ++m) tr.z_nodes[m] = lo + m * dz;
    for (int m = 0; m < M; ++m) {
        double za = tr.z_nodes[m], zb = tr.z_nodes[m + 1];
        double mid = 0.5 * (za + zb);
        tr.g_nodes[m + 1] =
            tr.g_nodes[m] + dz / 6.0 * (lam(za) + 4.0 * lam(mid) + lam(zb));
    }
    return tr;
}

GridField exact_semigroup_decoupled(const SystemSpec& sys, const GridField& u0, double t,
                                    int flux_nodes) {
    if (!sys.decoupled)
        throw NoReference("system '" + sys.name + "' has no exact decoupled form");
    const DecoupledForm& dec = *sys.decoupled;
    const int n = sys.n;
    const int N = u0.cells();

    // w-components of the data
    std::vector<std::vector<double>> w(n, std::vector<double>(N));
    for (int j = 0; j < N; ++j) {
        Vec wj = dec.Rinv * u0.state(j);
        for (int c = 0; c < n; ++c) w[c][j] = wj[c];
    }

    GridField out = GridField::zeros(u0.x0, u0.dx, N, n, u0.t + t);
    std::vector<std::vector<double>> wt(n, std::vector<double>(N));
    for (int c = 0; c < n; ++c) {
        double wmin = *std::min_element(w[c].begin(), w[c].end());
        double wmax = *std::max_element(w[c].begin(), w[c].end());
        ScalarFrontTracker tr = make_tracker(dec, c, wmin, wmax, flux_nodes);

        std::vector<double> xs;
        std::vector<int> vals;
        vals.push_back(tr.quantize(w[c][0]));
        for (int j = 1; j < N; ++j) {
            int q = tr.quantize(w[c][j]);
            if (q != vals.back()) {
                xs.push_back(u0.x(j - 1) + 0.5 * u0.dx);
                vals.push_back(q);
            }
        }
        if (xs.empty()) {
            for (int j = 0; j < N; ++j) wt[c][j] = tr.z_nodes[vals[0]];
            continue;
        }
        auto fronts = tr.evolve(xs, vals, t);
        size_t fi = 0;
        int cur = vals[0];
        for (int j = 0; j < N; ++j) {
            double x = u0.x(j);
            while (fi < fronts.size() && fronts[fi].x0 + fronts[fi].speed * t <= x) {
                cur = fronts[fi].right;
                ++fi;
            }
            wt[c][j] = tr.z_nodes[cur];
        }
    }
    Vec wj(n);
    for (int j = 0; j < N; ++j) {
        for (int c = 0; c < n; ++c) wj[c] = wt[c][j];
        out.set_state(j, dec.R * wj);
    }
    return out;
}

} // namespace templab
