#include "mdrsp/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace mdrsp::heuristic {

namespace {

int argmax_target(const cuts::FractionalPoint& p, int i,
                  const std::vector<char>& eligible) {
    const Instance& inst = *p.inst;
    int best = -1;
    double best_val = -1.0;
    for (int k = 0; k < inst.num_vertices(); ++k) {
        if (!eligible[k]) continue;
        double val = p.y(i, k);
        if (val > best_val) {  // ties: lowest vertex wins
            best_val = val;
            best = k;
        }
    }
    return best;
}

double tour_cost(const Instance& inst, const std::vector<int>& cycle) {
    double cost = 0.0;
    for (size_t i = 0; i < cycle.size(); ++i)
        cost += inst.routing_cost(cycle[i], cycle[(i + 1) % cycle.size()]);
    return cost;
}

/// 2-opt: reverse cycle[i..j]; positions 1.. keep the depot at slot 0.
bool two_opt_pass(const Instance& inst, std::vector<int>& cycle) {
    bool improved = false;
    int m = (int)cycle.size();
    for (int i = 1; i < m - 1; ++i)
        for (int j = i + 1; j < m; ++j) {
            int a = cycle[i - 1], b = cycle[i];
            int c = cycle[j], d = cycle[(j + 1) % m];
            if (a == c || b == d) continue;
            double delta = inst.routing_cost(a, c) + inst.routing_cost(b, d) -
                           inst.routing_cost(a, b) - inst.routing_cost(c, d);
            if (delta < -1e-9) {
                std::reverse(cycle.begin() + i, cycle.begin() + j + 1);
                improved = true;
            }
        }
    return improved;
}

/// Or-opt: relocate segments of length 1..3 elsewhere in the cycle.
bool or_opt_pass(const Instance& inst, std::vector<int>& cycle) {
    int m = (int)cycle.size();
    for (int len = 1; len <= 3 && len < m - 1; ++len)
        for (int i = 1; i + len <= m; ++i) {
            int prev = cycle[i - 1];
            int next = cycle[(i + len) % m];
            if (i + len == m && next == cycle[i]) continue;
            double removed = inst.routing_cost(prev, cycle[i]) +
                             inst.routing_cost(cycle[i + len - 1], next) -
                             inst.routing_cost(prev, next);
            std::vector<int> rest;
            rest.reserve(m - len);
            for (int k = 0; k < m; ++k)
                if (k < i || k >= i + len) rest.push_back(cycle[k]);
            for (size_t pos = 1; pos <= rest.size(); ++pos) {
                int a = rest[pos - 1], b = rest[pos % rest.size()];
                double added = inst.routing_cost(a, cycle[i]) +
                               inst.routing_cost(cycle[i + len - 1], b) -
                               inst.routing_cost(a, b);
                if (added < removed - 1e-9) {
                    std::vector<int> next_cycle(rest.begin(),
                                                rest.begin() + pos);
                    next_cycle.insert(next_cycle.end(), cycle.begin() + i,
                                      cycle.begin() + i + len);
                    next_cycle.insert(next_cycle.end(), rest.begin() + pos,
                                      rest.end());
                    // keep the depot at slot 0
                    auto at = std::find_if(
                        next_cycle.begin(), next_cycle.end(),
                        [&](int v) { return inst.is_depot(v); });
                    std::rotate(next_cycle.begin(), at, next_cycle.end());
                    cycle = std::move(next_cycle);
                    return true;
                }
            }
        }
    return false;
}

/// Cluster the ring vertices along the LP's edge values instead of by plain
/// proximity: heavy x-edges glue vertices into one ring, two depots never
/// merge, and a cluster that ends up without a depot joins the depot it can
/// reach most cheaply. Falls back to nearest-depot clustering if that ever
/// builds a worse set of rings.
std::vector<Ring> build_lp_guided_rings(const Instance& inst,
                                        const cuts::FractionalPoint& p,
                                        const std::vector<int>& P) {
    int u = inst.num_customers(), n = inst.num_depots();
    int nv = inst.num_vertices();
    std::vector<char> inP(nv, 0);
    for (int v : P) inP[v] = 1;

    std::vector<int> parent(nv);
    for (int v = 0; v < nv; ++v) parent[v] = v;
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::vector<int> depot_of(nv, -1);
    for (int d = u; d < nv; ++d) depot_of[d] = d;

    struct E { double x; int a, b; };
    std::vector<E> edges;
    for (int a = 0; a < u; ++a) {
        if (!inP[a]) continue;
        for (int b = a + 1; b < nv; ++b) {
            if (!inP[b]) continue;
            double xe = p.x(a, b);
            if (xe > 0.3) edges.push_back({xe, a, b});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const E& l, const E& r) {
        if (l.x != r.x) return l.x > r.x;
        return std::tie(l.a, l.b) < std::tie(r.a, r.b);
    });
    for (const E& e : edges) {
        int ra = find(e.a), rb = find(e.b);
        if (ra == rb) continue;
        if (depot_of[ra] >= 0 && depot_of[rb] >= 0) continue;
        parent[ra] = rb;
        if (depot_of[ra] >= 0) depot_of[rb] = depot_of[ra];
    }

    std::vector<std::vector<int>> cluster(n);
    std::vector<std::vector<int>> stray;  // depotless components
    std::vector<int> stray_id(nv, -1);
    for (int v = 0; v < u; ++v) {
        if (!inP[v]) continue;
        int r = find(v);
        if (depot_of[r] >= 0) {
            cluster[depot_of[r] - u].push_back(v);
        } else {
            if (stray_id[r] < 0) {
                stray_id[r] = (int)stray.size();
                stray.emplace_back();
            }
            stray[stray_id[r]].push_back(v);
        }
    }
    for (const auto& comp : stray) {
        int best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (int d = 0; d < n; ++d)
            for (int v : comp)
                if (inst.routing_cost(v, u + d) < best_cost) {
                    best_cost = inst.routing_cost(v, u + d);
                    best = d;
                }
        for (int v : comp) cluster[best].push_back(v);
    }
    for (auto& c : cluster) std::sort(c.begin(), c.end());

    std::vector<Ring> guided = build_rings_clustered(inst, cluster);
    std::vector<Ring> plain = build_rings(inst, P);
    auto rings_cost = [&](const std::vector<Ring>& rs) {
        double c = 0.0;
        for (const Ring& r : rs) {
            std::vector<int> cyc = {r.depot};
            cyc.insert(cyc.end(), r.customers.begin(), r.customers.end());
            c += tour_cost(inst, cyc);
        }
        return c;
    };
    return rings_cost(guided) <= rings_cost(plain) ? guided : plain;
}

}  // namespace

AssignmentDraft greedy_assignment(const cuts::FractionalPoint& p,
                                  const std::vector<int>& order) {
    const Instance& inst = *p.inst;
    int u = inst.num_customers(), nv = inst.num_vertices();
    AssignmentDraft draft;
    draft.sigma.assign(u, -1);
    std::vector<char> eligible(nv, 1);
    for (int i : order) {
        draft.sigma[i] = argmax_target(p, i, eligible);
        if (draft.sigma[i] != i) eligible[i] = 0;
    }
    // repair: targets that left the eligible set are re-chosen over the
    // final set (which can no longer shrink)
    for (int i = 0; i < u; ++i)
        if (draft.sigma[i] != i && !eligible[draft.sigma[i]])
            draft.sigma[i] = argmax_target(p, i, eligible);
    for (int v = 0; v < nv; ++v)
        if (eligible[v] && (inst.is_depot(v) || draft.sigma[v] == v))
            draft.P.push_back(v);
    return draft;
}

AssignmentDraft greedy_assignment(const cuts::FractionalPoint& p,
                                  std::mt19937_64& rng) {
    int u = p.inst->num_customers();
    std::vector<int> order(u);
    for (int i = 0; i < u; ++i) order[i] = i;
    for (int i = u - 1; i > 0; --i)
        std::swap(order[i], order[rng() % (i + 1)]);
    return greedy_assignment(p, order);
}

std::vector<Ring> build_rings(const Instance& inst,
                              const std::vector<int>& P) {
    int u = inst.num_customers(), n = inst.num_depots();
    std::vector<std::vector<int>> cluster(n);
    for (int v : P) {
        if (!inst.is_customer(v)) continue;
        int best = 0;
        for (int d = 1; d < n; ++d)
            if (inst.routing_cost(v, u + d) < inst.routing_cost(v, u + best))
                best = d;
        cluster[best].push_back(v);
    }
    return build_rings_clustered(inst, cluster);
}

std::vector<Ring> build_rings_clustered(
    const Instance& inst, const std::vector<std::vector<int>>& cluster) {
    int u = inst.num_customers(), n = inst.num_depots();
    std::vector<Ring> rings;
    for (int d = 0; d < n; ++d) {
        if (cluster[d].empty()) continue;
        int depot = u + d;
        // nearest-neighbor construction from the depot
        std::vector<int> cycle = {depot};
        std::vector<char> left(u, 0);
        for (int v : cluster[d]) left[v] = 1;
        int cur = depot;
        for (size_t step = 0; step < cluster[d].size(); ++step) {
            int best = -1;
            for (int v : cluster[d])
                if (left[v] && (best < 0 || inst.routing_cost(cur, v) <
                                                inst.routing_cost(cur, best)))
                    best = v;
            cycle.push_back(best);
            left[best] = 0;
            cur = best;
        }
        if (cycle.size() > 3) {
            bool improved = true;
            while (improved) {
                improved = two_opt_pass(inst, cycle);
                if (or_opt_pass(inst, cycle)) improved = true;
            }
        }
        rings.push_back({depot, {cycle.begin() + 1, cycle.end()}});
    }
    return rings;
}

Solution lp_heuristic(const Instance& inst, const cuts::FractionalPoint& p,
                      std::mt19937_64& rng) {
    if (p.integral()) {
        IncidenceVector vec(p.v.size());
        for (size_t i = 0; i < p.v.size(); ++i)
            vec[i] = (int)std::lround(p.v[i]);
        try {
            return from_incidence(inst, vec, /*repair_two_paths=*/true);
        } catch (const Error&) {
            // integral but MIP-infeasible (e.g. subtours): fall through
        }
    }
    AssignmentDraft draft = greedy_assignment(p, rng);
    Solution sol;
    sol.rings = build_lp_guided_rings(inst, p, draft.P);
    // the LP's y values chose the draft targets; once the rings are fixed,
    // every assigned customer should simply use its cheapest ring vertex
    std::vector<int> hubs;  // depots always qualify, ringless or not
    for (int d = 0; d < inst.num_depots(); ++d)
        hubs.push_back(inst.num_customers() + d);
    for (const Ring& r : sol.rings)
        for (int v : r.customers) hubs.push_back(v);
    for (int i = 0; i < inst.num_customers(); ++i) {
        if (draft.sigma[i] == i) continue;
        int best = hubs.front();
        for (int h : hubs)
            if (inst.assign_cost(i, h) < inst.assign_cost(i, best)) best = h;
        sol.assignment[i] = best;
    }
    return sol;
}

}  // namespace mdrsp::heuristic
