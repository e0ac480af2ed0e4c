#include "mdrsp/polylab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

#include "mdrsp/cuts.hpp"

namespace mdrsp::polylab {

using boost::multiprecision::cpp_int;

namespace {

Instance unit_instance(int u, int n) {
    int nv = u + n;
    std::vector<std::vector<double>> ones(nv, std::vector<double>(nv, 1.0));
    for (int i = 0; i < nv; ++i) ones[i][i] = 0.0;
    return Instance(u, n, ones, ones);
}

using Cycle = std::vector<int>;        // customer order, depot implicit
using Cover = std::vector<Cycle>;      // disjoint cycles at one depot

/// All distinct cyclic edge sets through an implicit depot and the given
/// customers: reversal duplicates removed by requiring first < last.
std::vector<Cycle> cycle_orders(const std::vector<int>& block) {
    if (block.size() == 1) return {block};
    std::vector<Cycle> out;
    Cycle perm = block;  // sorted
    do {
        if (perm.front() < perm.back()) out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

/// Every partition of the customers in `mask` into cycles.
const std::vector<Cover>& covers_of(int mask, const std::vector<int>& ids,
                                    std::map<int, std::vector<Cover>>& cache) {
    auto it = cache.find(mask);
    if (it != cache.end()) return it->second;
    std::vector<Cover> result;
    if (mask == 0) {
        result.push_back({});
    } else {
        int low = 0;
        while (!(mask & (1 << low))) ++low;
        // iterate blocks containing the lowest element to avoid duplicates
        int rest_bits = mask & ~(1 << low);
        for (int sub = rest_bits;; sub = (sub - 1) & rest_bits) {
            int block_mask = sub | (1 << low);
            std::vector<int> block;
            for (size_t b = 0; b < ids.size(); ++b)
                if (block_mask & (1 << b)) block.push_back(ids[b]);
            // map positions back: ids indexes by bit position
            const auto& tails = covers_of(mask & ~block_mask, ids, cache);
            for (const auto& cyc : cycle_orders(block))
                for (const auto& tail : tails) {
                    Cover cover = tail;
                    cover.push_back(cyc);
                    result.push_back(std::move(cover));
                }
            if (sub == 0) break;
        }
    }
    return cache.emplace(mask, std::move(result)).first->second;
}

void apply_cycle(const Instance& inst, int depot, const Cycle& cyc,
                 IncidenceVector& vec) {
    if (cyc.size() == 1) {
        vec[inst.edge_index(depot, cyc[0])] += 2;
    } else {
        vec[inst.edge_index(depot, cyc.front())] += 1;
        for (size_t i = 0; i + 1 < cyc.size(); ++i)
            vec[inst.edge_index(cyc[i], cyc[i + 1])] += 1;
        vec[inst.edge_index(cyc.back(), depot)] += 1;
    }
    for (int c : cyc) vec[inst.arc_index(c, c)] = 1;
}

}  // namespace

void enumerate_feasible(
    int u, int n, const std::function<bool(const IncidenceVector&)>& visit) {
    if (u < 1 || n < 1 || u > 6 || n > 3)
        throw Error("enumeration limits exceeded (u <= 6, n <= 3)");
    Instance inst = unit_instance(u, n);
    int m = inst.num_vars();
    // labeling: 0..n-1 = on a ring of that depot, n = assigned
    std::vector<int> lab(u, 0);
    std::map<int, std::vector<Cover>> cover_cache;
    std::vector<int> all_ids(u);
    for (int i = 0; i < u; ++i) all_ids[i] = i;
    for (;;) {
        std::vector<int> mask(n, 0), assigned, targets;
        for (int i = 0; i < u; ++i) {
            if (lab[i] < n)
                mask[lab[i]] |= 1 << i;
            else
                assigned.push_back(i);
        }
        for (int i = 0; i < u; ++i)
            if (lab[i] < n) targets.push_back(i);
        for (int d = 0; d < n; ++d) targets.push_back(u + d);
        std::vector<const std::vector<Cover>*> opts(n);
        for (int d = 0; d < n; ++d)
            opts[d] = &covers_of(mask[d], all_ids, cover_cache);
        // odometer over per-depot cover choices and assignment targets
        std::vector<size_t> pick(n, 0), tgt(assigned.size(), 0);
        for (;;) {
            IncidenceVector vec(m, 0);
            for (int d = 0; d < n; ++d) {
                vec[inst.arc_index(u + d, u + d)] = 1;
                for (const auto& cyc : (*opts[d])[pick[d]])
                    apply_cycle(inst, u + d, cyc, vec);
            }
            for (size_t a = 0; a < assigned.size(); ++a)
                vec[inst.arc_index(assigned[a], targets[tgt[a]])] = 1;
            if (!visit(vec)) return;
            // advance the odometer
            size_t pos = 0;
            for (; pos < tgt.size(); ++pos) {
                if (++tgt[pos] < targets.size()) break;
                tgt[pos] = 0;
            }
            if (pos < tgt.size()) continue;
            size_t dp = 0;
            for (; dp < (size_t)n; ++dp) {
                if (++pick[dp] < opts[dp]->size()) break;
                pick[dp] = 0;
            }
            if (dp == (size_t)n) break;
        }
        // next labeling
        int pos = 0;
        for (; pos < u; ++pos) {
            if (++lab[pos] <= n) break;
            lab[pos] = 0;
        }
        if (pos == u) break;
    }
}

PolytopeSample enumerate_sample(int u, int n) {
    PolytopeSample sample;
    sample.u = u;
    sample.n = n;
    sample.m = unit_instance(u, n).num_vars();
    std::set<IncidenceVector> seen;
    enumerate_feasible(u, n, [&](const IncidenceVector& v) {
        seen.insert(v);
        return true;
    });
    sample.vectors.assign(seen.begin(), seen.end());
    return sample;
}

struct RankTracker::Impl {
    bool has_base = false;
    std::vector<cpp_int> base;
    std::vector<std::vector<cpp_int>> ech;
    std::vector<int> piv;
};

RankTracker::RankTracker() : impl_(new Impl) {}
RankTracker::~RankTracker() = default;
RankTracker::RankTracker(RankTracker&&) noexcept = default;
RankTracker& RankTracker::operator=(RankTracker&&) noexcept = default;
int RankTracker::rank() const { return (int)impl_->ech.size(); }

int RankTracker::add(const IncidenceVector& v) {
    Impl& im = *impl_;
    if (!im.has_base) {
        im.base.assign(v.begin(), v.end());
        im.has_base = true;
        return 0;
    }
    size_t m = im.base.size();
    std::vector<cpp_int> r(m);
    for (size_t c = 0; c < m; ++c) r[c] = cpp_int(v[c]) - im.base[c];
    // Invariant: every echelon row is zero at every other row's pivot, so a
    // single reduction pass cannot reintroduce eliminated components.
    for (size_t e = 0; e < im.ech.size(); ++e) {
        int pc = im.piv[e];
        if (r[pc] == 0) continue;
        cpp_int a = r[pc], b = im.ech[e][pc];
        for (size_t c = 0; c < m; ++c) r[c] = r[c] * b - im.ech[e][c] * a;
    }
    auto normalize = [m](std::vector<cpp_int>& row, int pc) {
        cpp_int g = 0;
        for (size_t c = 0; c < m; ++c) g = boost::multiprecision::gcd(g, row[c]);
        if (row[pc] < 0) g = -g;
        for (size_t c = 0; c < m; ++c) row[c] /= g;
    };
    int pc = -1;
    for (size_t c = 0; c < m; ++c)
        if (r[c] != 0) {
            pc = (int)c;
            break;
        }
    if (pc < 0) return rank();
    normalize(r, pc);
    // eliminate the new pivot column from the existing rows
    for (size_t e = 0; e < im.ech.size(); ++e) {
        auto& row = im.ech[e];
        if (row[pc] == 0) continue;
        cpp_int a = row[pc], b = r[pc];
        for (size_t c = 0; c < m; ++c) row[c] = row[c] * b - r[c] * a;
        normalize(row, im.piv[e]);
    }
    im.ech.push_back(std::move(r));
    im.piv.push_back(pc);
    return rank();
}

int affine_rank(const std::vector<IncidenceVector>& vectors, int stop_at) {
    RankTracker tracker;
    for (const auto& v : vectors) {
        int r = tracker.add(v);
        if (stop_at >= 0 && r >= stop_at) break;
    }
    return tracker.rank();
}

int dimension_formula(int u, int n) {
    return u * (u - 1) / 2 + u * u + 2 * u * (n - 1);
}

DimensionReport verify_dimension(int u, int n) {
    DimensionReport rep;
    rep.u = u;
    rep.n = n;
    rep.m = unit_instance(u, n).num_vars();
    rep.dim_formula = dimension_formula(u, n);
    RankTracker tracker;
    enumerate_feasible(u, n, [&](const IncidenceVector& v) {
        return tracker.add(v) < rep.dim_formula;
    });
    rep.dim_measured = tracker.rank();
    rep.pass = rep.dim_measured == rep.dim_formula;
    return rep;
}

ValidityReport verify_valid(const lp::Row& row, const PolytopeSample& sample) {
    ValidityReport rep;
    for (const auto& vec : sample.vectors) {
        std::vector<double> dv(vec.begin(), vec.end());
        if (cuts::row_violation(row, dv) > 1e-9) {
            rep.pass = false;
            rep.counterexample = vec;
            return rep;
        }
    }
    return rep;
}

FacetReport verify_facet(const lp::Row& row, int u, int n) {
    FacetReport rep;
    rep.target = dimension_formula(u, n) - 1;
    RankTracker tracker;
    bool valid = true;
    bool any_tight = false;
    enumerate_feasible(u, n, [&](const IncidenceVector& vec) {
        std::vector<double> dv(vec.begin(), vec.end());
        double viol = cuts::row_violation(row, dv);
        if (viol > 1e-9) {
            valid = false;
            return false;
        }
        if (viol >= -1e-9) {  // tight
            any_tight = true;
            rep.face_rank = tracker.add(vec);
        }
        // a rank above the target certifies failure (tight on a set too
        // large to be a proper face); a pass needs the full scan
        return rep.face_rank <= rep.target;
    });
    if (!valid) {
        rep.pass = false;
        rep.note = "inequality violated at a feasible point";
        return rep;
    }
    if (!any_tight) {
        rep.pass = false;
        rep.note = "inequality is tight nowhere";
        return rep;
    }
    rep.pass = rep.face_rank == rep.target;
    if (!rep.pass) rep.note = "face rank below dim(P) - 1";
    return rep;
}

namespace {

struct DepotTables {
    // dp[mask][last]: cheapest depot->...->last path over mask
    std::vector<std::vector<double>> dp;
    std::vector<std::vector<int>> parent;
    std::vector<double> hk;     // cheapest single cycle over mask
    std::vector<int> hk_last;   // final customer of that cycle
    std::vector<double> cover;  // cheapest cycle cover of mask
    std::vector<int> cover_block;
};

DepotTables depot_tables(const Instance& inst, int depot) {
    int u = inst.num_customers();
    int full = 1 << u;
    const double inf = std::numeric_limits<double>::infinity();
    DepotTables t;
    t.dp.assign(full, std::vector<double>(u, inf));
    t.parent.assign(full, std::vector<int>(u, -1));
    t.hk.assign(full, inf);
    t.hk_last.assign(full, -1);
    t.cover.assign(full, inf);
    t.cover_block.assign(full, 0);
    for (int i = 0; i < u; ++i)
        t.dp[1 << i][i] = inst.routing_cost(depot, i);
    for (int mask = 1; mask < full; ++mask)
        for (int last = 0; last < u; ++last) {
            if (!(mask & (1 << last)) || t.dp[mask][last] == inf) continue;
            for (int nxt = 0; nxt < u; ++nxt) {
                if (mask & (1 << nxt)) continue;
                double cand = t.dp[mask][last] + inst.routing_cost(last, nxt);
                int nm = mask | (1 << nxt);
                if (cand < t.dp[nm][nxt]) {
                    t.dp[nm][nxt] = cand;
                    t.parent[nm][nxt] = last;
                }
            }
        }
    for (int mask = 1; mask < full; ++mask)
        for (int last = 0; last < u; ++last) {
            if (!(mask & (1 << last)) || t.dp[mask][last] == inf) continue;
            double cyc = t.dp[mask][last] + inst.routing_cost(last, depot);
            if (cyc < t.hk[mask]) {
                t.hk[mask] = cyc;
                t.hk_last[mask] = last;
            }
        }
    t.cover[0] = 0.0;
    for (int mask = 1; mask < full; ++mask) {
        int low = mask & -mask;
        int rest = mask & ~low;
        for (int sub = rest;; sub = (sub - 1) & rest) {
            int block = sub | low;
            double cand = t.hk[block] + t.cover[mask & ~block];
            if (cand < t.cover[mask]) {
                t.cover[mask] = cand;
                t.cover_block[mask] = block;
            }
            if (sub == 0) break;
        }
    }
    return t;
}

std::vector<Ring> reconstruct_rings(const Instance& inst, int depot,
                                    const DepotTables& t, int mask) {
    std::vector<Ring> rings;
    while (mask) {
        int block = t.cover_block[mask];
        Cycle cyc;
        int last = t.hk_last[block];
        int bm = block;
        while (last >= 0) {
            cyc.push_back(last);
            int prev = t.parent[bm][last];
            bm &= ~(1 << last);
            last = prev;
        }
        std::reverse(cyc.begin(), cyc.end());
        rings.push_back({depot, cyc});
        mask &= ~block;
    }
    return rings;
}

}  // namespace

Solution brute_force_opt(const Instance& inst) {
    int u = inst.num_customers(), n = inst.num_depots();
    if (u > 8) throw Error("brute force size limit exceeded (u <= 8)");
    std::vector<DepotTables> tables;
    tables.reserve(n);
    for (int d = 0; d < n; ++d) tables.push_back(depot_tables(inst, u + d));

    double best_cost = std::numeric_limits<double>::infinity();
    Solution best;
    IncidenceVector best_vec;

    std::vector<int> lab(u, 0);  // 0..n-1 ring depot, n = assigned
    for (;;) {
        std::vector<int> mask(n, 0), targets;
        double cost = 0.0;
        for (int i = 0; i < u; ++i)
            if (lab[i] < n) {
                mask[lab[i]] |= 1 << i;
                targets.push_back(i);
            }
        for (int d = 0; d < n; ++d) targets.push_back(u + d);
        for (int d = 0; d < n; ++d) cost += tables[d].cover[mask[d]];
        std::vector<int> choice;
        for (int i = 0; i < u; ++i) {
            if (lab[i] < n) continue;
            double best_t = std::numeric_limits<double>::infinity();
            int pick = -1;
            for (int tv : targets) {
                double c = inst.assign_cost(i, tv);
                if (c < best_t) {
                    best_t = c;
                    pick = tv;
                }
            }
            cost += best_t;
            choice.push_back(pick);
        }
        if (cost <= best_cost) {
            Solution cand;
            int ci = 0;
            for (int d = 0; d < n; ++d) {
                auto rings = reconstruct_rings(inst, u + d, tables[d], mask[d]);
                cand.rings.insert(cand.rings.end(), rings.begin(), rings.end());
            }
            for (int i = 0; i < u; ++i)
                if (lab[i] == n) cand.assignment[i] = choice[ci++];
            IncidenceVector vec = to_incidence(inst, cand);
            if (cost < best_cost || (cost == best_cost && vec < best_vec)) {
                best_cost = cost;
                best = std::move(cand);
                best_vec = std::move(vec);
            }
        }
        int pos = 0;
        for (; pos < u; ++pos) {
            if (++lab[pos] <= n) break;
            lab[pos] = 0;
        }
        if (pos == u) break;
    }
    return best;
}

}  // namespace mdrsp::polylab
