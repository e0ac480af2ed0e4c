#include "mdrsp/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace mdrsp::cuts {

bool FractionalPoint::integral(double tol) const {
    for (double value : v)
        if (std::abs(value - std::round(value)) > tol) return false;
    return true;
}

const char* family_name(Family f) {
    switch (f) {
        case Family::PAIR: return "pair";
        case Family::SEC: return "sec";
        case Family::PEC2: return "pec2";
        case Family::PEC: return "pec";
        case Family::TWO_MATCH: return "2mat";
        case Family::ODD_HOLE: return "oddhole";
        case Family::SSP_SEC: return "sspsec";
    }
    return "?";
}

std::string Cut::key() const {
    std::ostringstream out;
    out << family_name(family) << '|';
    for (int s : witness.S) out << s << ',';
    out << '|' << witness.i << '|' << witness.j << '|' << witness.k << '|'
        << witness.a << '|';
    for (int d : witness.depots) out << d << ',';
    out << '|';
    for (int h : witness.handle) out << h << ',';
    out << '|';
    for (auto [p, q] : witness.teeth) out << p << '-' << q << ',';
    return out.str();
}

double row_lhs(const lp::Row& row, const std::vector<double>& v) {
    double lhs = 0.0;
    for (auto [col, coef] : row.coeffs) lhs += coef * v[col];
    return lhs;
}

double row_violation(const lp::Row& row, const std::vector<double>& v) {
    double lhs = row_lhs(row, v);
    switch (row.sense) {
        case lp::Sense::LE: return lhs - row.rhs;
        case lp::Sense::GE: return row.rhs - lhs;
        case lp::Sense::EQ: return std::abs(lhs - row.rhs);
    }
    return 0.0;
}

CapGraph support_graph(const FractionalPoint& p) {
    const Instance& inst = *p.inst;
    int nv = inst.num_vertices();
    CapGraph g(nv);
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j) {
            if (inst.is_depot(i) && inst.is_depot(j)) continue;
            double xe = p.x(i, j);
            if (xe > kSupportEps) g.add_edge(i, j, xe);
        }
    return g;
}

namespace {

/// Accumulates sparse coefficients with deterministic (sorted) column order.
class RowBuilder {
  public:
    void add(int col, double coef) { coeffs_[col] += coef; }
    lp::Row finish(lp::Sense sense, double rhs) const {
        lp::Row row;
        row.sense = sense;
        row.rhs = rhs;
        for (auto [col, coef] : coeffs_)
            if (coef != 0.0) row.coeffs.emplace_back(col, coef);
        return row;
    }

  private:
    std::map<int, double> coeffs_;
};

void add_boundary(const Instance& inst, RowBuilder& rb,
                  const std::vector<int>& S, double coef) {
    std::vector<char> in(inst.num_vertices(), 0);
    for (int s : S) in[s] = 1;
    for (int s : S)
        for (int w = 0; w < inst.num_vertices(); ++w) {
            if (w == s || in[w]) continue;
            if (inst.is_depot(s) && inst.is_depot(w)) continue;
            rb.add(inst.edge_index(s, w), coef);
        }
}

void finalize(const FractionalPoint& p, std::vector<Cut>& out) {
    for (Cut& c : out) c.violation = row_violation(c.row, p.v);
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const Cut& c) { return c.violation <= kCutEps; }),
              out.end());
    std::set<std::string> seen;
    std::vector<Cut> unique;
    for (Cut& c : out)
        if (seen.insert(c.key()).second) unique.push_back(std::move(c));
    out = std::move(unique);
    std::stable_sort(out.begin(), out.end(), [](const Cut& a, const Cut& b) {
        if (a.violation != b.violation) return a.violation > b.violation;
        return a.key() < b.key();
    });
}

/// D' candidates for the path-elimination separations. Few depots means few
/// subsets, so every nonempty proper D' is tried exactly; with many depots
/// fall back to the greedy margin rule: ties join D', and when that yields
/// D' = D the tied depot with the smallest margin is dropped.
std::vector<std::vector<int>> candidate_depot_sets(const FractionalPoint& p,
                                                   int j, int k) {
    const Instance& inst = *p.inst;
    int u = inst.num_customers(), n = inst.num_depots();
    std::vector<std::vector<int>> result;
    if (n <= 6) {
        for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
            std::vector<int> dp;
            for (int d = 0; d < n; ++d)
                if (mask & (1u << d)) dp.push_back(u + d);
            result.push_back(std::move(dp));
        }
        return result;
    }
    std::vector<int> dp;
    for (int d = u; d < u + n; ++d)
        if (p.x(j, d) >= p.x(k, d)) dp.push_back(d);
    if (dp.empty()) return result;
    if ((int)dp.size() < n) {
        result.push_back(std::move(dp));
        return result;
    }
    int worst = -1;
    double worst_margin = 0.0;
    for (int d : dp) {
        double margin = p.x(j, d) - p.x(k, d);
        if (worst < 0 || margin < worst_margin) {
            worst = d;
            worst_margin = margin;
        }
    }
    std::vector<int> sub;
    for (int d : dp)
        if (d != worst) sub.push_back(d);
    if (!sub.empty()) result.push_back(std::move(sub));
    return result;
}

}  // namespace

Cut make_pair_cut(const Instance& inst, int i, int j) {
    RowBuilder rb;
    rb.add(inst.edge_index(i, j), 1.0);
    rb.add(inst.arc_index(j, j), -1.0);
    rb.add(inst.arc_index(i, j), 1.0);
    Cut c;
    c.family = Family::PAIR;
    c.row = rb.finish(lp::Sense::LE, 0.0);
    c.witness.i = i;
    c.witness.j = j;
    return c;
}

Cut make_sec_cut(const Instance& inst, std::vector<int> S, int i) {
    std::sort(S.begin(), S.end());
    RowBuilder rb;
    add_boundary(inst, rb, S, 1.0);
    for (int j : S) rb.add(inst.arc_index(i, j), -2.0);
    Cut c;
    c.family = Family::SEC;
    c.row = rb.finish(lp::Sense::GE, 0.0);
    c.witness.S = std::move(S);
    c.witness.i = i;
    return c;
}

Cut make_pec2_cut(const Instance& inst, int j, int k, std::vector<int> depots) {
    int u = inst.num_customers(), n = inst.num_depots();
    std::sort(depots.begin(), depots.end());
    std::vector<char> in_dp(u + n, 0);
    for (int d : depots) in_dp[d] = 1;
    RowBuilder rb;
    for (int d = u; d < u + n; ++d)
        rb.add(inst.edge_index(in_dp[d] ? j : k, d), 1.0);
    rb.add(inst.edge_index(j, k), 3.0);
    rb.add(inst.arc_index(j, j), -2.0);
    rb.add(inst.arc_index(k, k), -2.0);
    Cut c;
    c.family = Family::PEC2;
    c.row = rb.finish(lp::Sense::LE, 0.0);
    c.witness.j = j;
    c.witness.k = k;
    c.witness.depots = std::move(depots);
    return c;
}

Cut make_pec_cut(const Instance& inst, int j, int k, int a, std::vector<int> S,
                 std::vector<int> depots) {
    int u = inst.num_customers(), n = inst.num_depots();
    std::sort(S.begin(), S.end());
    std::sort(depots.begin(), depots.end());
    std::vector<char> in_dp(u + n, 0);
    for (int d : depots) in_dp[d] = 1;
    RowBuilder rb;
    for (int d = u; d < u + n; ++d)
        rb.add(inst.edge_index(in_dp[d] ? j : k, d), 1.0);
    std::vector<int> W = S;
    W.push_back(j);
    W.push_back(k);
    std::sort(W.begin(), W.end());
    for (size_t p = 0; p < W.size(); ++p)
        for (size_t q = p + 1; q < W.size(); ++q)
            rb.add(inst.edge_index(W[p], W[q]), 2.0);
    for (int v : W) rb.add(inst.arc_index(v, v), -2.0);
    for (int b : S) rb.add(inst.arc_index(a, b), 1.0);
    Cut c;
    c.family = Family::PEC;
    c.row = rb.finish(lp::Sense::LE, 0.0);
    c.witness.S = std::move(S);
    c.witness.j = j;
    c.witness.k = k;
    c.witness.a = a;
    c.witness.depots = std::move(depots);
    return c;
}

Cut make_two_matching_cut(const Instance& inst, std::vector<int> handle,
                          std::vector<std::pair<int, int>> teeth) {
    std::sort(handle.begin(), handle.end());
    for (auto& [p, q] : teeth)
        if (p > q) std::swap(p, q);
    std::sort(teeth.begin(), teeth.end());
    RowBuilder rb;
    for (size_t p = 0; p < handle.size(); ++p)
        for (size_t q = p + 1; q < handle.size(); ++q)
            rb.add(inst.edge_index(handle[p], handle[q]), 1.0);
    for (auto [p, q] : teeth) rb.add(inst.edge_index(p, q), 1.0);
    for (int i : handle) rb.add(inst.arc_index(i, i), -1.0);
    Cut c;
    c.family = Family::TWO_MATCH;
    c.row = rb.finish(lp::Sense::LE, ((double)teeth.size() - 1.0) / 2.0);
    c.witness.handle = std::move(handle);
    c.witness.teeth = std::move(teeth);
    return c;
}

Cut make_odd_hole_cut(const Instance& inst, int i, int j, int k) {
    RowBuilder rb;
    rb.add(inst.arc_index(i, j), 1.0);
    rb.add(inst.arc_index(j, k), 1.0);
    rb.add(inst.arc_index(k, i), 1.0);
    Cut c;
    c.family = Family::ODD_HOLE;
    c.row = rb.finish(lp::Sense::LE, 1.0);
    c.witness.i = i;
    c.witness.j = j;
    c.witness.k = k;
    return c;
}

Cut make_ssp_sec_cut(const Instance& inst, std::vector<int> S, int i, int j,
                     int k) {
    std::sort(S.begin(), S.end());
    RowBuilder rb;
    add_boundary(inst, rb, S, 1.0);
    rb.add(inst.arc_index(i, j), -2.0);
    rb.add(inst.arc_index(j, k), -2.0);
    rb.add(inst.arc_index(k, i), -2.0);
    Cut c;
    c.family = Family::SSP_SEC;
    c.row = rb.finish(lp::Sense::GE, 0.0);
    c.witness.S = std::move(S);
    c.witness.i = i;
    c.witness.j = j;
    c.witness.k = k;
    return c;
}

std::vector<Cut> sep_pairs(const FractionalPoint& p) {
    const Instance& inst = *p.inst;
    int u = inst.num_customers();
    std::vector<Cut> out;
    for (int i = 0; i < u; ++i)
        for (int j = 0; j < u; ++j) {
            if (i == j) continue;
            if (p.x(i, j) - p.y(j, j) + p.y(i, j) > kCutEps)
                out.push_back(make_pair_cut(inst, i, j));
        }
    finalize(p, out);
    return out;
}

std::vector<Cut> sep_sec(const FractionalPoint& p) {
    const Instance& inst = *p.inst;
    int u = inst.num_customers(), n = inst.num_depots();
    std::vector<Cut> out;
    CapGraph g = support_graph(p);
    for (const auto& comp : g.connected_components()) {
        if (inst.is_depot(comp.back())) continue;  // components are sorted
        if (comp.size() < 2) continue;
        for (int i : comp) out.push_back(make_sec_cut(inst, comp, i));
    }
    // Min-cut separation of Eq. (24) for every customer i: source s is the
    // contracted depot set, sink is i.  All customers take part (not only
    // support vertices): positive y*_ij with j outside the support still
    // lowers the left-hand side of Eq. (24).
    int s = u;
    for (int i = 0; i < u; ++i) {
        CapGraph g2(u + 1);
        for (int j = 0; j < u; ++j) {
            if (j == i) continue;
            double to_depots = 0.0;
            for (int d = u; d < u + n; ++d) to_depots += p.x(j, d);
            if (to_depots > 0.0) g2.add_edge(s, j, to_depots);
            double ci = p.x(i, j) + 2.0 * p.y(i, j);
            if (ci > 0.0) g2.add_edge(i, j, ci);
            for (int k = j + 1; k < u; ++k) {
                if (k == i) continue;
                double xe = p.x(j, k);
                if (xe > 0.0) g2.add_edge(j, k, xe);
            }
        }
        double cis = 0.0;
        for (int d = u; d < u + n; ++d) cis += p.x(i, d) + 2.0 * p.y(i, d);
        if (cis > 0.0) g2.add_edge(i, s, cis);
        auto [value, source_side] = g2.min_st_cut(s, i);
        if (value < 2.0 - kCutEps) {
            std::vector<char> in_src(u + 1, 0);
            for (int v : source_side) in_src[v] = 1;
            std::vector<int> S;
            for (int j = 0; j < u; ++j)
                if (!in_src[j]) S.push_back(j);
            out.push_back(make_sec_cut(inst, std::move(S), i));
        }
    }
    finalize(p, out);
    return out;
}

std::vector<Cut> sep_pec_2path(const FractionalPoint& p) {
    const Instance& inst = *p.inst;
    int u = inst.num_customers();
    std::vector<Cut> out;
    if (inst.num_depots() < 2) return out;
    for (int j = 0; j < u; ++j) {
        if (!p.in_support(j)) continue;
        for (int k = 0; k < u; ++k) {
            if (k == j || !p.in_support(k)) continue;
            for (auto& dp : candidate_depot_sets(p, j, k)) {
                Cut c = make_pec2_cut(inst, j, k, dp);
                if (row_violation(c.row, p.v) > kCutEps)
                    out.push_back(std::move(c));
            }
        }
    }
    finalize(p, out);
    return out;
}

std::vector<Cut> sep_pec_long(const FractionalPoint& p) {
    const Instance& inst = *p.inst;
    int u = inst.num_customers(), n = inst.num_depots();
    std::vector<Cut> out;
    if (n < 2) return out;
    CapGraph g = support_graph(p);
    int s = u + 1, t = u;  // t = contracted depots
    for (const auto& comp : g.connected_components()) {
        std::vector<int> cust;
        for (int v : comp)
            if (inst.is_customer(v) && p.in_support(v)) cust.push_back(v);
        if (cust.size() < 3) continue;
        for (size_t pj = 0; pj < cust.size(); ++pj)
            for (size_t pk = pj + 1; pk < cust.size(); ++pk) {
                int j = cust[pj], k = cust[pk];
                for (int a : cust) {
                    if (a == j || a == k) continue;
                    // Capacities per Eq. (25): edges into a carry x* + y*;
                    // the min cut value then equals
                    // x(delta(Sbar)) + sum_{b not in Sbar} y_ab.
                    CapGraph g2(u + 2);
                    for (int v = 0; v < u; ++v) {
                        double cap_t = 0.0;
                        for (int d = u; d < u + n; ++d) {
                            cap_t += p.x(v, d);
                            if (v == a) cap_t += p.y(a, d);
                        }
                        if (cap_t > 0.0) g2.add_edge(v, t, cap_t);
                        for (int w = v + 1; w < u; ++w) {
                            double cap = p.x(v, w);
                            if (w == a) cap += p.y(a, v);
                            if (v == a) cap += p.y(a, w);
                            if (cap > 0.0) g2.add_edge(v, w, cap);
                        }
                    }
                    double huge = g2.huge_capacity();
                    g2.add_edge(s, j, huge);
                    g2.add_edge(s, k, huge);
                    g2.add_edge(s, a, huge);
                    auto [value, source_side] = g2.min_st_cut(s, t);
                    std::vector<int> S;
                    for (int v : source_side)
                        if (v < u && v != j && v != k) S.push_back(v);
                    double base = 1.0 - p.y(a, j) - p.y(a, k);
                    for (auto [jj, kk] : {std::pair{j, k}, std::pair{k, j}}) {
                        for (auto& dp : candidate_depot_sets(p, jj, kk)) {
                            std::vector<char> in_dp(u + n, 0);
                            for (int d : dp) in_dp[d] = 1;
                            double L = base;
                            for (int d = u; d < u + n; ++d)
                                L += p.x(in_dp[d] ? jj : kk, d);
                            if (value < L - kCutEps) {
                                Cut c = make_pec_cut(inst, jj, kk, a, S, dp);
                                if (row_violation(c.row, p.v) > kCutEps)
                                    out.push_back(std::move(c));
                            }
                        }
                    }
                }
            }
    }
    finalize(p, out);
    return out;
}

std::vector<Cut> sep_two_matching(const FractionalPoint& p) {
    const Instance& inst = *p.inst;
    int u = inst.num_customers();
    std::vector<Cut> out;
    // Handles: components of the graph of strictly fractional customer edges.
    CapGraph frac(u);
    for (int i = 0; i < u; ++i)
        for (int j = i + 1; j < u; ++j) {
            double xe = p.x(i, j);
            if (xe > kSupportEps && xe < 1.0 - kSupportEps)
                frac.add_edge(i, j, xe);
        }
    for (const auto& comp : frac.connected_components()) {
        if (comp.size() < 2) continue;
        std::vector<char> in_h(u, 0);
        for (int v : comp) in_h[v] = 1;
        std::vector<std::pair<int, int>> teeth;
        std::vector<char> used(u, 0);
        for (int h : comp) {  // comp is sorted: deterministic greedy choice
            if (used[h]) continue;
            for (int w = 0; w < u; ++w) {
                if (in_h[w] || used[w]) continue;
                if (std::abs(p.x(h, w) - 1.0) <= 1e-6) {
                    teeth.emplace_back(h, w);
                    used[h] = used[w] = 1;
                    break;
                }
            }
        }
        if (teeth.size() < 3 || teeth.size() % 2 == 0) continue;
        Cut c = make_two_matching_cut(inst, comp, std::move(teeth));
        if (row_violation(c.row, p.v) > kCutEps) out.push_back(std::move(c));
    }
    finalize(p, out);
    return out;
}

std::vector<Cut> sep_odd_hole(const FractionalPoint& p) {
    const Instance& inst = *p.inst;
    int u = inst.num_customers();
    std::vector<Cut> out;
    // each unordered triple has two distinct cyclic orientations
    for (int i = 0; i < u; ++i)
        for (int j = i + 1; j < u; ++j)
            for (int k = j + 1; k < u; ++k)
                for (auto [a, b, c] :
                     {std::tuple{i, j, k}, std::tuple{i, k, j}})
                    if (p.y(a, b) + p.y(b, c) + p.y(c, a) > 1.0 + kCutEps)
                        out.push_back(make_odd_hole_cut(inst, a, b, c));
    finalize(p, out);
    return out;
}

std::vector<Cut> sep_ssp_sec(const FractionalPoint& p) {
    const Instance& inst = *p.inst;
    int u = inst.num_customers(), n = inst.num_depots();
    std::vector<Cut> out;
    int t = u, s = u + 1;
    for (int i0 = 0; i0 < u; ++i0)
        for (int j0 = i0 + 1; j0 < u; ++j0)
            for (int k0 = j0 + 1; k0 < u; ++k0)
                for (auto [i, j, k] :
                     {std::tuple{i0, j0, k0}, std::tuple{i0, k0, j0}}) {
                if (p.y(i, j) <= kSupportEps || p.y(j, k) <= kSupportEps ||
                    p.y(k, i) <= kSupportEps)
                    continue;
                double ysum = p.y(i, j) + p.y(j, k) + p.y(k, i);
                CapGraph g2(u + 2);
                for (int v = 0; v < u; ++v) {
                    double cap_t = 0.0;
                    for (int d = u; d < u + n; ++d) cap_t += p.x(v, d);
                    if (cap_t > 0.0) g2.add_edge(v, t, cap_t);
                    for (int w = v + 1; w < u; ++w)
                        if (p.x(v, w) > 0.0) g2.add_edge(v, w, p.x(v, w));
                }
                double huge = g2.huge_capacity();
                g2.add_edge(s, i, huge);
                g2.add_edge(s, j, huge);
                g2.add_edge(s, k, huge);
                auto [value, source_side] = g2.min_st_cut(s, t);
                if (value < 2.0 * ysum - kCutEps) {
                    std::vector<int> S;
                    for (int v : source_side)
                        if (v < u) S.push_back(v);
                    out.push_back(make_ssp_sec_cut(inst, std::move(S), i, j, k));
                }
            }
    finalize(p, out);
    return out;
}

std::string describe(const Instance& inst, const Cut& c) {
    std::ostringstream out;
    out << family_name(c.family) << " violation=" << c.violation << " row:";
    for (auto [col, coef] : c.row.coeffs) {
        char kind;
        int a, b;
        if (inst.is_edge_col(col)) {
            kind = 'x';
            std::tie(a, b) = inst.edge_of(col);
        } else {
            kind = 'y';
            std::tie(a, b) = inst.arc_of(col);
        }
        out << ' ' << (coef >= 0 ? "+" : "") << coef << kind << '(' << a << ','
            << b << ')';
    }
    switch (c.row.sense) {
        case lp::Sense::LE: out << " <= "; break;
        case lp::Sense::GE: out << " >= "; break;
        case lp::Sense::EQ: out << " == "; break;
    }
    out << c.row.rhs << " [";
    if (!c.witness.S.empty()) {
        out << "S={";
        for (int v : c.witness.S) out << v << ' ';
        out << "} ";
    }
    if (c.witness.i >= 0) out << "i=" << c.witness.i << ' ';
    if (c.witness.j >= 0) out << "j=" << c.witness.j << ' ';
    if (c.witness.k >= 0) out << "k=" << c.witness.k << ' ';
    if (c.witness.a >= 0) out << "a=" << c.witness.a << ' ';
    out << ']';
    return out.str();
}

}  // namespace mdrsp::cuts
