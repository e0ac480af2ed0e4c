#include "mdrsp/graph.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace mdrsp {

void CapGraph::add_edge(int a, int b, double capacity) {
    if (a == b || capacity <= 0.0) return;
    total_ += capacity;
    for (auto& [v, c] : adj_[a]) {
        if (v == b) {
            c += capacity;
            for (auto& [w, c2] : adj_[b])
                if (w == a) c2 += capacity;
            return;
        }
    }
    adj_[a].push_back({b, capacity});
    adj_[b].push_back({a, capacity});
}

std::vector<std::vector<int>> CapGraph::connected_components() const {
    std::vector<int> comp(n_, -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < n_; ++s) {
        if (comp[s] != -1) continue;
        const int id = static_cast<int>(out.size());
        out.emplace_back();
        std::vector<int> stack{s};
        comp[s] = id;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            out[id].push_back(v);
            for (auto [w, c] : adj_[v])
                if (comp[w] == -1) {
                    comp[w] = id;
                    stack.push_back(w);
                }
        }
        std::sort(out[id].begin(), out[id].end());
    }
    return out;
}

namespace {

// Dinic over directed residual arcs; an undirected edge becomes a pair of
// opposite arcs, each with the full capacity.
struct Dinic {
    struct Arc {
        int to;
        double cap;
        int rev;
    };
    std::vector<std::vector<Arc>> g;
    std::vector<int> level, iter;

    explicit Dinic(int n) : g(n), level(n), iter(n) {}

    void add(int a, int b, double cab, double cba) {
        g[a].push_back({b, cab, static_cast<int>(g[b].size())});
        g[b].push_back({a, cba, static_cast<int>(g[a].size()) - 1});
    }

    bool bfs(int s, int t) {
        std::fill(level.begin(), level.end(), -1);
        std::queue<int> q;
        level[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (const auto& a : g[v])
                if (a.cap > 1e-12 && level[a.to] < 0) {
                    level[a.to] = level[v] + 1;
                    q.push(a.to);
                }
        }
        return level[t] >= 0;
    }

    double dfs(int v, int t, double f) {
        if (v == t) return f;
        for (int& i = iter[v]; i < static_cast<int>(g[v].size()); ++i) {
            Arc& a = g[v][i];
            if (a.cap > 1e-12 && level[v] < level[a.to]) {
                double d = dfs(a.to, t, std::min(f, a.cap));
                if (d > 0) {
                    a.cap -= d;
                    g[a.to][a.rev].cap += d;
                    return d;
                }
            }
        }
        return 0;
    }

    double max_flow(int s, int t) {
        double flow = 0;
        while (bfs(s, t)) {
            std::fill(iter.begin(), iter.end(), 0);
            double f;
            while ((f = dfs(s, t, std::numeric_limits<double>::infinity())) > 0)
                flow += f;
        }
        return flow;
    }
};

}  // namespace

std::pair<double, std::vector<int>> CapGraph::min_st_cut(int s, int t) const {
    if (s == t) throw std::invalid_argument("min_st_cut needs s != t");
    Dinic din(n_);
    for (int v = 0; v < n_; ++v)
        for (auto [w, c] : adj_[v])
            if (v < w) din.add(v, w, c, c);

    const double value = din.max_flow(s, t);

    std::vector<char> vis(n_, 0);
    std::vector<int> stack{s};
    vis[s] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (const auto& a : din.g[v])
            if (a.cap > 1e-9 && !vis[a.to]) {
                vis[a.to] = 1;
                stack.push_back(a.to);
            }
    }
    std::vector<int> side;
    for (int v = 0; v < n_; ++v)
        if (vis[v]) side.push_back(v);
    return {value, side};
}

}  // namespace mdrsp
