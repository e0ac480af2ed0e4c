#ifndef MDRSP_GRAPH_HPP
#define MDRSP_GRAPH_HPP

#include <vector>

namespace mdrsp {

/// Capacitated undirected graph over vertices 0..n-1. Parallel edges are
/// merged by adding capacities.
class CapGraph {
public:
    explicit CapGraph(int n) : n_(n), adj_(n) {}

    int num_vertices() const { return n_; }

    void add_edge(int a, int b, double capacity);

    /// Capacity strictly larger than any cut of finite edges; used for
    /// edges that must never be separated.
    double huge_capacity() const { return total_ + 1.0; }

    const std::vector<std::vector<std::pair<int, double>>>& adjacency() const {
        return adj_;
    }

    std::vector<std::vector<int>> connected_components() const;

    /// Exact min s-t cut. Returns {cut value, source side}. The source side
    /// is the set reachable from s in the residual graph (minimal one).
    std::pair<double, std::vector<int>> min_st_cut(int s, int t) const;

private:
    int n_;
    double total_ = 0.0;
    std::vector<std::vector<std::pair<int, double>>> adj_;  // merged edges
};

}  // namespace mdrsp

#endif
