#ifndef MDRSP_HEURISTIC_HPP
#define MDRSP_HEURISTIC_HPP

#include <random>
#include <vector>

#include "mdrsp/cuts.hpp"
#include "mdrsp/instance.hpp"

namespace mdrsp::heuristic {

/// Greedy assignment state: sigma maps each customer to its target (itself
/// when the customer is to be placed on a ring); P is the final eligible
/// target set, the depots plus the self-assigned customers.
struct AssignmentDraft {
    std::vector<int> sigma;
    std::vector<int> P;  // sorted
};

/// Greedy assignment driven by the fractional y* values, processing the
/// customers in the given order; a repair pass reassigns any customer whose
/// chosen target later left the eligible set.
AssignmentDraft greedy_assignment(const cuts::FractionalPoint& p,
                                  const std::vector<int>& order);

/// Same, with the processing order drawn randomly from rng.
AssignmentDraft greedy_assignment(const cuts::FractionalPoint& p,
                                  std::mt19937_64& rng);

/// Rings over the self-assigned customers: nearest-depot clustering,
/// nearest-neighbor tour per depot, then 2-opt and Or-opt to local
/// optimality. Singleton clusters become degenerate rings.
std::vector<Ring> build_rings(const Instance& inst, const std::vector<int>& P);

/// Rings over explicit per-depot clusters (cluster[d] lists the customers
/// riding depot u+d's ring): nearest-neighbor tour per depot, then 2-opt
/// and Or-opt to local optimality.
std::vector<Ring> build_rings_clustered(
    const Instance& inst, const std::vector<std::vector<int>>& cluster);

/// Feasible solution from an LP point: integral points are decoded
/// directly, fractional ones go through greedy assignment + ring building.
Solution lp_heuristic(const Instance& inst, const cuts::FractionalPoint& p,
                      std::mt19937_64& rng);

}  // namespace mdrsp::heuristic

#endif
