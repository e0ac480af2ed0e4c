#ifndef MDRSP_SEARCH_HPP
#define MDRSP_SEARCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdrsp/cuts.hpp"
#include "mdrsp/instance.hpp"
#include "mdrsp/lp.hpp"

namespace mdrsp::search {

struct Params {
    double time_limit = 7200.0;
    std::uint64_t seed = 0;
    bool heuristic = true;
    bool enable_pair = true;
    bool enable_sec = true;
    bool enable_pec = true;
    bool enable_two_match = true;
    bool enable_odd_hole = false;  // off by default: not computationally helpful
    bool enable_ssp_sec = false;
    long node_limit = -1;  // stop after exploring this many nodes; -1 = off
    double int_tol = 1e-6;
    long strong_branch_iterations = 100;
    bool log = false;
};

struct FamilyStats {
    long pair = 0;
    long sec = 0;  // subtour cuts with |S| > 2, the reported table count
    long two_match = 0;
    long pec = 0;  // both path-elimination forms
    long odd_hole = 0;
    long ssp_sec = 0;
};

enum class Termination { Optimal, TimeLimit };

struct Report {
    std::optional<Solution> incumbent;
    double upper_bound = 0.0;
    double lower_bound = 0.0;
    double root_lb = 0.0;
    FamilyStats cuts;
    long nodes = 0;
    double wall_seconds = 0.0;
    Termination termination = Termination::Optimal;
};

struct Node {
    long id = 0;
    long parent = -1;
    double bound = 0.0;
    // cumulative variable-bound changes from the root (column, new bound)
    std::vector<std::pair<int, double>> lower_changes, upper_changes;
    std::optional<lp::Basis> basis;
    // ids of the solver's cut rows at the time `basis` was recorded; cut
    // rows are purged and re-added over time, so hints are remapped by id
    std::vector<long> basis_row_ids;
    enum class Status {
        Open,
        FathomedBound,
        FathomedInfeasible,
        Branched,
        Integral
    } status = Status::Open;
};

/// Always-feasible starting incumbent: every customer assigned to its
/// cheapest depot.
Solution nearest_depot_solution(const Instance& inst);

Report branch_and_cut(const Instance& inst, const Params& params = {});

std::string report_to_json(const Instance& inst, const Report& report);

}  // namespace mdrsp::search

#endif
