#ifndef MDRSP_CUTS_HPP
#define MDRSP_CUTS_HPP

#include <string>
#include <vector>

#include "mdrsp/graph.hpp"
#include "mdrsp/instance.hpp"
#include "mdrsp/lp.hpp"

namespace mdrsp::cuts {

inline constexpr double kSupportEps = 1e-6;
inline constexpr double kCutEps = 1e-4;

// per-round caps, most-violated first; PAIR cuts are uncapped
inline constexpr int kMaxSecPerRound = 50;
inline constexpr int kMaxPecPerRound = 50;
inline constexpr int kMaxTwoMatchPerRound = 30;

/// LP-relaxation values in the canonical incidence ordering.
struct FractionalPoint {
    const Instance* inst = nullptr;
    std::vector<double> v;

    double x(int i, int j) const { return v[inst->edge_index(i, j)]; }
    double y(int i, int j) const { return v[inst->arc_index(i, j)]; }
    bool in_support(int vertex) const { return y(vertex, vertex) > kSupportEps; }
    bool integral(double tol = 1e-6) const;
};

enum class Family : char { PAIR, SEC, PEC2, PEC, TWO_MATCH, ODD_HOLE, SSP_SEC };

const char* family_name(Family f);

/// Generating parameters; re-instantiating the row from these must
/// reproduce it exactly.
struct Witness {
    std::vector<int> S;
    int i = -1, j = -1, k = -1, a = -1;
    std::vector<int> depots;                 // D'
    std::vector<int> handle;                 // H
    std::vector<std::pair<int, int>> teeth;  // T
};

struct Cut {
    Family family;
    lp::Row row;
    Witness witness;
    double violation = 0.0;

    /// Dedupe key over (family, witness); stable across runs.
    std::string key() const;
};

double row_lhs(const lp::Row& row, const std::vector<double>& v);
/// Positive value = amount by which the point violates the cut.
double row_violation(const lp::Row& row, const std::vector<double>& v);

/// Support graph G*: edges with x* above the support threshold, over all
/// instance vertices (depots are always support vertices since y_dd = 1).
CapGraph support_graph(const FractionalPoint& p);

// Row builders from witnesses.
Cut make_pair_cut(const Instance&, int i, int j);                   // Eq-15 form
Cut make_sec_cut(const Instance&, std::vector<int> S, int i);       // Eq-4 form
Cut make_pec2_cut(const Instance&, int j, int k, std::vector<int> depots);
Cut make_pec_cut(const Instance&, int j, int k, int a, std::vector<int> S,
                 std::vector<int> depots);
Cut make_two_matching_cut(const Instance&, std::vector<int> handle,
                          std::vector<std::pair<int, int>> teeth);
Cut make_odd_hole_cut(const Instance&, int i, int j, int k);
Cut make_ssp_sec_cut(const Instance&, std::vector<int> S, int i, int j, int k);

// Separators. Output is sorted by violation descending, witness ascending,
// deduplicated, uncapped (callers truncate per round).
std::vector<Cut> sep_pairs(const FractionalPoint& p);
std::vector<Cut> sep_sec(const FractionalPoint& p);
std::vector<Cut> sep_pec_2path(const FractionalPoint& p);
std::vector<Cut> sep_pec_long(const FractionalPoint& p);
std::vector<Cut> sep_two_matching(const FractionalPoint& p);
std::vector<Cut> sep_odd_hole(const FractionalPoint& p);
std::vector<Cut> sep_ssp_sec(const FractionalPoint& p);

/// Human-readable row with witness annotation, for debugging.
std::string describe(const Instance&, const Cut&);

}  // namespace mdrsp::cuts

#endif
