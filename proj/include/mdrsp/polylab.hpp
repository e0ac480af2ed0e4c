#ifndef MDRSP_POLYLAB_HPP
#define MDRSP_POLYLAB_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mdrsp/instance.hpp"
#include "mdrsp/lp.hpp"

namespace mdrsp::polylab {

struct PolytopeSample {
    int u = 0, n = 0, m = 0;
    std::vector<IncidenceVector> vectors;  // pairwise distinct
};

/// Streams every feasible incidence vector (MIP semantics: multiple rings
/// per depot allowed, degenerate rings included, assignment targets are
/// ring vertices and depots). The visitor returns false to stop early.
/// Duplicates may be visited more than once.
void enumerate_feasible(int u, int n,
                        const std::function<bool(const IncidenceVector&)>& visit);

/// Collected, deduplicated sample. Guarded against explosion.
PolytopeSample enumerate_sample(int u, int n);

/// Exact affine rank of the set (rational arithmetic, no tolerances).
/// When stop_at >= 0 the computation ends once that rank is certified.
int affine_rank(const std::vector<IncidenceVector>& vectors, int stop_at = -1);

/// Incremental exact affine-rank tracker for streamed vectors
/// (arbitrary-precision elimination behind the scenes).
class RankTracker {
  public:
    RankTracker();
    ~RankTracker();
    RankTracker(RankTracker&&) noexcept;
    RankTracker& operator=(RankTracker&&) noexcept;

    /// Feeds one vector; returns the current affine rank.
    int add(const IncidenceVector& v);
    int rank() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct DimensionReport {
    int u = 0, n = 0, m = 0;
    int dim_formula = 0;
    int dim_measured = 0;
    bool pass = false;
};

/// Measured affine rank of the full sample against the closed-form
/// dimension C(u,2) + u^2 + 2u(n-1).
DimensionReport verify_dimension(int u, int n);

int dimension_formula(int u, int n);

struct ValidityReport {
    bool pass = true;
    IncidenceVector counterexample;  // empty when pass
};

ValidityReport verify_valid(const lp::Row& row, const PolytopeSample& sample);

struct FacetReport {
    int face_rank = 0;
    int target = 0;  // dim(P) - 1
    bool pass = false;
    std::string note;
};

/// Rank of the face {vectors tight at row} against dim(P)-1. Streams the
/// enumeration and stops as soon as the target rank is certified.
FacetReport verify_facet(const lp::Row& row, int u, int n);

/// Exact optimum by enumeration of customer labelings with Held-Karp ring
/// costs per depot subset; u <= 8. Ties break lexicographically on the
/// incidence vector.
Solution brute_force_opt(const Instance& inst);

}  // namespace mdrsp::polylab

#endif
