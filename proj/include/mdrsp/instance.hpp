#ifndef MDRSP_INSTANCE_HPP
#define MDRSP_INSTANCE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdrsp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Base distances l_ij, either from planar coordinates or an explicit
/// symmetric matrix. Exactly one representation is active.
class CostModel {
public:
    static CostModel from_coords(std::vector<Point> pts);
    static CostModel from_matrix(std::vector<std::vector<double>> mat);

    int size() const { return size_; }
    bool has_coords() const { return !coords_.empty(); }
    const std::vector<Point>& coords() const { return coords_; }

    double base_distance(int i, int j) const;

private:
    int size_ = 0;
    std::vector<Point> coords_;
    std::vector<std::vector<double>> matrix_;
};

/// Parses the TSPLIB subset: NODE_COORD_SECTION with EUC_2D, or
/// EDGE_WEIGHT_SECTION with FULL_MATRIX / LOWER_DIAG_ROW. Coordinate
/// distances are real-valued Euclidean, without TSPLIB integer rounding.
CostModel parse_tsplib(const std::string& text);

enum class InstanceClass { I, II };

/// Vertex numbering is canonical: customers 0..u-1, then depots u..u+n-1.
/// Variable numbering follows the incidence ordering: customer-customer
/// edges lexicographic, depot-customer edges lexicographic, then arcs
/// lexicographic over valid (i, j).
class Instance {
public:
    Instance(int num_customers, int num_depots,
             std::vector<std::vector<double>> routing_cost,
             std::vector<std::vector<double>> assign_cost,
             InstanceClass cls = InstanceClass::I, int alpha = 0,
             std::string name = "", std::uint64_t seed = 0);

    int num_customers() const { return u_; }
    int num_depots() const { return n_; }
    int num_vertices() const { return u_ + n_; }
    bool is_depot(int v) const { return v >= u_; }
    bool is_customer(int v) const { return v < u_; }

    double routing_cost(int i, int j) const { return c_[i][j]; }
    double assign_cost(int i, int j) const { return d_[i][j]; }

    InstanceClass klass() const { return class_; }
    int alpha() const { return alpha_; }
    const std::string& name() const { return name_; }
    std::uint64_t seed() const { return seed_; }

    // Coordinates when the instance was generated from a planar base;
    // empty otherwise. Order matches the vertex numbering.
    const std::vector<Point>& coords() const { return coords_; }
    void set_coords(std::vector<Point> pts) { coords_ = std::move(pts); }

    // --- incidence-vector layout ---------------------------------------
    int num_cc_edges() const { return u_ * (u_ - 1) / 2; }
    int num_dc_edges() const { return n_ * u_; }
    int num_edges() const { return num_cc_edges() + num_dc_edges(); }
    int num_arcs() const { return u_ * (u_ + n_) + n_ * (u_ + 1); }
    int num_vars() const { return num_edges() + num_arcs(); }

    /// Column of edge {i, j}; i, j distinct, at most one a depot.
    int edge_index(int i, int j) const;
    /// Column of arc [i, j]; valid arcs: i in T with any j, or i in D
    /// with j == i or j in T.
    int arc_index(int i, int j) const;
    bool arc_exists(int i, int j) const;

    /// Inverse of edge_index / arc_index.
    std::pair<int, int> edge_of(int col) const;
    std::pair<int, int> arc_of(int col) const;
    bool is_edge_col(int col) const { return col < num_edges(); }

private:
    int u_, n_;
    std::vector<std::vector<double>> c_, d_;
    InstanceClass class_;
    int alpha_;
    std::string name_;
    std::uint64_t seed_;
    std::vector<Point> coords_;
};

/// Depots are placed uniformly inside the bounding box of the customer
/// coordinates using the seeded generator; costs follow the class formulas
/// (Class I: c = d = l; Class II: c = alpha*l, d = (10-alpha)*l).
Instance generate_instance(const CostModel& base, int n_depots,
                           InstanceClass cls, int alpha, std::uint64_t seed,
                           const std::string& name = "");

struct Ring {
    int depot = -1;
    std::vector<int> customers;  // cyclic order; size 1 = degenerate ring
};

struct Solution {
    std::vector<Ring> rings;
    std::map<int, int> assignment;  // customer -> target, absent when on a ring
};

double solution_cost(const Instance& inst, const Solution& sol);

/// Empty verdict means feasible; otherwise identifiers of violated rules.
std::vector<std::string> check_feasible(const Instance& inst,
                                        const Solution& sol);

using IncidenceVector = std::vector<int>;

IncidenceVector to_incidence(const Instance& inst, const Solution& sol);

/// Reconstructs a Solution from an integral incidence vector. Throws on
/// vectors that do not decode to a feasible solution.
Solution from_incidence(const Instance& inst, const IncidenceVector& vec);

/// Same, but with repair_two_paths a depot-customer-depot route is replaced
/// by the degenerate ring on the cheaper depot (never more expensive).
Solution from_incidence(const Instance& inst, const IncidenceVector& vec,
                        bool repair_two_paths);

/// Objective (1) evaluated at an incidence (or fractional) vector.
double incidence_cost(const Instance& inst, const std::vector<double>& v);
double incidence_cost(const Instance& inst, const IncidenceVector& v);

// JSON instance/solution files.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);
std::string solution_to_json(const Instance& inst, const Solution& sol);
Solution solution_from_json(const std::string& text);

}  // namespace mdrsp

#endif
