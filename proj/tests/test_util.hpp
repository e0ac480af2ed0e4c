#ifndef MDRSP_TEST_UTIL_HPP
#define MDRSP_TEST_UTIL_HPP

#include <cmath>
#include <random>
#include <vector>

#include "mdrsp/instance.hpp"

namespace mdrsp::testing {

/// Instance with explicit matrices; vertex order customers-then-depots.
inline Instance make_instance(int u, int n,
                              std::vector<std::vector<double>> c,
                              std::vector<std::vector<double>> d) {
    return Instance(u, n, std::move(c), std::move(d));
}

/// Random planar instance, deterministic in the seed.
inline Instance random_instance(int u, int n, std::uint64_t seed,
                                InstanceClass cls = InstanceClass::I,
                                int alpha = 3) {
    std::mt19937_64 rng(seed);
    auto uni = [&]() { return (rng() >> 11) * 0x1.0p-53 * 100.0; };
    std::vector<Point> pts(u);
    for (auto& p : pts) p = {uni(), uni()};
    return generate_instance(CostModel::from_coords(pts), n, cls, alpha,
                             seed ^ 0x9e3779b97f4a7c15ULL);
}

/// Residuals of the equality systems (2), (3), (7), (8) at a point.
inline double equality_residual(const Instance& inst,
                                const std::vector<double>& v) {
    const int u = inst.num_customers(), nv = inst.num_vertices();
    double worst = 0.0;
    for (int i = 0; i < u; ++i) {
        double deg = 0.0;
        for (int j = 0; j < nv; ++j)
            if (j != i) deg += v[inst.edge_index(i, j)];
        worst = std::max(worst, std::abs(deg - 2.0 * v[inst.arc_index(i, i)]));
        double row = 0.0;
        for (int j = 0; j < nv; ++j) row += v[inst.arc_index(i, j)];
        worst = std::max(worst, std::abs(row - 1.0));
    }
    for (int d = u; d < nv; ++d) {
        worst = std::max(worst, std::abs(v[inst.arc_index(d, d)] - 1.0));
        for (int j = 0; j < u; ++j)
            worst = std::max(worst, std::abs(v[inst.arc_index(d, j)]));
    }
    return worst;
}

inline std::vector<double> to_double(const IncidenceVector& v) {
    return std::vector<double>(v.begin(), v.end());
}

}  // namespace mdrsp::testing

#endif
