#pragma once

// Synthetic non-submodular benchmark ensemble: 4-connected grid, unary costs
// D ~ N(0,1), symmetric label costs V_ab = V_ba ~ U(0,1) with zero diagonal,
// edge weights w_ij = w_ji ~ lambda * U(-1,1). Draw order per seed is fixed:
// D row-major, V upper triangle, then edges in grid order (right edge before
// down edge per cell).

#include <cstdint>

#include "mrfms/core.hpp"
#include "mrfms/rng.hpp"

namespace mrfms {

struct synthetic_spec {
    int grid_height = 50;
    int grid_width = 50;
    int num_labels = 5;
    real lambda = 10.0; // pairwise strength
    std::uint64_t seed = 0;
};

/// Edge count of a 4-connected h x w grid: 2hw - h - w.
inline int grid_edge_count(int height, int width) { return 2 * height * width - height - width; }

inline energy_instance gen_synthetic(const synthetic_spec& spec) {
    if (spec.grid_height < 1 || spec.grid_width < 1)
        throw std::invalid_argument("gen_synthetic: grid dimensions must be >= 1");
    if (spec.num_labels < 1) throw std::invalid_argument("gen_synthetic: need at least one label");

    const int n = spec.grid_height * spec.grid_width;
    const int l = spec.num_labels;
    rng r(spec.seed);

    dense_matrix unary(n, l);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < l; ++a) unary(i, a) = r.normal();

    dense_matrix label_costs(l, l);
    for (int a = 0; a < l; ++a)
        for (int b = a + 1; b < l; ++b) {
            real v = r.uniform01();
            label_costs(a, b) = v;
            label_costs(b, a) = v;
        }

    std::vector<edge> edges;
    edges.reserve(static_cast<std::size_t>(grid_edge_count(spec.grid_height, spec.grid_width)));
    for (int row = 0; row < spec.grid_height; ++row)
        for (int col = 0; col < spec.grid_width; ++col) {
            const int i = row * spec.grid_width + col;
            if (col + 1 < spec.grid_width) edges.push_back({i, i + 1, spec.lambda * r.uniform(-1.0, 1.0)});
            if (row + 1 < spec.grid_height)
                edges.push_back({i, i + spec.grid_width, spec.lambda * r.uniform(-1.0, 1.0)});
        }

    return energy_instance(n, l, std::move(unary), std::move(edges), std::move(label_costs));
}

} // namespace mrfms
