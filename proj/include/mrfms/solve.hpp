#pragma once

// Single-scale solvers behind one contract: (instance, init, config) -> labeling.
// Provided: ICM coordinate descent, winner-take-all initialization, and an
// exhaustive exact minimizer for desk-scale verification. Other movers can be
// plugged into the multiscale pipeline through the same contract.

#include <cassert>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mrfms/core.hpp"
#include "mrfms/rng.hpp"

namespace mrfms {

struct solver_config {
    int max_sweeps = 100;
    bool stop_on_convergence = true; // stop once a full sweep changes no label
    std::uint64_t seed = 0;          // used only when no initial labeling is supplied
};

/// Per-variable incidence index over the edge list, built once per instance so
/// conditional energies cost O(degree * l).
class adjacency {
public:
    explicit adjacency(const energy_instance& e) : neighbors_(static_cast<std::size_t>(e.num_variables())) {
        for (const edge& ed : e.edges()) {
            neighbors_[static_cast<std::size_t>(ed.i)].push_back({ed.j, ed.weight});
            neighbors_[static_cast<std::size_t>(ed.j)].push_back({ed.i, ed.weight});
        }
    }

    const std::vector<std::pair<int, real>>& of(int i) const { return neighbors_[static_cast<std::size_t>(i)]; }

private:
    std::vector<std::vector<std::pair<int, real>>> neighbors_;
};

namespace detail {

// Conditional energy of assigning `label` to variable i given the rest of `a`.
inline real conditional_cost(const energy_instance& e, const adjacency& adj, const labeling& a, int i, int label) {
    const dense_matrix& v = e.label_costs();
    real cost = e.unary()(i, label) + e.loop_weight(i) * v(label, label);
    for (const auto& [j, w] : adj.of(i)) cost += w * v(label, a[static_cast<std::size_t>(j)]);
    return cost;
}

} // namespace detail

/// ICM sweeps in ascending variable order; each variable takes the argmin of
/// its conditional energy, ties to the lower label index.
inline labeling icm(const energy_instance& e, const adjacency& adj, labeling init, const solver_config& cfg) {
    if (cfg.max_sweeps < 1) throw std::invalid_argument("icm: max_sweeps must be >= 1");
    check_labeling(e, init);
    labeling a = std::move(init);
    const int n = e.num_variables();
    const int l = e.num_labels();
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            real best_cost = detail::conditional_cost(e, adj, a, i, 0);
            for (int label = 1; label < l; ++label) {
                real cost = detail::conditional_cost(e, adj, a, i, label);
                if (cost < best_cost) {
                    best = label;
                    best_cost = cost;
                }
            }
            if (best != a[static_cast<std::size_t>(i)]) {
#ifndef NDEBUG
                real before = detail::conditional_cost(e, adj, a, i, a[static_cast<std::size_t>(i)]);
                assert(best_cost <= before);
#endif
                a[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (cfg.stop_on_convergence && !changed) break;
    }
    return a;
}

inline labeling icm(const energy_instance& e, labeling init, const solver_config& cfg) {
    adjacency adj(e);
    return icm(e, adj, std::move(init), cfg);
}

inline labeling random_labeling(int num_variables, int num_labels, rng& r) {
    labeling a(static_cast<std::size_t>(num_variables));
    for (int& label : a) label = r.uniform_int(num_labels);
    return a;
}

/// ICM from a uniformly random initialization drawn from cfg.seed.
inline labeling icm(const energy_instance& e, const solver_config& cfg) {
    rng r(cfg.seed);
    return icm(e, random_labeling(e.num_variables(), e.num_labels(), r), cfg);
}

/// Per-variable argmin of the variable-independent cost (unary plus any
/// self-coupling), ties to the lower label index.
inline labeling winner_take_all(const energy_instance& e) {
    const dense_matrix& d = e.unary();
    const dense_matrix& v = e.label_costs();
    labeling a(static_cast<std::size_t>(e.num_variables()));
    for (int i = 0; i < e.num_variables(); ++i) {
        real s = e.loop_weight(i);
        int best = 0;
        real best_cost = d(i, 0) + s * v(0, 0);
        for (int label = 1; label < e.num_labels(); ++label) {
            real cost = d(i, label) + s * v(label, label);
            if (cost < best_cost) {
                best = label;
                best_cost = cost;
            }
        }
        a[static_cast<std::size_t>(i)] = best;
    }
    return a;
}

/// Max labeling count enumerated by exact_min.
inline constexpr double exact_min_guard = 1e7;

/// Exhaustive minimizer. Returns the lexicographically smallest minimizer and
/// its energy. Guarded to l^n <= 1e7 labelings.
inline std::pair<labeling, real> exact_min(const energy_instance& e) {
    const int n = e.num_variables();
    const int l = e.num_labels();
    double count = 1.0;
    for (int i = 0; i < n; ++i) {
        count *= l;
        if (count > exact_min_guard)
            throw std::length_error("exact_min: l^n exceeds the 1e7 enumeration guard");
    }
    labeling current(static_cast<std::size_t>(n), 0);
    labeling best = current;
    real best_energy = evaluate_discrete(e, current);
    // Odometer over labelings in lexicographic order, last variable fastest;
    // strict improvement keeps the first (lexicographically smallest) minimizer.
    while (true) {
        int pos = n - 1;
        while (pos >= 0 && current[static_cast<std::size_t>(pos)] == l - 1) {
            current[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++current[static_cast<std::size_t>(pos)];
        real energy = evaluate_discrete(e, current);
        if (energy < best_energy) {
            best_energy = energy;
            best = current;
        }
    }
    return {best, best_energy};
}

} // namespace mrfms
