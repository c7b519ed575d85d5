#pragma once

// Energy pyramid construction and coarse-to-fine refinement. Fine-to-coarse:
// estimate agreements, select a coarse set, build the interpolation, derive
// the coarse energy; repeat until the stop rule fires. Coarse-to-fine:
// initialize the coarsest scale by winner-take-all, then alternate
// interpolation, rounding, and single-scale refinement down to the finest
// scale.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mrfms/coarsen.hpp"
#include "mrfms/core.hpp"
#include "mrfms/rng.hpp"
#include "mrfms/solve.hpp"

namespace mrfms {

enum class coarsen_mode { variables, labels };
enum class agreement_mode { energy_aware, uniform };

struct pyramid_config {
    coarsen_mode mode = coarsen_mode::variables;
    agreement_mode agreements = agreement_mode::energy_aware;

    int stop_variables = 10;  // build further levels while n > stop_variables
    int stop_labels = 2;      // label mode: stop once l <= stop_labels
    int max_label_scales = 5; // label mode: at most this many scales in total

    real beta = 0.2;      // variable coarse-set threshold
    real beta_hat = 0.75; // label coarse-set threshold
    int delta = 3;        // max entries per interpolation row (variables)
    int delta_hat = 2;    // max entries per interpolation row (labels)
    int restarts = 10;    // K sampler restarts
    int sweeps = 10;      // t sampler ICM sweeps

    std::uint64_t seed = 0;
    solver_config solver; // refinement solver budget per scale
};

/// Scales from fine (0) to coarsest; interps[s] maps scale s+1 onto scale s.
struct energy_pyramid {
    std::vector<energy_instance> scales;
    std::vector<interpolation_matrix> interps;
    coarsen_mode mode = coarsen_mode::variables;
    bool fixed_point = false; // coarsening stalled before the stop rule fired
    std::string warning;

    int num_scales() const { return static_cast<int>(scales.size()); }

    /// Degrees of freedom per scale (n or l depending on mode).
    std::vector<int> scale_sizes() const {
        std::vector<int> sizes;
        sizes.reserve(scales.size());
        for (const energy_instance& e : scales)
            sizes.push_back(mode == coarsen_mode::variables ? e.num_variables() : e.num_labels());
        return sizes;
    }
};

inline energy_pyramid build_pyramid(const energy_instance& e, const pyramid_config& cfg) {
    if (cfg.stop_variables < 1 || cfg.stop_labels < 1 || cfg.max_label_scales < 1)
        throw std::invalid_argument("build_pyramid: stop thresholds must be >= 1");

    energy_pyramid pyr;
    pyr.mode = cfg.mode;
    pyr.scales.push_back(e);

    const bool by_vars = cfg.mode == coarsen_mode::variables;
    while (true) {
        const energy_instance& cur = pyr.scales.back();
        if (by_vars) {
            if (cur.num_variables() <= cfg.stop_variables) break;
        } else {
            if (cur.num_labels() <= cfg.stop_labels || pyr.num_scales() >= cfg.max_label_scales) break;
        }

        agreement_graph ag;
        real beta;
        int delta;
        if (by_vars) {
            ag = cfg.agreements == agreement_mode::energy_aware
                     ? sample_agreements(cur, cfg.restarts, cfg.sweeps,
                                         derive_seed(cfg.seed, static_cast<std::uint64_t>(pyr.num_scales())))
                     : uniform_agreements(cur);
            beta = cfg.beta;
            delta = cfg.delta;
        } else {
            ag = to_agreement_graph(label_agreements(cur));
            beta = cfg.beta_hat;
            delta = cfg.delta_hat;
        }

        std::vector<int> coarse = select_coarse(ag, beta);
        if (static_cast<int>(coarse.size()) >= ag.num_items) {
            pyr.fixed_point = true;
            pyr.warning = "coarsening reached a fixed point at scale " + std::to_string(pyr.num_scales() - 1);
            break;
        }
        interpolation_matrix p = build_interpolation(ag, std::move(coarse), delta);
        if (p.cols() >= p.rows()) { // promotion can re-cover everything
            pyr.fixed_point = true;
            pyr.warning = "coarsening reached a fixed point at scale " + std::to_string(pyr.num_scales() - 1);
            break;
        }
        energy_instance coarse_energy = by_vars ? coarsen_variables(cur, p) : coarsen_labels(cur, p);
        pyr.interps.push_back(std::move(p));
        pyr.scales.push_back(std::move(coarse_energy));
    }
    return pyr;
}

/// Row-wise argmax rounding, ties to the lower label index.
inline labeling round_rows(const dense_matrix& u) {
    labeling a(static_cast<std::size_t>(u.rows()));
    for (int i = 0; i < u.rows(); ++i) {
        int best = 0;
        real best_value = u(i, 0);
        for (int label = 1; label < u.cols(); ++label)
            if (u(i, label) > best_value) {
                best = label;
                best_value = u(i, label);
            }
        a[static_cast<std::size_t>(i)] = best;
    }
    return a;
}

inline labeling round_rows(const fractional_assignment& u) { return round_rows(u.matrix()); }

/// One refinement step of the coarse-to-fine pass.
struct scale_trace {
    int scale = 0;
    int num_variables = 0;
    int num_labels = 0;
    real init_energy = 0.0;    // energy of the rounded interpolation (WTA at the coarsest scale)
    real refined_energy = 0.0; // energy after single-scale refinement
    dense_matrix interpolated; // fractional U-tilde before rounding; empty at the coarsest scale
};

struct multiscale_result {
    labeling labels;
    real energy = 0.0;
    std::vector<scale_trace> trace; // coarsest scale first
    energy_pyramid pyramid;
};

/// Coarse-to-fine optimization with a pluggable single-scale refiner of
/// signature labeling(const energy_instance&, const labeling&, const
/// solver_config&).
template <typename Refine>
multiscale_result solve_multiscale(const energy_instance& e, const pyramid_config& cfg, Refine&& refine) {
    multiscale_result result;
    result.pyramid = build_pyramid(e, cfg);
    const energy_pyramid& pyr = result.pyramid;

    const int coarsest = pyr.num_scales() - 1;
    labeling current = winner_take_all(pyr.scales[static_cast<std::size_t>(coarsest)]);
    for (int s = coarsest; s >= 0; --s) {
        const energy_instance& scale = pyr.scales[static_cast<std::size_t>(s)];
        scale_trace step;
        step.scale = s;
        step.num_variables = scale.num_variables();
        step.num_labels = scale.num_labels();
        if (s < coarsest) {
            const interpolation_matrix& p = pyr.interps[static_cast<std::size_t>(s)];
            const energy_instance& coarse = pyr.scales[static_cast<std::size_t>(s + 1)];
            const dense_matrix& u = to_binary_matrix(current, coarse.num_labels()).matrix();
            step.interpolated =
                pyr.mode == coarsen_mode::variables ? p.interpolate(u) : p.interpolate_columns(u);
            current = round_rows(step.interpolated);
        }
        step.init_energy = evaluate_discrete(scale, current);
        current = refine(scale, current, cfg.solver);
        step.refined_energy = evaluate_discrete(scale, current);
        result.trace.push_back(std::move(step));
    }

    result.labels = std::move(current);
    result.energy = result.trace.back().refined_energy;
    return result;
}

/// Multiscale ICM (the default refiner).
inline multiscale_result solve_multiscale(const energy_instance& e, const pyramid_config& cfg) {
    return solve_multiscale(e, cfg, [](const energy_instance& scale, const labeling& init, const solver_config& sc) {
        return icm(scale, init, sc);
    });
}

} // namespace mrfms
