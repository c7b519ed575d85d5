#pragma once

// Energy-aware coarsening: agreement estimation, AMG-style coarse-set
// selection, interpolation matrix construction, and the Galerkin products
// that derive coarse energies over fewer variables or fewer labels.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mrfms/core.hpp"
#include "mrfms/rng.hpp"
#include "mrfms/solve.hpp"

namespace mrfms {

struct edge_agreement {
    int i = 0;
    int j = 0;
    real disagreement = 0.0; // d_ij, mean sampled label cost
    real agreement = 0.0;    // c_ij = exp(-d_ij / sigma)

    bool operator==(const edge_agreement&) const = default;
};

/// Per-edge agreement weights plus the sampler parameters that produced them.
struct agreement_graph {
    int num_items = 0;
    std::vector<edge_agreement> edges;
    int restarts = 0; // K
    int sweeps = 0;   // t
    real scale = 0.0; // sigma

    bool operator==(const agreement_graph&) const = default;
};

/// Empirical agreements from K ICM descents of t sweeps each, started from
/// uniformly random labelings. d_ij is the mean of V[l_i][l_j] over the K
/// samples; c_ij = exp(-d_ij / sigma) with sigma = max entry of V (all
/// agreements are 1 when that maximum is not positive). Deterministic given
/// the seed; each restart owns a split seed stream, so restarts may run in
/// any order or in parallel.
inline agreement_graph sample_agreements(const energy_instance& e, int restarts, int sweeps, std::uint64_t seed) {
    if (restarts < 1 || sweeps < 1)
        throw std::invalid_argument("sample_agreements: restarts and sweeps must be >= 1");

    agreement_graph ag;
    ag.num_items = e.num_variables();
    ag.restarts = restarts;
    ag.sweeps = sweeps;
    const dense_matrix& v = e.label_costs();
    for (int a = 0; a < v.rows(); ++a)
        for (int b = 0; b < v.cols(); ++b) ag.scale = std::max(ag.scale, v(a, b));
    if (e.edges().empty()) return ag;

    std::vector<real> disagreement(e.edges().size(), 0.0);
    adjacency adj(e);
    solver_config descent{.max_sweeps = sweeps, .stop_on_convergence = true};
    for (int k = 0; k < restarts; ++k) {
        rng r(derive_seed(seed, static_cast<std::uint64_t>(k)));
        labeling sample = icm(e, adj, random_labeling(e.num_variables(), e.num_labels(), r), descent);
        for (std::size_t idx = 0; idx < e.edges().size(); ++idx) {
            const edge& ed = e.edges()[idx];
            disagreement[idx] += v(sample[static_cast<std::size_t>(ed.i)], sample[static_cast<std::size_t>(ed.j)]);
        }
    }

    ag.edges.reserve(e.edges().size());
    for (std::size_t idx = 0; idx < e.edges().size(); ++idx) {
        const edge& ed = e.edges()[idx];
        real d = disagreement[idx] / restarts;
        real c = ag.scale > 0.0 ? std::exp(-d / ag.scale) : 1.0;
        ag.edges.push_back({ed.i, ed.j, d, c});
    }
    return ag;
}

/// Energy-agnostic baseline: c_ij = 1 on every edge.
inline agreement_graph uniform_agreements(const energy_instance& e) {
    agreement_graph ag;
    ag.num_items = e.num_variables();
    ag.edges.reserve(e.edges().size());
    for (const edge& ed : e.edges()) ag.edges.push_back({ed.i, ed.j, 0.0, 1.0});
    return ag;
}

/// Closed-form label agreements c_ab ~ 1 / V[a][b], clamped at eps * max V so
/// zero label costs map to the maximal finite agreement. Diagonal is zero
/// (labels never agree with themselves for selection purposes).
struct label_agreement {
    dense_matrix values; // l x l, symmetric, positive off the diagonal
};

inline label_agreement label_agreements(const energy_instance& e) {
    if (e.num_labels() < 2) throw std::invalid_argument("label_agreements: need at least two labels");
    const dense_matrix& v = e.label_costs();
    const int l = e.num_labels();
    real max_v = 0.0;
    for (int a = 0; a < l; ++a)
        for (int b = 0; b < l; ++b) max_v = std::max(max_v, v(a, b));
    dense_matrix c(l, l);
    constexpr real eps = 1e-6;
    for (int a = 0; a < l; ++a)
        for (int b = 0; b < l; ++b) {
            if (a == b) continue;
            c(a, b) = max_v > 0.0 ? max_v / std::max(v(a, b), eps * max_v) : 1.0;
        }
    return {std::move(c)};
}

/// Label agreements as a complete off-diagonal agreement graph, so label and
/// variable coarsening share the selection and interpolation machinery.
inline agreement_graph to_agreement_graph(const label_agreement& la) {
    agreement_graph ag;
    ag.num_items = la.values.rows();
    for (int a = 0; a < la.values.rows(); ++a)
        for (int b = a + 1; b < la.values.cols(); ++b) ag.edges.push_back({a, b, 0.0, la.values(a, b)});
    return ag;
}

/// Greedy coarse-set selection in ascending index order: item i joins the
/// coarse set unless the agreement it already has with the coarse set reaches
/// beta times its total agreement. Isolated items always join (nothing else
/// can represent them).
inline std::vector<int> select_coarse(const agreement_graph& ag, real beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("select_coarse: beta must lie in (0, 1)");
    for (const edge_agreement& ea : ag.edges)
        if (ea.agreement < 0.0) throw std::invalid_argument("select_coarse: agreements must be nonnegative");

    const std::size_t n = static_cast<std::size_t>(ag.num_items);
    std::vector<std::vector<std::pair<int, real>>> neighbors(n);
    std::vector<real> total(n, 0.0);
    for (const edge_agreement& ea : ag.edges) {
        neighbors[static_cast<std::size_t>(ea.i)].push_back({ea.j, ea.agreement});
        neighbors[static_cast<std::size_t>(ea.j)].push_back({ea.i, ea.agreement});
        total[static_cast<std::size_t>(ea.i)] += ea.agreement;
        total[static_cast<std::size_t>(ea.j)] += ea.agreement;
    }

    std::vector<real> coarse_sum(n, 0.0);
    std::vector<char> in_coarse(n, 0);
    std::vector<int> coarse;
    for (std::size_t i = 0; i < n; ++i) {
        if (total[i] > 0.0 && coarse_sum[i] >= beta * total[i]) continue;
        in_coarse[i] = 1;
        coarse.push_back(static_cast<int>(i));
        for (const auto& [j, c] : neighbors[i]) coarse_sum[static_cast<std::size_t>(j)] += c;
    }
    return coarse;
}

/// Sparse interpolation matrix P mapping coarse assignments to fine ones.
/// Rows built by build_interpolation are convex combinations: a coarse
/// representative's row is a unit indicator, every other row holds at most
/// delta normalized agreement weights. Hand-assembled instances (tests,
/// external data) may carry arbitrary entries.
class interpolation_matrix {
public:
    using sparse_row = std::vector<std::pair<int, real>>; // (column, value), ascending column

    interpolation_matrix(int cols, std::vector<sparse_row> rows, std::vector<int> rep_fine_indices = {})
        : cols_(cols), rows_(std::move(rows)), rep_of_(std::move(rep_fine_indices)),
          column_of_(rows_.size(), -1) {
        if (cols_ < 0) throw std::invalid_argument("interpolation_matrix: negative column count");
        for (const sparse_row& row : rows_)
            for (const auto& [c, v] : row) {
                (void)v;
                if (c < 0 || c >= cols_) throw std::invalid_argument("interpolation_matrix: column out of range");
            }
        if (!rep_of_.empty()) {
            if (static_cast<int>(rep_of_.size()) != cols_)
                throw std::invalid_argument("interpolation_matrix: one representative per column expected");
            for (int col = 0; col < cols_; ++col) column_of_[static_cast<std::size_t>(rep_of_[col])] = col;
        }
    }

    static interpolation_matrix identity(int n) {
        std::vector<sparse_row> rows(static_cast<std::size_t>(n));
        std::vector<int> reps(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            rows[static_cast<std::size_t>(i)] = {{i, 1.0}};
            reps[static_cast<std::size_t>(i)] = i;
        }
        return interpolation_matrix(n, std::move(rows), std::move(reps));
    }

    int rows() const { return static_cast<int>(rows_.size()); }
    int cols() const { return cols_; }
    const sparse_row& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }

    /// Coarse column of a fine representative, -1 for aggregated-only rows.
    int column_of(int fine) const { return column_of_[static_cast<std::size_t>(fine)]; }
    bool is_coarse(int fine) const { return column_of(fine) >= 0; }
    /// Fine index of a column's representative (only for built matrices).
    int rep_of(int col) const { return rep_of_[static_cast<std::size_t>(col)]; }
    bool has_representatives() const { return !rep_of_.empty(); }

    std::size_t nonzeros() const {
        std::size_t nnz = 0;
        for (const sparse_row& row : rows_) nnz += row.size();
        return nnz;
    }

    /// P * u, mapping coarse rows to fine rows (variable coarsening).
    dense_matrix interpolate(const dense_matrix& u) const {
        if (u.rows() != cols_) throw std::invalid_argument("interpolation_matrix: row count mismatch in interpolate");
        dense_matrix out(rows(), u.cols());
        for (int i = 0; i < rows(); ++i)
            for (const auto& [col, v] : row(i))
                for (int a = 0; a < u.cols(); ++a) out(i, a) += v * u(col, a);
        return out;
    }

    /// u * P^T, mapping coarse columns to fine columns (label coarsening).
    dense_matrix interpolate_columns(const dense_matrix& u) const {
        if (u.cols() != cols_)
            throw std::invalid_argument("interpolation_matrix: column count mismatch in interpolate_columns");
        dense_matrix out(u.rows(), rows());
        for (int f = 0; f < rows(); ++f)
            for (const auto& [col, v] : row(f))
                for (int i = 0; i < u.rows(); ++i) out(i, f) += u(i, col) * v;
        return out;
    }

    /// P^T * m (the restriction product behind D^c = P^T D^f).
    dense_matrix restrict_rows(const dense_matrix& m) const {
        if (m.rows() != rows()) throw std::invalid_argument("interpolation_matrix: row count mismatch in restrict_rows");
        dense_matrix out(cols_, m.cols());
        for (int i = 0; i < rows(); ++i)
            for (const auto& [col, v] : row(i))
                for (int a = 0; a < m.cols(); ++a) out(col, a) += v * m(i, a);
        return out;
    }

    dense_matrix to_dense() const {
        dense_matrix out(rows(), cols_);
        for (int i = 0; i < rows(); ++i)
            for (const auto& [col, v] : row(i)) out(i, col) = v;
        return out;
    }

    bool operator==(const interpolation_matrix&) const = default;

private:
    int cols_ = 0;
    std::vector<sparse_row> rows_;
    std::vector<int> rep_of_;
    std::vector<int> column_of_;
};

namespace detail {

inline interpolation_matrix build_interpolation_once(const agreement_graph& ag, const std::vector<int>& coarse,
                                                     int delta, std::vector<int>& uncovered) {
    const std::size_t n = static_cast<std::size_t>(ag.num_items);
    std::vector<int> column_of(n, -1);
    for (std::size_t col = 0; col < coarse.size(); ++col)
        column_of[static_cast<std::size_t>(coarse[col])] = static_cast<int>(col);

    std::vector<std::vector<std::pair<int, real>>> coarse_neighbors(n); // (column, agreement)
    for (const edge_agreement& ea : ag.edges) {
        if (ea.agreement <= 0.0) continue;
        if (column_of[static_cast<std::size_t>(ea.j)] >= 0 && column_of[static_cast<std::size_t>(ea.i)] < 0)
            coarse_neighbors[static_cast<std::size_t>(ea.i)].push_back(
                {column_of[static_cast<std::size_t>(ea.j)], ea.agreement});
        if (column_of[static_cast<std::size_t>(ea.i)] >= 0 && column_of[static_cast<std::size_t>(ea.j)] < 0)
            coarse_neighbors[static_cast<std::size_t>(ea.j)].push_back(
                {column_of[static_cast<std::size_t>(ea.i)], ea.agreement});
    }

    uncovered.clear();
    std::vector<interpolation_matrix::sparse_row> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (column_of[i] >= 0) {
            rows[i] = {{column_of[i], 1.0}};
            continue;
        }
        auto& candidates = coarse_neighbors[i];
        if (candidates.empty()) {
            uncovered.push_back(static_cast<int>(i));
            continue;
        }
        // Keep the delta largest entries, ties resolved toward lower columns.
        std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (static_cast<int>(candidates.size()) > delta) candidates.resize(static_cast<std::size_t>(delta));
        real sum = 0.0;
        for (const auto& [col, c] : candidates) sum += c;
        interpolation_matrix::sparse_row row;
        row.reserve(candidates.size());
        for (const auto& [col, c] : candidates) row.push_back({col, c / sum});
        std::sort(row.begin(), row.end());
        rows[i] = std::move(row);
    }
    return interpolation_matrix(static_cast<int>(coarse.size()), std::move(rows), coarse);
}

} // namespace detail

/// Interpolation from agreements and a coarse set: representative rows are
/// unit indicators, remaining rows keep their delta strongest coarse-neighbor
/// agreements and normalize to sum 1. A row with no positive coarse-neighbor
/// agreement promotes its item into the coarse set and the matrix is rebuilt,
/// so every fine item ends up covered.
inline interpolation_matrix build_interpolation(const agreement_graph& ag, std::vector<int> coarse, int delta) {
    if (coarse.empty()) throw std::invalid_argument("build_interpolation: coarse set must be nonempty");
    if (delta < 1) throw std::invalid_argument("build_interpolation: delta must be >= 1");
    while (true) {
        std::vector<int> uncovered;
        interpolation_matrix p = detail::build_interpolation_once(ag, coarse, delta, uncovered);
        if (uncovered.empty()) return p;
        coarse.insert(coarse.end(), uncovered.begin(), uncovered.end());
        std::sort(coarse.begin(), coarse.end());
    }
}

/// Coarse energy over fewer variables (the Galerkin product):
/// D^c = P^T D^f and the pairwise couplings restricted as P^T B P, where B is
/// the symmetric coupling matrix holding w/2 on each edge's two entries plus
/// any existing self-couplings on its diagonal. Off-diagonal results become
/// coarse edges (I < J, both halves summed), diagonal results become coarse
/// self-coupling weights; exact zeros are dropped. The triple product makes
/// coarse evaluation of U^c equal fine evaluation of P U^c for any assignment.
inline energy_instance coarsen_variables(const energy_instance& e, const interpolation_matrix& p) {
    if (p.rows() != e.num_variables())
        throw std::invalid_argument("coarsen_variables: interpolation row count must match variable count");
    const int nc = p.cols();
    if (nc < 1) throw std::invalid_argument("coarsen_variables: interpolation must have at least one column");

    dense_matrix coarse_unary = p.restrict_rows(e.unary());

    std::map<std::pair<int, int>, real> couplings; // I < J
    std::vector<real> loops(static_cast<std::size_t>(nc), 0.0);
    auto accumulate = [&](int a, int b, real v) {
        if (a == b)
            loops[static_cast<std::size_t>(a)] += v;
        else
            couplings[{std::min(a, b), std::max(a, b)}] += v;
    };
    for (const edge& ed : e.edges())
        for (const auto& [ci, vi] : p.row(ed.i))
            for (const auto& [cj, vj] : p.row(ed.j)) accumulate(ci, cj, ed.weight * vi * vj);
    if (e.has_loops())
        for (int i = 0; i < e.num_variables(); ++i) {
            real s = e.loop_weight(i);
            if (s == 0.0) continue;
            for (const auto& [ca, va] : p.row(i))
                for (const auto& [cb, vb] : p.row(i)) accumulate(ca, cb, s * va * vb);
        }

    std::vector<edge> coarse_edges;
    coarse_edges.reserve(couplings.size());
    for (const auto& [key, w] : couplings)
        if (w != 0.0) coarse_edges.push_back({key.first, key.second, w});
    bool any_loop = false;
    for (real s : loops)
        if (s != 0.0) any_loop = true;
    if (!any_loop) loops.clear();

    return energy_instance(nc, e.num_labels(), std::move(coarse_unary), std::move(coarse_edges), e.label_costs(),
                           std::move(loops));
}

/// Coarse energy over fewer labels: D^c = D P and V^c = P^T V P; the graph
/// (edges and self-couplings) is untouched. V^c is symmetrized after the
/// product to keep the symmetry invariant exact.
inline energy_instance coarsen_labels(const energy_instance& e, const interpolation_matrix& p) {
    if (p.rows() != e.num_labels())
        throw std::invalid_argument("coarsen_labels: interpolation row count must match label count");
    const int lc = p.cols();
    if (lc < 1) throw std::invalid_argument("coarsen_labels: interpolation must have at least one column");

    const dense_matrix& d = e.unary();
    dense_matrix coarse_unary(e.num_variables(), lc);
    for (int i = 0; i < d.rows(); ++i)
        for (int f = 0; f < d.cols(); ++f) {
            real dif = d(i, f);
            if (dif == 0.0) continue;
            for (const auto& [c, v] : p.row(f)) coarse_unary(i, c) += dif * v;
        }

    const dense_matrix& v = e.label_costs();
    dense_matrix vp(v.rows(), lc); // V * P
    for (int f = 0; f < v.rows(); ++f)
        for (int g = 0; g < v.cols(); ++g) {
            real vfg = v(f, g);
            if (vfg == 0.0) continue;
            for (const auto& [c, pv] : p.row(g)) vp(f, c) += vfg * pv;
        }
    dense_matrix coarse_costs(lc, lc);
    for (int f = 0; f < v.rows(); ++f)
        for (const auto& [a, pa] : p.row(f))
            for (int b = 0; b < lc; ++b) coarse_costs(a, b) += pa * vp(f, b);
    for (int a = 0; a < lc; ++a)
        for (int b = a + 1; b < lc; ++b) {
            real sym = 0.5 * (coarse_costs(a, b) + coarse_costs(b, a));
            coarse_costs(a, b) = sym;
            coarse_costs(b, a) = sym;
        }

    return energy_instance(e.num_variables(), lc, std::move(coarse_unary), e.edges(), std::move(coarse_costs),
                           e.loop_weights());
}

} // namespace mrfms
