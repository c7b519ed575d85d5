#pragma once

// Pairwise discrete energy model: E(U) = Tr(D U^T) + sum_{(i,j)} w_ij (U V U^T)_ij
// over assignments U with one label per variable. Energies are parameterized by
// (n, l, D, W, V); W is kept as an explicit edge list with i < j, plus optional
// per-variable self-coupling weights that arise from variable coarsening.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace mrfms {

using real = double;

/// Row-major dense matrix of reals.
class dense_matrix {
public:
    dense_matrix() = default;
    dense_matrix(int rows, int cols, real fill = 0.0)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows < 0 ? 0 : rows) * static_cast<std::size_t>(cols < 0 ? 0 : cols), fill) {
        if (rows < 0 || cols < 0)
            throw std::invalid_argument("dense_matrix: negative dimensions");
    }
    dense_matrix(int rows, int cols, std::vector<real> values)
        : rows_(rows), cols_(cols), data_(std::move(values)) {
        if (rows < 0 || cols < 0 ||
            data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
            throw std::invalid_argument("dense_matrix: value count does not match dimensions");
    }

    static dense_matrix identity(int n) {
        dense_matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    real operator()(int r, int c) const { return data_[index(r, c)]; }
    real& operator()(int r, int c) { return data_[index(r, c)]; }

    const std::vector<real>& values() const { return data_; }

    dense_matrix transposed() const {
        dense_matrix t(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    bool all_finite() const {
        for (real v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const dense_matrix&) const = default;

private:
    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<real> data_;
};

/// Weighted undirected edge, stored with i < j. Negative weights are allowed
/// (non-submodular energies).
struct edge {
    int i = 0;
    int j = 0;
    real weight = 0.0;

    bool operator==(const edge&) const = default;
};

/// Discrete assignment: one label in [0, l) per variable.
using labeling = std::vector<int>;

/// Immutable energy instance (n, l, D, W, V).
///
/// Invariants checked at construction: n,l >= 1; D is n x l; V is l x l and
/// symmetric; edges have 0 <= i < j < n with no duplicate pairs; all entries
/// finite. Edges given as (j, i) are canonicalized to i < j, which is sound
/// because V is symmetric. `loop_weights`, when non-empty, has one
/// self-coupling weight per variable contributing w_i * (U V U^T)_ii; variable
/// coarsening produces such terms and plain instances leave it empty.
class energy_instance {
public:
    energy_instance(int num_variables, int num_labels, dense_matrix unary,
                    std::vector<edge> edges, dense_matrix label_costs,
                    std::vector<real> loop_weights = {})
        : n_(num_variables), l_(num_labels), unary_(std::move(unary)),
          edges_(std::move(edges)), label_costs_(std::move(label_costs)),
          loop_weights_(std::move(loop_weights)) {
        validate();
    }

    int num_variables() const { return n_; }
    int num_labels() const { return l_; }
    const dense_matrix& unary() const { return unary_; }
    const std::vector<edge>& edges() const { return edges_; }
    const dense_matrix& label_costs() const { return label_costs_; }

    const std::vector<real>& loop_weights() const { return loop_weights_; }
    bool has_loops() const { return !loop_weights_.empty(); }
    real loop_weight(int i) const { return loop_weights_.empty() ? 0.0 : loop_weights_[static_cast<std::size_t>(i)]; }

    bool operator==(const energy_instance&) const = default;

private:
    void validate() {
        if (n_ < 1) throw std::invalid_argument("energy_instance: need at least one variable");
        if (l_ < 1) throw std::invalid_argument("energy_instance: need at least one label");
        if (unary_.rows() != n_ || unary_.cols() != l_)
            throw std::invalid_argument("energy_instance: unary matrix must be n x l");
        if (label_costs_.rows() != l_ || label_costs_.cols() != l_)
            throw std::invalid_argument("energy_instance: label cost matrix must be l x l");
        if (!unary_.all_finite() || !label_costs_.all_finite())
            throw std::invalid_argument("energy_instance: non-finite entry");
        for (int a = 0; a < l_; ++a)
            for (int b = a + 1; b < l_; ++b)
                if (label_costs_(a, b) != label_costs_(b, a))
                    throw std::invalid_argument("energy_instance: label cost matrix must be symmetric");
        std::unordered_set<long long> seen;
        seen.reserve(edges_.size() * 2);
        for (edge& e : edges_) {
            if (e.i > e.j) std::swap(e.i, e.j);
            if (e.i < 0 || e.j >= n_ || e.i == e.j)
                throw std::invalid_argument("energy_instance: edge endpoints must satisfy 0 <= i < j < n");
            if (!std::isfinite(e.weight))
                throw std::invalid_argument("energy_instance: non-finite edge weight");
            long long key = static_cast<long long>(e.i) * n_ + e.j;
            if (!seen.insert(key).second)
                throw std::invalid_argument("energy_instance: duplicate edge (" + std::to_string(e.i) + ", " +
                                            std::to_string(e.j) + ")");
        }
        if (!loop_weights_.empty()) {
            if (static_cast<int>(loop_weights_.size()) != n_)
                throw std::invalid_argument("energy_instance: loop weight vector must have one entry per variable");
            for (real w : loop_weights_)
                if (!std::isfinite(w)) throw std::invalid_argument("energy_instance: non-finite loop weight");
        }
    }

    int n_ = 0;
    int l_ = 0;
    dense_matrix unary_;
    std::vector<edge> edges_;
    dense_matrix label_costs_;
    std::vector<real> loop_weights_;
};

inline void check_labeling(const energy_instance& e, const labeling& a) {
    if (static_cast<int>(a.size()) != e.num_variables())
        throw std::invalid_argument("labeling: length does not match variable count");
    for (int label : a)
        if (label < 0 || label >= e.num_labels())
            throw std::invalid_argument("labeling: label out of range");
}

/// Relaxed assignment: n x l matrix with entries in [0, 1] and unit row sums.
class fractional_assignment {
public:
    explicit fractional_assignment(dense_matrix u) : u_(std::move(u)) {
        for (int i = 0; i < u_.rows(); ++i) {
            real sum = 0.0;
            for (int a = 0; a < u_.cols(); ++a) {
                real v = u_(i, a);
                if (v < -1e-12 || v > 1.0 + 1e-12)
                    throw std::invalid_argument("fractional_assignment: entry outside [0, 1]");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("fractional_assignment: row " + std::to_string(i) + " does not sum to 1");
        }
    }

    const dense_matrix& matrix() const { return u_; }
    int rows() const { return u_.rows(); }
    int cols() const { return u_.cols(); }
    real operator()(int r, int c) const { return u_(r, c); }

private:
    dense_matrix u_;
};

/// E(L) = sum_i D[i][L_i] + sum_(i,j,w) w V[L_i][L_j] (+ loop terms).
inline real evaluate_discrete(const energy_instance& e, const labeling& a) {
    check_labeling(e, a);
    const dense_matrix& d = e.unary();
    const dense_matrix& v = e.label_costs();
    real energy = 0.0;
    for (int i = 0; i < e.num_variables(); ++i) energy += d(i, a[static_cast<std::size_t>(i)]);
    for (const edge& ed : e.edges())
        energy += ed.weight * v(a[static_cast<std::size_t>(ed.i)], a[static_cast<std::size_t>(ed.j)]);
    if (e.has_loops())
        for (int i = 0; i < e.num_variables(); ++i) {
            int li = a[static_cast<std::size_t>(i)];
            energy += e.loop_weight(i) * v(li, li);
        }
    return energy;
}

namespace detail {

// u_i V u_j^T for two rows of an assignment matrix.
inline real row_pair_cost(const dense_matrix& u, const dense_matrix& v, int i, int j) {
    real total = 0.0;
    for (int a = 0; a < u.cols(); ++a) {
        real uia = u(i, a);
        if (uia == 0.0) continue;
        real inner = 0.0;
        for (int b = 0; b < u.cols(); ++b) inner += v(a, b) * u(j, b);
        total += uia * inner;
    }
    return total;
}

} // namespace detail

/// Tr(D U^T) + sum_(i,j,w) w (U V U^T)_ij evaluated over the edge list.
/// Accepts any n x l matrix; only the dimensions are enforced here, so the
/// trace form can be evaluated on intermediate (not row-stochastic) products.
inline real evaluate_fractional(const energy_instance& e, const dense_matrix& u) {
    if (u.rows() != e.num_variables() || u.cols() != e.num_labels())
        throw std::invalid_argument("evaluate_fractional: assignment matrix must be n x l");
    const dense_matrix& d = e.unary();
    const dense_matrix& v = e.label_costs();
    real energy = 0.0;
    for (int i = 0; i < u.rows(); ++i)
        for (int a = 0; a < u.cols(); ++a) energy += d(i, a) * u(i, a);
    for (const edge& ed : e.edges()) energy += ed.weight * detail::row_pair_cost(u, v, ed.i, ed.j);
    if (e.has_loops())
        for (int i = 0; i < e.num_variables(); ++i) {
            real w = e.loop_weight(i);
            if (w != 0.0) energy += w * detail::row_pair_cost(u, v, i, i);
        }
    return energy;
}

inline real evaluate_fractional(const energy_instance& e, const fractional_assignment& u) {
    return evaluate_fractional(e, u.matrix());
}

/// Binary matrix view of a labeling: U[i][a] = 1 iff L_i = a.
inline fractional_assignment to_binary_matrix(const labeling& a, int num_labels) {
    dense_matrix u(static_cast<int>(a.size()), num_labels);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0 || a[i] >= num_labels)
            throw std::invalid_argument("to_binary_matrix: label out of range");
        u(static_cast<int>(i), a[i]) = 1.0;
    }
    return fractional_assignment(std::move(u));
}

} // namespace mrfms
