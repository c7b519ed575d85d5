#pragma once

// Text formats.
//
// Energy file (.mrf), line oriented; `#` starts a comment, blank lines are
// ignored:
//   MRF n l
//   UNARY
//   n lines of l reals
//   V
//   l lines of l reals
//   EDGES m
//   m lines: i j w        (0-indexed, i < j)
//   LOOPS k               (optional; self-coupling weights from coarsening)
//   k lines: i s
//
// Sparse triplet file (.spm):
//   SPARSE rows cols nnz
//   nnz lines: r c v
//
// Values are written with 17 significant digits so emit/parse round-trips are
// exact.

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mrfms/coarsen.hpp"
#include "mrfms/core.hpp"

namespace mrfms {

struct parse_error : std::runtime_error {
    parse_error(int line_number, const std::string& message)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + message), line(line_number) {}
    int line;
};

namespace detail {

// Lines with comments stripped, blanks skipped, original numbering kept.
class line_reader {
public:
    explicit line_reader(std::istream& in) : in_(in) {}

    bool next(std::string& out) {
        std::string raw;
        while (std::getline(in_, raw)) {
            ++line_;
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            if (raw.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            out = raw;
            return true;
        }
        return false;
    }

    int line() const { return line_; }

private:
    std::istream& in_;
    int line_ = 0;
};

inline std::vector<real> parse_reals(const std::string& text, int count, int line) {
    std::istringstream ss(text);
    std::vector<real> values(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        if (!(ss >> values[static_cast<std::size_t>(k)]))
            throw parse_error(line, "expected " + std::to_string(count) + " numeric values");
    std::string rest;
    if (ss >> rest) throw parse_error(line, "trailing content '" + rest + "'");
    return values;
}

} // namespace detail

inline energy_instance read_mrf(std::istream& in) {
    detail::line_reader reader(in);
    std::string text;

    if (!reader.next(text)) throw parse_error(reader.line() + 1, "missing 'MRF n l' header");
    std::istringstream header(text);
    std::string tag;
    int n = 0;
    int l = 0;
    if (!(header >> tag >> n >> l) || tag != "MRF") throw parse_error(reader.line(), "expected 'MRF n l' header");
    if (n < 1 || l < 1) throw parse_error(reader.line(), "variable and label counts must be >= 1");

    if (!reader.next(text) || text.find("UNARY") == std::string::npos)
        throw parse_error(reader.line(), "expected 'UNARY' section");
    dense_matrix unary(n, l);
    for (int i = 0; i < n; ++i) {
        if (!reader.next(text)) throw parse_error(reader.line() + 1, "unary row " + std::to_string(i) + " missing");
        std::vector<real> row = detail::parse_reals(text, l, reader.line());
        for (int a = 0; a < l; ++a) {
            if (!std::isfinite(row[static_cast<std::size_t>(a)]))
                throw parse_error(reader.line(), "non-finite unary value");
            unary(i, a) = row[static_cast<std::size_t>(a)];
        }
    }

    if (!reader.next(text)) throw parse_error(reader.line() + 1, "expected 'V' section");
    std::istringstream vtag(text);
    if (!(vtag >> tag) || tag != "V") throw parse_error(reader.line(), "expected 'V' section");
    dense_matrix label_costs(l, l);
    std::vector<int> v_row_line(static_cast<std::size_t>(l));
    for (int a = 0; a < l; ++a) {
        if (!reader.next(text)) throw parse_error(reader.line() + 1, "label cost row " + std::to_string(a) + " missing");
        v_row_line[static_cast<std::size_t>(a)] = reader.line();
        std::vector<real> row = detail::parse_reals(text, l, reader.line());
        for (int b = 0; b < l; ++b) {
            if (!std::isfinite(row[static_cast<std::size_t>(b)]))
                throw parse_error(reader.line(), "non-finite label cost");
            label_costs(a, b) = row[static_cast<std::size_t>(b)];
        }
    }
    for (int a = 0; a < l; ++a)
        for (int b = 0; b < a; ++b)
            if (label_costs(a, b) != label_costs(b, a))
                throw parse_error(v_row_line[static_cast<std::size_t>(a)],
                                  "label cost matrix must be symmetric (entries " + std::to_string(a) + "," +
                                      std::to_string(b) + " and " + std::to_string(b) + "," + std::to_string(a) +
                                      " differ)");

    if (!reader.next(text)) throw parse_error(reader.line() + 1, "expected 'EDGES m' section");
    std::istringstream etag(text);
    long long m = -1;
    if (!(etag >> tag >> m) || tag != "EDGES" || m < 0) throw parse_error(reader.line(), "expected 'EDGES m' section");
    std::vector<edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    std::unordered_set<long long> seen;
    for (long long k = 0; k < m; ++k) {
        if (!reader.next(text)) throw parse_error(reader.line() + 1, "edge " + std::to_string(k) + " missing");
        std::istringstream es(text);
        int i = 0;
        int j = 0;
        real w = 0.0;
        std::string rest;
        if (!(es >> i >> j >> w) || (es >> rest)) throw parse_error(reader.line(), "expected 'i j w'");
        if (i < 0 || j >= n || i >= j)
            throw parse_error(reader.line(), "edge endpoints must satisfy 0 <= i < j < n");
        if (!std::isfinite(w)) throw parse_error(reader.line(), "non-finite edge weight");
        if (!seen.insert(static_cast<long long>(i) * n + j).second)
            throw parse_error(reader.line(), "duplicate edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        edges.push_back({i, j, w});
    }

    std::vector<real> loops;
    if (reader.next(text)) {
        std::istringstream ls(text);
        long long k = -1;
        if (!(ls >> tag >> k) || tag != "LOOPS" || k < 0)
            throw parse_error(reader.line(), "expected 'LOOPS k' or end of file");
        loops.assign(static_cast<std::size_t>(n), 0.0);
        for (long long idx = 0; idx < k; ++idx) {
            if (!reader.next(text)) throw parse_error(reader.line() + 1, "loop weight " + std::to_string(idx) + " missing");
            std::istringstream entry(text);
            int i = 0;
            real s = 0.0;
            std::string rest;
            if (!(entry >> i >> s) || (entry >> rest)) throw parse_error(reader.line(), "expected 'i s'");
            if (i < 0 || i >= n) throw parse_error(reader.line(), "loop index out of range");
            if (!std::isfinite(s)) throw parse_error(reader.line(), "non-finite loop weight");
            loops[static_cast<std::size_t>(i)] = s;
        }
        if (reader.next(text)) throw parse_error(reader.line(), "unexpected content after instance");
    }

    try {
        return energy_instance(n, l, std::move(unary), std::move(edges), std::move(label_costs), std::move(loops));
    } catch (const std::invalid_argument& ex) {
        throw parse_error(reader.line(), ex.what());
    }
}

inline void write_mrf(std::ostream& out, const energy_instance& e) {
    out << std::setprecision(17);
    out << "MRF " << e.num_variables() << ' ' << e.num_labels() << '\n';
    out << "UNARY\n";
    for (int i = 0; i < e.num_variables(); ++i) {
        for (int a = 0; a < e.num_labels(); ++a) out << (a ? " " : "") << e.unary()(i, a);
        out << '\n';
    }
    out << "V\n";
    for (int a = 0; a < e.num_labels(); ++a) {
        for (int b = 0; b < e.num_labels(); ++b) out << (b ? " " : "") << e.label_costs()(a, b);
        out << '\n';
    }
    out << "EDGES " << e.edges().size() << '\n';
    for (const edge& ed : e.edges()) out << ed.i << ' ' << ed.j << ' ' << ed.weight << '\n';
    if (e.has_loops()) {
        std::size_t count = 0;
        for (real s : e.loop_weights())
            if (s != 0.0) ++count;
        out << "LOOPS " << count << '\n';
        for (int i = 0; i < e.num_variables(); ++i)
            if (e.loop_weight(i) != 0.0) out << i << ' ' << e.loop_weight(i) << '\n';
    }
}

inline energy_instance read_mrf_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_mrf(in);
}

inline void write_mrf_file(const std::string& path, const energy_instance& e) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_mrf(out, e);
}

struct sparse_triplets {
    int rows = 0;
    int cols = 0;
    std::vector<std::tuple<int, int, real>> entries;
};

inline void write_spm(std::ostream& out, const interpolation_matrix& p) {
    out << std::setprecision(17);
    out << "SPARSE " << p.rows() << ' ' << p.cols() << ' ' << p.nonzeros() << '\n';
    for (int i = 0; i < p.rows(); ++i)
        for (const auto& [c, v] : p.row(i)) out << i << ' ' << c << ' ' << v << '\n';
}

inline void write_spm(std::ostream& out, const agreement_graph& ag) {
    out << std::setprecision(17);
    out << "SPARSE " << ag.num_items << ' ' << ag.num_items << ' ' << ag.edges.size() << '\n';
    for (const edge_agreement& ea : ag.edges) out << ea.i << ' ' << ea.j << ' ' << ea.agreement << '\n';
}

inline sparse_triplets read_spm(std::istream& in) {
    detail::line_reader reader(in);
    std::string text;
    if (!reader.next(text)) throw parse_error(reader.line() + 1, "missing 'SPARSE rows cols nnz' header");
    std::istringstream header(text);
    std::string tag;
    sparse_triplets result;
    long long nnz = -1;
    if (!(header >> tag >> result.rows >> result.cols >> nnz) || tag != "SPARSE" || nnz < 0)
        throw parse_error(reader.line(), "expected 'SPARSE rows cols nnz' header");
    for (long long k = 0; k < nnz; ++k) {
        if (!reader.next(text)) throw parse_error(reader.line() + 1, "triplet " + std::to_string(k) + " missing");
        std::istringstream entry(text);
        int r = 0;
        int c = 0;
        real v = 0.0;
        if (!(entry >> r >> c >> v)) throw parse_error(reader.line(), "expected 'r c v'");
        if (r < 0 || r >= result.rows || c < 0 || c >= result.cols)
            throw parse_error(reader.line(), "triplet index out of range");
        result.entries.push_back({r, c, v});
    }
    return result;
}

inline void write_spm_file(const std::string& path, const interpolation_matrix& p) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_spm(out, p);
}

} // namespace mrfms
