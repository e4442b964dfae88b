#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace isindy {

// A monomial over N variables, stored as its exponent vector.
struct Monomial {
    std::vector<int> exponents;

    int degree() const;
    bool is_constant() const { return degree() == 0; }

    friend bool operator==(const Monomial& a, const Monomial& b) = default;
};

// Canonical order: ascending total degree, ties broken lexicographically on
// the exponent vector. Every Dictionary in the library keeps its terms sorted
// in this order with no duplicates.
bool canonical_less(const Monomial& a, const Monomial& b);

struct Dictionary {
    int ambient_dim = 0;            // number of variables N
    std::vector<Monomial> terms;    // canonical order, deduplicated

    std::size_t size() const { return terms.size(); }

    friend bool operator==(const Dictionary& a, const Dictionary& b) = default;
};

// Dictionary of features evaluated along a trajectory: one row per term,
// one column per time step, paired with the dictionary that produced it.
struct FeatureMatrix {
    Eigen::MatrixXd values;  // K x T
    Dictionary dict;
};

// {1, x1, ..., xN}. Rejects dim < 1.
Dictionary unity_set(int dim);

// Pairwise products of two dictionaries over the same ambient dimension
// (exponent vectors add), deduplicated and canonically ordered.
Dictionary expand(const Dictionary& a, const Dictionary& b);

// All monomials of total degree <= max_degree. Throws when the size would
// exceed `cap` terms.
Dictionary full_dictionary(int dim, int max_degree, std::size_t cap = 1'000'000);

// binomial(dim + max_degree, max_degree), with overflow reported as an error
// rather than wrapping.
std::uint64_t dictionary_size(int dim, int max_degree);

// Evaluate every term on sample rows [row_begin, row_end) of `data`
// (T x N, one row per time step). 0^0 is treated as 1, so the constant
// term yields an all-ones row. Negative row_end means "to the end".
FeatureMatrix evaluate(const Dictionary& dict, const Eigen::MatrixXd& data,
                       long row_begin = 0, long row_end = -1);

// Evaluate every term at a single state vector.
Eigen::VectorXd evaluate_at(const Dictionary& dict, const Eigen::VectorXd& x);

// Text form: first line "dim=N", then one term per line as comma-separated
// exponents "e1,e2,...,eN".
std::string serialize(const Dictionary& dict);
Dictionary parse_dictionary(std::istream& in);
Dictionary parse_dictionary(const std::string& text);

// Human-readable monomial, e.g. "1", "x2", "x1^2·x3".
std::string term_name(const Monomial& m);

} // namespace isindy
