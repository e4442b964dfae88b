#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isindy/dictionary.hpp"
#include "isindy/errors.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace isindy;

namespace {

Monomial mono(std::vector<int> e) { return Monomial{std::move(e)}; }

Dictionary make_dict(int dim, std::vector<std::vector<int>> exps) {
    Dictionary d;
    d.ambient_dim = dim;
    for (auto& e : exps) d.terms.push_back(mono(std::move(e)));
    std::sort(d.terms.begin(), d.terms.end(), canonical_less);
    d.terms.erase(std::unique(d.terms.begin(), d.terms.end()), d.terms.end());
    return d;
}

Dictionary random_dict(std::mt19937_64& rng, int dim) {
    std::uniform_int_distribution<int> nterms(1, 6);
    std::uniform_int_distribution<int> expo(0, 2);
    std::vector<std::vector<int>> exps;
    const int k = nterms(rng);
    for (int i = 0; i < k; ++i) {
        std::vector<int> e(static_cast<std::size_t>(dim));
        for (auto& v : e) v = expo(rng);
        exps.push_back(std::move(e));
    }
    return make_dict(dim, std::move(exps));
}

} // namespace

TEST_CASE("unity set layout and canonical order") {
    const Dictionary u2 = unity_set(2);
    REQUIRE(u2.size() == 3);
    CHECK(u2.terms[0] == mono({0, 0}));
    CHECK(u2.terms[1] == mono({0, 1}));
    CHECK(u2.terms[2] == mono({1, 0}));

    const Dictionary u1 = unity_set(1);
    REQUIRE(u1.size() == 2);
    CHECK(u1.terms[0] == mono({0}));
    CHECK(u1.terms[1] == mono({1}));

    CHECK(std::is_sorted(u2.terms.begin(), u2.terms.end(), canonical_less));
    CHECK_THROWS_AS(unity_set(0), usage_error);
}

TEST_CASE("canonical comparison orders by degree then lexicographically") {
    CHECK(canonical_less(mono({0, 1}), mono({1, 0})));
    CHECK_FALSE(canonical_less(mono({1, 0}), mono({0, 1})));
    CHECK(canonical_less(mono({1, 0}), mono({0, 2})));  // degree beats lex
    CHECK(canonical_less(mono({0, 2}), mono({1, 1})));
    CHECK_FALSE(canonical_less(mono({1, 1}), mono({1, 1})));
}

TEST_CASE("expand forms deduplicated pairwise products") {
    const Dictionary u = unity_set(2);
    const Dictionary g2 = expand(u, u);
    // {1,x2,x1} x {1,x2,x1} -> all monomials of degree <= 2.
    REQUIRE(g2.size() == 6);
    CHECK(g2 == full_dictionary(2, 2));
    CHECK(g2.terms[3] == mono({0, 2}));
    CHECK(g2.terms[4] == mono({1, 1}));
    CHECK(g2.terms[5] == mono({2, 0}));
}

TEST_CASE("expand rejects mismatched ambient dimensions") {
    CHECK_THROWS_AS(expand(unity_set(2), unity_set(3)), data_error);
}

TEST_CASE("expand is commutative and associative") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 1 + static_cast<int>(rng() % 3);
        const Dictionary a = random_dict(rng, dim);
        const Dictionary b = random_dict(rng, dim);
        const Dictionary c = random_dict(rng, dim);
        CHECK(expand(a, b) == expand(b, a));
        CHECK(expand(expand(a, b), c) == expand(a, expand(b, c)));
    }
}

TEST_CASE("repeated expansion by the unity set builds the full dictionary") {
    for (int dim : {1, 2, 3}) {
        Dictionary g = unity_set(dim);
        for (int e = 1; e <= 3; ++e) {
            g = expand(g, unity_set(dim));
            CHECK(g == full_dictionary(dim, e + 1));
        }
    }
}

TEST_CASE("dictionary_size matches binomial growth") {
    CHECK(dictionary_size(1, 0) == 1);
    CHECK(dictionary_size(3, 1) == 4);
    CHECK(dictionary_size(2, 5) == 21);
    CHECK(dictionary_size(6, 5) == 462);
    CHECK(dictionary_size(16, 5) == 20349);
    for (int n : {1, 2, 5}) {
        for (int d : {0, 1, 2, 3, 4}) {
            CHECK(full_dictionary(n, d).size() == dictionary_size(n, d));
        }
    }
}

TEST_CASE("dictionary_size reports overflow instead of wrapping") {
    CHECK_THROWS_AS(dictionary_size(100, 100), numeric_error);
}

TEST_CASE("full_dictionary honors the term cap") {
    CHECK_THROWS_AS(full_dictionary(6, 5, 100), numeric_error);
    CHECK_NOTHROW(full_dictionary(6, 5, 462));
}

TEST_CASE("evaluate computes monomial rows with 0^0 = 1") {
    Eigen::MatrixXd data(3, 2);
    data << 2.0, 3.0,
            0.0, -1.0,
            4.0, 0.5;
    const Dictionary d = full_dictionary(2, 2);
    const FeatureMatrix fm = evaluate(d, data);
    REQUIRE(fm.values.rows() == 6);
    REQUIRE(fm.values.cols() == 3);
    // Constant row is all ones, including at the zero state.
    CHECK(fm.values.row(0) == Eigen::RowVector3d(1.0, 1.0, 1.0));
    // x2 row.
    CHECK(fm.values.row(1) == Eigen::RowVector3d(3.0, -1.0, 0.5));
    // x1*x2 row.
    CHECK(fm.values.row(4) == Eigen::RowVector3d(6.0, 0.0, 2.0));
    // x1^2 row.
    CHECK(fm.values.row(5) == Eigen::RowVector3d(4.0, 0.0, 16.0));
    CHECK(fm.dict == d);
}

TEST_CASE("evaluate respects the row range") {
    Eigen::MatrixXd data(4, 1);
    data << 1.0, 2.0, 3.0, 4.0;
    const Dictionary d = unity_set(1);
    const FeatureMatrix fm = evaluate(d, data, 1, 3);
    REQUIRE(fm.values.cols() == 2);
    CHECK(fm.values(1, 0) == 2.0);
    CHECK(fm.values(1, 1) == 3.0);
    CHECK_THROWS_AS(evaluate(d, data, 3, 1), usage_error);
    CHECK_THROWS_AS(evaluate(d, data, 0, 9), usage_error);
}

TEST_CASE("evaluate rejects dimension mismatches") {
    Eigen::MatrixXd data(2, 3);
    data.setOnes();
    CHECK_THROWS_AS(evaluate(unity_set(2), data), data_error);
}

TEST_CASE("evaluate_at agrees with evaluate") {
    const Dictionary d = full_dictionary(2, 3);
    Eigen::MatrixXd data(1, 2);
    data << 2.0, 0.5;
    const FeatureMatrix fm = evaluate(d, data);
    const Eigen::VectorXd v = evaluate_at(d, Eigen::Vector2d(2.0, 0.5));
    CHECK((fm.values.col(0) - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("serialization round-trips through text") {
    const Dictionary d = full_dictionary(3, 2);
    const std::string text = serialize(d);
    CHECK(text.rfind("dim=3\n", 0) == 0);
    const Dictionary back = parse_dictionary(text);
    CHECK(back == d);
}

TEST_CASE("dictionary parser rejects malformed input") {
    CHECK_THROWS_AS(parse_dictionary(std::string("nope\n")), data_error);
    CHECK_THROWS_AS(parse_dictionary(std::string("dim=0\n")), data_error);
    CHECK_THROWS_AS(parse_dictionary(std::string("dim=2\n1\n")), data_error);
    CHECK_THROWS_AS(parse_dictionary(std::string("dim=2\n1,a\n")), data_error);
    CHECK_THROWS_AS(parse_dictionary(std::string("dim=2\n1,-1\n")), data_error);
}

TEST_CASE("term_name renders monomials") {
    CHECK(term_name(mono({0, 0})) == "1");
    CHECK(term_name(mono({0, 1})) == "x2");
    CHECK(term_name(mono({2, 1})) == "x1^2·x2");
}
