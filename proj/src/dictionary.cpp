#include "isindy/dictionary.hpp"
#include "isindy/errors.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>

namespace isindy {

int Monomial::degree() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
}

bool canonical_less(const Monomial& a, const Monomial& b) {
    const int da = a.degree();
    const int db = b.degree();
    if (da != db) return da < db;
    return a.exponents < b.exponents;
}

namespace {

void canonicalize(Dictionary& d) {
    std::sort(d.terms.begin(), d.terms.end(), canonical_less);
    d.terms.erase(std::unique(d.terms.begin(), d.terms.end()), d.terms.end());
}

} // namespace

Dictionary unity_set(int dim) {
    if (dim < 1) throw usage_error("unity_set: dimension must be >= 1, got " + std::to_string(dim));
    Dictionary d;
    d.ambient_dim = dim;
    d.terms.reserve(static_cast<std::size_t>(dim) + 1);
    d.terms.push_back(Monomial{std::vector<int>(dim, 0)});
    // Degree-one terms in canonical (lexicographic) order: (0,...,0,1) first.
    for (int i = dim - 1; i >= 0; --i) {
        Monomial m{std::vector<int>(dim, 0)};
        m.exponents[static_cast<std::size_t>(i)] = 1;
        d.terms.push_back(std::move(m));
    }
    return d;
}

Dictionary expand(const Dictionary& a, const Dictionary& b) {
    if (a.ambient_dim != b.ambient_dim)
        throw data_error("expand: ambient dimensions differ (" + std::to_string(a.ambient_dim) +
                         " vs " + std::to_string(b.ambient_dim) + ")");
    Dictionary out;
    out.ambient_dim = a.ambient_dim;
    out.terms.reserve(a.terms.size() * b.terms.size());
    const std::size_t n = static_cast<std::size_t>(out.ambient_dim);
    for (const auto& ma : a.terms) {
        for (const auto& mb : b.terms) {
            Monomial m{std::vector<int>(n)};
            for (std::size_t i = 0; i < n; ++i)
                m.exponents[i] = ma.exponents[i] + mb.exponents[i];
            out.terms.push_back(std::move(m));
        }
    }
    canonicalize(out);
    return out;
}

std::uint64_t dictionary_size(int dim, int max_degree) {
    if (dim < 1) throw usage_error("dictionary_size: dimension must be >= 1");
    if (max_degree < 0) throw usage_error("dictionary_size: degree must be >= 0");
    // binomial(dim + d, d) computed incrementally; each partial product is
    // itself a binomial coefficient, so the division is exact.
    unsigned __int128 c = 1;
    for (int i = 1; i <= max_degree; ++i) {
        c = c * static_cast<unsigned __int128>(dim + i) / static_cast<unsigned __int128>(i);
        if (c > std::numeric_limits<std::uint64_t>::max())
            throw numeric_error("dictionary_size: binomial(" + std::to_string(dim + max_degree) +
                                "," + std::to_string(max_degree) + ") overflows 64 bits");
    }
    return static_cast<std::uint64_t>(c);
}

Dictionary full_dictionary(int dim, int max_degree, std::size_t cap) {
    if (dim < 1) throw usage_error("full_dictionary: dimension must be >= 1, got " + std::to_string(dim));
    if (max_degree < 0) throw usage_error("full_dictionary: degree must be >= 0");
    const std::uint64_t size = dictionary_size(dim, max_degree);
    if (size > cap)
        throw numeric_error("full_dictionary: " + std::to_string(size) + " terms exceeds cap of " +
                            std::to_string(cap));
    Dictionary d;
    d.ambient_dim = dim;
    d.terms.reserve(static_cast<std::size_t>(size));
    // Odometer enumeration of all exponent vectors with sum <= max_degree.
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    int total = 0;
    while (true) {
        d.terms.push_back(Monomial{e});
        std::size_t i = static_cast<std::size_t>(dim);
        while (i > 0) {
            --i;
            if (total < max_degree) {
                ++e[i];
                ++total;
                break;
            }
            total -= e[i];
            e[i] = 0;
            if (i == 0) {
                canonicalize(d);
                return d;
            }
        }
    }
}

FeatureMatrix evaluate(const Dictionary& dict, const Eigen::MatrixXd& data,
                       long row_begin, long row_end) {
    if (row_end < 0) row_end = data.rows();
    if (row_begin < 0 || row_end > data.rows() || row_begin > row_end)
        throw usage_error("evaluate: row range [" + std::to_string(row_begin) + "," +
                          std::to_string(row_end) + ") outside 0.." + std::to_string(data.rows()));
    if (data.cols() != dict.ambient_dim)
        throw data_error("evaluate: data has " + std::to_string(data.cols()) +
                         " columns but dictionary expects " + std::to_string(dict.ambient_dim));
    const long T = row_end - row_begin;
    const std::size_t n = static_cast<std::size_t>(dict.ambient_dim);

    // Power table per variable up to its maximum exponent in the dictionary.
    std::vector<int> max_exp(n, 0);
    for (const auto& m : dict.terms)
        for (std::size_t i = 0; i < n; ++i)
            max_exp[i] = std::max(max_exp[i], m.exponents[i]);

    std::vector<std::vector<Eigen::ArrayXd>> pow(n);
    for (std::size_t i = 0; i < n; ++i) {
        pow[i].resize(static_cast<std::size_t>(max_exp[i]) + 1);
        pow[i][0] = Eigen::ArrayXd::Ones(T);
        for (int e = 1; e <= max_exp[i]; ++e)
            pow[i][static_cast<std::size_t>(e)] =
                pow[i][static_cast<std::size_t>(e - 1)] *
                data.col(static_cast<long>(i)).segment(row_begin, T).array();
    }

    FeatureMatrix fm;
    fm.dict = dict;
    fm.values.resize(static_cast<long>(dict.terms.size()), T);
    for (std::size_t k = 0; k < dict.terms.size(); ++k) {
        Eigen::ArrayXd row = Eigen::ArrayXd::Ones(T);
        for (std::size_t i = 0; i < n; ++i) {
            const int e = dict.terms[k].exponents[i];
            if (e > 0) row *= pow[i][static_cast<std::size_t>(e)];
        }
        fm.values.row(static_cast<long>(k)) = row.transpose();
    }
    return fm;
}

Eigen::VectorXd evaluate_at(const Dictionary& dict, const Eigen::VectorXd& x) {
    if (x.size() != dict.ambient_dim)
        throw data_error("evaluate_at: state has " + std::to_string(x.size()) +
                         " entries but dictionary expects " + std::to_string(dict.ambient_dim));
    Eigen::VectorXd out(static_cast<long>(dict.terms.size()));
    for (std::size_t k = 0; k < dict.terms.size(); ++k) {
        double v = 1.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(dict.ambient_dim); ++i) {
            const int e = dict.terms[k].exponents[i];
            for (int j = 0; j < e; ++j) v *= x(static_cast<long>(i));
        }
        out(static_cast<long>(k)) = v;
    }
    return out;
}

std::string serialize(const Dictionary& dict) {
    std::string out = "dim=" + std::to_string(dict.ambient_dim) + "\n";
    for (const auto& m : dict.terms) {
        for (std::size_t i = 0; i < m.exponents.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(m.exponents[i]);
        }
        out += '\n';
    }
    return out;
}

Dictionary parse_dictionary(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw data_error("dictionary: missing header line");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("dim=", 0) != 0)
        throw data_error("dictionary: expected 'dim=N' header, got '" + line + "'");
    int dim = 0;
    {
        const char* b = line.data() + 4;
        const char* e = line.data() + line.size();
        auto [p, ec] = std::from_chars(b, e, dim);
        if (ec != std::errc{} || p != e || dim < 1)
            throw data_error("dictionary: bad dimension in header '" + line + "'");
    }
    Dictionary d;
    d.ambient_dim = dim;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) break;  // blank line terminates the block
        Monomial m;
        m.exponents.reserve(static_cast<std::size_t>(dim));
        const char* p = line.data();
        const char* e = line.data() + line.size();
        while (true) {
            int v = 0;
            auto [q, ec] = std::from_chars(p, e, v);
            if (ec != std::errc{} || v < 0)
                throw data_error("dictionary: bad exponent in line '" + line + "'");
            m.exponents.push_back(v);
            p = q;
            if (p == e) break;
            if (*p != ',')
                throw data_error("dictionary: expected ',' in line '" + line + "'");
            ++p;
        }
        if (m.exponents.size() != static_cast<std::size_t>(dim))
            throw data_error("dictionary: line '" + line + "' has " +
                             std::to_string(m.exponents.size()) + " exponents, expected " +
                             std::to_string(dim));
        d.terms.push_back(std::move(m));
    }
    return d;
}

Dictionary parse_dictionary(const std::string& text) {
    std::istringstream in(text);
    return parse_dictionary(in);
}

std::string term_name(const Monomial& m) {
    std::string out;
    for (std::size_t i = 0; i < m.exponents.size(); ++i) {
        const int e = m.exponents[i];
        if (e == 0) continue;
        if (!out.empty()) out += "·";
        out += "x" + std::to_string(i + 1);
        if (e > 1) out += "^" + std::to_string(e);
    }
    return out.empty() ? "1" : out;
}

} // namespace isindy
