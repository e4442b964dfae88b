#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isindy/errors.hpp"
#include "isindy/io.hpp"

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace isindy;

namespace {

struct TempDir {
    std::filesystem::path dir;
    TempDir() {
        dir = std::filesystem::temp_directory_path() /
              ("isindy_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() { std::filesystem::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

bool bit_equal(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

} // namespace

TEST_CASE("doubles survive text round trips bit-exactly") {
    const double values[] = {0.1,
                             1.0 / 3.0,
                             5e-324,            // smallest subnormal
                             1.7976931348623157e308,
                             -0.0,
                             123456789.123456789,
                             -2.2250738585072014e-308};
    for (double v : values) {
        const double back = parse_double(fmt_double(v), "test");
        CHECK(bit_equal(v, back));
    }
    CHECK(parse_double("inf", "test") == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(parse_double("1,5", "test"), data_error);
    CHECK_THROWS_AS(parse_double("abc", "test"), data_error);
}

TEST_CASE("csv round trip preserves values and labels") {
    TempDir tmp;
    TimeSeries ts;
    ts.samples.resize(3, 2);
    ts.samples << 0.1, -0.0,
                  5e-324, 1e308,
                  1.0 / 3.0, -7.25;
    ts.labels = {"alpha", "beta"};
    const std::string path = tmp.path("round.csv");
    write_csv(ts, path);
    const TimeSeries back = read_csv(path);
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 2);
    CHECK(back.labels == ts.labels);
    for (long t = 0; t < 3; ++t)
        for (long c = 0; c < 2; ++c)
            CHECK(bit_equal(back.samples(t, c), ts.samples(t, c)));

    // Written files use LF endings only.
    std::ifstream in(path, std::ios::binary);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(raw.find('\r') == std::string::npos);
}

TEST_CASE("csv reader accepts CRLF and headerless files") {
    TempDir tmp;
    const std::string path = tmp.path("crlf.csv");
    write_file(path, "1.5,2\r\n-3,4e2\r\n");
    const TimeSeries ts = read_csv(path);
    REQUIRE(ts.rows() == 2);
    REQUIRE(ts.cols() == 2);
    CHECK(ts.labels.empty());
    CHECK(ts.samples(0, 0) == 1.5);
    CHECK(ts.samples(1, 1) == 400.0);
}

TEST_CASE("csv reader diagnoses malformed input") {
    TempDir tmp;
    const std::string path = tmp.path("bad.csv");

    write_file(path, "");
    CHECK_THROWS_AS(read_csv(path), data_error);

    write_file(path, "a,b\n");
    CHECK_THROWS_AS(read_csv(path), data_error);  // header but no data

    write_file(path, "1,2\n3\n");
    CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("row 2"), data_error);

    write_file(path, "1,2\n3,nan\n");
    CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("column 2"), data_error);

    write_file(path, "1,2\n3,oops\n");
    CHECK_THROWS_AS(read_csv(path), data_error);

    CHECK_THROWS_AS(read_csv(tmp.path("missing.csv")), data_error);
}

TEST_CASE("empty series are rejected on write") {
    TempDir tmp;
    TimeSeries ts;
    CHECK_THROWS_AS(write_csv(ts, tmp.path("empty.csv")), data_error);
    ts.samples.resize(1, 1);
    ts.samples(0, 0) = 1.0;
    ts.labels = {"a", "b"};
    CHECK_THROWS_AS(write_csv(ts, tmp.path("mislabeled.csv")), data_error);
}

TEST_CASE("fingerprint tracks content") {
    TimeSeries a;
    a.samples.resize(2, 2);
    a.samples << 1.0, 2.0, 3.0, 4.0;
    TimeSeries b = a;
    CHECK(fingerprint(a) == fingerprint(b));
    b.samples(1, 1) = 4.0000001;
    CHECK(fingerprint(a) != fingerprint(b));
}

TEST_CASE("config parser handles comments, lists, and whitespace") {
    const std::string text =
        "# fit settings\n"
        "engine = conventional\n"
        "  beta=0.25   # inline comment\n"
        "S = 3\n"
        "tau = 1e-3\n"
        "beta_grid = [0.001, 0.01, 0.1]\n"
        "N_grid = [2,4,6]\n"
        "debias = false\n"
        "sweep = beta\n"
        "out_results = /tmp/results.csv\n"
        "\n"
        "seed = 42\n";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.engine == "conventional");
    CHECK(cfg.fit.beta == 0.25);
    CHECK(cfg.fit.S == 3);
    CHECK(cfg.fit.survivor_tol == 1e-3);
    REQUIRE(cfg.beta_grid.size() == 3);
    CHECK(cfg.beta_grid[1] == 0.01);
    REQUIRE(cfg.n_grid.size() == 3);
    CHECK(cfg.n_grid[2] == 6);
    CHECK_FALSE(cfg.fit.debias);
    CHECK(cfg.sweep == "beta");
    CHECK(cfg.out_results == "/tmp/results.csv");
    CHECK(cfg.seed == 42);
}

TEST_CASE("config keys are order-independent and defaults hold") {
    const RunConfig a = parse_config("beta = 0.5\nS = 2\n");
    const RunConfig b = parse_config("S = 2\nbeta = 0.5\n");
    CHECK(a.fit.beta == b.fit.beta);
    CHECK(a.fit.S == b.fit.S);

    const RunConfig d = parse_config("");
    CHECK(d.fit.S == 4);
    CHECK(d.fit.beta == 0.01);
    CHECK(d.fit.survivor_tol == 1e-6);
    CHECK(d.fit.debias);
    CHECK(d.fit.per_dimension);
    CHECK(d.engine == "iterative");
    CHECK(d.format == "csv");
}

TEST_CASE("config errors name the offending key") {
    CHECK_THROWS_WITH_AS(parse_config("betta = 1\n"), doctest::Contains("betta"), data_error);
    CHECK_THROWS_WITH_AS(parse_config("beta = fast\n"), doctest::Contains("beta"), data_error);
    CHECK_THROWS_WITH_AS(parse_config("S = 2.5\n"), doctest::Contains("S"), data_error);
    CHECK_THROWS_WITH_AS(parse_config("beta_grid = 0.1\n"), doctest::Contains("beta_grid"),
                         data_error);
    CHECK_THROWS_WITH_AS(parse_config("debias = maybe\n"), doctest::Contains("debias"),
                         data_error);
    CHECK_THROWS_AS(parse_config("justakey\n"), data_error);
    CHECK_THROWS_AS(parse_config("engine = other\n"), data_error);
    CHECK_THROWS_AS(parse_config("repetitions = 0\n"), data_error);
}
