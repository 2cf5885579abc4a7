#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "choq/experiments.hpp"

using namespace choq;
namespace fs = std::filesystem;

namespace {
std::string tmpdir(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("choq_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}
std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}
} // namespace

TEST_CASE("config validation messages cite the admissible window") {
    ExperimentConfig cfg;
    cfg.kind = "solve";
    cfg.spec.terms.push_back({1.0, 1.2});
    std::ostringstream log;
    CHECK(run_experiment(cfg, log) == 2);
    CHECK(log.str().find("admissible window") != std::string::npos);
}

TEST_CASE("config file parsing") {
    const std::string dir = tmpdir("cfg");
    const std::string path = dir + "/exp.json";
    std::ofstream(path) << R"({
        "problem": {"N": 3, "alpha": 2.0},
        "nonlinearity": [{"coeff": 1.0, "exponent": 2.0}],
        "grid": {"n": 640, "r_max": 60.0, "gamma": 2.0},
        "solver": {"tol_el": 1e-8},
        "experiment": {"kind": "constants"},
        "output": {"directory": ")" + dir + R"("}
    })";
    const auto cfg = load_config(path);
    CHECK(cfg.n == 640);
    CHECK(cfg.kind == "constants");
    CHECK(cfg.spec.terms.size() == 1);
    std::ostringstream log;
    CHECK(run_experiment(cfg, log) == 0);
    CHECK(log.str().find("s_alpha = 2.774397") != std::string::npos);
    CHECK(log.str().find("m0_tilde = 1.191731") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cache keys track the numerically relevant inputs") {
    auto g1 = make_grid(3, 60.0, 640, Stretching{2.0});
    auto g2 = make_grid(3, 60.0, 641, Stretching{2.0});
    ProblemParams p{3, 2.0, 1.0};
    NonlinearitySpec s;
    s.terms.push_back({1.0, 2.0});
    SolveConfig sc;
    const auto k1 = cache_key(p, s, *g1, sc, Frame::Original);
    CHECK(k1 == cache_key(p, s, *g1, sc, Frame::Original));
    CHECK(k1 != cache_key(p, s, *g2, sc, Frame::Original));
    ProblemParams p2 = p;
    p2.eps = 2.0;
    CHECK(k1 != cache_key(p2, s, *g1, sc, Frame::Original));
    CHECK(k1 != cache_key(p, s, *g1, sc, Frame::VFrame));
}

TEST_CASE("ground-state cache round trip with re-verification") {
    const std::string dir = tmpdir("gscache");
    auto grid = make_grid(3, 60.0, 640, Stretching{2.0});
    auto op = build_operator(grid, 2.0);
    ProblemParams p{3, 2.0, 1.0};
    NonlinearitySpec s;
    s.terms.push_back({1.0, 2.0});
    SolveConfig sc;
    GroundState gs = solve_ground_state(op, p, s, sc, Frame::Original);
    REQUIRE(gs.status == SolveStatus::Converged);
    const auto key = cache_key(p, s, *grid, sc, Frame::Original);
    cache_store(dir, key, gs, p);
    auto hit = cache_load(dir, key, op, p, s, Frame::Original);
    REQUIRE(hit.has_value());
    CHECK((hit->u.values - gs.u.values).abs().maxCoeff() == 0.0);
    CHECK(hit->energy == gs.energy);
    // corrupt the stored field: re-verification must reject it
    {
        std::ofstream os(dir + "/" + key + ".field", std::ios::app);
        os << "0 0\n";
    }
    // appended junk leaves the parsed prefix intact, so corrupt a value instead
    {
        auto text = slurp(dir + "/" + key + ".field");
        const auto pos = text.find('\n', text.size() / 2);
        text[pos - 2] = '9';
        text[pos - 3] = '9';
        std::ofstream os(dir + "/" + key + ".field");
        os << text;
    }
    auto miss = cache_load(dir, key, op, p, s, Frame::Original);
    CHECK_FALSE(miss.has_value());
    fs::remove_all(dir);
}

TEST_CASE("end-to-end determinism of the sweep artifact") {
    NonlinearitySpec s;
    s.terms.push_back({1.0, 2.0});
    ExperimentConfig cfg;
    cfg.kind = "sweep";
    cfg.spec = s;
    cfg.n = 640;
    cfg.r_max = 120.0;
    cfg.eps_min = 2e-2;
    cfg.eps_max = 1e-1;
    cfg.eps_count = 5;
    cfg.frame = "w";
    const std::string d1 = tmpdir("det1"), d2 = tmpdir("det2");
    std::ostringstream log1, log2;
    cfg.out_dir = d1;
    REQUIRE(run_experiment(cfg, log1) == 0);
    cfg.out_dir = d2;
    REQUIRE(run_experiment(cfg, log2) == 0);
    CHECK(slurp(d1 + "/sweep.csv") == slurp(d2 + "/sweep.csv"));
    CHECK(slurp(d1 + "/report.txt") == slurp(d2 + "/report.txt"));
    CHECK(slurp(d1 + "/sweep.csv").find("Converged") != std::string::npos);
    fs::remove_all(d1);
    fs::remove_all(d2);
}
