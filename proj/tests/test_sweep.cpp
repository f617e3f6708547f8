#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cvnm/sweep.hpp"

using namespace cvnm;

namespace {
SweepConfig small_config() {
    SweepConfig cfg;
    cfg.topology = ReservoirTopology::Independent;
    cfg.r_list = {2.0};
    cfg.N_list = {0.0};
    cfg.tau_stop = 1.0;
    cfg.tau_count = 5;
    return cfg;
}
}  // namespace

TEST_CASE("config parsing") {
    std::istringstream in(
        "# sweep over the default figure window\n"
        "topology = common\n"
        "r = 0, 0.2, 0.4, 1\n"
        "N = 0\n"
        "alpha = 0.1\n"
        "x = 10\n"
        "temperature_ratio = 100\n"
        "tau_start = 0\n"
        "tau_stop = 5\n"
        "tau_count = 51\n"
        "mode = exact\n"
        "out = run.csv   # trailing comment\n"
        "scaled_overlay = true\n");
    const SweepConfig cfg = parse_config(in);
    CHECK(cfg.topology == ReservoirTopology::Common);
    CHECK(cfg.r_list.size() == 4);
    CHECK(cfg.r_list[1] == doctest::Approx(0.2));
    CHECK(cfg.mode == PropagatorMode::ExactWeights);
    CHECK(cfg.out == "run.csv");
    CHECK(cfg.scaled_overlay);
    cfg.validate();
}

TEST_CASE("config errors carry line numbers") {
    {
        std::istringstream in("topology = independent\nbananas\n");
        try {
            parse_config(in);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line == 2);
        }
    }
    {
        std::istringstream in("r = fast\n");
        CHECK_THROWS_AS(parse_config(in), ConfigError);
    }
    {
        std::istringstream in("topology = sideways\n");
        CHECK_THROWS_AS(parse_config(in), ConfigError);
    }
    {
        std::istringstream in("mystery_key = 1\n");
        try {
            parse_config(in);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line == 1);
        }
    }
}

TEST_CASE("config validation rejects bad grids") {
    SweepConfig cfg = small_config();
    cfg.tau_count = 1;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = small_config();
    cfg.tau_stop = cfg.tau_start;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = small_config();
    cfg.r_list = {-1.0};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("initial row carries the analytic marker values") {
    const SweepConfig cfg = small_config();
    const auto rows = run_sweep(cfg, 2.0, 0.0);
    REQUIRE(rows.size() == 5);
    const MarkerSample& first = rows.front();
    CHECK(first.tau == 0.0);
    REQUIRE(first.i_corr.has_value());
    CHECK(*first.i_corr == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(first.negativity == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(first.discord == doctest::Approx(entropy_f(0.5 * std::cosh(4.0))).epsilon(1e-8));
    CHECK(first.classical ==
          doctest::Approx(first.mutual_information - first.discord).epsilon(1e-12));
    for (const auto& row : rows) {
        CHECK(row.nu_minus >= 0.5 - 1e-9);
        CHECK(row.classical >= -1e-8);
        CHECK(row.discord >= 0.0);
    }
}

TEST_CASE("sweep output is deterministic") {
    const SweepConfig cfg = small_config();
    const std::string a = to_csv(run_sweep(cfg, 2.0, 0.0));
    const std::string b = to_csv(run_sweep(cfg, 2.0, 0.0));
    CHECK(a == b);
}

TEST_CASE("csv format") {
    SweepConfig cfg = small_config();
    cfg.r_list = {0.0};
    const auto rows = run_sweep(cfg, 0.0, 0.0);  // vacuum start: icorr undefined at tau = 0
    const std::string csv = to_csv(rows);

    std::istringstream lines(csv);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(header ==
          "tau,icorr,icorr_subshot,negativity,discord,mutual_info,classical,rho_star,phi_star,"
          "nu_minus");
    // missing marker becomes two adjacent empty fields: "0,,,0,..."
    CHECK(first.substr(0, 4) == "0,,,");
    CHECK(csv.find("\r") == std::string::npos);  // LF endings only
    CHECK(csv.back() == '\n');

    const std::string overlay = to_csv(rows, true);
    CHECK(overlay.find("icorr_scaled,negativity_scaled,discord_scaled") != std::string::npos);
}

TEST_CASE("per-combination output paths") {
    SweepConfig cfg = small_config();
    CHECK(sweep_output_path(cfg, 2.0, 0.0) == "sweep.csv");
    cfg.r_list = {0.0, 1.0};
    cfg.out = "data/run.csv";
    CHECK(sweep_output_path(cfg, 1.0, 0.5) == "data/run_r1_N0.5.csv");
}

TEST_CASE("verify mode passes on defaults and fails on a corrupted propagator") {
    SweepConfig cfg = small_config();
    cfg.tau_count = 5;
    cfg.verify_decimation = 2;

    const VerifyReport ok = verify_mode(cfg, 2.0, 0.0);
    CHECK(ok.pass);
    CHECK(ok.points == 3);

    cfg.debug_corrupt_propagator = true;
    const VerifyReport bad = verify_mode(cfg, 2.0, 0.0);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("verify mode in the closed-system limit") {
    SweepConfig cfg = small_config();
    cfg.alpha = 0.0;
    cfg.mode = PropagatorMode::ExactWeights;
    cfg.tau_count = 3;
    cfg.verify_decimation = 1;
    const VerifyReport rep = verify_mode(cfg, 2.0, 0.0);
    CHECK(rep.max_sigma_dev < 1e-10);
    CHECK(rep.pass);
}

TEST_CASE("environment variable overrides the output path only") {
    setenv("CVNM_SWEEP_OUT", "/tmp/env_override.csv", 1);
    std::istringstream in("out = from_config.csv\ntau_stop = 2\n");
    const SweepConfig cfg = parse_config(in);
    CHECK(cfg.out == "/tmp/env_override.csv");
    CHECK(cfg.tau_stop == doctest::Approx(2.0));
    unsetenv("CVNM_SWEEP_OUT");
}
