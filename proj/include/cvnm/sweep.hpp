#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "markers.hpp"
#include "oracles.hpp"
#include "propagation.hpp"

// Config-driven time sweeps over both reservoir topologies with CSV output.
//
// Config grammar: one `key = value` pair per line, `#` starts a comment,
// blank lines ignored. Lists are comma-separated. Keys and defaults are
// documented in the README.

namespace cvnm {

struct SweepConfig {
    ReservoirTopology topology = ReservoirTopology::Independent;
    std::vector<double> r_list{2.0};
    std::vector<double> N_list{0.0};
    double alpha = 0.1;
    double x = 10.0;
    double temperature_ratio = 100.0;
    double tau_start = 0.0;
    double tau_stop = 5.0;
    int tau_count = 201;
    PropagatorMode mode = PropagatorMode::ShortTimeApprox;
    DiscordOptions discord{};
    std::string out = "sweep.csv";
    std::string format = "csv";
    bool verify = false;
    int verify_decimation = 10;
    bool scaled_overlay = false;
    double physicality_tol = 1e-9;
    OdeOptions ode{};
    // test hook: perturbs propagated states so verify mode must fail
    bool debug_corrupt_propagator = false;

    BathSpec bath() const { return BathSpec::ohmic_lorentz_drude(x, alpha, temperature_ratio); }

    void validate() const {
        if (tau_count < 2) throw DomainError("SweepConfig: tau_count must be >= 2");
        if (!(tau_stop > tau_start)) throw DomainError("SweepConfig: tau grid must increase");
        if (tau_start < 0.0) throw DomainError("SweepConfig: tau_start must be >= 0");
        if (r_list.empty() || N_list.empty()) throw DomainError("SweepConfig: empty r/N list");
        for (double r : r_list)
            if (r < 0.0) throw DomainError("SweepConfig: r must be >= 0");
        for (double n : N_list)
            if (n < 0.0) throw DomainError("SweepConfig: N must be >= 0");
        bath();  // throws on bad alpha/x/temperature
    }
};

namespace sweep_detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(line) + ": expected a number, got '" + v + "'",
                          line);
    }
}

inline std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, line));
    }
    if (out.empty())
        throw ConfigError("config line " + std::to_string(line) + ": empty list", line);
    return out;
}

inline bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config line " + std::to_string(line) + ": expected a boolean, got '" + v + "'",
                      line);
}

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace sweep_detail

inline SweepConfig parse_config(std::istream& in) {
    SweepConfig cfg;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const std::size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = sweep_detail::trim(s);
        if (s.empty()) continue;
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line) + ": expected 'key = value'", line);
        const std::string key = sweep_detail::trim(s.substr(0, eq));
        const std::string val = sweep_detail::trim(s.substr(eq + 1));
        using namespace sweep_detail;

        if (key == "topology") {
            if (val == "independent")
                cfg.topology = ReservoirTopology::Independent;
            else if (val == "common")
                cfg.topology = ReservoirTopology::Common;
            else
                throw ConfigError("config line " + std::to_string(line) +
                                      ": topology must be 'independent' or 'common'",
                                  line);
        } else if (key == "r") {
            cfg.r_list = parse_list(val, line);
        } else if (key == "N") {
            cfg.N_list = parse_list(val, line);
        } else if (key == "alpha") {
            cfg.alpha = parse_double(val, line);
        } else if (key == "x") {
            cfg.x = parse_double(val, line);
        } else if (key == "temperature_ratio") {
            cfg.temperature_ratio = parse_double(val, line);
        } else if (key == "tau_start") {
            cfg.tau_start = parse_double(val, line);
        } else if (key == "tau_stop") {
            cfg.tau_stop = parse_double(val, line);
        } else if (key == "tau_count") {
            cfg.tau_count = static_cast<int>(parse_double(val, line));
        } else if (key == "mode") {
            if (val == "short-time")
                cfg.mode = PropagatorMode::ShortTimeApprox;
            else if (val == "exact")
                cfg.mode = PropagatorMode::ExactWeights;
            else
                throw ConfigError("config line " + std::to_string(line) +
                                      ": mode must be 'short-time' or 'exact'",
                                  line);
        } else if (key == "out") {
            cfg.out = val;
        } else if (key == "format") {
            if (val != "csv")
                throw ConfigError("config line " + std::to_string(line) + ": only csv is supported",
                                  line);
            cfg.format = val;
        } else if (key == "verify") {
            cfg.verify = parse_bool(val, line);
        } else if (key == "verify_decimation") {
            cfg.verify_decimation = static_cast<int>(parse_double(val, line));
        } else if (key == "scaled_overlay") {
            cfg.scaled_overlay = parse_bool(val, line);
        } else if (key == "discord_rho_max") {
            cfg.discord.rho_max = parse_double(val, line);
        } else if (key == "discord_grid_rho") {
            cfg.discord.grid_rho = static_cast<int>(parse_double(val, line));
        } else if (key == "discord_grid_phi") {
            cfg.discord.grid_phi = static_cast<int>(parse_double(val, line));
        } else if (key == "discord_tol") {
            cfg.discord.refine_tol = parse_double(val, line);
        } else if (key == "physicality_tol") {
            cfg.physicality_tol = parse_double(val, line);
        } else if (key == "ode_rel_tol") {
            cfg.ode.rel_tol = parse_double(val, line);
        } else if (key == "ode_abs_tol") {
            cfg.ode.abs_tol = parse_double(val, line);
        } else if (key == "ode_max_step") {
            cfg.ode.max_step = parse_double(val, line);
        } else {
            throw ConfigError("config line " + std::to_string(line) + ": unknown key '" + key + "'",
                              line);
        }
    }
    // environment override: output path only
    if (const char* env = std::getenv("CVNM_SWEEP_OUT"); env && *env) cfg.out = env;
    return cfg;
}

inline SweepConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
    return parse_config(in);
}

namespace sweep_detail {

inline CovarianceMatrix propagate(const SweepConfig& cfg, const CovarianceMatrix& s0, double tau,
                                  const BathSpec& bath) {
    CovarianceMatrix s = (cfg.topology == ReservoirTopology::Independent)
                             ? propagate_independent(s0, tau, bath, cfg.mode)
                             : propagate_common(s0, tau, bath, cfg.mode);
    if (cfg.debug_corrupt_propagator) {
        for (std::size_t i = 0; i < 4; ++i) s.m(i, i) += 0.02 * (1.0 + tau);
    }
    return s;
}

}  // namespace sweep_detail

// one sweep for a single (r, N) pair; rows ordered by tau
inline std::vector<MarkerSample> run_sweep(const SweepConfig& cfg, double r, double N) {
    cfg.validate();
    const BathSpec bath = cfg.bath();
    const CovarianceMatrix s0 = twb_state(r, N);

    std::vector<MarkerSample> rows;
    rows.reserve(cfg.tau_count);
    for (int i = 0; i < cfg.tau_count; ++i) {
        const double tau =
            cfg.tau_start + (cfg.tau_stop - cfg.tau_start) * double(i) / (cfg.tau_count - 1);
        const CovarianceMatrix s = sweep_detail::propagate(cfg, s0, tau, bath);

        const PhysicalityReport rep = validate_physical(s, cfg.physicality_tol);
        if (!rep.ok)
            throw UnphysicalStateError("run_sweep: unphysical state at tau = " +
                                           sweep_detail::format_number(tau) +
                                           ", nu_minus = " + sweep_detail::format_number(rep.nu_minus),
                                       tau, rep.nu_minus);

        MarkerSample row;
        row.tau = tau;
        row.nu_minus = rep.nu_minus;
        try {
            row.i_corr = intensity_correlations(s);
        } catch (const UndefinedMarkerError&) {
            row.i_corr.reset();
        }
        row.negativity = log_negativity(s);
        const DiscordResult d = gaussian_discord(s, cfg.discord);
        row.discord = d.discord;
        row.discord_argmin = d.argmin;
        row.discord_boundary_hit = d.boundary_hit;
        row.mutual_information = mutual_information(s);
        row.classical = row.mutual_information - row.discord;
        rows.push_back(row);
    }
    return rows;
}

inline const char* kCsvHeader =
    "tau,icorr,icorr_subshot,negativity,discord,mutual_info,classical,rho_star,phi_star,nu_minus";

// CSV: documented column set, header mandatory, LF endings, missing values empty
inline std::string to_csv(const std::vector<MarkerSample>& rows, bool scaled_overlay = false) {
    using sweep_detail::format_number;
    std::string out = kCsvHeader;
    if (scaled_overlay) out += ",icorr_scaled,negativity_scaled,discord_scaled";
    out += "\n";

    const MarkerSample* first = rows.empty() ? nullptr : &rows.front();
    for (const auto& r : rows) {
        out += format_number(r.tau);
        out += ',';
        if (r.i_corr) {
            out += format_number(*r.i_corr);
            out += ',';
            out += (*r.i_corr > 0.0 && *r.i_corr <= 1.0) ? "1" : "0";
        } else {
            out += ",";  // both icorr and the subshot flag stay empty
        }
        out += ',';
        out += format_number(r.negativity);
        out += ',';
        out += format_number(r.discord);
        out += ',';
        out += format_number(r.mutual_information);
        out += ',';
        out += format_number(r.classical);
        out += ',';
        out += format_number(r.discord_argmin.rho);
        out += ',';
        out += format_number(r.discord_argmin.phi);
        out += ',';
        out += format_number(r.nu_minus);
        if (scaled_overlay) {
            auto scaled = [&](std::optional<double> v, std::optional<double> v0) -> std::string {
                if (!v || !v0 || *v0 == 0.0) return "";
                return format_number(*v / *v0);
            };
            out += ',';
            out += scaled(r.i_corr, first ? first->i_corr : std::nullopt);
            out += ',';
            out += scaled(r.negativity, first ? std::optional<double>(first->negativity) : std::nullopt);
            out += ',';
            out += scaled(r.discord, first ? std::optional<double>(first->discord) : std::nullopt);
        }
        out += '\n';
    }
    return out;
}

// output path for one (r, N) combination; single combinations use `out` as-is
inline std::string sweep_output_path(const SweepConfig& cfg, double r, double N) {
    if (cfg.r_list.size() == 1 && cfg.N_list.size() == 1) return cfg.out;
    std::string stem = cfg.out, ext;
    const std::size_t dot = cfg.out.rfind('.');
    const std::size_t slash = cfg.out.rfind('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        stem = cfg.out.substr(0, dot);
        ext = cfg.out.substr(dot);
    }
    return stem + "_r" + sweep_detail::format_number(r) + "_N" + sweep_detail::format_number(N) + ext;
}

struct VerifyReport {
    double max_sigma_dev = 0.0;      // propagator vs ODE, entrywise
    double max_discord_dev = 0.0;    // refined discord vs dense grid, minus grid bound
    // per-marker deviations between the propagated and oracle states
    double max_icorr_dev = 0.0;
    double max_negativity_dev = 0.0;
    double max_mutual_info_dev = 0.0;
    double sigma_threshold = 0.0;
    double discord_threshold = 0.0;
    int points = 0;
    bool pass = false;
};

// rerun a decimated tau subset against the ODE and grid-discord oracles
inline VerifyReport verify_mode(const SweepConfig& cfg, double r, double N) {
    cfg.validate();
    const BathSpec bath = cfg.bath();
    const CovarianceMatrix s0 = twb_state(r, N);

    VerifyReport rep;
    // exact-weight propagation matches the equation of motion at integrator
    // precision; the short-time weights differ at first order in Gamma
    const double channel =
        (cfg.topology == ReservoirTopology::Common) ? kCommonChannelScale : 1.0;
    const double gamma_end = channel * damping_exponent(cfg.tau_stop, bath);
    const double scale0 = std::max(1.0, s0.m.max_abs());
    rep.sigma_threshold = (cfg.mode == PropagatorMode::ExactWeights)
                              ? 1e-6
                              : std::max(1e-6, 5.0 * gamma_end * (scale0 + 10.0));
    rep.discord_threshold = 1e-6;

    OracleOptions oracle;
    oracle.ode = cfg.ode;
    oracle.ode.rel_tol = std::min(cfg.ode.rel_tol, 1e-10);
    oracle.ode.abs_tol = std::min(cfg.ode.abs_tol, 1e-13);

    const int step = std::max(1, cfg.verify_decimation);
    for (int i = 0; i < cfg.tau_count; i += step) {
        const double tau =
            cfg.tau_start + (cfg.tau_stop - cfg.tau_start) * double(i) / (cfg.tau_count - 1);
        const CovarianceMatrix s = sweep_detail::propagate(cfg, s0, tau, bath);
        const CovarianceMatrix ref = ode_covariance(s0, tau, bath, cfg.topology, oracle);
        rep.max_sigma_dev = std::max(rep.max_sigma_dev, s.m.max_abs_diff(ref.m));

        // per-marker deviations against the oracle state (informational; the
        // gate is the entrywise sigma deviation these derive from)
        try {
            rep.max_icorr_dev =
                std::max(rep.max_icorr_dev,
                         std::fabs(intensity_correlations(s) - intensity_correlations(ref)));
        } catch (const UndefinedMarkerError&) {
        }
        rep.max_negativity_dev =
            std::max(rep.max_negativity_dev, std::fabs(log_negativity(s) - log_negativity(ref)));
        rep.max_mutual_info_dev = std::max(
            rep.max_mutual_info_dev, std::fabs(mutual_information(s) - mutual_information(ref)));

        // discord: refined minimizer against the dense grid, allowing for the
        // grid's own resolution around its argmin
        const DiscordResult d = gaussian_discord(s, cfg.discord);
        const GridDiscordResult grid = discord_grid_scan(s, 200, 200, cfg.discord.rho_max);
        const double dev = std::fabs(grid.discord - d.discord);
        rep.max_discord_dev =
            std::max(rep.max_discord_dev, std::max(0.0, dev - grid.resolution_bound));
        ++rep.points;
    }
    rep.pass = rep.max_sigma_dev <= rep.sigma_threshold &&
               rep.max_discord_dev <= rep.discord_threshold;
    return rep;
}

}  // namespace cvnm
