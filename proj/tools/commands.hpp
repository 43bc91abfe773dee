#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "spiralsheet/conformal.hpp"
#include "spiralsheet/family.hpp"
#include "spiralsheet/single_spiral.hpp"
#include "spiralsheet/suite.hpp"
#include "spiralsheet/verify.hpp"

namespace spiralsheet::cli {

enum ExitCode : int { ok = 0, check_failed = 1, usage = 2, runtime = 3 };

struct RunConfig {
    std::string command;
    double a = 1.0;
    std::optional<double> mu;
    std::optional<double> g;
    std::vector<double> thetas;
    std::vector<double> gs;
    std::string frame = "spiral";
    std::array<double, 4> bounds{-1.0, 1.0, -1.0, 1.0};
    std::array<int, 2> res{11, 11};
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 1;
    double tol = 1e-10;
    std::optional<std::array<double, 2>> at;
    double t0 = 1.0;
    double t1 = 2.0;
    double dt = 1e-3;
    std::vector<complex> points;
};

struct CommandResult {
    int exit_code = ok;
    std::string output;   ///< file contents, or stdout when no --out is given
    std::string message;  ///< diagnostics for stderr
};

class UsageError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Helpers

inline std::string num(double v) {
    return fmt::format("{:.17g}", v);
}

inline unsigned thread_count() {
    if (const char* env = std::getenv("SPIRALSHEET_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) {
            return static_cast<unsigned>(n);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on contiguous chunks; fn must only write to slot i.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

/// Parses "x,y;x,y;...".
inline std::vector<complex> parse_points(const std::string& text) {
    std::vector<complex> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) {
            continue;
        }
        const auto comma = item.find(',');
        if (comma == std::string::npos) {
            throw UsageError("points must be given as x,y;x,y");
        }
        try {
            out.emplace_back(std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw UsageError("could not parse point '" + item + "'");
        }
    }
    return out;
}

/// Family described by the config; missing strengths are taken from the matching solvers.
inline SpiralFamily resolve_family(const RunConfig& cfg) {
    std::vector<double> thetas = cfg.thetas.empty() ? std::vector<double>{0.0} : cfg.thetas;
    std::vector<double> gs = cfg.gs;
    if (gs.empty() && cfg.g) {
        gs.assign(thetas.size(), *cfg.g);
    }
    if (cfg.mu && !gs.empty()) {
        return SpiralFamily(cfg.a, *cfg.mu, std::move(thetas), std::move(gs));
    }
    if (cfg.mu || !gs.empty()) {
        throw UsageError("--mu and --g/--gs must be given together");
    }
    if (thetas.size() == 1) {
        const MatchingSolution s = solve_matching(cfg.a);
        return SpiralFamily(cfg.a, s.mu, std::move(thetas), {s.g});
    }
    const FamilyMatchingSolution s = solve_family_matching(cfg.a, thetas);
    return SpiralFamily(cfg.a, s.mu, std::move(thetas), s.gs);
}

// ---------------------------------------------------------------------------
// Field samples

struct FieldSample {
    double x = 0.0;
    double y = 0.0;
    std::optional<complex> w;
    std::optional<std::int64_t> j;
    std::string flag;
};

inline FieldSample sample_spiral(double x, double y, const SpiralFamily& fam) {
    FieldSample s{x, y, std::nullopt, std::nullopt, ""};
    const complex z(x, y);
    if (z == complex(0.0, 0.0)) {
        s.flag = "origin";
        return s;
    }
    const PolarPoint p = PolarPoint::from_complex(z);
    try {
        s.w = family_velocity(p, fam);
        s.j = winding_number(p.r, p.theta, fam.a());
    } catch (const OnSpiralError&) {
        s.w.reset();
        s.j.reset();
        s.flag = "on_sheet";
    }
    return s;
}

/// In the strip frame the J column holds the slab index: the number of lines l_1..l_{M-1}
/// to the right of the point.
inline FieldSample sample_strip(double x, double y, const SpiralFamily& fam) {
    FieldSample s{x, y, std::nullopt, std::nullopt, ""};
    const StripMembership where = strip_membership(complex(x, y), fam.a(), fam.thetas());
    if (where.region == StripRegion::outside) {
        s.flag = "outside";
        return s;
    }
    if (where.region != StripRegion::interior) {
        s.flag = "on_sheet";
        return s;
    }
    s.w = family_strip_velocity(StripPoint{x, y, StripBoundary::none}, fam);
    std::int64_t slab = 0;
    for (std::size_t m = 1; m < fam.size(); ++m) {
        slab += left_of_line(x, fam.a(), fam.theta(m)) ? 1 : 0;
    }
    s.j = slab;
    return s;
}

inline FieldSample sample(double x, double y, const SpiralFamily& fam, const std::string& frame) {
    return frame == "strip" ? sample_strip(x, y, fam) : sample_spiral(x, y, fam);
}

inline std::string samples_csv(const std::vector<FieldSample>& rows) {
    std::string out = "x,y,u,v,abs_w,J,flag\n";
    for (const FieldSample& s : rows) {
        out += num(s.x) + "," + num(s.y) + ",";
        if (s.w) {
            out += num(s.w->real()) + "," + num(s.w->imag()) + "," + num(std::abs(*s.w)) + ",";
        } else {
            out += ",,,";
        }
        out += s.j ? std::to_string(*s.j) : std::string();
        out += "," + s.flag + "\n";
    }
    return out;
}

inline std::string samples_json(const std::vector<FieldSample>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const FieldSample& s : rows) {
        nlohmann::ordered_json o;
        o["x"] = s.x;
        o["y"] = s.y;
        o["u"] = s.w ? nlohmann::ordered_json(s.w->real()) : nlohmann::ordered_json(nullptr);
        o["v"] = s.w ? nlohmann::ordered_json(s.w->imag()) : nlohmann::ordered_json(nullptr);
        o["abs_w"] = s.w ? nlohmann::ordered_json(std::abs(*s.w)) : nlohmann::ordered_json(nullptr);
        o["J"] = s.j ? nlohmann::ordered_json(*s.j) : nlohmann::ordered_json(nullptr);
        o["flag"] = s.flag;
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

inline void check_frame_and_format(const RunConfig& cfg) {
    if (cfg.frame != "spiral" && cfg.frame != "strip") {
        throw UsageError("--frame must be spiral or strip");
    }
    if (cfg.format != "csv" && cfg.format != "json") {
        throw UsageError("--format must be csv or json");
    }
}

// ---------------------------------------------------------------------------
// Commands

inline CommandResult cmd_solve(const RunConfig& cfg) {
    const std::vector<double> thetas = cfg.thetas.empty() ? std::vector<double>{0.0} : cfg.thetas;
    SpiralFamily(cfg.a, 0.0, thetas, std::vector<double>(thetas.size(), 0.0));  // validates the angles
    double mu = 0.0;
    std::vector<double> gs;
    if (thetas.size() == 1) {
        const MatchingSolution s = solve_matching(cfg.a);
        mu = s.mu;
        gs = {s.g};
    } else {
        const FamilyMatchingSolution s = solve_family_matching(cfg.a, thetas);
        mu = s.mu;
        gs = s.gs;
    }
    const double norm = residual_norm(family_matching_residual(cfg.a, thetas, mu, gs));

    CommandResult r;
    if (cfg.format == "json") {
        nlohmann::ordered_json o;
        o["a"] = cfg.a;
        o["thetas"] = thetas;
        o["mu"] = mu;
        o["gs"] = gs;
        o["residual_norm"] = norm;
        r.output = o.dump(2) + "\n";
    } else {
        r.output = "mu = " + num(mu) + "\n";
        for (std::size_t m = 0; m < gs.size(); ++m) {
            r.output += fmt::format("g[{}] = {}\n", m, num(gs[m]));
        }
        r.output += "residual_norm = " + num(norm) + "\n";
    }
    if (!(norm < cfg.tol)) {
        r.exit_code = check_failed;
        r.message = fmt::format("residual norm {} exceeds tolerance {}", num(norm), num(cfg.tol));
    }
    return r;
}

inline CommandResult cmd_eval(const RunConfig& cfg) {
    check_frame_and_format(cfg);
    if (!cfg.at) {
        throw UsageError("eval needs --at x,y");
    }
    const SpiralFamily fam = resolve_family(cfg);
    const std::vector<FieldSample> rows{sample((*cfg.at)[0], (*cfg.at)[1], fam, cfg.frame)};
    return {ok, cfg.format == "json" ? samples_json(rows) : samples_csv(rows), ""};
}

inline CommandResult cmd_grid(const RunConfig& cfg) {
    check_frame_and_format(cfg);
    const auto [xmin, xmax, ymin, ymax] = cfg.bounds;
    if (!std::isfinite(xmin) || !std::isfinite(xmax) || !std::isfinite(ymin) || !std::isfinite(ymax) ||
        !(xmin < xmax) || !(ymin < ymax)) {
        throw UsageError("--bounds must be finite with xmin < xmax and ymin < ymax");
    }
    if (cfg.res[0] < 2 || cfg.res[1] < 2) {
        throw UsageError("--res needs at least 2 points per axis");
    }
    const SpiralFamily fam = resolve_family(cfg);
    const auto nx = static_cast<std::size_t>(cfg.res[0]);
    const auto ny = static_cast<std::size_t>(cfg.res[1]);
    std::vector<FieldSample> rows(nx * ny);
    // row-major from the min corner: y outer, x inner
    parallel_for(rows.size(), [&](std::size_t i) {
        const std::size_t iy = i / nx;
        const std::size_t ix = i % nx;
        const double x = xmin + (xmax - xmin) * static_cast<double>(ix) / static_cast<double>(nx - 1);
        const double y = ymin + (ymax - ymin) * static_cast<double>(iy) / static_cast<double>(ny - 1);
        rows[i] = sample(x, y, fam, cfg.frame);
    });
    return {ok, cfg.format == "json" ? samples_json(rows) : samples_csv(rows), ""};
}

inline std::string reports_json(const std::vector<ResidualReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ResidualReport& r : reports) {
        nlohmann::ordered_json o;
        o["name"] = r.name;
        o["max_abs"] = r.max_abs;
        o["rms"] = r.rms;
        o["n_samples"] = r.n_samples;
        o["tolerance"] = r.tolerance;
        o["pass"] = r.pass;
        if (!r.note.empty()) {
            o["note"] = r.note;
        }
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

inline CommandResult cmd_verify(const RunConfig& cfg) {
    const SpiralFamily fam = resolve_family(cfg);
    SuiteOptions opt;
    opt.seed = cfg.seed;
    const std::vector<ResidualReport> reports = run_default_suite(fam, opt);
    CommandResult r{ok, reports_json(reports), ""};
    std::string failing;
    for (const ResidualReport& rep : reports) {
        if (!rep.pass) {
            failing += (failing.empty() ? "" : ", ") + rep.name;
        }
    }
    if (!failing.empty()) {
        r.exit_code = check_failed;
        r.message = "failing reports: " + failing;
    }
    return r;
}

struct Trajectory {
    std::vector<std::array<double, 3>> rows;  ///< (t, x, y)
    std::string flag;
};

/// Smallest normalized distance of zeta from any spiral of the family.
inline double family_sheet_distance(complex zeta, const SpiralFamily& fam) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < fam.size(); ++l) {
        best = std::min(best, detail::sheet_distance(zeta, fam.a(), fam.theta(l)));
    }
    return best;
}

/// Classical RK4 for dz/dt = t^mu w(z / t^mu). Halts when z / t^mu comes within 1e-6
/// (normalized) of the sheet.
inline Trajectory advect_particle(complex z, const SpiralFamily& fam, double t0, double t1, double dt) {
    constexpr double exclusion = 1e-6;
    Trajectory out;
    double t = t0;
    out.rows.push_back({t, z.real(), z.imag()});
    auto near_sheet = [&](complex q, double tq) {
        const complex zeta = q / std::pow(tq, fam.mu());
        return zeta == complex(0.0, 0.0) || family_sheet_distance(zeta, fam) < exclusion;
    };
    auto velocity = [&](complex q, double tq) {
        if (near_sheet(q, tq)) {
            throw OnSpiralError("particle entered the exclusion zone", -1);
        }
        const double scale = std::pow(tq, fam.mu());
        return scale * family_velocity(PolarPoint::from_complex(q / scale), fam);
    };
    if (near_sheet(z, t)) {
        out.flag = "halted_near_sheet";
        return out;
    }
    // times are t0 + k dt with the last one clipped to t1, so rounding never adds a sliver step
    const auto steps = static_cast<std::int64_t>(std::ceil((t1 - t0) / dt * (1.0 - 1e-12)));
    for (std::int64_t k = 1; k <= steps; ++k) {
        const double t_next = k == steps ? t1 : t0 + static_cast<double>(k) * dt;
        const double h = t_next - t;
        if (!(h > 0.0) || t + h == t) {
            out.flag = "step_underflow";
            return out;
        }
        try {
            const complex k1 = velocity(z, t);
            const complex k2 = velocity(z + 0.5 * h * k1, t + 0.5 * h);
            const complex k3 = velocity(z + 0.5 * h * k2, t + 0.5 * h);
            const complex k4 = velocity(z + h * k3, t_next);
            const complex next = z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (near_sheet(next, t_next)) {
                out.flag = "halted_near_sheet";
                return out;
            }
            z = next;
        } catch (const OnSpiralError&) {
            out.flag = "halted_near_sheet";
            return out;
        }
        t = t_next;
        out.rows.push_back({t, z.real(), z.imag()});
    }
    return out;
}

inline CommandResult cmd_advect(const RunConfig& cfg) {
    check_frame_and_format(cfg);
    if (!(cfg.t0 > 0.0) || !(cfg.t1 > cfg.t0) || !(cfg.dt > 0.0)) {
        throw UsageError("advect needs 0 < t0 < t1 and dt > 0");
    }
    if (cfg.points.empty()) {
        throw UsageError("advect needs at least one point via --points");
    }
    const SpiralFamily fam = resolve_family(cfg);
    std::vector<Trajectory> paths(cfg.points.size());
    parallel_for(paths.size(), [&](std::size_t i) { paths[i] = advect_particle(cfg.points[i], fam, cfg.t0, cfg.t1, cfg.dt); });

    CommandResult r;
    if (cfg.format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < paths.size(); ++i) {
            nlohmann::ordered_json o;
            o["particle_id"] = i;
            o["flag"] = paths[i].flag;
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (const auto& row : paths[i].rows) {
                rows.push_back({row[0], row[1], row[2]});
            }
            o["rows"] = std::move(rows);
            arr.push_back(std::move(o));
        }
        r.output = arr.dump(2) + "\n";
    } else {
        r.output = "t,particle_id,x,y,flag\n";
        for (std::size_t i = 0; i < paths.size(); ++i) {
            for (std::size_t k = 0; k < paths[i].rows.size(); ++k) {
                const auto& row = paths[i].rows[k];
                const bool last = k + 1 == paths[i].rows.size();
                r.output += fmt::format("{},{},{},{},{}\n", num(row[0]), i, num(row[1]), num(row[2]),
                                        last ? paths[i].flag : std::string());
            }
        }
    }
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (!paths[i].flag.empty()) {
            r.message += fmt::format("particle {}: {}\n", i, paths[i].flag);
        }
    }
    return r;
}

/// Dispatches a parsed config; library errors become exit codes.
inline CommandResult run(const RunConfig& cfg) {
    try {
        if (!(cfg.a > 0.0) || !std::isfinite(cfg.a)) {
            throw UsageError("--a must be a finite positive number");
        }
        if (cfg.format != "csv" && cfg.format != "json") {
            throw UsageError("--format must be csv or json");
        }
        if (cfg.command == "solve") {
            return cmd_solve(cfg);
        }
        if (cfg.command == "eval") {
            return cmd_eval(cfg);
        }
        if (cfg.command == "grid") {
            return cmd_grid(cfg);
        }
        if (cfg.command == "verify") {
            return cmd_verify(cfg);
        }
        if (cfg.command == "advect") {
            return cmd_advect(cfg);
        }
        throw UsageError("unknown command '" + cfg.command + "'");
    } catch (const UsageError& e) {
        return {usage, "", e.what()};
    } catch (const InvalidArgumentError& e) {
        return {usage, "", e.what()};
    } catch (const std::exception& e) {
        return {runtime, "", e.what()};
    }
}

/// Writes through a sibling temporary file so a failed write never leaves a partial file.
inline void write_output(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".partial";
    try {
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) {
                throw Error("cannot open " + tmp.string() + " for writing");
            }
            f << contents;
            f.flush();
            if (!f) {
                throw Error("write to " + tmp.string() + " failed");
            }
        }
        fs::rename(tmp, target);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

}  // namespace spiralsheet::cli
