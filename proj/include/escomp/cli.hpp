#ifndef ESCOMP_CLI_HPP
#define ESCOMP_CLI_HPP

#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "escomp/certification.hpp"
#include "escomp/io.hpp"
#include "escomp/limit_series.hpp"
#include "escomp/linearization.hpp"
#include "escomp/map.hpp"
#include "escomp/render.hpp"

namespace escomp {

// Exit codes: 0 success / certificate pass, 1 certificate fail,
// 2 usage error, 3 precondition error.
namespace cli_exit {
inline constexpr int ok = 0;
inline constexpr int cert_fail = 1;
inline constexpr int usage = 2;
inline constexpr int precondition = 3;
} // namespace cli_exit

namespace detail {

struct Common {
    std::string map_str;
    double R = -1.0; // negative: derive from the map
    std::uint64_t seed = 1;
    std::string out_path;
    std::string format = "csv";
};

inline void add_common(CLI::App* cmd, Common& c, bool with_format = false) {
    cmd->add_option("--map", c.map_str, "map spec \"a=<a>;f=<A1>,<k1>[+...]\" or \"a=<a>;f=0\"")
        ->required();
    cmd->add_option("--R", c.R,
                    "half-plane threshold (default: smallest admissible for eps=0.1, rounded up to 0.1)");
    cmd->add_option("--seed", c.seed, "PRNG seed");
    cmd->add_option("--out", c.out_path, "output file (default: stdout)");
    if (with_format)
        cmd->add_option("--format", c.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
}

inline double region_of(const MapSpec& m, const Common& c) {
    if (c.R >= 0.0) return c.R;
    return std::ceil(admissible_R(m, 0.1) * 10.0) / 10.0;
}

// Writes to --out when given, the dispatch stream otherwise.
struct Sink {
    std::ostream& fallback;
    std::unique_ptr<std::ofstream> file;

    Sink(const Common& c, std::ostream& out) : fallback(out) {
        if (!c.out_path.empty()) {
            file = std::make_unique<std::ofstream>(c.out_path, std::ios::binary);
            if (!*file) throw std::runtime_error("cannot open output file '" + c.out_path + "'");
        }
    }
    std::ostream& stream() { return file ? *file : fallback; }
};

} // namespace detail

inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"certified iteration, limit functions and conjugacy for F(z,w) = (a w + f(z), z)"};
    app.require_subcommand(1);
    detail::Common c;

    auto* orbit_cmd = app.add_subcommand("orbit", "iterate and dump an orbit");
    std::string orbit_z = "6", orbit_w = "6";
    std::size_t orbit_n = 100;
    bool with_limits = false;
    double orbit_tol = 1e-10;
    detail::add_common(orbit_cmd, c, true);
    orbit_cmd->add_option("--z", orbit_z, "starting z (complex, e.g. 1+1i)");
    orbit_cmd->add_option("--w", orbit_w, "starting w");
    orbit_cmd->add_option("--n", orbit_n, "orbit length");
    orbit_cmd->add_flag("--with-limits", with_limits, "attach a certified limit pair to every point");
    orbit_cmd->add_option("--tol", orbit_tol, "limit-pair tolerance");

    auto* limit_cmd = app.add_subcommand("limitfn", "certified h1, h2 at a point of W_R");
    std::string limit_z, limit_w;
    double limit_tol = 1e-10;
    detail::add_common(limit_cmd, c, true);
    limit_cmd->add_option("--z", limit_z, "z coordinate")->required();
    limit_cmd->add_option("--w", limit_w, "w coordinate")->required();
    limit_cmd->add_option("--tol", limit_tol, "certified radius target");

    auto* conj_cmd = app.add_subcommand("conjcheck", "functional-equation residual of the conjugacy");
    std::string conj_z, conj_w;
    double conj_tol = 1e-10;
    std::size_t conj_n = 40;
    detail::add_common(conj_cmd, c);
    conj_cmd->add_option("--z", conj_z, "z coordinate")->required();
    conj_cmd->add_option("--w", conj_w, "w coordinate")->required();
    conj_cmd->add_option("--tol", conj_tol, "series tolerance");
    conj_cmd->add_option("--n", conj_n, "orders checked by the two-route comparison");

    auto* inv_cmd = app.add_subcommand("invariance", "forward invariance of W_R with escape margin");
    double inv_eps = 0.1;
    std::size_t inv_samples = 1000;
    detail::add_common(inv_cmd, c);
    inv_cmd->add_option("--eps", inv_eps, "escape margin");
    inv_cmd->add_option("--samples", inv_samples, "sample count");

    auto* growth_cmd = app.add_subcommand("growth", "growth-exponent band check");
    std::string growth_z = "6", growth_w = "6";
    double growth_eps = -1.0;
    std::size_t growth_nmax = 60;
    detail::add_common(growth_cmd, c);
    growth_cmd->add_option("--z", growth_z, "sample z");
    growth_cmd->add_option("--w", growth_w, "sample w");
    growth_cmd->add_option("--eps", growth_eps, "band margin (default min|h|/10)");
    growth_cmd->add_option("--n-max", growth_nmax, "iterations");

    auto* rouche_cmd = app.add_subcommand("rouche", "surjectivity certificate for a target value c");
    std::string rouche_c;
    double rouche_m = 10.0, rouche_tol = 1e-10;
    std::size_t rouche_samples = 256;
    bool auto_m = false;
    detail::add_common(rouche_cmd, c);
    rouche_cmd->add_option("--c", rouche_c, "target value (complex)")->required();
    rouche_cmd->add_option("--M", rouche_m, "disk scale parameter");
    rouche_cmd->add_flag("--auto-M", auto_m, "double M until the certificate passes");
    rouche_cmd->add_option("--samples", rouche_samples, "boundary samples");
    rouche_cmd->add_option("--tol", rouche_tol, "series tolerance");

    auto* absorb_cmd = app.add_subcommand("absorb", "absorbing-set membership by forward iteration");
    std::string absorb_z, absorb_w;
    std::size_t absorb_nmax = 100;
    detail::add_common(absorb_cmd, c);
    absorb_cmd->add_option("--z", absorb_z, "z coordinate")->required();
    absorb_cmd->add_option("--w", absorb_w, "w coordinate")->required();
    absorb_cmd->add_option("--n-max", absorb_nmax, "forward search depth");

    auto* render_cmd = app.add_subcommand("render", "escape-time slice image (binary PPM)");
    std::vector<double> window{-10.0, 10.0, -10.0, 10.0};
    std::vector<double> fixed{6.0, 0.0};
    std::string plane = "z", res_str = "256x256";
    std::size_t render_nmax = 100;
    bool shade = false;
    detail::add_common(render_cmd, c);
    render_cmd->add_option("--plane", plane, "z (w frozen) | rere (Im z, Im w frozen)")
        ->check(CLI::IsMember({"z", "rere"}));
    render_cmd->add_option("--window", window, "min_x,max_x,min_y,max_y")->delimiter(',')->expected(4);
    render_cmd->add_option("--res", res_str, "WIDTHxHEIGHT");
    render_cmd->add_option("--fixed", fixed, "frozen coordinates (z: Re w,Im w; rere: Im z,Im w)")
        ->delimiter(',')
        ->expected(2);
    render_cmd->add_option("--n-max", render_nmax, "membership search depth");
    render_cmd->add_flag("--shade", shade, "shade member pixels by arg h1 at entry");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help() << std::flush;
        return cli_exit::ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return cli_exit::usage;
    }

    try {
        const MapSpec m = map_from_string(c.map_str);
        const double R = detail::region_of(m, c);
        const DumpFormat fmt = c.format == "json" ? DumpFormat::jsonl : DumpFormat::csv;

        if (*orbit_cmd) {
            detail::Sink sink(c, out);
            const Point p{parse_complex(orbit_z), parse_complex(orbit_w)};
            const Orbit o = iterate_orbit(m, p, orbit_n);
            if (with_limits) {
                std::vector<LimitPair> pairs;
                pairs.reserve(o.points.size());
                for (const Point& q : o.points) pairs.push_back(limit_pair(m, q, R, orbit_tol));
                dump_orbit(o, sink.stream(), fmt, &pairs);
            } else {
                dump_orbit(o, sink.stream(), fmt);
            }
            return cli_exit::ok;
        }
        if (*limit_cmd) {
            detail::Sink sink(c, out);
            const Point p{parse_complex(limit_z), parse_complex(limit_w)};
            const LimitPair lp = limit_pair(m, p, R, limit_tol);
            if (fmt == DumpFormat::csv)
                sink.stream() << limit_pair_csv(lp);
            else
                sink.stream() << to_json(lp).dump(2) << "\n";
            return cli_exit::ok;
        }
        if (*conj_cmd) {
            detail::Sink sink(c, out);
            const Point p{parse_complex(conj_z), parse_complex(conj_w)};
            const double residual = conjugacy_residual(m, p, R, conj_tol);
            const ConjugacyResult cr = phi(m, p, R, conj_tol);
            double route_gap = 0.0;
            for (std::size_t n = 0; n <= conj_n; ++n) {
                const Point via_series = phi_n(m, p, n);
                const Point composed = linear_apply(m.a, apply_n(m, p, n), -static_cast<long long>(n));
                route_gap = std::max(route_gap, distance(via_series, composed));
            }
            const double bound = cr.z.err + cr.w.err + 1e-9 * (1.0 + norm(p));
            const bool pass = residual <= bound && route_gap <= 1e-9 * (1.0 + norm(p));
            nlohmann::ordered_json j{{"residual", residual},
                                     {"residual_bound", bound},
                                     {"route_gap_max", route_gap},
                                     {"extension_depth", cr.extension_depth},
                                     {"verdict", pass ? "pass" : "fail"}};
            sink.stream() << j.dump(2) << "\n";
            return pass ? cli_exit::ok : cli_exit::cert_fail;
        }
        if (*inv_cmd) {
            detail::Sink sink(c, out);
            const Certificate cert = invariance_check(m, R, inv_eps, inv_samples, c.seed);
            sink.stream() << to_json(cert).dump(2) << "\n";
            return cert.passed() ? cli_exit::ok : cli_exit::cert_fail;
        }
        if (*growth_cmd) {
            detail::Sink sink(c, out);
            const Point p{parse_complex(growth_z), parse_complex(growth_w)};
            const GrowthReport rep = growth_check(
                m, {p}, R, growth_eps < 0 ? std::nullopt : std::optional<double>(growth_eps),
                growth_nmax);
            sink.stream() << to_json(as_certificate(rep, m, R, 1, growth_nmax, c.seed)).dump(2) << "\n";
            return rep.verdict == Verdict::pass ? cli_exit::ok : cli_exit::cert_fail;
        }
        if (*rouche_cmd) {
            detail::Sink sink(c, out);
            const cplx target = parse_complex(rouche_c);
            const RoucheCertificate rc =
                auto_m ? rouche_certificate_auto_m(m, target, R, rouche_m, rouche_samples, rouche_tol)
                       : rouche_certificate(m, target, R, rouche_m, rouche_samples, rouche_tol);
            auto j = to_json(as_certificate(rc, m, target, R, c.seed));
            if (!rc.note.empty()) j["values"]["note"] = rc.note;
            sink.stream() << j.dump(2) << "\n";
            return rc.passed() ? cli_exit::ok : cli_exit::cert_fail;
        }
        if (*absorb_cmd) {
            detail::Sink sink(c, out);
            const Point p{parse_complex(absorb_z), parse_complex(absorb_w)};
            const AbsorbingVerdict v = absorbing_membership(m, p, R, absorb_nmax);
            nlohmann::ordered_json j{{"status", v.member() ? "member" : "unknown"},
                                     {"checked", v.checked}};
            if (v.member()) j["entry_index"] = *v.entry_index;
            sink.stream() << j.dump(2) << "\n";
            return v.member() ? cli_exit::ok : cli_exit::cert_fail;
        }
        if (*render_cmd) {
            if (c.out_path.empty()) throw CLI::ValidationError("render", "--out is required");
            SliceSpec s;
            s.plane = plane == "rere" ? SliceSpec::Plane::re_re : SliceSpec::Plane::z_plane;
            s.min_x = window[0];
            s.max_x = window[1];
            s.min_y = window[2];
            s.max_y = window[3];
            const auto xpos = res_str.find('x');
            if (xpos == std::string::npos)
                throw CLI::ValidationError("render", "--res must be WIDTHxHEIGHT");
            s.width = std::strtoull(res_str.c_str(), nullptr, 10);
            s.height = std::strtoull(res_str.c_str() + xpos + 1, nullptr, 10);
            s.fixed0 = fixed[0];
            s.fixed1 = fixed[1];
            const SliceResult img = render_slice(m, R, s, render_nmax, shade);
            write_ppm_file(img, c.out_path);
            err << "wrote " << c.out_path << " (" << s.width << "x" << s.height << ")\n";
            return cli_exit::ok;
        }
        err << "usage error: no subcommand\n";
        return cli_exit::usage;
    } catch (const CLI::Error& e) {
        err << "usage error: " << e.what() << "\n";
        return cli_exit::usage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return cli_exit::usage;
    } catch (const std::domain_error& e) {
        err << "precondition error: " << e.what() << "\n";
        return cli_exit::precondition;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return cli_exit::precondition;
    }
}

inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_dispatch(args, out, err);
}

} // namespace escomp

#endif
