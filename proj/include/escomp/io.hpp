#ifndef ESCOMP_IO_HPP
#define ESCOMP_IO_HPP

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "escomp/certificate.hpp"
#include "escomp/certification.hpp"
#include "escomp/limit_series.hpp"
#include "escomp/map.hpp"

namespace escomp {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Complex literals of the form "1", "-1", "1+1i", "-3+0.5i", "0.1i", "-i".

inline cplx parse_complex(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (ch != ' ') s += ch;
    if (s.empty()) throw std::invalid_argument("complex: empty literal");

    const auto parse_part = [](const std::string& t) -> double {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size())
            throw std::invalid_argument("complex: malformed literal '" + t + "'");
        return v;
    };

    if (s.back() != 'i') return {parse_part(s), 0.0};
    s.pop_back();
    // split at the last +/- that is not a leading sign or an exponent sign
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos) return {0.0, parse_part(s)};
    return {parse_part(s.substr(0, split)), parse_part(s.substr(split))};
}

inline std::string format_complex(cplx v) {
    std::string s = fmt17(v.real());
    if (v.imag() >= 0.0 || std::isnan(v.imag())) s += "+";
    return s + fmt17(v.imag()) + "i";
}

// ---------------------------------------------------------------------------
// Orbit dumps. CSV columns are fixed:
//   n,re_z,im_z,re_w,im_w,norm,re_ratio,im_ratio,u_n
// with 17 significant digits, so parsing reproduces every double exactly.
// When limit pairs are attached, the record columns
//   re_h1,im_h1,err_h1,re_h2,im_h2,err_h2,N_used
// follow. JSON-lines output carries the same fields by name.

enum class DumpFormat { csv, jsonl };

inline void dump_orbit(const Orbit& o, std::ostream& out, DumpFormat fmt = DumpFormat::csv,
                       const std::vector<LimitPair>* pairs = nullptr) {
    if (pairs && pairs->size() != o.points.size())
        throw std::invalid_argument("dump_orbit: one limit pair per orbit point expected");
    if (fmt == DumpFormat::csv) {
        out << "n,re_z,im_z,re_w,im_w,norm,re_ratio,im_ratio,u_n";
        if (pairs) out << ",re_h1,im_h1,err_h1,re_h2,im_h2,err_h2,N_used";
        out << "\n";
    }
    for (std::size_t n = 0; n < o.points.size(); ++n) {
        const Point& p = o.points[n];
        const cplx r = o.ratio(n);
        const double un = n == 0 ? std::numeric_limits<double>::quiet_NaN()
                                 : -p.z.real() / static_cast<double>(n);
        if (fmt == DumpFormat::csv) {
            out << n << ',' << fmt17(p.z.real()) << ',' << fmt17(p.z.imag()) << ','
                << fmt17(p.w.real()) << ',' << fmt17(p.w.imag()) << ',' << fmt17(norm(p)) << ','
                << fmt17(r.real()) << ',' << fmt17(r.imag()) << ',' << fmt17(un);
            if (pairs) {
                const LimitPair& lp = (*pairs)[n];
                out << ',' << fmt17(lp.h1.value.real()) << ',' << fmt17(lp.h1.value.imag()) << ','
                    << fmt17(lp.h1.err) << ',' << fmt17(lp.h2.value.real()) << ','
                    << fmt17(lp.h2.value.imag()) << ',' << fmt17(lp.h2.err) << ',' << lp.n_used;
            }
            out << "\n";
        } else {
            nlohmann::ordered_json row{{"n", n},
                                       {"re_z", p.z.real()},
                                       {"im_z", p.z.imag()},
                                       {"re_w", p.w.real()},
                                       {"im_w", p.w.imag()},
                                       {"norm", norm(p)},
                                       {"re_ratio", r.real()},
                                       {"im_ratio", r.imag()},
                                       {"u_n", un}};
            if (pairs) {
                const LimitPair& lp = (*pairs)[n];
                row["re_h1"] = lp.h1.value.real();
                row["im_h1"] = lp.h1.value.imag();
                row["err_h1"] = lp.h1.err;
                row["re_h2"] = lp.h2.value.real();
                row["im_h2"] = lp.h2.value.imag();
                row["err_h2"] = lp.h2.err;
                row["N_used"] = lp.n_used;
            }
            out << row.dump() << "\n";
        }
    }
}

/// Reads back the points of a CSV orbit dump (header line required).
inline std::vector<Point> parse_orbit_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("n,re_z", 0) != 0)
        throw std::invalid_argument("orbit csv: missing header");
    std::vector<Point> pts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> vals;
        std::size_t col = 0;
        while (std::getline(row, cell, ',') && col < 5) {
            if (col > 0) vals.push_back(std::strtod(cell.c_str(), nullptr));
            ++col;
        }
        if (vals.size() != 4) throw std::invalid_argument("orbit csv: short row");
        pts.push_back({cplx{vals[0], vals[1]}, cplx{vals[2], vals[3]}});
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Versioned JSON schema shared by every certificate:
//   {type, map, params, samples, values, verdict, seed, tool_version}

inline nlohmann::ordered_json to_json(const Certificate& c) {
    nlohmann::ordered_json j;
    j["type"] = c.type;
    j["map"] = format_map(c.map);
    j["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.params) j["params"][k] = v;
    j["samples"] = c.samples;
    j["values"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.values) j["values"][k] = v;
    if (!c.counterexamples.empty()) {
        auto arr = nlohmann::ordered_json::array();
        for (const Point& p : c.counterexamples)
            arr.push_back({{"re_z", p.z.real()},
                           {"im_z", p.z.imag()},
                           {"re_w", p.w.real()},
                           {"im_w", p.w.imag()}});
        j["values"]["counterexamples"] = arr;
    }
    j["verdict"] = to_string(c.verdict);
    j["seed"] = c.seed;
    j["tool_version"] = kToolVersion;
    return j;
}

inline Certificate as_certificate(const RoucheCertificate& rc, const MapSpec& m, cplx c, double R,
                                  std::uint64_t seed) {
    Certificate cert;
    cert.type = "rouche";
    cert.map = m;
    cert.params = {{"re_c", c.real()},       {"im_c", c.imag()},
                   {"R", R},                 {"M", rc.M_param},
                   {"re_w0", rc.disk.w0.real()}, {"im_w0", rc.disk.w0.imag()},
                   {"delta", rc.disk.delta}};
    cert.samples = rc.boundary_samples;
    cert.values = {{"A_min", rc.A_min},
                   {"B_max", rc.B_max},
                   {"winding_h0", static_cast<double>(rc.winding_h0)},
                   {"winding_h1", static_cast<double>(rc.winding_h1)}};
    cert.verdict = rc.verdict;
    cert.seed = seed;
    return cert;
}

inline Certificate as_certificate(const GrowthReport& g, const MapSpec& m, double R,
                                  std::size_t samples, std::size_t n_max, std::uint64_t seed) {
    Certificate cert;
    cert.type = "growth";
    cert.map = m;
    cert.params = {{"R", R}, {"eps", g.eps}, {"n_max", static_cast<double>(n_max)}};
    cert.samples = samples;
    cert.values = {{"m_min", g.m_min},
                   {"M_max", g.M_max},
                   {"band_lo", g.band_lo},
                   {"band_hi", g.band_hi},
                   {"n0", static_cast<double>(g.n0)},
                   {"ratios_ok", g.ratios_ok ? 1.0 : 0.0}};
    cert.verdict = g.verdict;
    cert.seed = seed;
    return cert;
}

inline nlohmann::ordered_json to_json(const LimitPair& lp) {
    return {{"re_h1", lp.h1.value.real()}, {"im_h1", lp.h1.value.imag()},
            {"err_h1", lp.h1.err},         {"re_h2", lp.h2.value.real()},
            {"im_h2", lp.h2.value.imag()}, {"err_h2", lp.h2.err},
            {"N_used", lp.n_used}};
}

inline std::string limit_pair_csv(const LimitPair& lp) {
    std::string s = "re_h1,im_h1,err_h1,re_h2,im_h2,err_h2,N_used\n";
    s += fmt17(lp.h1.value.real()) + "," + fmt17(lp.h1.value.imag()) + "," + fmt17(lp.h1.err) +
         "," + fmt17(lp.h2.value.real()) + "," + fmt17(lp.h2.value.imag()) + "," +
         fmt17(lp.h2.err) + "," + std::to_string(lp.n_used) + "\n";
    return s;
}

} // namespace escomp

#endif
