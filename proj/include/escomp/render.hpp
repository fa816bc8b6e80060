#ifndef ESCOMP_RENDER_HPP
#define ESCOMP_RENDER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "escomp/certification.hpp"
#include "escomp/limit_series.hpp"
#include "escomp/map.hpp"

namespace escomp {

/// A 2-real-parameter slice of C^2 to rasterize.
///  - re_re:   pixel (x,y) -> (x + i fixed0, y + i fixed1)   (Im z, Im w frozen)
///  - z_plane: pixel (x,y) -> (x + i y, fixed0 + i fixed1)   (w frozen)
struct SliceSpec {
    enum class Plane { re_re, z_plane };
    Plane plane = Plane::z_plane;
    double min_x = -10.0, max_x = 10.0;
    double min_y = -10.0, max_y = 10.0;
    std::size_t width = 256, height = 256;
    double fixed0 = 0.0, fixed1 = 0.0;

    void validate() const {
        if (width < 1 || height < 1) throw std::domain_error("slice: resolution must be >= 1");
        if (!(max_x > min_x) || !(max_y > min_y))
            throw std::domain_error("slice: window must have max > min per axis");
    }

    // pixel centers; row 0 is the top of the window
    Point point_at(std::size_t i, std::size_t j) const {
        const double x = min_x + (static_cast<double>(i) + 0.5) * (max_x - min_x) / static_cast<double>(width);
        const double y = max_y - (static_cast<double>(j) + 0.5) * (max_y - min_y) / static_cast<double>(height);
        if (plane == Plane::re_re) return {cplx{x, fixed0}, cplx{y, fixed1}};
        return {cplx{x, y}, cplx{fixed0, fixed1}};
    }
};

struct EscapeCell {
    std::optional<std::size_t> entry_index;
    std::optional<cplx> h1_at_entry;
};

struct SliceResult {
    SliceSpec spec;
    std::vector<EscapeCell> cells; // row-major, top-left origin

    const EscapeCell& at(std::size_t i, std::size_t j) const { return cells[j * spec.width + i]; }
};

/// Per-pixel absorbing-set membership over the slice. Pure per-pixel work
/// scheduled in row blocks; the output is identical for any thread count.
inline SliceResult render_slice(const MapSpec& m, double R, const SliceSpec& s, std::size_t n_max,
                                bool shade_h1 = false, unsigned threads = 0) {
    s.validate();
    require_admissible(m, R);
    SliceResult res{s, std::vector<EscapeCell>(s.width * s.height)};

    const auto work_rows = [&](std::size_t j0, std::size_t j1) {
        for (std::size_t j = j0; j < j1; ++j)
            for (std::size_t i = 0; i < s.width; ++i) {
                const Point p = s.point_at(i, j);
                const AbsorbingVerdict v = absorbing_membership(m, p, R, n_max);
                EscapeCell cell;
                cell.entry_index = v.entry_index;
                if (v.member() && shade_h1) {
                    const Point q = apply_n(m, p, *v.entry_index);
                    cell.h1_at_entry = limit_pair(m, q, R, 1e-6).h1.value;
                }
                res.cells[j * s.width + i] = cell;
            }
    };

    unsigned nt = threads ? threads : std::thread::hardware_concurrency();
    nt = std::max(1u, std::min<unsigned>(nt, static_cast<unsigned>(s.height)));
    if (nt == 1) {
        work_rows(0, s.height);
    } else {
        std::vector<std::thread> pool;
        const std::size_t block = (s.height + nt - 1) / nt;
        for (unsigned t = 0; t < nt; ++t) {
            const std::size_t j0 = t * block;
            const std::size_t j1 = std::min(s.height, j0 + block);
            if (j0 < j1) pool.emplace_back(work_rows, j0, j1);
        }
        for (auto& th : pool) th.join();
    }
    return res;
}

namespace detail {
inline void hsv_to_rgb(double h, double sat, double val, std::uint8_t rgb[3]) {
    h = h - std::floor(h);
    const double c = val * sat;
    const double hp = h * 6.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp)) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    const double mmin = val - c;
    rgb[0] = static_cast<std::uint8_t>(std::lround(255.0 * (r + mmin)));
    rgb[1] = static_cast<std::uint8_t>(std::lround(255.0 * (g + mmin)));
    rgb[2] = static_cast<std::uint8_t>(std::lround(255.0 * (b + mmin)));
}
} // namespace detail

/// Color map: unknown -> black; member(n) -> hue cycling with n, optionally
/// value-shaded by arg h1 at the entry point.
inline std::vector<std::uint8_t> slice_rgb(const SliceResult& res) {
    std::vector<std::uint8_t> buf(res.cells.size() * 3, 0);
    for (std::size_t k = 0; k < res.cells.size(); ++k) {
        const EscapeCell& cell = res.cells[k];
        if (!cell.entry_index) continue;
        const double hue = static_cast<double>(*cell.entry_index % 64) / 64.0;
        double val = 1.0;
        if (cell.h1_at_entry) {
            constexpr double pi = 3.14159265358979323846;
            val = 0.45 + 0.55 * (std::arg(*cell.h1_at_entry) + pi) / (2.0 * pi);
        }
        detail::hsv_to_rgb(hue, 0.85, val, &buf[3 * k]);
    }
    return buf;
}

/// Binary PPM, header "P6\n<width> <height>\n255\n", rows top to bottom.
inline void write_ppm(const SliceResult& res, std::ostream& out) {
    const auto rgb = slice_rgb(res);
    out << "P6\n" << res.spec.width << " " << res.spec.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!out) throw std::runtime_error("write_ppm: stream write failed");
}

inline void write_ppm_file(const SliceResult& res, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_ppm: cannot open '" + path + "'");
    write_ppm(res, f);
}

} // namespace escomp

#endif
