#ifndef ESCOMP_CERTIFICATE_HPP
#define ESCOMP_CERTIFICATE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "escomp/map.hpp"

namespace escomp {

enum class Verdict { pass, fail, unknown };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "unknown";
    }
}

/// Structured outcome of a numerical verification. `params` holds the inputs
/// that define the check, `values` the measured quantities the verdict is
/// based on. Insertion order is preserved so serialized certificates are
/// stable byte for byte.
struct Certificate {
    std::string type;
    MapSpec map;
    std::vector<std::pair<std::string, double>> params;
    std::size_t samples = 0;
    std::vector<std::pair<std::string, double>> values;
    std::vector<Point> counterexamples;
    Verdict verdict = Verdict::unknown;
    std::uint64_t seed = 0;

    bool passed() const { return verdict == Verdict::pass; }
};

} // namespace escomp

#endif
