#include "kacm/digest.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace kacm {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex_digest(std::uint64_t d) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
    return buf;
}

std::vector<std::pair<RevuzMeasure, int>> group_measures(const std::vector<RevuzMeasure>& measures) {
    std::vector<std::pair<RevuzMeasure, int>> out;
    for (const auto& m : measures) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == m; });
        if (it == out.end())
            out.emplace_back(m, 1);
        else
            ++it->second;
    }
    return out;
}

std::uint64_t product_problem_digest(const TransitionKernel& k,
                                     const std::vector<std::pair<RevuzMeasure, int>>& factors,
                                     const TerminalFunction& terminal, double x, double t) {
    std::vector<std::string> parts;
    for (const auto& [mu, power] : factors) {
        if (power == 0) continue;
        parts.push_back(mu.describe() + "^" + std::to_string(power));
    }
    std::sort(parts.begin(), parts.end());
    std::ostringstream os;
    os.precision(17);
    os << k.name() << "|";
    for (const auto& p : parts) os << p << ";";
    os << "|" << terminal.describe() << "|x=" << x << "|t=" << t;
    return fnv1a64(os.str());
}

}  // namespace kacm
