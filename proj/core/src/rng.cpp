#include "cda/rng.hpp"

#include <algorithm>
#include <unordered_set>

namespace cda {

std::vector<std::int64_t> sample_without_replacement(std::int64_t n, std::int64_t k, Rng& rng) {
    std::unordered_set<std::int64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(k) * 2);
    for (std::int64_t j = n - k; j < n; ++j) {
        std::uniform_int_distribution<std::int64_t> pick(0, j);
        const std::int64_t t = pick(rng);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::int64_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace cda
