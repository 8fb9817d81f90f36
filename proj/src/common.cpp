#include "hyperrank/common.hpp"

namespace hyperrank {

std::uint64_t checked_fiber_count(VertexId n, int k) {
    if (n <= 0) throw DataError("dimension must be positive");
    if (k < 2) throw DataError("tensor order must be at least 2");
    std::uint64_t total = 1;
    const auto base = static_cast<std::uint64_t>(n);
    for (int i = 0; i < k - 1; ++i) {
        if (total > (std::uint64_t{1} << 62) / base) {
            throw DataError("fiber index overflow: n^(k-1) exceeds the 63-bit index range");
        }
        total *= base;
    }
    return total;
}

}  // namespace hyperrank
