#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace stablelab {

/// Runs chunk(begin, end) over a partition of [0, count) on `workers`
/// threads (hardware concurrency when 0). Work items must write only to
/// their own slots; replicate seeds derive from the item index, so results
/// do not depend on the partition.
inline void parallel_replicates(
    std::size_t count, int workers,
    const std::function<void(std::size_t, std::size_t)>& chunk) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t nw = workers > 0 ? static_cast<std::size_t>(workers)
                                 : (hw > 0 ? hw : 1);
    nw = std::min(nw, count == 0 ? std::size_t{1} : count);
    if (nw <= 1) {
        chunk(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nw);
    std::size_t base = count / nw, rem = count % nw, begin = 0;
    for (std::size_t w = 0; w < nw; ++w) {
        std::size_t len = base + (w < rem ? 1 : 0);
        pool.emplace_back(chunk, begin, begin + len);
        begin += len;
    }
    for (auto& t : pool) t.join();
}

}  // namespace stablelab
