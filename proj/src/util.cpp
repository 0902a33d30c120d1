#include "cem/util.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace cem {

int worker_limit() {
    if (const char* env = std::getenv("COMPACTEM_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

void parallel_for(int count, const std::function<void(int)>& fn, int workers) {
    if (count <= 0) return;
    int w = workers > 0 ? workers : worker_limit();
    w = std::min(w, count);
    if (w <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(w);
    for (int t = 0; t < w; ++t) {
        pool.emplace_back([&, t]() {
            const int lo = int(std::size_t(count) * t / w);
            const int hi = int(std::size_t(count) * (t + 1) / w);
            try {
                for (int i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace cem
