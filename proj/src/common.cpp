#include "hhoea/common.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hhoea {

namespace {
int g_threads = 1;
}

void set_num_threads(int n) { g_threads = std::max(1, n); }

int num_threads() { return g_threads; }

void parallel_for(int n, const std::function<void(int)>& fn)
{
    const int nt = std::min(g_threads, n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mtx;
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lk(err_mtx);
                if (!err)
                    err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (err)
        std::rethrow_exception(err);
}

} // namespace hhoea
