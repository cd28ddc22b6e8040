// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pagezip
{

/// Calls fn(i) for i in [0, count) on at most `parallelism` threads. Work is
/// handed out in index order; results must be written by index for stable
/// output. The first exception thrown by fn is rethrown after all workers stop.
template <typename Fn>
void parallelFor(std::size_t count, int parallelism, Fn&& fn)
{
    auto const workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(parallelism, 1)));
    if (workers <= 1)
    {
        for (auto i = std::size_t { 0 }; i < count; ++i)
            fn(i);
        return;
    }

    auto next = std::atomic<std::size_t> { 0 };
    auto failed = std::atomic<bool> { false };
    auto error = std::exception_ptr {};
    auto errorMutex = std::mutex {};
    auto worker = [&] {
        while (!failed.load())
        {
            auto const i = next.fetch_add(1);
            if (i >= count)
                return;
            try
            {
                fn(i);
            }
            catch (...)
            {
                auto const lock = std::lock_guard(errorMutex);
                if (!error)
                    error = std::current_exception();
                failed = true;
            }
        }
    };
    auto threads = std::vector<std::thread> {};
    threads.reserve(workers);
    for (auto w = std::size_t { 0 }; w < workers; ++w)
        threads.emplace_back(worker);
    for (auto& t: threads)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace pagezip
