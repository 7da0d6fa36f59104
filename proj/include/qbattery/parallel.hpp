#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace qbattery {

/// Worker count used when the caller passes 0.
inline unsigned default_workers()
{
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates fn(0) ... fn(count-1) on up to `workers` threads and returns
/// the results in index order. With one worker everything runs on the
/// calling thread. If any task throws, the exception of the lowest failing
/// index is rethrown after all workers finish.
template <class F>
auto parallel_map(std::size_t count, unsigned workers, F&& fn)
    -> std::vector<std::invoke_result_t<F&, std::size_t>>
{
  using R = std::invoke_result_t<F&, std::size_t>;
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));

  std::vector<R> out;
  out.reserve(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
    return out;
  }

  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            slots[i].emplace(fn(i));
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

} // namespace qbattery
