#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "plumeloc/errors.hpp"

namespace plumeloc::detail {

struct LoopOptions {
  std::uint64_t target = 0;           // acceptances required
  double acceptance_floor = 1e-6;
  std::uint64_t floor_window = 1000000;
  unsigned threads = 1;
  double epsilon = 0.0;               // named in the abort diagnostic
};

/// Evaluates keyed proposals 0, 1, 2, ... until `target` acceptances.
///
/// eval(index, slot) must be pure in the index and safe to run concurrently
/// for distinct slots; it returns the accepted value or nullopt. Results are
/// always folded in index order, so thread count never changes the outcome:
/// the accepted set is the first `target` acceptances by proposal index and
/// `proposals` is the index of the last one plus one.
///
/// Throws SamplerAbort when the acceptance rate over the trailing
/// floor_window proposals drops below acceptance_floor.
template <typename T, typename Eval>
std::pair<std::vector<T>, std::uint64_t> run_accept_loop(const LoopOptions& opt, Eval&& eval) {
  std::vector<T> accepted;
  accepted.reserve(opt.target);
  std::vector<std::uint64_t> accepted_idx;
  accepted_idx.reserve(opt.target);
  std::size_t window_lo = 0;
  std::uint64_t consumed = 0;

  auto fold = [&](std::uint64_t j, std::optional<T>& r) -> bool {
    if (r.has_value()) {
      accepted.push_back(std::move(*r));
      accepted_idx.push_back(j);
      if (accepted.size() == opt.target) {
        consumed = j + 1;
        return true;
      }
    }
    if (j + 1 >= opt.floor_window) {
      const std::uint64_t start = j + 1 - opt.floor_window;
      while (window_lo < accepted_idx.size() && accepted_idx[window_lo] < start) ++window_lo;
      const double rate = static_cast<double>(accepted_idx.size() - window_lo) /
                          static_cast<double>(opt.floor_window);
      if (rate < opt.acceptance_floor) {
        throw SamplerAbort(fmt::format(
            "acceptance rate {:.3e} over the last {} proposals is below the floor {:.3e} "
            "at tolerance {}; the tolerance appears unreachable",
            rate, opt.floor_window, opt.acceptance_floor, opt.epsilon));
      }
    }
    return false;
  };

  if (opt.threads <= 1) {
    for (std::uint64_t j = 0;; ++j) {
      auto r = eval(j, 0u);
      if (fold(j, r)) return {std::move(accepted), consumed};
    }
  }

  constexpr std::uint64_t kChunk = 4096;
  std::vector<std::optional<T>> results(kChunk);
  for (std::uint64_t base = 0;; base += kChunk) {
    std::atomic<std::uint64_t> cursor{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&](unsigned slot) {
      try {
        for (;;) {
          const std::uint64_t k = cursor.fetch_add(1);
          if (k >= kChunk || failed.load()) return;
          results[k] = eval(base + k, slot);
        }
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(opt.threads);
    for (unsigned s = 0; s < opt.threads; ++s) pool.emplace_back(worker, s);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    for (std::uint64_t k = 0; k < kChunk; ++k) {
      if (fold(base + k, results[k])) return {std::move(accepted), consumed};
      results[k].reset();
    }
  }
}

}  // namespace plumeloc::detail
