#pragma once

#include <mutex>
#include <utility>

namespace farmledger {

/// Serializes access to a simulation and its nodes across server threads.
class SimGuard {
 public:
  template <class F>
  decltype(auto) with(F&& f) {
    std::lock_guard lock(mutex_);
    return std::forward<F>(f)();
  }

 private:
  std::mutex mutex_;
};

}  // namespace farmledger
