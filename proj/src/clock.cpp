#include "spotter/clock.hpp"

#include <thread>

namespace spotter {

void VirtualClock::advance_to(std::int64_t t_ms) {
  std::int64_t cur = now_.load(std::memory_order_relaxed);
  while (t_ms > cur && !now_.compare_exchange_weak(cur, t_ms, std::memory_order_acq_rel)) {
  }
}

WallClock::WallClock()
    : origin_(std::chrono::steady_clock::now()),
      utc_origin_ms_(std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count()) {}

std::int64_t WallClock::now_ms() const {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               origin_)
      .count();
}

std::int64_t WallClock::utc_ms() const { return utc_origin_ms_ + now_ms(); }

void WallClock::advance_to(std::int64_t t_ms) {
  std::this_thread::sleep_until(origin_ + std::chrono::milliseconds(t_ms));
}

}  // namespace spotter
