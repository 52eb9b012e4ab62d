#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace spotter {

/// Time source for a capture. now_ms() has an arbitrary origin; only
/// differences matter. advance_to() either jumps (virtual time) or blocks
/// until the target is reached (wall time).
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() const = 0;
  /// UTC milliseconds since the Unix epoch corresponding to now_ms().
  virtual std::int64_t utc_ms() const = 0;
  virtual void advance_to(std::int64_t t_ms) = 0;
};

class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(std::int64_t utc_epoch_ms = 0) : epoch_(utc_epoch_ms) {}

  std::int64_t now_ms() const override { return now_.load(std::memory_order_acquire); }
  std::int64_t utc_ms() const override { return epoch_ + now_ms(); }
  void advance_to(std::int64_t t_ms) override;

 private:
  std::int64_t epoch_;
  std::atomic<std::int64_t> now_{0};
};

class WallClock final : public Clock {
 public:
  WallClock();

  std::int64_t now_ms() const override;
  std::int64_t utc_ms() const override;
  void advance_to(std::int64_t t_ms) override;

 private:
  std::chrono::steady_clock::time_point origin_;
  std::int64_t utc_origin_ms_;
};

}  // namespace spotter
