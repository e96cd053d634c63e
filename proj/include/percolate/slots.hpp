#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace percolate {

using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Parses RFC 3339 ("2008-01-01T12:00:00Z", "...+02:00", fractional seconds
/// truncated). A bare date ("2008-01-01") is accepted and means midnight UTC.
Instant parse_timestamp(std::string_view text);
/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Instant t);

/// Exact non-negative rational, used for the slot overlap.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Accepts "1/2", "0.5", "0".
Fraction parse_fraction(std::string_view text);
std::string format_fraction(Fraction f);

struct SlotConfig {
  Instant period_start{};
  Instant period_end{};
  Seconds slot_length = std::chrono::days{30};
  Fraction overlap{1, 2};

  /// slot_length * (1 - overlap); throws ConfigError when not a whole number of seconds.
  Seconds step() const;
  void validate() const;
};

struct TimeSlot {
  int index = 0;
  Instant start{};
  Instant end{};  // exclusive

  friend bool operator==(const TimeSlot&, const TimeSlot&) = default;
};

// Slots start at period_start + i * step and are emitted while start < period_end,
// so the last slot may run past the end of the period.
std::vector<TimeSlot> generate_slots(const SlotConfig& config);

/// Indices of every slot with start <= t < end, ascending. Empty if t is outside all slots.
std::vector<int> assign_slots(Instant t, std::span<const TimeSlot> slots);

}  // namespace percolate
