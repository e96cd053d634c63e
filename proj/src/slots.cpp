#include "percolate/slots.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>

#include "percolate/core.hpp"

namespace percolate {

namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) throw ParseError("timestamp too short: " + std::string(text));
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') throw ParseError("bad digit in timestamp: " + std::string(text));
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c)
    throw ParseError("malformed timestamp: " + std::string(text));
}

}  // namespace

Instant parse_timestamp(std::string_view raw) {
  using namespace std::chrono;
  const auto text = trim(raw);
  const int y = parse_digits(text, 0, 4);
  expect(text, 4, '-');
  const unsigned mo = static_cast<unsigned>(parse_digits(text, 5, 2));
  expect(text, 7, '-');
  const unsigned d = static_cast<unsigned>(parse_digits(text, 8, 2));
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) throw ParseError("invalid calendar date: " + std::string(text));
  Instant t = time_point_cast<seconds>(sys_days{ymd});
  if (text.size() == 10) return t;

  const char sep = text[10];
  if (sep != 'T' && sep != 't' && sep != ' ') throw ParseError("malformed timestamp: " + std::string(text));
  const int hh = parse_digits(text, 11, 2);
  expect(text, 13, ':');
  const int mm = parse_digits(text, 14, 2);
  expect(text, 16, ':');
  const int ss = parse_digits(text, 17, 2);
  // 60 is a leap second; fold it onto the next second like most parsers.
  if (hh > 23 || mm > 59 || ss > 60) throw ParseError("time out of range: " + std::string(text));
  t += hours{hh} + minutes{mm} + seconds{ss};

  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const auto start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) throw ParseError("empty fraction in timestamp: " + std::string(text));
  }
  if (pos >= text.size()) throw ParseError("timestamp lacks a UTC offset: " + std::string(text));
  const char z = text[pos];
  if (z == 'Z' || z == 'z') {
    if (pos + 1 != text.size()) throw ParseError("trailing characters in timestamp: " + std::string(text));
    return t;
  }
  if (z != '+' && z != '-') throw ParseError("malformed UTC offset: " + std::string(text));
  const int oh = parse_digits(text, pos + 1, 2);
  expect(text, pos + 3, ':');
  const int om = parse_digits(text, pos + 4, 2);
  if (pos + 6 != text.size()) throw ParseError("trailing characters in timestamp: " + std::string(text));
  if (oh > 23 || om > 59) throw ParseError("offset out of range: " + std::string(text));
  const seconds offset = hours{oh} + minutes{om};
  return z == '+' ? t - offset : t + offset;
}

std::string format_timestamp(Instant t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Fraction parse_fraction(std::string_view raw) {
  const auto text = trim(raw);
  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
      throw ConfigError("invalid fraction: " + std::string(text));
    return v;
  };
  Fraction f;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    f = {parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};
  } else if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto whole = text.substr(0, dot);
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 15) throw ConfigError("too many decimals in fraction: " + std::string(text));
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    f = {(whole.empty() ? 0 : parse_int(whole)) * den + (frac.empty() ? 0 : parse_int(frac)), den};
  } else {
    f = {parse_int(text), 1};
  }
  if (f.den <= 0 || f.num < 0) throw ConfigError("invalid fraction: " + std::string(text));
  const auto g = std::gcd(f.num, f.den);
  if (g > 1) {
    f.num /= g;
    f.den /= g;
  }
  return f;
}

std::string format_fraction(Fraction f) {
  return std::to_string(f.num) + "/" + std::to_string(f.den);
}

Seconds SlotConfig::step() const {
  if (overlap.den <= 0 || overlap.num < 0 || overlap.num >= overlap.den)
    throw ConfigError("overlap fraction must lie in [0, 1)");
  const auto scaled = slot_length.count() * (overlap.den - overlap.num);
  if (scaled % overlap.den != 0)
    throw ConfigError("slot step is not a whole number of seconds for overlap " + format_fraction(overlap));
  return Seconds{scaled / overlap.den};
}

void SlotConfig::validate() const {
  if (!(period_start < period_end)) throw ConfigError("period start must precede period end");
  if (slot_length <= Seconds{0}) throw ConfigError("slot length must be positive");
  if (step() <= Seconds{0}) throw ConfigError("slot step must be positive");
}

std::vector<TimeSlot> generate_slots(const SlotConfig& config) {
  config.validate();
  const auto step = config.step();
  std::vector<TimeSlot> slots;
  for (int i = 0;; ++i) {
    const Instant start = config.period_start + step * i;
    if (!(start < config.period_end)) break;
    slots.push_back({i, start, start + config.slot_length});
  }
  return slots;
}

std::vector<int> assign_slots(Instant t, std::span<const TimeSlot> slots) {
  // Slots are sorted by start and share one length, so ends are sorted too.
  auto first = std::upper_bound(slots.begin(), slots.end(), t,
                                [](Instant value, const TimeSlot& s) { return value < s.end; });
  std::vector<int> out;
  for (auto it = first; it != slots.end() && it->start <= t; ++it) out.push_back(it->index);
  return out;
}

}  // namespace percolate
