#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "percolate/core.hpp"
#include "percolate/slots.hpp"

namespace percolate {

enum class EventKind { Post, CommentOnPost, CommentOnComment };

std::string_view event_kind_name(EventKind kind);
/// Accepts the names emitted by event_kind_name ("post", "comment_on_post",
/// "comment_on_comment") and the CamelCase spellings.
EventKind parse_event_kind(std::string_view name);

struct RawEvent {
  std::string event_id;
  EventKind kind = EventKind::Post;
  UserId author;
  UserId post_author;
  std::optional<UserId> parent_comment_author;
  Instant timestamp{};
  std::string text;

  /// Throws ParseError when the kind-specific field constraints are violated.
  void validate() const;
};

struct Interaction {
  std::string event_id;
  UserId initiator;
  std::optional<UserId> addressee;
  UserId post_author;
  std::vector<int> slot_ids;
  EventKind kind = EventKind::CommentOnPost;
  double sentiment = 0.0;
  bool self_directed = false;  // initiator == (addressee or post author)
  Instant timestamp{};
};

struct RecordError {
  std::size_t record = 0;  // 1-based record number in its source
  std::string message;
};

struct SlotCommentStats {
  std::size_t comments = 0;
  std::size_t comment_on_comment = 0;
  double comment_response_fraction() const noexcept {
    return comments ? static_cast<double>(comment_on_comment) / static_cast<double>(comments) : 0.0;
  }
};

struct IngestStats {
  std::size_t records = 0;
  std::size_t posts = 0;
  std::size_t comments = 0;  // accepted comments
  std::size_t comment_on_comment = 0;
  std::size_t interactions = 0;
  std::size_t self_directed = 0;
  std::size_t known_users = 0;
  std::map<std::string, std::size_t> dropped;  // reason -> count
  std::vector<RecordError> errors;
  std::vector<SlotCommentStats> per_slot;

  std::size_t dropped_total() const noexcept;
  double comment_response_fraction() const noexcept {
    return comments ? static_cast<double>(comment_on_comment) / static_cast<double>(comments) : 0.0;
  }
};

struct IngestResult {
  std::vector<Interaction> interactions;  // sorted by event_id
  MemberSet known_users;
  IngestStats stats;
};

/// One parsed source record, or the reason it could not be parsed.
struct ParsedRecord {
  std::optional<RawEvent> event;
  RecordError error;
};

std::vector<ParsedRecord> read_events_ndjson(std::istream& in);
/// Header: event_id,kind,author,post_author,parent_comment_author,timestamp,text
std::vector<ParsedRecord> read_events_csv(std::istream& in);
/// Chooses the reader by extension (.csv -> CSV, anything else -> NDJSON).
std::vector<ParsedRecord> read_events(const std::filesystem::path& path);

using TextScorer = std::function<double(std::string_view)>;

// Turns events into interactions. Malformed records and duplicate ids are
// collected in the stats instead of aborting. Events outside every slot are
// dropped and counted. Output order is independent of input order.
IngestResult resolve_interactions(std::span<const ParsedRecord> records, std::span<const TimeSlot> slots,
                                  const TextScorer& scorer, unsigned jobs = 1);

void write_interactions_ndjson(std::ostream& out, std::span<const Interaction> interactions);
std::vector<Interaction> read_interactions_ndjson(std::istream& in);
std::string ingest_stats_json(const IngestResult& result);

}  // namespace percolate
