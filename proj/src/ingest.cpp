#include "percolate/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "percolate/util.hpp"

namespace percolate {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::Post: return "Post";
    case EventKind::CommentOnPost: return "CommentOnPost";
    case EventKind::CommentOnComment: return "CommentOnComment";
  }
  return "Post";
}

EventKind parse_event_kind(std::string_view name) {
  const auto n = trim(name);
  if (n == "Post" || n == "post") return EventKind::Post;
  if (n == "CommentOnPost" || n == "comment_on_post") return EventKind::CommentOnPost;
  if (n == "CommentOnComment" || n == "comment_on_comment") return EventKind::CommentOnComment;
  throw ParseError("unknown event kind '" + std::string(name) + "'");
}

void RawEvent::validate() const {
  if (trim(event_id).empty()) throw ParseError("empty event_id");
  switch (kind) {
    case EventKind::Post:
      if (author != post_author) throw ParseError("post " + event_id + ": author differs from post_author");
      if (parent_comment_author) throw ParseError("post " + event_id + ": parent_comment_author must be absent");
      break;
    case EventKind::CommentOnComment:
      if (!parent_comment_author)
        throw ParseError("comment " + event_id + ": comment-on-comment requires parent_comment_author");
      break;
    case EventKind::CommentOnPost:
      break;
  }
}

std::size_t IngestStats::dropped_total() const noexcept {
  std::size_t n = 0;
  for (const auto& [reason, count] : dropped) n += count;
  return n;
}

namespace {

std::optional<UserId> optional_user(std::string_view s) {
  if (trim(s).empty()) return std::nullopt;
  return UserId(s);
}

RawEvent event_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  auto str = [&](const char* key) -> std::string {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw ParseError(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
  };
  std::optional<UserId> parent;
  if (const auto it = j.find("parent_comment_author"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError("parent_comment_author must be a string or null");
    parent = optional_user(it->get_ref<const std::string&>());
  }
  std::string text;
  if (const auto it = j.find("text"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError("text must be a string");
    text = it->get<std::string>();
  }
  RawEvent e{str("event_id"),      parse_event_kind(str("kind")), UserId(str("author")),
             UserId(str("post_author")), std::move(parent),         parse_timestamp(str("timestamp")),
             std::move(text)};
  e.validate();
  return e;
}

}  // namespace

std::vector<ParsedRecord> read_events_ndjson(std::istream& in) {
  std::vector<ParsedRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    ParsedRecord rec;
    rec.error.record = lineno;
    try {
      rec.event = event_from_json(json::parse(line));
    } catch (const std::exception& e) {
      rec.error.message = e.what();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ParsedRecord> read_events_csv(std::istream& in) {
  static const std::vector<std::string> expected = {"event_id",  "kind",      "author", "post_author",
                                                    "parent_comment_author", "timestamp", "text"};
  std::vector<ParsedRecord> out;
  auto header = read_csv_record(in);
  if (!header) return out;
  if (!header->empty() && header->front().starts_with("\xEF\xBB\xBF")) header->front().erase(0, 3);
  for (auto& h : *header) h = std::string(trim(h));
  if (*header != expected)
    throw ParseError("CSV header must be: event_id,kind,author,post_author,parent_comment_author,timestamp,text");
  std::size_t recno = 1;
  while (true) {
    ParsedRecord rec;
    std::optional<std::vector<std::string>> fields;
    try {
      fields = read_csv_record(in);
    } catch (const std::exception& e) {
      rec.error = {recno + 1, e.what()};
      out.push_back(std::move(rec));
      break;
    }
    if (!fields) break;
    ++recno;
    if (fields->size() == 1 && trim(fields->front()).empty()) continue;
    rec.error.record = recno;
    try {
      if (fields->size() != expected.size())
        throw ParseError("expected 7 fields, got " + std::to_string(fields->size()));
      const auto& f = *fields;
      RawEvent e{std::string(trim(f[0])), parse_event_kind(f[1]),   UserId(f[2]),
                 UserId(f[3]),            optional_user(f[4]),       parse_timestamp(f[5]),
                 f[6]};
      e.validate();
      rec.event = std::move(e);
    } catch (const std::exception& e) {
      rec.error.message = e.what();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ParsedRecord> read_events(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open input " + path.string());
  if (path.extension() == ".csv") return read_events_csv(in);
  return read_events_ndjson(in);
}

IngestResult resolve_interactions(std::span<const ParsedRecord> records, std::span<const TimeSlot> slots,
                                  const TextScorer& scorer, unsigned jobs) {
  IngestResult result;
  auto& stats = result.stats;
  stats.records = records.size();
  stats.per_slot.resize(slots.size());

  std::vector<const RawEvent*> events;
  for (const auto& rec : records) {
    if (rec.event) {
      events.push_back(&*rec.event);
    } else {
      ++stats.dropped["malformed"];
      stats.errors.push_back(rec.error);
    }
  }
  std::sort(stats.errors.begin(), stats.errors.end(),
            [](const RecordError& a, const RecordError& b) { return std::tie(a.record, a.message) < std::tie(b.record, b.message); });

  // Canonical order so that duplicate resolution does not depend on input order.
  auto key = [](const RawEvent* e) {
    return std::tie(e->event_id, e->timestamp, e->kind, e->author, e->post_author, e->parent_comment_author, e->text);
  };
  std::sort(events.begin(), events.end(), [&](const RawEvent* a, const RawEvent* b) { return key(a) < key(b); });

  struct Accepted {
    const RawEvent* event;
    std::vector<int> slot_ids;
  };
  std::vector<Accepted> comments;
  std::set<UserId> known;
  const std::string* previous_id = nullptr;
  for (const RawEvent* e : events) {
    if (previous_id && *previous_id == e->event_id) {
      ++stats.dropped["duplicate_event_id"];
      continue;
    }
    previous_id = &e->event_id;
    auto slot_ids = assign_slots(e->timestamp, slots);
    if (slot_ids.empty()) {
      ++stats.dropped["out_of_period"];
      continue;
    }
    known.insert(e->author);
    known.insert(e->post_author);
    if (e->parent_comment_author) known.insert(*e->parent_comment_author);
    if (e->kind == EventKind::Post) {
      ++stats.posts;
      continue;
    }
    ++stats.comments;
    const bool reply = e->kind == EventKind::CommentOnComment;
    if (reply) ++stats.comment_on_comment;
    for (int s : slot_ids) {
      auto& ps = stats.per_slot[static_cast<std::size_t>(s)];
      ++ps.comments;
      if (reply) ++ps.comment_on_comment;
    }
    comments.push_back({e, std::move(slot_ids)});
  }

  std::vector<double> scores(comments.size());
  parallel_for(comments.size(), jobs, [&](std::size_t i) { scores[i] = scorer(comments[i].event->text); });

  result.interactions.reserve(comments.size());
  for (std::size_t i = 0; i < comments.size(); ++i) {
    const RawEvent& e = *comments[i].event;
    std::optional<UserId> addressee;
    if (e.kind == EventKind::CommentOnComment) addressee = e.parent_comment_author;
    const bool self = e.author == addressee.value_or(e.post_author);
    if (self) ++stats.self_directed;
    result.interactions.push_back(Interaction{e.event_id, e.author, std::move(addressee), e.post_author,
                                              std::move(comments[i].slot_ids), e.kind,
                                              std::clamp(scores[i], -1.0, 1.0), self, e.timestamp});
  }
  stats.interactions = result.interactions.size();
  result.known_users.assign(known.begin(), known.end());
  stats.known_users = result.known_users.size();
  return result;
}

void write_interactions_ndjson(std::ostream& out, std::span<const Interaction> interactions) {
  for (const auto& i : interactions) {
    ordered_json j;
    j["event_id"] = i.event_id;
    j["initiator"] = i.initiator.str();
    j["addressee"] = i.addressee ? json(i.addressee->str()) : json(nullptr);
    j["post_author"] = i.post_author.str();
    j["slot_ids"] = i.slot_ids;
    j["kind"] = event_kind_name(i.kind);
    j["sentiment"] = i.sentiment;
    j["self_directed"] = i.self_directed;
    j["timestamp"] = format_timestamp(i.timestamp);
    out << j.dump() << '\n';
  }
}

std::vector<Interaction> read_interactions_ndjson(std::istream& in) {
  std::vector<Interaction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      std::optional<UserId> addressee;
      if (!j.at("addressee").is_null()) addressee = UserId(j.at("addressee").get<std::string>());
      Interaction i{j.at("event_id").get<std::string>(),
                    UserId(j.at("initiator").get<std::string>()),
                    std::move(addressee),
                    UserId(j.at("post_author").get<std::string>()),
                    j.at("slot_ids").get<std::vector<int>>(),
                    parse_event_kind(j.at("kind").get<std::string>()),
                    j.at("sentiment").get<double>(),
                    j.at("self_directed").get<bool>(),
                    parse_timestamp(j.at("timestamp").get<std::string>())};
      if (i.slot_ids.empty() || !std::is_sorted(i.slot_ids.begin(), i.slot_ids.end()))
        throw ParseError("slot_ids must be non-empty and increasing");
      if (!(i.sentiment >= -1.0 && i.sentiment <= 1.0)) throw ParseError("sentiment out of [-1, 1]");
      out.push_back(std::move(i));
    } catch (const std::exception& e) {
      throw ParseError("interactions line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string ingest_stats_json(const IngestResult& result) {
  const auto& s = result.stats;
  ordered_json j;
  j["records"] = s.records;
  j["posts"] = s.posts;
  j["comments"] = s.comments;
  j["comment_on_comment"] = s.comment_on_comment;
  j["interactions"] = s.interactions;
  j["self_directed"] = s.self_directed;
  j["known_users"] = s.known_users;
  j["dropped_total"] = s.dropped_total();
  j["dropped"] = ordered_json::object();
  for (const auto& [reason, count] : s.dropped) j["dropped"][reason] = count;
  j["comment_response_fraction"] = s.comment_response_fraction();
  auto& per_slot = j["per_slot"] = ordered_json::array();
  for (std::size_t i = 0; i < s.per_slot.size(); ++i) {
    per_slot.push_back({{"slot", i},
                        {"comments", s.per_slot[i].comments},
                        {"comment_on_comment", s.per_slot[i].comment_on_comment},
                        {"comment_response_fraction", s.per_slot[i].comment_response_fraction()}});
  }
  auto& errors = j["errors"] = ordered_json::array();
  for (const auto& e : s.errors) errors.push_back({{"record", e.record}, {"message", e.message}});
  return j.dump(2) + "\n";
}

}  // namespace percolate
