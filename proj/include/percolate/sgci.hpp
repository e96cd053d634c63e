#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "percolate/core.hpp"
#include "percolate/cpm.hpp"

namespace percolate {

struct MatchConfig {
  double jaccard_threshold = 0.5;
  int ltmin = 3;

  void validate() const;
};

/// max(|a∩b|/|a|, |a∩b|/|b|) for sorted member sets. DomainError if either is empty.
double modified_jaccard(std::span<const UserId> a, std::span<const UserId> b);

enum class TransitionEvent { Continue, Split, Merge };

std::string_view transition_event_name(TransitionEvent e);
TransitionEvent parse_transition_event(std::string_view name);

struct GroupMatch {
  std::size_t from = 0;  // index into the earlier slot's groups
  std::size_t to = 0;    // index into the later slot's groups
  double similarity = 0.0;
  TransitionEvent event = TransitionEvent::Continue;

  friend bool operator==(const GroupMatch&, const GroupMatch&) = default;
};

// Every pair with modified Jaccard >= threshold, ordered by (from, to). A group
// with several successors labels its matches Split; otherwise a successor with
// several predecessors labels them Merge; one-to-one matches are Continue.
std::vector<GroupMatch> match_slots(std::span<const TemporaryGroup> earlier, std::span<const TemporaryGroup> later,
                                    const MatchConfig& config);

struct StableGroup {
  RelationModel model = RelationModel::CommentNoSentiment;
  int k = 3;
  std::vector<TemporaryGroup> chain;         // consecutive slots
  std::vector<double> transition_similarity;  // chain.size() - 1 entries
  std::vector<TransitionEvent> events;        // chain.size() - 1 entries

  int lifespan() const noexcept { return static_cast<int>(chain.size()); }
  int first_slot() const { return chain.front().slot_index; }
  /// Digest of the member group ids.
  std::string stable_id() const;

  friend bool operator==(const StableGroup&, const StableGroup&) = default;
};

// per_slot[t] holds the groups of slot t for one (model, k). At each slot
// transition matched pairs are linked greedily, best first: higher similarity,
// then larger successor, then smaller successor member list, then smaller
// predecessor member list; a group gets at most one successor and one
// predecessor. Chains are the resulting paths; those shorter than ltmin are
// dropped. Result sorted by (first slot, first group's members).
std::vector<StableGroup> build_stable_groups(const std::vector<std::vector<TemporaryGroup>>& per_slot,
                                             const MatchConfig& config);

void write_stable_groups_ndjson(std::ostream& out, std::span<const StableGroup> groups);
std::vector<StableGroup> read_stable_groups_ndjson(std::istream& in);

}  // namespace percolate
