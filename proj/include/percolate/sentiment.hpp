#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace percolate {

/// Lowercase (root locale) + Unicode NFC.
std::string canonicalize_word(std::string_view word);

/// Unicode word segmentation; returns canonicalized word tokens, punctuation and
/// whitespace segments dropped.
std::vector<std::string> tokenize(std::string_view text);

// Word -> weight in [-1, 1]. Words are stored canonicalized. Weight 0 marks a
// known neutral word.
class Lexicon {
 public:
  Lexicon() = default;

  /// Throws DomainError for weights outside [-1, 1]. Re-adding a word overwrites it.
  /// Returns true when the word was already present.
  bool add(std::string_view word, double weight);
  std::optional<double> find(const std::string& canonical_word) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// CSV `word,weight` (an optional `word,weight` header line is skipped). Duplicates:
  /// last wins, and a warning is appended to `warnings` if given.
  static Lexicon load_csv(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

 private:
  std::unordered_map<std::string, double> entries_;
};

/// How matched word weights are folded into one score. P and N count matched
/// words with positive and negative weight, S sums matched weights.
enum class CombineRule {
  MeanPolar,     // S / (P + N)
  ClampedSum,    // clamp(S)
  SumOverSqrtN,  // S / sqrt(P + N)
};

CombineRule parse_combine_rule(std::string_view name);
std::string_view combine_rule_name(CombineRule rule);

/// Score in [-1, 1]; 0 when no polar word matched.
double score_text(std::string_view text, const Lexicon& lexicon, CombineRule rule = CombineRule::MeanPolar);

class SentimentScorer {
 public:
  /// Throws ConfigError on an empty lexicon.
  explicit SentimentScorer(Lexicon lexicon, CombineRule rule = CombineRule::MeanPolar);

  double operator()(std::string_view text) const { return score_text(text, lexicon_, rule_); }
  const Lexicon& lexicon() const noexcept { return lexicon_; }
  CombineRule rule() const noexcept { return rule_; }

 private:
  Lexicon lexicon_;
  CombineRule rule_;
};

enum class Polarity { Negative, Neutral, Positive };

std::string_view polarity_name(Polarity p);

struct PolarityThresholds {
  double neutral_low = 0.0;
  double neutral_high = 0.3;

  void validate() const;
  /// "low,high"
  static PolarityThresholds parse(std::string_view text);
};

/// score < low -> Negative; low <= score <= high -> Neutral; score > high -> Positive.
Polarity classify(double score, const PolarityThresholds& thresholds);

}  // namespace percolate
