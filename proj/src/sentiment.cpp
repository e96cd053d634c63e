#include "percolate/sentiment.hpp"

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/rbbi.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>

#include "percolate/core.hpp"
#include "percolate/util.hpp"

namespace percolate {

namespace {

icu::UnicodeString canonical(icu::UnicodeString s) {
  s.toLower(icu::Locale::getRoot());
  UErrorCode status = U_ZERO_ERROR;
  const auto* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  auto out = nfc->normalize(s, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  return out;
}

std::string to_utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

// The prototype iterator is built once; each call works on its own clone.
const icu::BreakIterator& word_iterator_prototype() {
  static const std::unique_ptr<icu::BreakIterator> proto = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> it(icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) throw std::runtime_error("ICU word break iterator unavailable");
    return it;
  }();
  return *proto;
}

double parse_weight(std::string_view text) {
  const auto t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ParseError("invalid number: '" + std::string(text) + "'");
  return v;
}

}  // namespace

std::string canonicalize_word(std::string_view word) {
  return to_utf8(canonical(icu::UnicodeString::fromUTF8(icu::StringPiece(word.data(), static_cast<int32_t>(word.size())))));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  if (text.empty()) return tokens;
  const auto utext = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  std::unique_ptr<icu::BreakIterator> it(word_iterator_prototype().clone());
  it->setText(utext);
  int32_t start = it->first();
  for (int32_t end = it->next(); end != icu::BreakIterator::DONE; start = end, end = it->next()) {
    // Status UBRK_WORD_NONE marks spaces and punctuation.
    if (it->getRuleStatus() == UBRK_WORD_NONE) continue;
    tokens.push_back(to_utf8(canonical(icu::UnicodeString(utext, start, end - start))));
  }
  return tokens;
}

bool Lexicon::add(std::string_view word, double weight) {
  if (!(weight >= -1.0 && weight <= 1.0))
    throw DomainError("lexicon weight out of [-1, 1] for '" + std::string(word) + "'");
  auto key = canonicalize_word(trim(word));
  if (key.empty()) throw ParseError("empty lexicon word");
  auto [it, inserted] = entries_.insert_or_assign(std::move(key), weight);
  return !inserted;
}

std::optional<double> Lexicon::find(const std::string& canonical_word) const {
  if (auto it = entries_.find(canonical_word); it != entries_.end()) return it->second;
  return std::nullopt;
}

Lexicon Lexicon::load_csv(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open lexicon " + path.string());
  Lexicon lex;
  std::size_t line = 0;
  while (auto record = read_csv_record(in)) {
    ++line;
    auto& f = *record;
    if (f.size() == 1 && trim(f[0]).empty()) continue;
    if (line == 1 && f.size() == 2 && trim(f[0]) == "word" && trim(f[1]) == "weight") continue;
    if (f.size() != 2) throw ParseError(path.string() + ":" + std::to_string(line) + ": expected word,weight");
    double weight = 0.0;
    try {
      weight = parse_weight(f[1]);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
    if (lex.add(f[0], weight) && warnings)
      warnings->push_back(path.string() + ":" + std::to_string(line) + ": duplicate word '" +
                          std::string(trim(f[0])) + "', last entry wins");
  }
  return lex;
}

CombineRule parse_combine_rule(std::string_view name) {
  if (name == "mean") return CombineRule::MeanPolar;
  if (name == "sum") return CombineRule::ClampedSum;
  if (name == "sqrt") return CombineRule::SumOverSqrtN;
  throw ConfigError("unknown combine rule '" + std::string(name) + "' (expected mean, sum or sqrt)");
}

std::string_view combine_rule_name(CombineRule rule) {
  switch (rule) {
    case CombineRule::MeanPolar: return "mean";
    case CombineRule::ClampedSum: return "sum";
    case CombineRule::SumOverSqrtN: return "sqrt";
  }
  return "mean";
}

double score_text(std::string_view text, const Lexicon& lexicon, CombineRule rule) {
  int polar = 0;
  double sum = 0.0;
  for (const auto& token : tokenize(text)) {
    const auto w = lexicon.find(token);
    if (!w || *w == 0.0) continue;
    ++polar;
    sum += *w;
  }
  if (polar == 0) return 0.0;
  double score = sum;
  switch (rule) {
    case CombineRule::MeanPolar: score = sum / polar; break;
    case CombineRule::ClampedSum: break;
    case CombineRule::SumOverSqrtN: score = sum / std::sqrt(static_cast<double>(polar)); break;
  }
  return std::clamp(score, -1.0, 1.0);
}

SentimentScorer::SentimentScorer(Lexicon lexicon, CombineRule rule) : lexicon_(std::move(lexicon)), rule_(rule) {
  if (lexicon_.empty()) throw ConfigError("sentiment lexicon is empty");
}

std::string_view polarity_name(Polarity p) {
  switch (p) {
    case Polarity::Negative: return "negative";
    case Polarity::Neutral: return "neutral";
    case Polarity::Positive: return "positive";
  }
  return "neutral";
}

void PolarityThresholds::validate() const {
  if (!(-1.0 <= neutral_low && neutral_low <= neutral_high && neutral_high <= 1.0))
    throw ConfigError("thresholds must satisfy -1 <= neutral_low <= neutral_high <= 1");
}

PolarityThresholds PolarityThresholds::parse(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) throw ConfigError("thresholds must be 'low,high'");
  PolarityThresholds t;
  try {
    t.neutral_low = parse_weight(text.substr(0, comma));
    t.neutral_high = parse_weight(text.substr(comma + 1));
  } catch (const ParseError& e) {
    throw ConfigError(std::string("thresholds: ") + e.what());
  }
  t.validate();
  return t;
}

Polarity classify(double score, const PolarityThresholds& thresholds) {
  if (score < thresholds.neutral_low) return Polarity::Negative;
  if (score > thresholds.neutral_high) return Polarity::Positive;
  return Polarity::Neutral;
}

}  // namespace percolate
