#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace skillprobe::respclass {

// Tag set for the rule-based tagger: closed-class lexicon plus suffix
// heuristics. Unknown words default to Noun.
enum class PosTag {
  Aux,          // is, are, do, have ...
  AuxNeg,       // isn't, don't, can't ...
  Modal,        // can, would, should ...
  Verb,
  Noun,
  Pronoun,      // I, you, she, your ...
  WhDeterminer, // which
  WhPronoun,    // what, who, whom
  WhPossessive, // whose
  WhAdverb,     // where, when, why, how
  Preposition,
  To,
  Determiner,
  Adjective,
  Adverb,
  Number,
  Punct,
  Other,
};

struct TaggedToken {
  std::string word;  // original token
  PosTag tag = PosTag::Other;
};

enum class SentenceKind { YesNoQuestion, WhQuestion, Directive, Informative };

enum class ThemeClass { Abbreviation, Entity, Description, Human, Location, Numeric };

struct ThemeLabel {
  ThemeClass theme = ThemeClass::Description;
  std::string subtheme = "other";
  std::string key() const;  // e.g. "human:age"
};

struct ResponseClass {
  SentenceKind kind = SentenceKind::Informative;
  std::optional<ThemeLabel> theme;             // WH questions; directives that paraphrase one
  std::vector<std::string> suggested_phrases;  // directives: phrases the user may say
  std::optional<std::string> asked_for;        // focus noun of a request, lowercase
};

// Rule-based response classifier. A response is split into sentences, each
// sentence is tagged and classified, and the sentence classes are reduced to
// one dominant class with priority WhQuestion > YesNoQuestion > Directive >
// Informative.
class Classifier {
 public:
  // Loads pos_lexicon.tsv and wh_themes.tsv from `data_dir`.
  explicit Classifier(const std::filesystem::path& data_dir);

  // Shared instance over the bundled data directory.
  static const Classifier& bundled();

  // Quote-aware sentence split followed by tokenization. Punctuation marks
  // become their own tokens; word-internal apostrophes are kept.
  std::vector<std::vector<std::string>> tokenize_sentences(std::string_view txt) const;

  std::vector<TaggedToken> pos_tag(const std::vector<std::string>& tokens) const;

  ResponseClass classify(std::string_view response_text) const;
  std::vector<ResponseClass> classify_sentences(std::string_view response_text) const;

  // Theme of a WH question; unmapped questions fall back to description:other.
  ThemeLabel wh_theme(const std::vector<TaggedToken>& sentence) const;

  // Quoted phrases plus objects of say/press/choose/select, textual order,
  // normalized and deduplicated.
  std::vector<std::string> directive_phrases(std::string_view sentence) const;

 private:
  ResponseClass classify_one(const std::string& sentence) const;
  std::optional<std::string> request_focus(const std::vector<TaggedToken>& tagged) const;
  std::optional<std::pair<std::string, ThemeLabel>> wh_focus(
      const std::vector<TaggedToken>& tagged) const;

  std::unordered_map<std::string, PosTag> lexicon_;
  std::unordered_map<std::string, ThemeLabel> focus_themes_;
};

const char* to_string(SentenceKind k);
const char* to_string(ThemeClass t);
const char* to_string(PosTag t);

bool is_wh_tag(PosTag t);

}  // namespace skillprobe::respclass
