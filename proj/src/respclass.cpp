#include "skillprobe/respclass.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <mutex>
#include <set>
#include <stdexcept>

#include "skillprobe/data_dir.hpp"
#include "skillprobe/text.hpp"

namespace skillprobe::respclass {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

bool all_digits(const std::string& w) {
  bool saw = false;
  for (unsigned char c : w) {
    if (std::isdigit(c) != 0)
      saw = true;
    else if (c != '.' && c != ',')
      return false;
  }
  return saw;
}

std::optional<PosTag> tag_from_string(std::string_view s) {
  if (s == "aux") return PosTag::Aux;
  if (s == "aux_neg") return PosTag::AuxNeg;
  if (s == "modal") return PosTag::Modal;
  if (s == "verb") return PosTag::Verb;
  if (s == "noun") return PosTag::Noun;
  if (s == "pronoun") return PosTag::Pronoun;
  if (s == "wh_det") return PosTag::WhDeterminer;
  if (s == "wh_pro") return PosTag::WhPronoun;
  if (s == "wh_pos") return PosTag::WhPossessive;
  if (s == "wh_adv") return PosTag::WhAdverb;
  if (s == "prep") return PosTag::Preposition;
  if (s == "to") return PosTag::To;
  if (s == "det") return PosTag::Determiner;
  if (s == "adj") return PosTag::Adjective;
  if (s == "adv") return PosTag::Adverb;
  if (s == "num") return PosTag::Number;
  if (s == "other") return PosTag::Other;
  return std::nullopt;
}

std::optional<ThemeClass> theme_from_string(std::string_view s) {
  if (s == "abbreviation") return ThemeClass::Abbreviation;
  if (s == "entity") return ThemeClass::Entity;
  if (s == "description") return ThemeClass::Description;
  if (s == "human") return ThemeClass::Human;
  if (s == "location") return ThemeClass::Location;
  if (s == "numeric") return ThemeClass::Numeric;
  return std::nullopt;
}

// "what's" and friends fuse a WH word with an auxiliary.
bool is_fused_wh_aux(const std::string& lower) {
  static const std::set<std::string> kFused = {"what's", "who's",  "where's",
                                               "when's", "why's",  "how's",
                                               "whats",  "whos",   "wheres"};
  return kFused.count(lower) > 0;
}

// Imperative heads that make a sentence a directive.
bool is_directive_head(const std::string& lower) {
  static const std::set<std::string> kHeads = {
      "say",   "tell",   "press",  "choose", "select",   "pick",  "give",
      "provide", "enter", "type",  "state",  "answer",   "try",   "ask",
      "name",  "guess",  "spell",  "repeat", "share",    "describe",
      "introduce", "sing", "count", "reply", "respond",  "touch", "tap",
      "swipe", "shake",  "use"};
  return kHeads.count(lower) > 0;
}

// Verbs whose objects are phrases the user is expected to say or press.
bool is_offering_verb(const std::string& lower) {
  return lower == "say" || lower == "press" || lower == "choose" ||
         lower == "select";
}

bool is_request_verb(const std::string& lower) {
  static const std::set<std::string> kVerbs = {
      "tell", "give", "provide", "say",     "enter", "type",
      "state", "share", "know",  "confirm", "ask"};
  return kVerbs.count(lower) > 0;
}

bool is_politeness(const std::string& lower) {
  static const std::set<std::string> kWords = {
      "please", "now", "just", "first", "next", "then",
      "ok",     "okay", "alright", "also", "simply", "kindly"};
  return kWords.count(lower) > 0;
}

bool is_possessive(const std::string& lower) {
  return lower == "your" || lower == "my" || lower == "ur" || lower == "thy";
}

std::string lower_word(const std::string& w) {
  std::string out = text::to_lower(w);
  // strip a trailing "'s" so "dog's" keys on "dog"
  if (out.size() > 2 && out.compare(out.size() - 2, 2, "'s") == 0)
    out.erase(out.size() - 2);
  return out;
}

struct Sentence {
  std::vector<TaggedToken> tagged;
  std::vector<std::size_t> content;  // indexes of non-punct tokens
  bool has_question_mark = false;
  bool has_stop = false;  // '.' or '!' present
};

}  // namespace

std::string ThemeLabel::key() const {
  return std::string(to_string(theme)) + ":" + subtheme;
}

Classifier::Classifier(const std::filesystem::path& data_dir) {
  auto load_tsv = [](const std::filesystem::path& p,
                     auto&& on_row) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read lexicon: " + p.string());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      on_row(line.substr(0, tab), line.substr(tab + 1));
    }
  };

  load_tsv(data_dir / "lexicon" / "pos_lexicon.tsv",
           [&](std::string word, std::string tag) {
             auto t = tag_from_string(tag);
             if (!t)
               throw std::runtime_error("unknown tag '" + tag +
                                        "' for word '" + word + "'");
             lexicon_[word] = *t;
           });

  load_tsv(data_dir / "lexicon" / "wh_themes.tsv",
           [&](std::string word, std::string label) {
             auto colon = label.find(':');
             if (colon == std::string::npos)
               throw std::runtime_error("bad theme label: " + label);
             auto theme = theme_from_string(label.substr(0, colon));
             if (!theme) throw std::runtime_error("bad theme label: " + label);
             focus_themes_[word] = ThemeLabel{*theme, label.substr(colon + 1)};
           });
}

const Classifier& Classifier::bundled() {
  static const Classifier instance(default_data_dir());
  return instance;
}

std::vector<std::vector<std::string>> Classifier::tokenize_sentences(
    std::string_view txt) const {
  std::vector<std::vector<std::string>> out;
  for (const auto& sentence : text::split_sentences_quote_aware(txt)) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < sentence.size()) {
      unsigned char c = sentence[i];
      if (std::isspace(c)) {
        ++i;
        continue;
      }
      if (is_word_char(c)) {
        std::size_t j = i;
        while (j < sentence.size()) {
          unsigned char cj = sentence[j];
          if (is_word_char(cj)) {
            ++j;
          } else if (cj == '\'' && j + 1 < sentence.size() && j > i &&
                     is_word_char(sentence[j + 1])) {
            ++j;  // apostrophe inside a word: don't, pig's
          } else {
            break;
          }
        }
        tokens.emplace_back(sentence.substr(i, j - i));
        i = j;
      } else {
        tokens.emplace_back(1, sentence[i]);
        ++i;
      }
    }
    if (!tokens.empty()) out.push_back(std::move(tokens));
  }
  return out;
}

std::vector<TaggedToken> Classifier::pos_tag(
    const std::vector<std::string>& tokens) const {
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    TaggedToken t;
    t.word = tok;
    bool word = false;
    for (unsigned char c : tok)
      if (is_word_char(c)) word = true;
    if (!word) {
      t.tag = PosTag::Punct;
      out.push_back(std::move(t));
      continue;
    }
    std::string lower = text::to_lower(tok);
    if (auto it = lexicon_.find(lower); it != lexicon_.end()) {
      t.tag = it->second;
    } else if (all_digits(lower)) {
      t.tag = PosTag::Number;
    } else if (lower.size() > 3 && lower.compare(lower.size() - 2, 2, "ly") == 0) {
      t.tag = PosTag::Adverb;
    } else if (lower.size() > 4 &&
               (lower.compare(lower.size() - 3, 3, "ing") == 0 ||
                lower.compare(lower.size() - 2, 2, "ed") == 0)) {
      t.tag = PosTag::Verb;
    } else {
      t.tag = PosTag::Noun;
    }
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

Sentence analyze(const Classifier& cls, const std::vector<std::string>& tokens,
                 const std::vector<TaggedToken>& tagged) {
  (void)cls;
  (void)tokens;
  Sentence s;
  s.tagged = tagged;
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    if (tagged[i].tag == PosTag::Punct) {
      if (tagged[i].word == "?") s.has_question_mark = true;
      if (tagged[i].word == "." || tagged[i].word == "!") s.has_stop = true;
    } else {
      s.content.push_back(i);
    }
  }
  return s;
}

bool subject_like(PosTag t) {
  return t == PosTag::Pronoun || t == PosTag::Determiner || t == PosTag::Noun ||
         t == PosTag::Number || t == PosTag::Adjective;
}

// Index (into content) of the WH head, if the sentence starts with a WH word
// or a preposition followed by one ("To whom ...").
std::optional<std::size_t> wh_head(const Sentence& s) {
  if (s.content.empty()) return std::nullopt;
  const auto& t0 = s.tagged[s.content[0]];
  if (is_wh_tag(t0.tag)) return 0;
  if ((t0.tag == PosTag::Preposition || t0.tag == PosTag::To) &&
      s.content.size() > 1 && is_wh_tag(s.tagged[s.content[1]].tag))
    return 1;
  return std::nullopt;
}

bool aux_like(PosTag t) {
  return t == PosTag::Aux || t == PosTag::AuxNeg || t == PosTag::Modal;
}

// Question shape for sentences that carry no terminal punctuation.
bool structure_question(const Sentence& s) {
  if (s.content.empty()) return false;
  auto head = wh_head(s);
  if (head) {
    std::size_t i = *head;
    const std::string lower = text::to_lower(s.tagged[s.content[i]].word);
    if (is_fused_wh_aux(lower)) return true;
    // "how old are you": adjectives/adverbs may sit between WH word and aux
    std::size_t j = i + 1;
    while (j < s.content.size() &&
           (s.tagged[s.content[j]].tag == PosTag::Adjective ||
            s.tagged[s.content[j]].tag == PosTag::Adverb))
      ++j;
    if (j < s.content.size() && aux_like(s.tagged[s.content[j]].tag)) return true;
    // subject questions: "who ate my cake"
    if (i + 1 < s.content.size() && s.tagged[s.content[i + 1]].tag == PosTag::Verb)
      return true;
    return false;
  }
  if (aux_like(s.tagged[s.content[0]].tag) && s.content.size() > 1 &&
      subject_like(s.tagged[s.content[1]].tag))
    return true;
  return false;
}

}  // namespace

ThemeLabel Classifier::wh_theme(const std::vector<TaggedToken>& sentence) const {
  Sentence s;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    s.tagged.push_back(sentence[i]);
    if (sentence[i].tag != PosTag::Punct) s.content.push_back(i);
  }
  auto focus = wh_focus(s.tagged);
  if (focus) return focus->second;
  return ThemeLabel{ThemeClass::Description, "other"};
}

// Returns the focus word and theme of a WH sentence, when one can be mapped.
std::optional<std::pair<std::string, ThemeLabel>> Classifier::wh_focus(
    const std::vector<TaggedToken>& tagged) const {
  Sentence s;
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    s.tagged.push_back(tagged[i]);
    if (tagged[i].tag != PosTag::Punct) s.content.push_back(i);
  }
  auto head = wh_head(s);
  if (!head) return std::nullopt;
  std::size_t hi = *head;
  std::string w = lower_word(s.tagged[s.content[hi]].word);

  auto entry = [&](const std::string& word)
      -> std::optional<std::pair<std::string, ThemeLabel>> {
    auto it = focus_themes_.find(word);
    if (it == focus_themes_.end()) return std::nullopt;
    return std::make_pair(word, it->second);
  };

  if (w == "who" || w == "whom" || w == "whose")
    return std::make_pair(w, ThemeLabel{ThemeClass::Human, "individual"});
  if (w == "when")
    return std::make_pair(w, ThemeLabel{ThemeClass::Numeric, "date"});
  if (w == "why")
    return std::make_pair(w, ThemeLabel{ThemeClass::Description, "reason"});
  if (w == "where") {
    for (std::size_t k = hi + 1; k < s.content.size(); ++k) {
      std::string cand = lower_word(s.tagged[s.content[k]].word);
      auto e = entry(cand);
      if (e && e->second.theme == ThemeClass::Location) return e;
    }
    return std::make_pair(w, ThemeLabel{ThemeClass::Location, "other"});
  }
  if (w == "how") {
    if (hi + 1 < s.content.size()) {
      std::string next = lower_word(s.tagged[s.content[hi + 1]].word);
      if (next == "old")
        return std::make_pair(next, ThemeLabel{ThemeClass::Human, "age"});
      if (next == "many" || next == "much")
        return std::make_pair(next, ThemeLabel{ThemeClass::Numeric, "count"});
      if (next == "long")
        return std::make_pair(next, ThemeLabel{ThemeClass::Numeric, "period"});
      if (next == "far")
        return std::make_pair(next, ThemeLabel{ThemeClass::Numeric, "other"});
    }
    return std::make_pair(w, ThemeLabel{ThemeClass::Description, "manner"});
  }
  // what / which
  bool has_stand = false;
  for (std::size_t k : s.content) {
    std::string lw = lower_word(s.tagged[k].word);
    if (lw == "stand" || lw == "stands") has_stand = true;
  }
  if (has_stand)
    return std::make_pair(std::string("abbreviation"),
                          ThemeLabel{ThemeClass::Abbreviation, "expression"});
  if (!s.content.empty()) {
    std::string last = lower_word(s.tagged[s.content.back()].word);
    bool has_does = false;
    for (std::size_t k : s.content) {
      std::string lw = lower_word(s.tagged[k].word);
      if (lw == "does" || lw == "do") has_does = true;
    }
    if (has_does && (last == "do" || last == "mean" || last == "work"))
      return std::make_pair(last,
                            ThemeLabel{ThemeClass::Description, "definition"});
  }
  for (std::size_t k = hi + 1; k < s.content.size(); ++k) {
    const auto& tok = s.tagged[s.content[k]];
    std::string cand = lower_word(tok.word);
    if (cand == "old") continue;  // only meaningful after "how"
    if (tok.tag == PosTag::Adjective || tok.tag == PosTag::Adverb) continue;
    auto e = entry(cand);
    if (e) return e;
  }
  return std::nullopt;
}

std::vector<std::string> Classifier::directive_phrases(
    std::string_view sentence) const {
  std::vector<std::pair<std::size_t, std::string>> found;  // position, phrase
  std::set<std::string> seen;

  auto add = [&](std::size_t pos, std::string_view raw) {
    std::string norm = text::normalize_utterance(raw);
    if (norm.empty()) return;
    if (!seen.insert(norm).second) return;
    found.emplace_back(pos, std::move(norm));
  };

  // Quoted phrases, located by their first character for ordering.
  std::size_t search_from = 0;
  for (const auto& q : text::quoted_phrases(sentence)) {
    auto pos = sentence.find(q, search_from);
    if (pos == std::string_view::npos) pos = search_from;
    search_from = pos + q.size();
    add(pos, q);
  }

  // Objects of say/press/choose/select.
  auto sentences = tokenize_sentences(sentence);
  if (!sentences.empty()) {
    const auto& tokens = sentences.front();
    auto tagged = pos_tag(tokens);
    // approximate character positions for ordering
    std::vector<std::size_t> char_pos(tokens.size(), 0);
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto p = sentence.find(tokens[i], cursor);
      if (p == std::string_view::npos) p = cursor;
      char_pos[i] = p;
      cursor = p + tokens[i].size();
    }
    for (std::size_t i = 0; i < tagged.size(); ++i) {
      std::string lower = text::to_lower(tagged[i].word);
      if (!is_offering_verb(lower)) continue;
      // skip "they say ...": a directly preceding subject blocks extraction
      std::size_t p = i;
      bool blocked = false;
      while (p > 0) {
        --p;
        if (tagged[p].tag == PosTag::Punct) break;
        if (tagged[p].tag == PosTag::Adverb || is_politeness(text::to_lower(tagged[p].word)))
          continue;
        if (tagged[p].tag == PosTag::Modal || tagged[p].tag == PosTag::To ||
            tagged[p].tag == PosTag::AuxNeg)
          break;  // "you can say X", "to say X"
        blocked = tagged[p].tag == PosTag::Pronoun || tagged[p].tag == PosTag::Noun;
        break;
      }
      if (blocked) continue;
      // collect object tokens until a boundary
      std::vector<std::string> object;
      std::vector<std::vector<std::string>> alternatives;
      for (std::size_t j = i + 1; j < tagged.size(); ++j) {
        const auto& t = tagged[j];
        std::string lw = text::to_lower(t.word);
        if (t.tag == PosTag::Punct || t.tag == PosTag::Preposition ||
            t.tag == PosTag::To || lw == "if" || lw == "when")
          break;
        if (lw == "or" || lw == "and") {
          if (!object.empty()) alternatives.push_back(std::move(object));
          object.clear();
          continue;
        }
        object.push_back(t.word);
      }
      if (!object.empty()) alternatives.push_back(std::move(object));
      for (auto& alt : alternatives) {
        std::string joined;
        for (const auto& w : alt) {
          if (!joined.empty()) joined.push_back(' ');
          joined += w;
        }
        add(char_pos[i], joined);
      }
    }
  }

  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  out.reserve(found.size());
  for (auto& [pos, phrase] : found) out.push_back(std::move(phrase));
  return out;
}

std::optional<std::string> Classifier::request_focus(
    const std::vector<TaggedToken>& tagged) const {
  auto has_entry = [&](const std::string& w) {
    return focus_themes_.count(w) > 0;
  };
  // objects of request verbs
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    if (tagged[i].tag == PosTag::Punct) continue;
    if (!is_request_verb(text::to_lower(tagged[i].word))) continue;
    bool possessive = false;
    int seen_content = 0;
    for (std::size_t j = i + 1; j < tagged.size() && seen_content < 8; ++j) {
      if (tagged[j].tag == PosTag::Punct) continue;
      ++seen_content;
      std::string lw = lower_word(tagged[j].word);
      if (is_possessive(lw)) {
        possessive = true;
        continue;
      }
      if (has_entry(lw) && tagged[j].tag != PosTag::Adjective) return lw;
      if (possessive && tagged[j].tag == PosTag::Noun) return lw;
    }
  }
  // "your <noun>" without an explicit request verb
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    if (tagged[i].tag == PosTag::Punct) continue;
    if (!is_possessive(text::to_lower(tagged[i].word))) continue;
    int seen_content = 0;
    for (std::size_t j = i + 1; j < tagged.size() && seen_content < 3; ++j) {
      if (tagged[j].tag == PosTag::Punct) continue;
      ++seen_content;
      std::string lw = lower_word(tagged[j].word);
      if (has_entry(lw)) return lw;
    }
  }
  return std::nullopt;
}

ResponseClass Classifier::classify_one(const std::string& sentence) const {
  ResponseClass out;
  auto token_lists = tokenize_sentences(sentence);
  if (token_lists.empty()) return out;
  const auto& tokens = token_lists.front();
  auto tagged = pos_tag(tokens);
  Sentence s = analyze(*this, tokens, tagged);
  if (s.content.empty()) return out;

  bool interrogative =
      s.has_question_mark || (!s.has_stop && structure_question(s));

  if (interrogative) {
    auto head = wh_head(s);
    if (head) {
      out.kind = SentenceKind::WhQuestion;
      auto focus = wh_focus(tagged);
      if (focus) {
        out.theme = focus->second;
        if (s.tagged[s.content[*head]].word.size() &&
            focus->first != lower_word(s.tagged[s.content[*head]].word))
          out.asked_for = focus->first;
      } else {
        out.theme = ThemeLabel{ThemeClass::Description, "other"};
      }
      if (!out.asked_for) out.asked_for = request_focus(tagged);
      return out;
    }
    const auto& t0 = s.tagged[s.content[0]];
    if (aux_like(t0.tag) && s.content.size() > 1 &&
        subject_like(s.tagged[s.content[1]].tag)) {
      out.kind = SentenceKind::YesNoQuestion;
      out.asked_for = request_focus(tagged);
      return out;
    }
    // interrogative but neither WH- nor aux-headed: fall through
  }

  // directive?
  std::size_t ci = 0;
  while (ci < s.content.size() &&
         is_politeness(text::to_lower(s.tagged[s.content[ci]].word)))
    ++ci;
  bool directive = false;
  if (ci < s.content.size() &&
      is_directive_head(text::to_lower(s.tagged[s.content[ci]].word)))
    directive = true;
  if (!directive) {
    // "To continue, say 'next'": an offering verb with a sayable object
    auto phrases = directive_phrases(sentence);
    if (!phrases.empty()) {
      for (std::size_t i = 0; i < tagged.size(); ++i) {
        if (is_offering_verb(text::to_lower(tagged[i].word))) {
          directive = true;
          break;
        }
      }
    }
  }
  if (directive) {
    out.kind = SentenceKind::Directive;
    out.suggested_phrases = directive_phrases(sentence);
    out.asked_for = request_focus(tagged);
    if (out.asked_for) {
      auto it = focus_themes_.find(*out.asked_for);
      if (it != focus_themes_.end()) out.theme = it->second;
    }
    return out;
  }

  out.kind = SentenceKind::Informative;
  return out;
}

std::vector<ResponseClass> Classifier::classify_sentences(
    std::string_view response_text) const {
  std::vector<ResponseClass> out;
  for (const auto& sentence : text::split_sentences_quote_aware(response_text))
    out.push_back(classify_one(sentence));
  return out;
}

ResponseClass Classifier::classify(std::string_view response_text) const {
  auto classes = classify_sentences(response_text);
  if (classes.empty()) return ResponseClass{};

  auto rank = [](SentenceKind k) {
    switch (k) {
      case SentenceKind::WhQuestion: return 3;
      case SentenceKind::YesNoQuestion: return 2;
      case SentenceKind::Directive: return 1;
      case SentenceKind::Informative: return 0;
    }
    return 0;
  };

  const ResponseClass* best = &classes.front();
  for (const auto& c : classes)
    if (rank(c.kind) > rank(best->kind)) best = &c;

  ResponseClass out = *best;
  if (out.kind == SentenceKind::Directive) {
    // merge phrases from every directive sentence, textual order
    out.suggested_phrases.clear();
    std::set<std::string> seen;
    for (const auto& c : classes) {
      if (c.kind != SentenceKind::Directive) continue;
      for (const auto& p : c.suggested_phrases)
        if (seen.insert(p).second) out.suggested_phrases.push_back(p);
      if (!out.asked_for && c.asked_for) out.asked_for = c.asked_for;
      if (!out.theme && c.theme) out.theme = c.theme;
    }
  } else {
    out.suggested_phrases.clear();
    for (const auto& c : classes) {
      if (c.kind != out.kind) continue;
      if (!out.asked_for && c.asked_for) out.asked_for = c.asked_for;
    }
  }
  return out;
}

const char* to_string(SentenceKind k) {
  switch (k) {
    case SentenceKind::YesNoQuestion: return "yes_no_question";
    case SentenceKind::WhQuestion: return "wh_question";
    case SentenceKind::Directive: return "directive";
    case SentenceKind::Informative: return "informative";
  }
  return "informative";
}

const char* to_string(ThemeClass t) {
  switch (t) {
    case ThemeClass::Abbreviation: return "abbreviation";
    case ThemeClass::Entity: return "entity";
    case ThemeClass::Description: return "description";
    case ThemeClass::Human: return "human";
    case ThemeClass::Location: return "location";
    case ThemeClass::Numeric: return "numeric";
  }
  return "description";
}

const char* to_string(PosTag t) {
  switch (t) {
    case PosTag::Aux: return "aux";
    case PosTag::AuxNeg: return "aux_neg";
    case PosTag::Modal: return "modal";
    case PosTag::Verb: return "verb";
    case PosTag::Noun: return "noun";
    case PosTag::Pronoun: return "pronoun";
    case PosTag::WhDeterminer: return "wh_det";
    case PosTag::WhPronoun: return "wh_pro";
    case PosTag::WhPossessive: return "wh_pos";
    case PosTag::WhAdverb: return "wh_adv";
    case PosTag::Preposition: return "prep";
    case PosTag::To: return "to";
    case PosTag::Determiner: return "det";
    case PosTag::Adjective: return "adj";
    case PosTag::Adverb: return "adv";
    case PosTag::Number: return "num";
    case PosTag::Punct: return "punct";
    case PosTag::Other: return "other";
  }
  return "other";
}

bool is_wh_tag(PosTag t) {
  return t == PosTag::WhDeterminer || t == PosTag::WhPronoun ||
         t == PosTag::WhPossessive || t == PosTag::WhAdverb;
}

}  // namespace skillprobe::respclass
