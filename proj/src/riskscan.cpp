#include "skillprobe/riskscan.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "skillprobe/data_dir.hpp"
#include "skillprobe/text.hpp"

namespace skillprobe::riskscan {

namespace {

constexpr std::string_view kEdgePunct = ".,;:!?'\"()[]{}<>*-";

bool is_edge_punct(char c) { return kEdgePunct.find(c) != std::string_view::npos; }

char fold_substitution(char c) {
  switch (c) {
    case '@': return 'a';
    case '$': return 's';
    case '0': return 'o';
    case '1': return 'i';
    case '3': return 'e';
    case '4': return 'a';
    case '5': return 's';
    case '7': return 't';
    case '!': return 'i';
    default: return c;
  }
}

std::string strip_edges(std::string_view raw) {
  std::size_t begin = 0, end = raw.size();
  while (begin < end && is_edge_punct(raw[begin])) ++begin;
  while (end > begin && is_edge_punct(raw[end - 1])) --end;
  return std::string(raw.substr(begin, end - begin));
}

// Comparison form of one token: edge punctuation stripped, lowercased, and
// (for tokens that carry letters) digit/symbol stand-ins folded to letters.
std::string match_token(std::string_view raw) {
  std::string core = strip_edges(raw);
  bool has_alpha = std::any_of(core.begin(), core.end(), [](unsigned char c) {
    return std::isalpha(c) != 0;
  });
  std::string out;
  out.reserve(core.size());
  for (char c : core) {
    char folded = has_alpha ? fold_substitution(c) : c;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(folded))));
  }
  return out;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

struct TokenView {
  std::vector<std::string> raw;   // word tokens, verbatim
  std::vector<std::string> norm;  // parallel comparison forms
};

TokenView token_view(std::string_view s) {
  TokenView v;
  for (auto& tok : split_ws(s)) {
    std::string norm = match_token(tok);
    if (norm.empty()) continue;  // pure punctuation
    v.raw.push_back(std::move(tok));
    v.norm.push_back(std::move(norm));
  }
  return v;
}

std::string evidence_from(const std::vector<std::string>& raw, std::size_t start,
                          std::size_t len) {
  std::string joined;
  for (std::size_t i = start; i < start + len; ++i) {
    if (!joined.empty()) joined += ' ';
    joined += raw[i];
  }
  return strip_edges(joined);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

const std::set<std::string>& possessive_words() {
  static const std::set<std::string> words = {"your", "my", "ur", "thy", "our"};
  return words;
}

const std::set<std::string>& request_verbs() {
  static const std::set<std::string> verbs = {
      "tell", "give", "provide", "say",     "enter", "type",
      "state", "share", "know",   "confirm", "ask"};
  return verbs;
}

}  // namespace

const char* to_string(FindingKind k) {
  return k == FindingKind::Expletive ? "expletive" : "pii_request";
}

const char* to_string(ReviewVerdict v) {
  switch (v) {
    case ReviewVerdict::Pending: return "pending";
    case ReviewVerdict::Confirmed: return "confirmed";
    case ReviewVerdict::Rejected: return "rejected";
  }
  return "pending";
}

const char* to_string(PermissionCheck c) {
  switch (c) {
    case PermissionCheck::NoPermissionDeclared: return "no_permission_declared";
    case PermissionCheck::PermissionDeclaredMismatched:
      return "permission_declared_mismatched";
    case PermissionCheck::PermissionDeclaredMatching:
      return "permission_declared_matching";
  }
  return "no_permission_declared";
}

std::optional<FindingKind> finding_kind_from_string(std::string_view s) {
  if (s == "expletive") return FindingKind::Expletive;
  if (s == "pii_request") return FindingKind::PiiRequest;
  return std::nullopt;
}

std::optional<ReviewVerdict> review_verdict_from_string(std::string_view s) {
  if (s == "pending") return ReviewVerdict::Pending;
  if (s == "confirmed") return ReviewVerdict::Confirmed;
  if (s == "rejected") return ReviewVerdict::Rejected;
  return std::nullopt;
}

std::optional<PermissionCheck> permission_check_from_string(std::string_view s) {
  if (s == "no_permission_declared") return PermissionCheck::NoPermissionDeclared;
  if (s == "permission_declared_mismatched")
    return PermissionCheck::PermissionDeclaredMismatched;
  if (s == "permission_declared_matching")
    return PermissionCheck::PermissionDeclaredMatching;
  return std::nullopt;
}

ModerationList ModerationList::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read wordlist: " + file.string());
  ModerationList list;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    list.add_term(line);
  }
  return list;
}

const ModerationList& ModerationList::bundled() {
  static const ModerationList list =
      load(default_data_dir() / "wordlist" / "expletives.txt");
  return list;
}

void ModerationList::add_term(std::string_view term) {
  std::vector<std::string> tokens;
  for (const auto& t : split_ws(term)) {
    std::string norm = match_token(t);
    if (!norm.empty()) tokens.push_back(std::move(norm));
  }
  if (!tokens.empty()) terms_.push_back(std::move(tokens));
}

std::optional<std::string> ModerationList::match(std::string_view text) const {
  TokenView view = token_view(text);
  if (view.norm.empty()) return std::nullopt;
  for (const auto& term : terms_) {
    if (term.size() > view.norm.size()) continue;
    for (std::size_t i = 0; i + term.size() <= view.norm.size(); ++i) {
      bool hit = true;
      for (std::size_t j = 0; j < term.size(); ++j)
        if (view.norm[i + j] != term[j]) {
          hit = false;
          break;
        }
      if (hit) return evidence_from(view.raw, i, term.size());
    }
  }
  return std::nullopt;
}

PiiKeywords PiiKeywords::load(const std::filesystem::path& keywords_file,
                              const std::filesystem::path& aliases_file) {
  PiiKeywords out;
  std::ifstream keywords(keywords_file);
  if (!keywords)
    throw std::runtime_error("cannot read keywords: " + keywords_file.string());
  std::string line;
  while (std::getline(keywords, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.add_keyword(line);
  }
  std::ifstream aliases(aliases_file);
  if (!aliases)
    throw std::runtime_error("cannot read aliases: " + aliases_file.string());
  while (std::getline(aliases, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    out.add_alias(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

const PiiKeywords& PiiKeywords::bundled() {
  static const PiiKeywords keywords =
      load(default_data_dir() / "pii" / "keywords.txt",
           default_data_dir() / "pii" / "aliases.tsv");
  return keywords;
}

namespace {
std::vector<std::string> run_tokens(std::string_view phrase) {
  std::vector<std::string> tokens;
  for (const auto& t : split_ws(phrase)) {
    std::string norm = match_token(t);
    if (!norm.empty()) tokens.push_back(std::move(norm));
  }
  return tokens;
}
}  // namespace

void PiiKeywords::add_keyword(std::string_view canonical) {
  std::string key(canonical);
  if (std::find(canonical_.begin(), canonical_.end(), key) == canonical_.end())
    canonical_.push_back(key);
  auto tokens = run_tokens(canonical);
  if (!tokens.empty()) runs_.emplace_back(std::move(tokens), key);
  std::stable_sort(runs_.begin(), runs_.end(), [](const auto& a, const auto& b) {
    return a.first.size() > b.first.size();
  });
}

void PiiKeywords::add_alias(std::string_view alias, std::string_view canonical) {
  auto tokens = run_tokens(alias);
  if (!tokens.empty()) runs_.emplace_back(std::move(tokens), std::string(canonical));
  std::stable_sort(runs_.begin(), runs_.end(), [](const auto& a, const auto& b) {
    return a.first.size() > b.first.size();
  });
}

std::optional<PiiKeywords::TokenHit> PiiKeywords::find_in_tokens(
    const std::vector<std::string>& words) const {
  std::vector<std::string> norm;
  norm.reserve(words.size());
  for (const auto& w : words) norm.push_back(match_token(w));
  // leftmost match; longer runs win at the same position
  for (std::size_t i = 0; i < norm.size(); ++i) {
    for (const auto& [run, canonical] : runs_) {
      if (i + run.size() > norm.size()) continue;
      bool hit = true;
      for (std::size_t j = 0; j < run.size(); ++j)
        if (norm[i + j] != run[j]) {
          hit = false;
          break;
        }
      if (hit) return TokenHit{canonical, evidence_from(words, i, run.size()), i};
    }
  }
  return std::nullopt;
}

std::vector<RiskFinding> scan_expletives(const explorer::ConversationTree& tree,
                                         const ModerationList& moderation) {
  std::vector<RiskFinding> findings;
  for (const auto& node : tree.nodes) {
    auto evidence = moderation.match(node.text);
    if (!evidence) continue;
    RiskFinding f;
    f.skill_id = tree.skill_id;
    f.kind = FindingKind::Expletive;
    f.response_text = node.text;
    f.evidence = *evidence;
    f.depth = node.depth;
    findings.push_back(std::move(f));
  }
  return findings;
}

std::optional<PiiHit> detect_pii_request(std::string_view response_text,
                                         const respclass::Classifier& classifier,
                                         const PiiKeywords& keywords) {
  for (const auto& sentence : text::split_sentences_quote_aware(response_text)) {
    respclass::ResponseClass cls = classifier.classify(sentence);
    if (cls.kind == respclass::SentenceKind::Informative) continue;

    TokenView view = token_view(sentence);
    auto hit = keywords.find_in_tokens(view.raw);
    if (hit) {
      if (cls.kind == respclass::SentenceKind::WhQuestion)
        return PiiHit{hit->keyword, hit->evidence};
      bool possessive_near = false;
      for (std::size_t back = 1; back <= 3 && back <= hit->start; ++back)
        if (possessive_words().count(view.norm[hit->start - back]))
          possessive_near = true;
      bool request_near = false;
      for (std::size_t back = 1; back <= 6 && back <= hit->start; ++back)
        if (request_verbs().count(view.norm[hit->start - back])) request_near = true;
      if (possessive_near || request_near)
        return PiiHit{hit->keyword, hit->evidence};
      continue;
    }

    // The request focus may canonicalize to a keyword even when no keyword
    // run sits in context range ("tell me, whenever ready, your age").
    if (cls.asked_for) {
      std::vector<std::string> focus = {*cls.asked_for};
      if (auto focus_hit = keywords.find_in_tokens(focus)) {
        for (std::size_t i = 0; i < view.norm.size(); ++i)
          if (view.norm[i] == match_token(*cls.asked_for))
            return PiiHit{focus_hit->keyword, strip_edges(view.raw[i])};
      }
    }
  }
  return std::nullopt;
}

PermissionMap PermissionMap::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read permission map: " + file.string());
  PermissionMap out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    out.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

const PermissionMap& PermissionMap::bundled() {
  static const PermissionMap map =
      load(default_data_dir() / "pii" / "permission_map.tsv");
  return map;
}

void PermissionMap::add(std::string_view keyword, std::string_view permission) {
  map_[std::string(keyword)] = std::string(permission);
}

std::optional<std::string> PermissionMap::permission_for(
    const std::string& keyword) const {
  auto it = map_.find(keyword);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void cross_check_permissions(std::vector<RiskFinding>& findings,
                             const catalog::SkillRecord& record,
                             const PermissionMap& map) {
  for (auto& f : findings) {
    if (f.kind != FindingKind::PiiRequest) continue;
    if (record.permissions.empty()) {
      f.permission_check = PermissionCheck::NoPermissionDeclared;
      continue;
    }
    auto wanted = f.pii_keyword ? map.permission_for(*f.pii_keyword) : std::nullopt;
    bool matching =
        wanted && std::find(record.permissions.begin(), record.permissions.end(),
                            *wanted) != record.permissions.end();
    f.permission_check = matching ? PermissionCheck::PermissionDeclaredMatching
                                  : PermissionCheck::PermissionDeclaredMismatched;
  }
}

std::vector<RiskFinding> scan_tree(const explorer::ConversationTree& tree,
                                   const catalog::SkillRecord& record,
                                   const respclass::Classifier& classifier,
                                   const ModerationList& moderation,
                                   const PiiKeywords& keywords,
                                   const PermissionMap& permissions) {
  std::map<std::string, catalog::UtteranceSource> opening_sources;
  for (const auto& u : catalog::extract_utterances(record))
    if (u.kind == catalog::UtteranceKind::Opening)
      opening_sources.emplace(u.text, u.source);

  auto annotate = [&](RiskFinding& f, const explorer::ConversationNode& node) {
    int root = node.id;
    while (tree.node(root).parent) root = tree.node(root).parent;
    for (const auto& r : tree.roots)
      if (r.node == root) {
        f.opening_utterance = r.utterance;
        break;
      }
    auto src = opening_sources.find(f.opening_utterance);
    if (src != opening_sources.end()) f.utterance_source = src->second;
    f.finding_id =
        hex16(fnv1a64(f.skill_id + "|" + to_string(f.kind) + "|" +
                      text::collapse_whitespace(f.response_text) + "|" + f.evidence +
                      "|" + f.pii_keyword.value_or("")));
  };

  std::vector<RiskFinding> findings = scan_expletives(tree, moderation);
  std::size_t expletive_count = findings.size();
  for (std::size_t i = 0; i < expletive_count; ++i)
    annotate(findings[i], tree.node(tree.find_by_text(
                 text::collapse_whitespace(findings[i].response_text))));

  for (const auto& node : tree.nodes) {
    auto hit = detect_pii_request(node.text, classifier, keywords);
    if (!hit) continue;
    RiskFinding f;
    f.skill_id = tree.skill_id;
    f.kind = FindingKind::PiiRequest;
    f.response_text = node.text;
    f.evidence = hit->evidence;
    f.pii_keyword = hit->keyword;
    f.depth = node.depth;
    annotate(f, node);
    findings.push_back(std::move(f));
  }

  cross_check_permissions(findings, record, permissions);
  return findings;
}

std::vector<RiskFinding> review_queue(std::vector<RiskFinding>& findings,
                                      const std::vector<ReviewVote>& votes) {
  std::map<std::string, std::pair<int, int>> tally;  // finding_id -> (yes, total)
  for (const auto& v : votes) {
    auto& t = tally[v.finding_id];
    if (v.inappropriate) ++t.first;
    ++t.second;
  }
  std::vector<RiskFinding> confirmed;
  for (auto& f : findings) {
    auto it = tally.find(f.finding_id);
    if (it == tally.end()) continue;  // unreviewed stays Pending
    int yes = it->second.first;
    int total = it->second.second;
    int threshold = (3 * total + 3) / 4;  // ceil(3/4 x reviewers)
    f.verdict = yes >= threshold ? ReviewVerdict::Confirmed : ReviewVerdict::Rejected;
    if (f.verdict == ReviewVerdict::Confirmed) confirmed.push_back(f);
  }
  return confirmed;
}

}  // namespace skillprobe::riskscan
