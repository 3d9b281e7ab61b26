#include "skillprobe/catalog.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"
#include "skillprobe/text.hpp"

namespace skillprobe::catalog {

namespace {

const std::set<std::string>& opening_words() {
  static const std::set<std::string> kWords = {
      "open", "launch", "start", "ask", "play", "begin", "talk"};
  return kWords;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Reads an optional array-of-strings field; returns false on a type error.
bool read_string_array(const nlohmann::json& entry, const char* key,
                       std::vector<std::string>& out, std::string& err) {
  if (!entry.contains(key)) return true;
  const auto& v = entry.at(key);
  if (!v.is_array()) {
    err = std::string(key) + " must be an array of strings";
    return false;
  }
  for (const auto& item : v) {
    if (!item.is_string()) {
      err = std::string(key) + " must contain only strings";
      return false;
    }
    out.push_back(item.get<std::string>());
  }
  return true;
}

std::optional<SkillRecord> parse_entry(const nlohmann::json& entry,
                                       std::string& err) {
  if (!entry.is_object()) {
    err = "entry is not an object";
    return std::nullopt;
  }
  SkillRecord rec;
  if (!entry.contains("skill_id") || !entry.at("skill_id").is_string() ||
      entry.at("skill_id").get<std::string>().empty()) {
    err = "missing or empty skill_id";
    return std::nullopt;
  }
  rec.skill_id = entry.at("skill_id").get<std::string>();

  if (entry.contains("name") && entry.at("name").is_string())
    rec.name = entry.at("name").get<std::string>();

  if (!entry.contains("invocation_name") ||
      !entry.at("invocation_name").is_string()) {
    err = "missing invocation_name";
    return std::nullopt;
  }
  rec.invocation_name =
      text::to_lower(trim(entry.at("invocation_name").get<std::string>()));
  if (rec.invocation_name.empty()) {
    err = "invocation_name is empty";
    return std::nullopt;
  }

  if (!read_string_array(entry, "sample_utterances", rec.sample_utterances, err))
    return std::nullopt;
  if (rec.sample_utterances.size() > 3) {
    err = "more than 3 sample utterances";
    return std::nullopt;
  }
  if (!read_string_array(entry, "additional_instructions",
                         rec.additional_instructions, err))
    return std::nullopt;

  if (entry.contains("description") && entry.at("description").is_string())
    rec.description = entry.at("description").get<std::string>();

  if (!entry.contains("category") || !entry.at("category").is_string() ||
      entry.at("category").get<std::string>().empty()) {
    err = "missing or empty category";
    return std::nullopt;
  }
  rec.category = entry.at("category").get<std::string>();

  if (!read_string_array(entry, "permissions", rec.permissions, err))
    return std::nullopt;

  if (entry.contains("icon_digest") && entry.at("icon_digest").is_string())
    rec.icon_digest = entry.at("icon_digest").get<std::string>();

  if (entry.contains("mature_content")) {
    if (!entry.at("mature_content").is_boolean()) {
      err = "mature_content must be a boolean";
      return std::nullopt;
    }
    rec.mature_content = entry.at("mature_content").get<bool>();
  }
  return rec;
}

}  // namespace

Catalog parse_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read catalog file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("catalog is not valid JSON: " + path.string() +
                             ": " + e.what());
  }
  if (!doc.is_array())
    throw std::runtime_error("catalog document must be a JSON array: " +
                             path.string());

  Catalog out;
  std::unordered_set<std::string> seen;
  std::vector<std::string> duplicates;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    std::string err;
    auto rec = parse_entry(doc[i], err);
    if (!rec) {
      out.issues.push_back({i, err});
      continue;
    }
    if (!seen.insert(rec->skill_id).second) {
      duplicates.push_back(rec->skill_id);
      continue;
    }
    out.records.push_back(std::move(*rec));
  }
  if (!duplicates.empty()) {
    std::ostringstream msg;
    msg << "duplicate skill ids in catalog:";
    for (const auto& id : duplicates) msg << ' ' << id;
    throw std::runtime_error(msg.str());
  }
  return out;
}

Utterance classify_utterance(std::string_view raw, const SkillRecord& record,
                             UtteranceSource source) {
  std::string norm = text::normalize_utterance(raw);
  if (norm.empty())
    throw std::invalid_argument("utterance is empty after normalization");
  auto tokens = text::split_tokens(norm);
  Utterance u;
  u.text = norm;
  u.source = source;
  bool opening = opening_words().count(tokens.front()) > 0;
  if (!opening && !record.invocation_name.empty()) {
    auto inv = text::split_tokens(text::normalize_utterance(record.invocation_name));
    opening = text::contains_token_run(tokens, inv);
  }
  u.kind = opening ? UtteranceKind::Opening : UtteranceKind::InSkill;
  return u;
}

std::vector<Utterance> extract_utterances(const SkillRecord& record) {
  std::vector<Utterance> out;
  std::unordered_set<std::string> seen;

  auto add = [&](std::string_view raw, UtteranceSource source) {
    std::string norm = text::normalize_utterance(raw);
    if (norm.empty()) return;
    if (!seen.insert(norm).second) return;
    out.push_back(classify_utterance(norm, record, source));
  };

  for (const auto& s : record.sample_utterances)
    add(s, UtteranceSource::SampleList);
  for (const auto& s : record.additional_instructions)
    add(s, UtteranceSource::AdditionalInstructions);

  static constexpr std::string_view kWakePrefix = "alexa,";
  for (const auto& sentence :
       text::split_description_sentences(record.description)) {
    if (text::starts_with_icase(sentence, kWakePrefix))
      add(sentence.substr(kWakePrefix.size()),
          UtteranceSource::DescriptionInvocationSentence);
  }

  for (const auto& phrase : text::quoted_phrases(record.description)) {
    std::string norm = text::normalize_utterance(phrase);
    std::size_t n = text::split_tokens(norm).size();
    if (n >= 2 && n <= 12) add(phrase, UtteranceSource::DescriptionQuote);
  }
  return out;
}

const char* to_string(UtteranceKind k) {
  switch (k) {
    case UtteranceKind::Opening: return "opening";
    case UtteranceKind::InSkill: return "in_skill";
  }
  return "in_skill";
}

const char* to_string(UtteranceSource s) {
  switch (s) {
    case UtteranceSource::SampleList: return "sample_list";
    case UtteranceSource::AdditionalInstructions: return "additional_instructions";
    case UtteranceSource::DescriptionQuote: return "description_quote";
    case UtteranceSource::DescriptionInvocationSentence:
      return "description_invocation_sentence";
    case UtteranceSource::Generated: return "generated";
  }
  return "generated";
}

std::optional<UtteranceSource> utterance_source_from_string(std::string_view s) {
  if (s == "sample_list") return UtteranceSource::SampleList;
  if (s == "additional_instructions") return UtteranceSource::AdditionalInstructions;
  if (s == "description_quote") return UtteranceSource::DescriptionQuote;
  if (s == "description_invocation_sentence")
    return UtteranceSource::DescriptionInvocationSentence;
  if (s == "generated") return UtteranceSource::Generated;
  return std::nullopt;
}

}  // namespace skillprobe::catalog
