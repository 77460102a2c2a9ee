#include "bscope/sectionmap.h"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bscope/error.h"
#include "bscope/text.h"

namespace bscope {

const SectionKeywordTable& SectionKeywordTable::defaults() {
  static const SectionKeywordTable table({
      {SectionCategory::kConclusion, {"conclusion", "future work"}},
      {SectionCategory::kIntroduction, {"introduction"}},
      {SectionCategory::kRelated,
       {"related work", "background", "previous work", "study"}},
      {SectionCategory::kMethodsResults,
       {"method", "approach", "architect", "experiment", "empiric", "evaluat",
        "result", "analys", "compar", "perform", "discussion"}},
  });
  return table;
}

SectionKeywordTable::SectionKeywordTable(std::vector<Rule> rules)
    : rules_(std::move(rules)) {
  for (auto& rule : rules_) {
    if (rule.category == SectionCategory::kOther) {
      throw InvalidArgument("'other' is the fallback and takes no keywords");
    }
    for (auto& k : rule.keywords) {
      k = normalize_whitespace(k);
      if (k.empty()) throw InvalidArgument("empty section keyword");
    }
  }
}

SectionCategory SectionKeywordTable::categorize(std::string_view heading) const {
  const std::string h = normalize_whitespace(heading);
  for (const auto& rule : rules_) {
    for (const auto& k : rule.keywords) {
      if (h.find(k) != std::string::npos) return rule.category;
    }
  }
  return SectionCategory::kOther;
}

SectionKeywordTable SectionKeywordTable::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("section keyword table: ") + e.what());
  }
  if (!j.is_object() || j.value("version", "") != kSectionKeywordsVersion) {
    throw ParseError("section keyword table: expected version '" +
                     std::string(kSectionKeywordsVersion) + "'");
  }
  if (!j.contains("rules") || !j["rules"].is_array()) {
    throw ParseError("section keyword table: field 'rules' missing");
  }
  std::vector<Rule> rules;
  std::set<SectionCategory> seen;
  for (const auto& jr : j["rules"]) {
    if (!jr.is_object() || !jr.contains("category") || !jr["category"].is_string() ||
        !jr.contains("keywords") || !jr["keywords"].is_array()) {
      throw ParseError("section keyword table: each rule needs category and keywords");
    }
    Rule rule{parse_section_category(jr["category"].get<std::string>()), {}};
    if (!seen.insert(rule.category).second) {
      throw ParseError("section keyword table: duplicate category " +
                       std::string(to_string(rule.category)));
    }
    for (const auto& k : jr["keywords"]) {
      if (!k.is_string()) throw ParseError("section keyword table: keywords must be strings");
      rule.keywords.push_back(k.get<std::string>());
    }
    rules.push_back(std::move(rule));
  }
  try {
    return SectionKeywordTable(std::move(rules));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("section keyword table: ") + e.what());
  }
}

SectionKeywordTable SectionKeywordTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string SectionKeywordTable::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = std::string(kSectionKeywordsVersion);
  j["rules"] = nlohmann::ordered_json::array();
  for (const auto& r : rules_) {
    nlohmann::ordered_json jr;
    jr["category"] = std::string(to_string(r.category));
    jr["keywords"] = r.keywords;
    j["rules"].push_back(std::move(jr));
  }
  return j.dump(2) + "\n";
}

SectionCategory categorize_heading(std::string_view heading) {
  return SectionKeywordTable::defaults().categorize(heading);
}

}  // namespace bscope
