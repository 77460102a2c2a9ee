#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bscope/types.h"

namespace bscope {

inline constexpr std::string_view kSectionKeywordsVersion = "section-keywords/1";

// Ordered keyword rules. The first rule whose keyword occurs as a substring
// of the lowercased heading decides the category; no hit means kOther.
class SectionKeywordTable {
 public:
  struct Rule {
    SectionCategory category;
    std::vector<std::string> keywords;
  };

  // conclusion > introduction > related > methods_results.
  static const SectionKeywordTable& defaults();

  explicit SectionKeywordTable(std::vector<Rule> rules);

  // JSON document: {"version": "section-keywords/1", "rules": [...]}.
  static SectionKeywordTable from_json(std::string_view text);
  static SectionKeywordTable load(const std::filesystem::path& path);
  std::string to_json() const;

  SectionCategory categorize(std::string_view heading) const;

  const std::vector<Rule>& rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;
};

SectionCategory categorize_heading(std::string_view heading);

}  // namespace bscope
