#include "bscope/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bscope/error.h"
#include "bscope/rng.h"
#include "bscope/text.h"

namespace bscope {
namespace {

using Json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("short write to " + path.string());
}

// Field access with diagnostics of the form "paper P: field F: ...".
class Reader {
 public:
  Reader(std::string paper_id, std::string origin)
      : paper_id_(std::move(paper_id)), origin_(std::move(origin)) {}

  void set_paper(std::string id) { paper_id_ = std::move(id); }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    std::string where = paper_id_.empty() ? origin_ : "paper " + paper_id_;
    if (where.empty()) where = "document";
    throw ParseError(where + ": field '" + field + "': " + what);
  }

  const Json& member(const Json& obj, const char* key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(join(path, key), "missing");
    return *it;
  }

  std::string str(const Json& obj, const char* key, const std::string& path) const {
    const Json& v = member(obj, key, path);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
  }

  std::int64_t integer(const Json& obj, const char* key, const std::string& path) const {
    const Json& v = member(obj, key, path);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    return v.get<std::int64_t>();
  }

  int small_int(const Json& obj, const char* key, const std::string& path) const {
    std::int64_t v = integer(obj, key, path);
    if (v < INT32_MIN || v > INT32_MAX) fail(join(path, key), "out of range");
    return static_cast<int>(v);
  }

  std::optional<std::int64_t> opt_integer(const Json& obj, const char* key,
                                          const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) fail(join(path, key), "expected an integer or null");
    return it->get<std::int64_t>();
  }

  bool boolean(const Json& obj, const char* key, const std::string& path) const {
    const Json& v = member(obj, key, path);
    if (!v.is_boolean()) fail(join(path, key), "expected a boolean");
    return v.get<bool>();
  }

  const Json& array(const Json& obj, const char* key, const std::string& path) const {
    const Json& v = member(obj, key, path);
    if (!v.is_array()) fail(join(path, key), "expected an array");
    return v;
  }

  Tokens tokens(const Json& arr, const std::string& path) const {
    if (!arr.is_array()) fail(path, "expected an array of strings");
    Tokens out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) fail(path + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(arr[i].get<std::string>());
    }
    return out;
  }

  template <typename Fn>
  auto enumerated(const Json& obj, const char* key, const std::string& path, Fn parse) const {
    std::string v = str(obj, key, path);
    try {
      return parse(v);
    } catch (const ParseError& e) {
      fail(join(path, key), e.what());
    }
  }

  static std::string join(const std::string& path, const char* key) {
    return path.empty() ? std::string(key) : path + "." + key;
  }

 private:
  std::string paper_id_;
  std::string origin_;
};

Json to_json(const PaperDoc& doc) {
  Json j;
  j["paper_id"] = doc.paper_id;
  j["title"] = doc.title;
  j["abstract"] = doc.abstract;
  j["venue"] = doc.venue;
  j["year"] = doc.year;
  Json sections = Json::array();
  for (const auto& s : doc.sections) {
    Json js;
    js["heading"] = s.heading;
    js["category"] = std::string(to_string(s.category));
    js["paragraphs"] = s.paragraphs;
    Json regions = Json::array();
    for (const auto& r : s.table_regions) {
      Json jr;
      jr["paragraph_index"] = r.paragraph_index;
      jr["sentence_index"] = r.sentence_index;
      regions.push_back(std::move(jr));
    }
    js["table_regions"] = std::move(regions);
    sections.push_back(std::move(js));
  }
  j["sections"] = std::move(sections);
  Json refs = Json::array();
  for (const auto& r : doc.references) {
    Json jr;
    jr["ref_id"] = r.ref_id;
    jr["raw_string"] = r.raw_string;
    jr["cited_title"] = r.cited_title;
    jr["cited_year"] = r.cited_year ? Json(*r.cited_year) : Json(nullptr);
    jr["citation_count"] = r.citation_count ? Json(*r.citation_count) : Json(nullptr);
    jr["label"] = std::string(to_string(r.label));
    refs.push_back(std::move(jr));
  }
  j["references"] = std::move(refs);
  Json mentions = Json::array();
  for (const auto& m : doc.mentions) {
    Json jm;
    jm["ref_id"] = m.ref_id;
    jm["section_index"] = m.section_index;
    jm["paragraph_index"] = m.paragraph_index;
    jm["sentence_index"] = m.sentence_index;
    jm["token_offset"] = m.token_offset;
    jm["in_table"] = m.in_table;
    mentions.push_back(std::move(jm));
  }
  j["mentions"] = std::move(mentions);
  j["split_tag"] = std::string(to_string(doc.split_tag));
  return j;
}

PaperDoc from_json(const Json& j, Reader& rd) {
  PaperDoc doc;
  if (!j.is_object()) rd.fail("", "expected a JSON object");
  doc.paper_id = rd.str(j, "paper_id", "");
  rd.set_paper(doc.paper_id);
  doc.title = rd.tokens(rd.member(j, "title", ""), "title");
  doc.abstract = rd.tokens(rd.member(j, "abstract", ""), "abstract");
  doc.venue = rd.str(j, "venue", "");
  doc.year = rd.small_int(j, "year", "");

  const Json& sections = rd.array(j, "sections", "");
  for (std::size_t si = 0; si < sections.size(); ++si) {
    const std::string sp = "sections[" + std::to_string(si) + "]";
    const Json& js = sections[si];
    Section s;
    s.heading = rd.str(js, "heading", sp);
    s.category = rd.enumerated(js, "category", sp, parse_section_category);
    const Json& paras = rd.array(js, "paragraphs", sp);
    for (std::size_t pi = 0; pi < paras.size(); ++pi) {
      const std::string pp = sp + ".paragraphs[" + std::to_string(pi) + "]";
      if (!paras[pi].is_array()) rd.fail(pp, "expected an array of sentences");
      Paragraph para;
      for (std::size_t ki = 0; ki < paras[pi].size(); ++ki) {
        para.push_back(rd.tokens(paras[pi][ki], pp + "[" + std::to_string(ki) + "]"));
      }
      s.paragraphs.push_back(std::move(para));
    }
    const Json& regions = rd.array(js, "table_regions", sp);
    for (std::size_t ri = 0; ri < regions.size(); ++ri) {
      const std::string rp = sp + ".table_regions[" + std::to_string(ri) + "]";
      TableRegion r;
      r.paragraph_index = rd.small_int(regions[ri], "paragraph_index", rp);
      r.sentence_index = rd.small_int(regions[ri], "sentence_index", rp);
      s.table_regions.push_back(r);
    }
    doc.sections.push_back(std::move(s));
  }

  const Json& refs = rd.array(j, "references", "");
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const std::string rp = "references[" + std::to_string(i) + "]";
    Reference r;
    r.ref_id = rd.str(refs[i], "ref_id", rp);
    r.raw_string = rd.str(refs[i], "raw_string", rp);
    r.cited_title = rd.str(refs[i], "cited_title", rp);
    if (auto y = rd.opt_integer(refs[i], "cited_year", rp)) {
      r.cited_year = static_cast<int>(*y);
    }
    r.citation_count = rd.opt_integer(refs[i], "citation_count", rp);
    if (r.citation_count && *r.citation_count < 0) {
      rd.fail(rp + ".citation_count", "must be nonnegative");
    }
    r.label = rd.enumerated(refs[i], "label", rp, parse_label);
    doc.references.push_back(std::move(r));
  }

  const Json& mentions = rd.array(j, "mentions", "");
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    const std::string mp = "mentions[" + std::to_string(i) + "]";
    CitationMention m;
    m.ref_id = rd.str(mentions[i], "ref_id", mp);
    m.section_index = rd.small_int(mentions[i], "section_index", mp);
    m.paragraph_index = rd.small_int(mentions[i], "paragraph_index", mp);
    m.sentence_index = rd.small_int(mentions[i], "sentence_index", mp);
    m.token_offset = rd.small_int(mentions[i], "token_offset", mp);
    m.in_table = rd.boolean(mentions[i], "in_table", mp);
    doc.mentions.push_back(std::move(m));
  }
  doc.split_tag = rd.enumerated(j, "split_tag", "", parse_split_tag);
  return doc;
}

std::string safe_file_stem(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out[0] == '.') out.insert(out.begin(), '_');
  return out;
}

}  // namespace

void validate_document(const PaperDoc& doc) {
  auto fail = [&](const std::string& field, const std::string& what) {
    throw IntegrityError("paper " + doc.paper_id + ": field '" + field + "': " + what);
  };
  if (doc.paper_id.empty()) fail("paper_id", "empty");
  if (doc.year < 1900 || doc.year > 2100) {
    fail("year", std::to_string(doc.year) + " outside [1900, 2100]");
  }
  for (std::size_t si = 0; si < doc.sections.size(); ++si) {
    const Section& s = doc.sections[si];
    for (std::size_t ri = 0; ri < s.table_regions.size(); ++ri) {
      const TableRegion& r = s.table_regions[ri];
      const bool ok = r.paragraph_index >= 0 &&
                      r.paragraph_index < static_cast<int>(s.paragraphs.size()) &&
                      r.sentence_index >= 0 &&
                      r.sentence_index <
                          static_cast<int>(s.paragraphs[static_cast<std::size_t>(r.paragraph_index)].size());
      if (!ok) {
        fail("sections[" + std::to_string(si) + "].table_regions[" + std::to_string(ri) + "]",
             "does not address an existing sentence");
      }
    }
  }
  std::set<std::string_view> ids;
  for (const auto& r : doc.references) {
    if (r.ref_id.empty()) fail("references.ref_id", "empty");
    if (!ids.insert(r.ref_id).second) fail("references.ref_id", "duplicate '" + r.ref_id + "'");
    if (r.citation_count && *r.citation_count < 0) {
      fail("references.citation_count", "negative for '" + r.ref_id + "'");
    }
  }
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    const CitationMention& m = doc.mentions[i];
    const std::string field = "mentions[" + std::to_string(i) + "]";
    if (!ids.contains(m.ref_id)) fail(field + ".ref_id", "dangling reference '" + m.ref_id + "'");
    if (m.section_index < 0 || m.section_index >= static_cast<int>(doc.sections.size())) {
      fail(field + ".section_index", "out of range");
    }
    const Section& s = doc.sections[static_cast<std::size_t>(m.section_index)];
    if (m.paragraph_index < 0 || m.paragraph_index >= static_cast<int>(s.paragraphs.size())) {
      fail(field + ".paragraph_index", "out of range");
    }
    const Paragraph& p = s.paragraphs[static_cast<std::size_t>(m.paragraph_index)];
    if (m.sentence_index < 0 || m.sentence_index >= static_cast<int>(p.size())) {
      fail(field + ".sentence_index", "out of range");
    }
    const Sentence& sent = p[static_cast<std::size_t>(m.sentence_index)];
    if (m.token_offset < 0 || m.token_offset >= static_cast<int>(sent.size())) {
      fail(field + ".token_offset", "outside the sentence");
    }
    if (m.in_table != s.is_table(m.paragraph_index, m.sentence_index)) {
      fail(field + ".in_table", "disagrees with the section's table regions");
    }
  }
}

std::string serialize_document(const PaperDoc& doc) {
  return to_json(doc).dump(2) + "\n";
}

PaperDoc parse_document(std::string_view text, std::string_view origin) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(origin.empty() ? "document" : origin) + ": " + e.what());
  }
  Reader rd("", std::string(origin));
  PaperDoc doc = from_json(j, rd);
  validate_document(doc);
  return doc;
}

std::vector<PaperDoc> load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("corpus directory not found: " + dir.string());
  const fs::path manifest_path = dir / kManifestFileName;
  if (!fs::exists(manifest_path)) {
    if (fs::directory_iterator(dir) == fs::directory_iterator()) return {};
    throw ParseError(dir.string() + ": missing " + std::string(kManifestFileName));
  }
  Json manifest;
  try {
    manifest = Json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("schema") || !manifest["schema"].is_string()) {
    throw ParseError(manifest_path.string() + ": field 'schema' missing");
  }
  if (manifest["schema"].get<std::string>() != kCorpusSchemaVersion) {
    throw ParseError(manifest_path.string() + ": unsupported schema '" +
                     manifest["schema"].get<std::string>() + "'");
  }
  if (!manifest.contains("papers") || !manifest["papers"].is_array()) {
    throw ParseError(manifest_path.string() + ": field 'papers' missing");
  }
  std::vector<PaperDoc> docs;
  std::set<std::string> seen;
  for (const auto& entry : manifest["papers"]) {
    if (!entry.is_string()) throw ParseError(manifest_path.string() + ": non-string paper entry");
    const fs::path file = dir / entry.get<std::string>();
    PaperDoc doc = parse_document(read_file(file), file.filename().string());
    if (!seen.insert(doc.paper_id).second) {
      throw IntegrityError("paper " + doc.paper_id + ": duplicate paper_id in corpus");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void write_corpus(const std::filesystem::path& dir, std::span<const PaperDoc> docs) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create corpus directory " + dir.string());
  }
  std::set<std::string> ids;
  std::set<std::string> files;
  Json names = Json::array();
  for (const auto& doc : docs) {
    validate_document(doc);
    if (!ids.insert(doc.paper_id).second) {
      throw IntegrityError("paper " + doc.paper_id + ": duplicate paper_id in corpus");
    }
    std::string name = safe_file_stem(doc.paper_id) + ".json";
    for (int k = 2; files.contains(name); ++k) {
      name = safe_file_stem(doc.paper_id) + "~" + std::to_string(k) + ".json";
    }
    files.insert(name);
    write_file(dir / name, serialize_document(doc));
    names.push_back(name);
  }
  Json manifest;
  manifest["schema"] = std::string(kCorpusSchemaVersion);
  manifest["papers"] = std::move(names);
  write_file(dir / kManifestFileName, manifest.dump(2) + "\n");
}

const std::vector<std::string>& default_filter_keywords() {
  static const std::vector<std::string> keywords = {
      "short papers", "workshop",         "demo",
      "tutorial",     "poster",           "project notes",
      "shared task",  "doctoral consortium", "companion volume",
      "interactive presentation"};
  return keywords;
}

std::string matched_filter_keyword(const PaperDoc& doc,
                                   std::span<const std::string> keywords) {
  std::string title;
  for (const auto& t : doc.title) {
    if (!title.empty()) title.push_back(' ');
    title += t;
  }
  const std::string haystacks[] = {to_lower(title), to_lower(doc.venue)};
  for (const auto& k : keywords) {
    for (const auto& h : haystacks) {
      // Keywords match from a word start, so "workshop" also covers
      // "workshops" but not "minishop".
      for (auto pos = h.find(k); pos != std::string::npos; pos = h.find(k, pos + 1)) {
        if (pos == 0 || !std::isalnum(static_cast<unsigned char>(h[pos - 1]))) return k;
      }
    }
  }
  return {};
}

FilterResult filter_papers(std::vector<PaperDoc> docs) {
  return filter_papers(std::move(docs), default_filter_keywords());
}

FilterResult filter_papers(std::vector<PaperDoc> docs,
                           std::span<const std::string> keywords) {
  FilterResult out;
  for (auto& doc : docs) {
    if (matched_filter_keyword(doc, keywords).empty()) {
      out.kept.push_back(std::move(doc));
    } else {
      out.discarded.push_back(std::move(doc));
    }
  }
  return out;
}

std::array<std::size_t, 3> split_counts(std::size_t n, const SplitSpec& spec) {
  double total = 0.0;
  for (double r : spec.ratios) {
    if (!(r >= 0.0)) throw InvalidArgument("split ratios must be nonnegative");
    total += r;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw InvalidArgument("split ratios must sum to 1");
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = spec.ratios[i] * static_cast<double>(n);
    // Guard against 0.7 * 10 landing a hair below 7.
    const double whole = std::floor(exact + 1e-9);
    counts[i] = static_cast<std::size_t>(whole);
    remainders[i] = std::max(0.0, exact - whole);
    assigned += counts[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % 3]];
  return counts;
}

std::vector<PaperDoc> assign_splits(std::vector<PaperDoc> docs, const SplitSpec& spec) {
  if (docs.size() < 3) throw InvalidArgument("need at least 3 papers to split");
  for (const auto& d : docs) {
    if (d.split_tag != SplitTag::kUnassigned) {
      throw InvalidArgument("paper " + d.paper_id + " already has a split");
    }
  }
  const auto counts = split_counts(docs.size(), spec);
  // Shuffle an id-sorted order so the outcome does not depend on input order.
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return docs[a].paper_id < docs[b].paper_id; });
  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::size_t k = 0;
  const SplitTag tags[] = {SplitTag::kTrain, SplitTag::kDev, SplitTag::kTest};
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t c = 0; c < counts[s]; ++c) docs[order[k++]].split_tag = tags[s];
  }
  return docs;
}

double cohens_kappa(std::span<const Label> labels_a, std::span<const Label> labels_b) {
  if (labels_a.size() != labels_b.size()) {
    throw InvalidArgument("cohens_kappa: sequences differ in length");
  }
  if (labels_a.empty()) throw InvalidArgument("cohens_kappa: empty input");
  constexpr std::size_t k = 3;
  std::array<double, k> pa{}, pb{};
  double agree = 0.0;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    const auto a = static_cast<std::size_t>(labels_a[i]);
    const auto b = static_cast<std::size_t>(labels_b[i]);
    pa[a] += 1.0;
    pb[b] += 1.0;
    if (a == b) agree += 1.0;
  }
  const double n = static_cast<double>(labels_a.size());
  const double po = agree / n;
  double pe = 0.0;
  for (std::size_t c = 0; c < k; ++c) pe += (pa[c] / n) * (pb[c] / n);
  if (pe >= 1.0) return po >= 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

std::vector<Annotation> parse_annotations(std::string_view text) {
  std::vector<Annotation> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
      throw ParseError("annotations line " + std::to_string(line_no) +
                       ": expected paper_id<TAB>ref_id<TAB>label");
    }
    Annotation a;
    a.paper_id = std::string(line.substr(0, t1));
    a.ref_id = std::string(line.substr(t1 + 1, t2 - t1 - 1));
    try {
      a.label = parse_label(line.substr(t2 + 1));
    } catch (const ParseError& e) {
      throw ParseError("annotations line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::string serialize_annotations(std::span<const Annotation> annotations) {
  std::string out;
  for (const auto& a : annotations) {
    out += a.paper_id;
    out += '\t';
    out += a.ref_id;
    out += '\t';
    out += to_string(a.label);
    out += '\n';
  }
  return out;
}

std::vector<Annotation> read_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_file(path));
}

void write_annotations(const std::filesystem::path& path,
                       std::span<const Annotation> annotations) {
  write_file(path, serialize_annotations(annotations));
}

void apply_annotations(std::vector<PaperDoc>& docs, std::span<const Annotation> annotations) {
  std::map<std::string, PaperDoc*, std::less<>> by_id;
  for (auto& d : docs) by_id[d.paper_id] = &d;
  for (const auto& a : annotations) {
    auto it = by_id.find(a.paper_id);
    if (it == by_id.end()) throw IntegrityError("annotation names unknown paper " + a.paper_id);
    Reference* r = it->second->find_reference(a.ref_id);
    if (r == nullptr) {
      throw IntegrityError("paper " + a.paper_id + ": annotation names unknown reference " + a.ref_id);
    }
    r->label = a.label;
  }
}

std::vector<Annotation> extract_annotations(std::span<const PaperDoc> docs) {
  std::vector<Annotation> out;
  for (const auto& d : docs) {
    for (const auto& r : d.references) {
      if (r.label != Label::kUnlabeled) out.push_back({d.paper_id, r.ref_id, r.label});
    }
  }
  return out;
}

}  // namespace bscope
