#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "bscope/citation_provider.h"
#include "bscope/context.h"
#include "bscope/corpus.h"
#include "bscope/error.h"
#include "bscope/eval.h"
#include "bscope/features.h"
#include "bscope/heuristics.h"
#include "bscope/mma/checkpoint.h"
#include "bscope/mma/config.h"
#include "bscope/mma/dataset.h"
#include "bscope/mma/embedder.h"
#include "bscope/mma/train.h"

namespace bscope::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Raised for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

// Effective settings of a command, written next to its outputs.
void echo_config(const fs::path& dir, const std::string& command, const Json& settings) {
  Json j;
  j["command"] = command;
  j["settings"] = settings;
  write_file(dir / "effective_config.json", j.dump(2) + "\n");
}

CueLexicon load_lexicon(const std::string& path) {
  return path.empty() ? CueLexicon::defaults() : CueLexicon::load(path);
}

std::vector<PaperDoc> select_split(const std::vector<PaperDoc>& docs, const std::string& split) {
  if (split == "all") return docs;
  const SplitTag tag = parse_split_tag(split);
  std::vector<PaperDoc> out;
  for (const auto& d : docs) {
    if (d.split_tag == tag) out.push_back(d);
  }
  return out;
}

// ---- ingest ----

struct IngestArgs {
  std::string input;
  std::string output;
  bool filter = false;
  std::string keywords;
  std::string annotations;
  std::optional<std::uint64_t> split_seed;
};

int ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(a.input)) throw IoError("not a directory: " + a.input);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.input)) {
    const fs::path& p = entry.path();
    if (entry.is_regular_file() && p.extension() == ".json" && p.filename() != kManifestFileName) {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<PaperDoc> docs;
  std::set<std::string> seen;
  int errors = 0;
  for (const auto& file : files) {
    try {
      PaperDoc doc = parse_document(read_file(file), file.filename().string());
      if (!seen.insert(doc.paper_id).second) {
        throw IntegrityError("duplicate paper_id '" + doc.paper_id + "'");
      }
      docs.push_back(std::move(doc));
    } catch (const Error& e) {
      err << file.string() << ": " << e.what() << "\n";
      ++errors;
    }
  }

  if (!a.annotations.empty()) apply_annotations(docs, read_annotations(a.annotations));

  std::vector<std::string> keywords = default_filter_keywords();
  if (!a.keywords.empty()) {
    keywords.clear();
    std::istringstream in(read_file(a.keywords));
    for (std::string w; in >> w;) keywords.push_back(w);
  }
  std::string discards = "paper_id\tkeyword\n";
  std::size_t discarded = 0;
  if (a.filter) {
    std::vector<PaperDoc> kept;
    for (auto& d : docs) {
      const std::string hit = matched_filter_keyword(d, keywords);
      if (hit.empty()) {
        kept.push_back(std::move(d));
      } else {
        discards += d.paper_id + "\t" + hit + "\n";
        ++discarded;
      }
    }
    docs = std::move(kept);
  }
  if (a.split_seed) docs = assign_splits(std::move(docs), {.seed = *a.split_seed});
  std::sort(docs.begin(), docs.end(),
            [](const PaperDoc& x, const PaperDoc& y) { return x.paper_id < y.paper_id; });

  make_dir(a.output);
  write_corpus(a.output, docs);
  write_file(fs::path(a.output) / "discards.tsv", discards);

  std::array<std::size_t, 4> per_split{};
  for (const auto& d : docs) ++per_split[static_cast<std::size_t>(d.split_tag)];
  Json report;
  report["input_files"] = files.size();
  report["kept"] = docs.size();
  report["discarded"] = discarded;
  report["errors"] = errors;
  report["splits"] = {{"train", per_split[0]}, {"dev", per_split[1]}, {"test", per_split[2]},
                      {"unassigned", per_split[3]}};
  write_file(fs::path(a.output) / "ingest_report.json", report.dump(2) + "\n");
  Json settings = {{"input", a.input}, {"filter", a.filter}, {"keywords", keywords}};
  if (!a.annotations.empty()) settings["annotations"] = a.annotations;
  if (a.split_seed) settings["split_seed"] = *a.split_seed;
  echo_config(a.output, "ingest", settings);

  out << fmt::format("kept {} discarded {} errors {}\n", docs.size(), discarded, errors);
  return errors == 0 ? kOk : kFailure;
}

// ---- stats ----

struct StatsArgs {
  std::string corpus;
  std::string output;
  std::vector<int> tables = {1, 2, 4, 5};
  std::vector<std::string> agreement;
};

double agreement_kappa(const std::string& a_path, const std::string& b_path, std::size_t& n) {
  std::map<std::pair<std::string, std::string>, Label> a;
  for (const auto& x : read_annotations(a_path)) a[{x.paper_id, x.ref_id}] = x.label;
  std::vector<Label> la, lb;
  for (const auto& y : read_annotations(b_path)) {
    auto it = a.find({y.paper_id, y.ref_id});
    if (it == a.end()) continue;
    la.push_back(it->second);
    lb.push_back(y.label);
  }
  n = la.size();
  return cohens_kappa(la, lb);
}

int stats(const StatsArgs& a, std::ostream& out) {
  for (int t : a.tables) {
    if (t != 1 && t != 2 && t != 4 && t != 5) {
      throw UsageError(fmt::format("unknown table id {} (expected 1, 2, 4 or 5)", t));
    }
  }
  const std::vector<PaperDoc> docs = load_corpus(a.corpus);
  make_dir(a.output);
  const fs::path dir = a.output;
  for (int t : a.tables) {
    std::string csv, text;
    switch (t) {
      case 1: {
        const auto s = dataset_summary(docs);
        csv = summary_csv(s);
        text = summary_text(s);
        break;
      }
      case 2: {
        const auto buckets = default_year_buckets();
        const auto s = corpus_stats(docs, buckets);
        csv = corpus_stats_csv(s);
        text = corpus_stats_text(s);
        break;
      }
      case 4: {
        const auto rows = section_distribution(docs);
        csv = section_distribution_csv(rows);
        text = section_distribution_text(rows);
        break;
      }
      case 5:
        csv = rule_metrics_csv(docs);
        text = rule_metrics_text(docs);
        break;
    }
    write_file(dir / fmt::format("table{}.csv", t), csv);
    write_file(dir / fmt::format("table{}.txt", t), text);
    out << text << "\n";
  }
  Json settings = {{"corpus", a.corpus}, {"tables", a.tables}};
  if (!a.agreement.empty()) {
    std::size_t n = 0;
    const double kappa = agreement_kappa(a.agreement[0], a.agreement[1], n);
    const std::string line = fmt::format("cohen_kappa {:.4f} over {} shared references\n", kappa, n);
    write_file(dir / "agreement.txt", line);
    out << line;
    settings["agreement"] = a.agreement;
  }
  echo_config(dir, "stats", settings);
  return kOk;
}

// ---- features ----

struct FeaturesArgs {
  std::string corpus;
  std::string output;
  bool dump_windows = false;
  std::string provider = "none";
  std::string stub_file;
  std::string api_url = HttpCitationProvider::Options{}.base_url;
  std::string cache_dir;
  bool no_cache = false;
  std::string lexicon;
  std::string count_transform = "log1p";
};

std::unique_ptr<CitationCountProvider> make_provider(const FeaturesArgs& a) {
  if (a.provider == "stub") {
    if (a.stub_file.empty()) throw UsageError("--provider stub needs --stub-file");
    return std::make_unique<StubCitationProvider>(StubCitationProvider::load(a.stub_file));
  }
  if (a.provider == "http") {
    HttpCitationProvider::Options o;
    o.base_url = a.api_url;
    if (const char* key = std::getenv("BASELINE_SCOPE_API_KEY")) o.api_key = key;
    return std::make_unique<HttpCitationProvider>(o);
  }
  return nullptr;
}

int features(const FeaturesArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<PaperDoc> docs = load_corpus(a.corpus);
  const CueLexicon lexicon = load_lexicon(a.lexicon);
  FeatureOptions options;
  options.count_transform = a.count_transform == "raw" ? CountTransform::kRaw : CountTransform::kLog1p;
  make_dir(a.output);
  const fs::path dir = a.output;
  Json settings = {{"corpus", a.corpus},
                   {"provider", a.provider},
                   {"count_transform", a.count_transform},
                   {"lexicon_fingerprint", lexicon.fingerprint()}};

  int failures = 0;
  if (auto provider = make_provider(a)) {
    std::optional<CitationCache> cache;
    if (!a.no_cache) {
      cache.emplace(a.cache_dir.empty() ? default_cache_dir() : fs::path(a.cache_dir));
      settings["cache"] = cache->file().string();
    }
    std::string tsv = "paper_id\t" + FetchReport{}.to_tsv();
    for (auto& doc : docs) {
      const FetchReport r = fetch_citation_counts(doc.references, *provider, cache ? &*cache : nullptr);
      const std::string body = r.to_tsv();
      std::istringstream lines(body.substr(body.find('\n') + 1));
      for (std::string line; std::getline(lines, line);) tsv += doc.paper_id + "\t" + line + "\n";
      for (const auto& item : r.items) {
        if (item.outcome == FetchReport::Outcome::kFailed) {
          err << fmt::format("{}/{}: citation count lookup failed: {}\n", doc.paper_id, item.ref_id,
                             item.detail);
          ++failures;
        }
      }
    }
    write_file(dir / "fetch_report.tsv", tsv);
    make_dir(dir / "corpus");
    write_corpus(dir / "corpus", docs);
  }

  std::string table = "paper_id\tref_id\tlabel";
  for (std::size_t i = 0; i < kFeatureDim; ++i) table += fmt::format("\tf{}", i);
  table += "\n";
  std::string windows;
  for (const auto& doc : docs) {
    for (const auto& ref : doc.references) {
      const auto flat = compute_features(doc, ref.ref_id, lexicon, options).flatten();
      table += doc.paper_id + "\t" + ref.ref_id + "\t" + std::string(to_string(ref.label));
      for (double v : flat) table += fmt::format("\t{:.6g}", v);
      table += "\n";
      if (!a.dump_windows) continue;
      const auto m = representative_mention(doc, ref.ref_id);
      windows += fmt::format("== {} {}\n", doc.paper_id, ref.ref_id);
      windows += m ? extract_window(doc, doc.mentions[*m], options.window).dump() + "\n"
                   : std::string("(no in-text mention)\n\n");
    }
  }
  write_file(dir / "features.tsv", table);
  if (a.dump_windows) write_file(dir / "windows.txt", windows);
  echo_config(dir, "features", settings);
  out << fmt::format("wrote features for {} papers\n", docs.size());
  return failures == 0 ? kOk : kFailure;
}

// ---- model commands ----

struct TrainArgs {
  std::string corpus;
  std::string output;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  bool toy_embedder = false;
  std::string embedder;
  std::string lexicon;
  std::string resume;
};

std::unique_ptr<mma::Embedder> resolve_embedder(const std::string& id, bool toy,
                                                const mma::MmaConfig& config) {
  if (toy) return std::make_unique<mma::HashEmbedder>(config.context_dim, config.layer_count);
  if (id.empty()) throw UsageError("no embedder: pass --embedder <id> or --toy-embedder");
  auto e = mma::make_embedder(id);
  if (e->dimension() != config.context_dim || e->layer_count() != config.layer_count) {
    throw InvalidArgument(fmt::format("embedder {} yields {}x{} but the config expects {}x{}", id,
                                      e->layer_count(), e->dimension(), config.layer_count,
                                      config.context_dim));
  }
  return e;
}

int train(TrainArgs a, std::ostream& out, std::ostream& err) {
  if (a.config.empty()) throw UsageError("--config is required");
  if (!fs::is_regular_file(a.config)) throw UsageError("config file not found: " + a.config);
  Json file = Json::parse(read_file(a.config), nullptr, false);
  if (file.is_discarded() || !file.is_object()) throw ParseError(a.config + ": not a JSON object");
  for (auto [key, slot] : {std::pair<std::string, std::string*>{"corpus", &a.corpus},
                            {"output", &a.output},
                            {"embedder", &a.embedder},
                            {"lexicon", &a.lexicon}}) {
    if (!file.contains(key)) continue;
    if (!file[key].is_string()) throw ParseError(fmt::format("{}: '{}' must be a string", a.config, key));
    // Flags and positionals take precedence over the file.
    if (slot->empty()) *slot = file[key].get<std::string>();
    file.erase(key);
  }
  if (a.corpus.empty() || a.output.empty()) throw UsageError("corpus and output directory are required");

  mma::MmaConfig config = mma::MmaConfig::from_json(file.dump());
  if (a.seed) config.seed = *a.seed;
  if (a.epochs) config.epochs = *a.epochs;
  config.validate();

  const CueLexicon lexicon = load_lexicon(a.lexicon);
  const auto embedder = resolve_embedder(a.embedder, a.toy_embedder, config);
  std::optional<mma::Checkpoint> resumed;
  if (!a.resume.empty()) {
    resumed.emplace(mma::load_checkpoint(a.resume));
    mma::verify_checkpoint(resumed->meta, config, lexicon.fingerprint(), embedder->identifier());
  }

  const std::vector<PaperDoc> docs = load_corpus(a.corpus);
  const auto train_set = mma::collect_examples(docs, lexicon, config, SplitTag::kTrain);
  const auto dev_set = mma::collect_examples(docs, lexicon, config, SplitTag::kDev);
  if (train_set.empty() || dev_set.empty()) {
    throw InvalidArgument("corpus needs labeled train and dev splits (see ingest --split-seed)");
  }

  make_dir(a.output);
  const fs::path dir = a.output;
  Json settings = {{"corpus", a.corpus},
                   {"embedder", embedder->identifier()},
                   {"lexicon_fingerprint", lexicon.fingerprint()},
                   {"train_examples", train_set.size()},
                   {"dev_examples", dev_set.size()},
                   {"model", Json::parse(config.to_json())}};
  if (!a.resume.empty()) settings["resume"] = a.resume;
  echo_config(dir, "train", settings);
  write_file(dir / "config.json", config.to_json() + "\n");

  std::ofstream log(dir / "train_log.jsonl", std::ios::trunc);
  if (!log) throw IoError("cannot write " + (dir / "train_log.jsonl").string());
  mma::TrainOptions options;
  options.on_epoch = [&](const mma::EpochRecord& r) {
    log << r.to_json_line() << "\n";
    log.flush();
    err << fmt::format("epoch {:>3}  train_loss {:.4f}  dev_loss {:.4f}  dev_f1 {:.4f}{}\n", r.epoch,
                       r.train_loss, r.dev_loss, r.dev.overall.f1, r.best ? "  *" : "");
  };
  mma::TrainResult result = mma::train(train_set, dev_set, *embedder, config, options,
                                       resumed ? &resumed->model : nullptr);
  mma::save_checkpoint(dir / "model.ckpt", result.model,
                       {config, lexicon.fingerprint(), embedder->identifier(),
                        result.class_weights, result.best_epoch});
  out << fmt::format("best epoch {} of {}; checkpoint {}\n", result.best_epoch, result.log.size(),
                     (dir / "model.ckpt").string());
  return kOk;
}

struct ModelArgs {
  std::string corpus;
  std::string checkpoint;
  std::string output;
  std::string split;
  std::string lexicon;
  std::string config;
};

struct Loaded {
  mma::Checkpoint checkpoint;
  CueLexicon lexicon;
  std::unique_ptr<mma::Embedder> embedder;
};

Loaded load_model(const ModelArgs& a) {
  mma::Checkpoint ckpt = mma::load_checkpoint(a.checkpoint);
  CueLexicon lexicon = load_lexicon(a.lexicon);
  const mma::MmaConfig expected =
      a.config.empty() ? ckpt.meta.config : mma::MmaConfig::from_json(read_file(a.config));
  auto embedder = mma::make_embedder(ckpt.meta.embedder_id);
  mma::verify_checkpoint(ckpt.meta, expected, lexicon.fingerprint(), embedder->identifier());
  return {std::move(ckpt), std::move(lexicon), std::move(embedder)};
}

std::string predictions_tsv(const std::vector<mma::LabeledExample>& ex,
                            const std::vector<mma::Prediction>& pred) {
  std::string out = "paper_id\tref_id\tgold\tpredicted\tprob_baseline\tfeatures_only\n";
  for (std::size_t i = 0; i < ex.size(); ++i) {
    out += fmt::format("{}\t{}\t{}\t{}\t{:.6f}\t{}\n", ex[i].paper_id, ex[i].ref_id,
                       to_string(ex[i].label), to_string(pred[i].label), pred[i].prob_baseline,
                       pred[i].features_only ? 1 : 0);
  }
  return out;
}

Json model_settings(const ModelArgs& a, const Loaded& m) {
  return {{"corpus", a.corpus},
          {"checkpoint", a.checkpoint},
          {"split", a.split},
          {"embedder", m.embedder->identifier()},
          {"lexicon_fingerprint", m.lexicon.fingerprint()},
          {"model", Json::parse(m.checkpoint.meta.config.to_json())}};
}

int evaluate(const ModelArgs& a, std::ostream& out) {
  const Loaded m = load_model(a);
  const auto docs = select_split(load_corpus(a.corpus), a.split);
  std::vector<mma::LabeledExample> ex;
  for (auto& e : mma::collect_examples(docs, m.lexicon, m.checkpoint.meta.config)) {
    if (e.label != Label::kUnlabeled) ex.push_back(std::move(e));
  }
  if (ex.empty()) throw InvalidArgument("no labeled references in split '" + a.split + "'");
  const auto pred = mma::predict_all(m.checkpoint.model, *m.embedder, ex);
  std::vector<Label> gold, guess;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    gold.push_back(ex[i].label);
    guess.push_back(pred[i].label);
  }
  const MetricsReport report = compute_metrics(gold, guess);
  make_dir(a.output);
  const fs::path dir = a.output;
  write_file(dir / "metrics.json", metrics_json(report));
  write_file(dir / "metrics.csv", metrics_csv(report));
  write_file(dir / "metrics.txt", metrics_text(report));
  write_file(dir / "predictions.tsv", predictions_tsv(ex, pred));
  echo_config(dir, "evaluate", model_settings(a, m));
  out << metrics_text(report);
  return kOk;
}

int predict(const ModelArgs& a, std::ostream& out) {
  const Loaded m = load_model(a);
  const auto docs = select_split(load_corpus(a.corpus), a.split);
  const auto ex = mma::collect_examples(docs, m.lexicon, m.checkpoint.meta.config);
  const auto pred = mma::predict_all(m.checkpoint.model, *m.embedder, ex);
  make_dir(a.output);
  write_file(fs::path(a.output) / "predictions.tsv", predictions_tsv(ex, pred));
  echo_config(a.output, "predict", model_settings(a, m));
  out << fmt::format("predicted {} references\n", ex.size());
  return kOk;
}

// ---- report ----

struct ReportArgs {
  std::string corpus;
  std::string predictions;
  std::string output;
  std::string lexicon;
};

std::vector<ReferencePrediction> read_predictions(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);  // header
  std::vector<ReferencePrediction> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream fields(line);
    for (std::string x; std::getline(fields, x, '\t');) f.push_back(x);
    if (f.size() < 5) throw ParseError(fmt::format("{} line {}: expected 6 columns", path, line_no));
    ReferencePrediction p;
    p.paper_id = f[0];
    p.ref_id = f[1];
    p.predicted = parse_label(f[3]);
    try {
      p.prob_baseline = std::stod(f[4]);
    } catch (const std::exception&) {
      throw ParseError(fmt::format("{} line {}: bad probability '{}'", path, line_no, f[4]));
    }
    out.push_back(std::move(p));
  }
  return out;
}

int report(const ReportArgs& a, std::ostream& out) {
  const auto docs = load_corpus(a.corpus);
  const auto preds = read_predictions(a.predictions);
  const CueLexicon lexicon = load_lexicon(a.lexicon);
  const auto records = error_report(docs, preds, lexicon);
  make_dir(a.output);
  write_file(fs::path(a.output) / "errors.csv", error_report_csv(records));
  write_file(fs::path(a.output) / "errors.txt", error_report_text(records));
  echo_config(a.output, "report",
              {{"corpus", a.corpus}, {"predictions", a.predictions},
               {"lexicon_fingerprint", lexicon.fingerprint()}});
  out << fmt::format("{} misclassified references\n", records.size());
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Baseline citation classification toolkit", "bscope"};
  app.require_subcommand(1);

  IngestArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate, filter and normalize a corpus");
  ingest_cmd->add_option("input", ingest_args.input, "Directory of paper JSON files")->required();
  ingest_cmd->add_option("output", ingest_args.output, "Output corpus directory")->required();
  ingest_cmd->add_flag("--filter", ingest_args.filter, "Drop non-research papers by keyword");
  ingest_cmd->add_option("--keywords", ingest_args.keywords, "Replacement keyword list file");
  ingest_cmd->add_option("--annotations", ingest_args.annotations, "Label overlay TSV");
  ingest_cmd->add_option("--split-seed", ingest_args.split_seed, "Assign 70/10/20 splits");

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics and rule baselines");
  stats_cmd->add_option("corpus", stats_args.corpus)->required();
  stats_cmd->add_option("output", stats_args.output)->required();
  stats_cmd->add_option("--tables", stats_args.tables, "Table ids among 1,2,4,5")->delimiter(',');
  stats_cmd->add_option("--agreement", stats_args.agreement, "Two annotation files")
      ->expected(2);

  FeaturesArgs feat_args;
  auto* feat_cmd = app.add_subcommand("features", "Compute feature vectors and context windows");
  feat_cmd->add_option("corpus", feat_args.corpus)->required();
  feat_cmd->add_option("output", feat_args.output)->required();
  feat_cmd->add_flag("--dump-windows", feat_args.dump_windows);
  feat_cmd->add_option("--provider", feat_args.provider, "Citation counts: none, stub or http")
      ->check(CLI::IsMember({"none", "stub", "http"}));
  feat_cmd->add_option("--stub-file", feat_args.stub_file, "title<TAB>year<TAB>count file");
  feat_cmd->add_option("--api-url", feat_args.api_url);
  feat_cmd->add_option("--cache-dir", feat_args.cache_dir, "Overrides BASELINE_SCOPE_CACHE");
  feat_cmd->add_flag("--no-cache", feat_args.no_cache);
  feat_cmd->add_option("--lexicon", feat_args.lexicon, "Cue stem list file");
  feat_cmd->add_option("--count-transform", feat_args.count_transform)
      ->check(CLI::IsMember({"log1p", "raw"}));

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train the multi-module classifier");
  train_cmd->add_option("corpus", train_args.corpus);
  train_cmd->add_option("output", train_args.output);
  train_cmd->add_option("--config", train_args.config, "JSON config file");
  train_cmd->add_option("--seed", train_args.seed);
  train_cmd->add_option("--epochs", train_args.epochs);
  train_cmd->add_flag("--toy-embedder", train_args.toy_embedder, "Hash embedder at config dims");
  train_cmd->add_option("--embedder", train_args.embedder, "Embedder identifier");
  train_cmd->add_option("--lexicon", train_args.lexicon);
  train_cmd->add_option("--resume", train_args.resume, "Checkpoint to continue from");

  ModelArgs eval_args;
  eval_args.split = "test";
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a checkpoint on a labeled split");
  ModelArgs predict_args;
  predict_args.split = "all";
  auto* predict_cmd = app.add_subcommand("predict", "Label every reference with a checkpoint");
  for (auto [cmd, m] : {std::pair{eval_cmd, &eval_args}, std::pair{predict_cmd, &predict_args}}) {
    cmd->add_option("corpus", m->corpus)->required();
    cmd->add_option("checkpoint", m->checkpoint)->required();
    cmd->add_option("output", m->output)->required();
    cmd->add_option("--split", m->split)->check(CLI::IsMember({"train", "dev", "test", "all"}));
    cmd->add_option("--lexicon", m->lexicon);
    cmd->add_option("--config", m->config, "Expected model config; refuses on mismatch");
  }

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Error analysis of a prediction file");
  report_cmd->add_option("corpus", report_args.corpus)->required();
  report_cmd->add_option("predictions", report_args.predictions)->required();
  report_cmd->add_option("output", report_args.output)->required();
  report_cmd->add_option("--lexicon", report_args.lexicon);

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest_cmd) return ingest(ingest_args, out, err);
    if (*stats_cmd) return stats(stats_args, out);
    if (*feat_cmd) return features(feat_args, out, err);
    if (*train_cmd) return train(train_args, out, err);
    if (*eval_cmd) return evaluate(eval_args, out);
    if (*predict_cmd) return predict(predict_args, out);
    if (*report_cmd) return report(report_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace bscope::cli
