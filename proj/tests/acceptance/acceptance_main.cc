// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed here and printed with each result.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "bscope/corpus.h"
#include "bscope/eval.h"
#include "bscope/features.h"
#include "bscope/heuristics.h"
#include "bscope/mma/dataset.h"
#include "bscope/mma/gradcheck.h"
#include "bscope/mma/model.h"
#include "bscope/mma/train.h"
#include "cli.h"
#include "fixtures.h"
#include "oracles.h"

namespace bscope {
namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

// ---- 1. metric aggregation ----

Outcome metric_aggregation() {
  struct Row {
    const char* name;
    ClassMetrics baseline, non_baseline, overall;
  };
  // Reported per-class and overall (P, R, F1) rows; the last is the model.
  const Row rows[] = {
      {"ensemble", {0.33, 0.67, 0.44}, {0.96, 0.87, 0.91}, {0.65, 0.77, 0.68}},
      {"all-features", {0.26, 0.74, 0.39}, {0.96, 0.78, 0.86}, {0.61, 0.76, 0.62}},
      {"neural", {0.69, 0.16, 0.26}, {0.63, 0.95, 0.76}, {0.66, 0.55, 0.51}},
      {"structural", {0.47, 0.48, 0.47}, {0.96, 0.95, 0.95}, {0.71, 0.71, 0.71}},
      {"mma", {0.69, 0.57, 0.63}, {0.96, 0.98, 0.97}, {0.82, 0.78, 0.80}},
  };
  constexpr double kTol = 0.01;
  double worst = 0.0;
  std::string mma;
  for (const Row& r : rows) {
    const ClassMetrics m = macro_average(r.baseline, r.non_baseline);
    worst = std::max({worst, std::abs(m.precision - r.overall.precision),
                      std::abs(m.recall - r.overall.recall), std::abs(m.f1 - r.overall.f1)});
    if (std::string(r.name) == "mma") mma = fmt::format("({:.3f}, {:.3f}, {:.3f})", m.precision, m.recall, m.f1);
  }
  return {worst <= kTol + 1e-12,
          fmt::format("model row -> {}; max deviation over 5 rows {:.4f} (tol {})", mma, worst, kTol)};
}

// ---- 2. attention normalization ----

mma::ExampleInput random_input(Rng& rng, const mma::MmaConfig& c) {
  mma::ExampleInput ex;
  ex.window.shape = c.window();
  const auto cells = static_cast<std::size_t>(c.window_rows * c.window_cols);
  ex.window.tokens.assign(cells, std::string(kPadToken));
  ex.window.mask.assign(cells, false);
  ex.window.source_sentence.assign(static_cast<std::size_t>(c.window_rows), -1);
  const int rows = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(c.window_rows)));
  for (int r = 0; r < rows; ++r) {
    const int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(c.window_cols)));
    for (int col = 0; col < len; ++col) {
      const auto i = static_cast<std::size_t>(r * c.window_cols + col);
      ex.window.tokens[i] = fmt::format("t{}", rng.below(500));
      ex.window.mask[i] = true;
    }
    ex.window.source_sentence[static_cast<std::size_t>(r)] = r;
  }
  for (int k = 1 + static_cast<int>(rng.below(6)); k > 0; --k) {
    ex.title_abstract.push_back(fmt::format("a{}", rng.below(500)));
  }
  for (int k = 1 + static_cast<int>(rng.below(6)); k > 0; --k) {
    ex.citation_sentence.push_back(fmt::format("c{}", rng.below(500)));
  }
  for (auto& n : ex.features.section_counts) n = static_cast<int>(rng.below(4));
  ex.features.in_table = rng.uniform() < 0.3;
  for (auto& w : ex.features.cue_weights) {
    w = rng.uniform() < 0.15 ? 1.0 / static_cast<double>(1 + rng.below(10)) : 0.0;
  }
  ex.features.citation_count_feature = rng.uniform(0.0, 10.0);
  ex.has_mention = rng.uniform() >= 0.1;
  return ex;
}

Outcome attention_normalization() {
  constexpr int kModels = 20;
  constexpr int kPerModel = 50;
  constexpr double kTol = 1e-6;
  const mma::MmaConfig base = mma::MmaConfig::toy();
  const mma::HashEmbedder embedder(base.context_dim, base.layer_count);
  double worst_sum = 0.0;
  double min_weight = 0.0;
  int masked_nonzero = 0;
  int checked = 0;
  int sites = 0;
  Rng rng(20200713);
  auto sum_err = [&](double s) { worst_sum = std::max(worst_sum, std::abs(s - 1.0)); };
  for (int m = 0; m < kModels; ++m) {
    mma::MmaConfig c = base;
    c.seed = static_cast<std::uint64_t>(m) + 1;
    const mma::MmaModel model(c);
    for (int i = 0; i < kPerModel; ++i) {
      const mma::ExampleInput ex = random_input(rng, c);
      mma::AttentionTrace tr;
      model.predict(mma::encode_input(ex, embedder, c), &tr);
      ++checked;
      min_weight = std::min({min_weight, tr.feature.minCoeff(), tr.module.minCoeff()});
      sum_err(tr.feature.sum());
      sum_err(tr.module.sum());
      sites += 2;
      if (ex.has_mention) {
        min_weight = std::min({min_weight, tr.word.minCoeff(), tr.sentence.minCoeff(), tr.layer.minCoeff()});
        for (int r = 0; r < c.window_rows; ++r) {
          const bool live = ex.window.row_real(r);
          if (live) sum_err(tr.word.row(r).sum());
          if (!live && tr.sentence(r) != 0.0) ++masked_nonzero;
          for (int col = 0; col < c.window_cols; ++col) {
            if (!ex.window.real(r, col) && tr.word(r, col) != 0.0) ++masked_nonzero;
          }
        }
        sum_err(tr.sentence.sum());
        sum_err(tr.layer.sum());
        sites += 3;
      }
      if (!ex.has_mention && (tr.module(0) != 0.0 || tr.module(1) != 0.0)) ++masked_nonzero;
    }
  }
  return {worst_sum <= kTol && min_weight >= 0.0 && masked_nonzero == 0,
          fmt::format("{} inputs, {} site evaluations (text sites skipped for unmentioned refs); "
                      "max |sum-1| {:.2e} (tol {:.0e}); min weight {:.2e}; masked positions with "
                      "nonzero weight {}",
                      checked, sites, worst_sum, kTol, min_weight, masked_nonzero)};
}

// ---- 3. gradient check ----

Outcome gradient_check() {
  constexpr double kTol = 1e-4;
  const mma::MmaConfig c = mma::MmaConfig::toy();
  const mma::HashEmbedder embedder(c.context_dim, c.layer_count);
  mma::MmaModel model(c);
  Rng rng(77);
  double worst = 0.0;
  std::string where;
  std::size_t groups = 0;
  for (int i = 0; i < 4; ++i) {
    mma::ExampleInput ex = random_input(rng, c);
    ex.has_mention = true;
    const Label y = i % 2 == 0 ? Label::kBaseline : Label::kNonBaseline;
    const auto r = mma::gradcheck(model, mma::encode_input(ex, embedder, c), y, 1.0, 1e-5);
    groups = r.entries.size();
    for (const auto& e : r.entries) {
      if (e.max_relative_error > worst) {
        worst = e.max_relative_error;
        where = e.parameter;
      }
    }
  }
  return {worst < kTol, fmt::format("dim {}, window {}x{}, fused {}; {} parameter groups x 4 inputs; "
                                    "max relative error {:.2e} at {} (tol {:.0e}, step 1e-5)",
                                    c.context_dim, c.window_rows, c.window_cols, c.fused_dim, groups,
                                    worst, where, kTol)};
}

// ---- 4. overfit sanity ----

Outcome overfit_sanity() {
  constexpr double kTarget = 0.95;
  mma::MmaConfig c = mma::MmaConfig::toy();
  c.epochs = 200;
  c.seed = 1;
  const mma::HashEmbedder embedder(c.context_dim, c.layer_count);
  const auto ex = mma::collect_examples(testing::separable_fixture(), CueLexicon::defaults(), c);
  mma::TrainOptions opt;
  opt.track_train_accuracy = true;
  opt.stop_at_train_accuracy = kTarget;
  const auto result = mma::train(ex, ex, embedder, c, opt);
  const auto& last = result.log.back();
  const double acc = last.train_accuracy.value_or(0.0);
  return {acc >= kTarget && last.epoch <= 200,
          fmt::format("{} references; train accuracy {:.3f} at epoch {} (target {} within 200)",
                      ex.size(), acc, last.epoch, kTarget)};
}

// ---- 5. heuristic oracle equivalence ----

Outcome heuristic_oracle() {
  const auto docs = testing::labeled_fixture();
  int mismatches = 0;
  for (const SectionRule rule : all_section_rules()) {
    const ConfusionCounts got = evaluate_rule(docs, rule);
    const ConfusionCounts want = testing::brute_force_rule(docs, rule);
    if (!(got == want) || got.precision() != testing::ratio(want.tp, want.tp + want.fp) ||
        got.recall() != testing::ratio(want.tp, want.tp + want.fn)) {
      ++mismatches;
    }
  }
  const auto dist = testing::paper_distribution_fixture();
  const auto table = evaluate_rule(dist, SectionRule::in_table());
  const auto exp = evaluate_rule(dist, SectionRule::in_section(SectionCategory::kMethodsResults));
  // "Much greater" is pinned at a factor of 3.
  const bool pattern = table.precision() > 3 * table.recall() && exp.recall() > 3 * exp.precision();
  return {mismatches == 0 && pattern && docs.size() == 20,
          fmt::format("{} rules on {} papers, {} mismatches vs recount; table P/R {:.3f}/{:.3f}, "
                      "experiment P/R {:.3f}/{:.3f} (ratio > 3)",
                      all_section_rules().size(), docs.size(), mismatches, table.precision(),
                      table.recall(), exp.precision(), exp.recall())};
}

// ---- 6. cue weights ----

ContextWindow one_sentence(const std::string& sentence, int offset) {
  testing::DocBuilder b("cue");
  const int s = b.section("Experiments");
  b.paragraph(s, {sentence});
  b.reference("x").cite("x", s, 0, 0, offset);
  const PaperDoc doc = b.build();
  return extract_window(doc, doc.mentions[0]);
}

double weight(const std::string& sentence, int offset, const char* stem) {
  const auto& lex = CueLexicon::defaults();
  return cue_weights(one_sentence(sentence, offset), lex)[static_cast<std::size_t>(lex.index_of(stem))];
}

Outcome cue_weight_exactness() {
  const double adjacent = weight("@x baselines", 0, "baselin");
  const double four = weight("@x a b c accuracy", 0, "accuraci");
  const double nearest = weight("score a b c d e f @x a b score", 7, "score");
  const double absent = weight("@x nothing relevant here", 0, "score");
  const bool ok = adjacent == 1.0 && four == 0.25 && nearest == 1.0 / 3.0 && absent == 0.0;
  return {ok, fmt::format("adjacent {}, distance 4 {}, distances {{7,3}} {}, absent {} (exact)",
                          adjacent, four, nearest, absent)};
}

// ---- 7. corpus filter ----

Outcome corpus_filter() {
  const auto fx = testing::filter_fixture();
  const auto result = filter_papers(fx.docs);
  std::vector<std::string> dropped, kept;
  for (const auto& d : result.discarded) dropped.push_back(d.paper_id);
  for (const auto& d : result.kept) kept.push_back(d.paper_id);
  const bool ok = dropped == fx.banned_ids && kept == fx.control_ids && dropped.size() == 10;
  return {ok, fmt::format("discarded {} of {} banned, kept {} of {} controls", dropped.size(),
                          fx.banned_ids.size(), kept.size(), fx.control_ids.size())};
}

// ---- 8. split contract ----

Outcome split_contract() {
  const SplitSpec spec{{0.70, 0.10, 0.20}, 2024};
  const auto a = assign_splits(testing::random_corpus(100, 8), spec);
  const auto b = assign_splits(testing::random_corpus(100, 8), spec);
  std::array<std::set<std::string>, 3> ids;
  bool assigned = true;
  for (const auto& d : a) {
    if (d.split_tag == SplitTag::kUnassigned) {
      assigned = false;
      continue;
    }
    ids[static_cast<std::size_t>(d.split_tag)].insert(d.paper_id);
  }
  bool disjoint = true;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      for (const auto& id : ids[i]) disjoint = disjoint && !ids[j].contains(id);
    }
  }
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) {
    same = a[i].paper_id == b[i].paper_id && a[i].split_tag == b[i].split_tag;
  }
  const std::array<long, 3> want = {70, 10, 20};
  bool within = true;
  for (std::size_t i = 0; i < 3; ++i) within = within && std::labs(static_cast<long>(ids[i].size()) - want[i]) <= 1;
  return {assigned && disjoint && same && within,
          fmt::format("{}/{}/{} (target 70/10/20 +-1), disjoint {}, rerun identical {}", ids[0].size(),
                      ids[1].size(), ids[2].size(), disjoint, same)};
}

// ---- 9. Cohen's kappa ----

Outcome kappa() {
  const auto fx = testing::kappa_fixture();
  constexpr double kTol = 1e-9;
  const double self = cohens_kappa(fx.a, fx.a);
  const double got = cohens_kappa(fx.a, fx.b);
  const double want = testing::contingency_kappa(fx.a, fx.b);
  return {self == 1.0 && std::abs(got - want) <= kTol && fx.a.size() == 40,
          fmt::format("identical -> {}; 40 labels {:.12f} vs contingency {:.12f} (tol {:.0e})", self, got,
                      want, kTol)};
}

// ---- 10. end-to-end determinism ----

Outcome end_to_end_determinism() {
  testing::TempDir tmp;
  write_corpus(tmp / "corpus", testing::separable_fixture());
  mma::MmaConfig c = mma::MmaConfig::toy();
  c.epochs = 20;
  c.seed = 11;
  testing::write_text(tmp / "toy.json", c.to_json());
  const char* files[] = {"metrics.json", "metrics.csv", "metrics.txt", "predictions.tsv"};
  std::array<std::vector<std::string>, 2> runs;
  for (int k = 0; k < 2; ++k) {
    const std::string run = (tmp / fmt::format("run{}", k)).string();
    const std::string eval = (tmp / fmt::format("eval{}", k)).string();
    std::ostringstream out, err;
    if (cli::run({"bscope", "train", (tmp / "corpus").string(), run, "--config",
                  (tmp / "toy.json").string(), "--toy-embedder"},
                 out, err) != 0 ||
        cli::run({"bscope", "evaluate", (tmp / "corpus").string(), run + "/model.ckpt", eval, "--split", "dev"},
                 out, err) != 0) {
      return {false, "command failed: " + err.str()};
    }
    for (const char* f : files) runs[static_cast<std::size_t>(k)].push_back(testing::read_text(std::filesystem::path(eval) / f));
    runs[static_cast<std::size_t>(k)].push_back(testing::read_text(std::filesystem::path(run) / "model.ckpt"));
  }
  return {runs[0] == runs[1], fmt::format("two train+evaluate runs, {} metric files and the checkpoint "
                                          "compared byte for byte: {}",
                                          std::size(files), runs[0] == runs[1] ? "identical" : "differ")};
}

}  // namespace
}  // namespace bscope

int main() {
  using bscope::Outcome;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"metric aggregation", bscope::metric_aggregation},
      {"attention normalization", bscope::attention_normalization},
      {"gradient check", bscope::gradient_check},
      {"overfit sanity", bscope::overfit_sanity},
      {"heuristic oracle equivalence", bscope::heuristic_oracle},
      {"cue-weight exactness", bscope::cue_weight_exactness},
      {"corpus filter", bscope::corpus_filter},
      {"split contract", bscope::split_contract},
      {"cohen's kappa", bscope::kappa},
      {"end-to-end determinism", bscope::end_to_end_determinism},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%d] %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%d criteria passed\n", n - failures, n);
  return failures == 0 ? 0 : 1;
}
