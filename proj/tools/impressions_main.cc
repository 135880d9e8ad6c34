// Copyright 2026 The Impressions Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point. Every subcommand reads its inputs, writes only
// under the requested output location and prints a categorized error line
// ("error: <Category>: <detail>") with a nonzero exit status on failure.
// Log verbosity comes from IMPRESSIONS_LOG (trace, debug, info, warn, error,
// off; default warn).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "impressions/audit.h"
#include "impressions/btl.h"
#include "impressions/dataset.h"
#include "impressions/error.h"
#include "impressions/explainer.h"
#include "impressions/feature_matrix.h"
#include "impressions/functionals.h"
#include "impressions/metrics.h"
#include "impressions/motion_energy.h"
#include "impressions/pipeline.h"
#include "impressions/serialization.h"
#include "impressions/synth.h"
#include "impressions/table_io.h"
#include "impressions/text_features.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace impressions {
namespace {

void SetUpLogging() {
  auto logger = spdlog::stderr_logger_st("impressions");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("IMPRESSIONS_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

// Writes <base>.txt and <base>.json.
void EmitReport(const fs::path& base, const std::string& text,
                const std::string& json) {
  WriteStringToFile(fs::path(base.string() + ".txt"), text);
  WriteStringToFile(fs::path(base.string() + ".json"), json);
  spdlog::info("wrote {}.txt and {}.json", base.string(), base.string());
}

std::map<std::string, FeatureMatrix> LoadFeatureArgs(
    const std::vector<std::string>& specs, NonFinitePolicy policy) {
  std::map<std::string, FeatureMatrix> out;
  for (const std::string& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw Error(ErrorCode::kConfigError,
                  "--features expects modality=path, got '" + spec + "'");
    }
    const std::string modality = spec.substr(0, eq);
    if (out.count(modality)) {
      throw Error(ErrorCode::kConfigError, "modality '" + modality + "' given twice");
    }
    out.emplace(modality, LoadFeatureMatrix(spec.substr(eq + 1), modality, policy));
  }
  return out;
}

std::vector<std::string> SubsetIds(const LoadedDataset& data,
                                   const std::string& subset) {
  const DatasetSplit& s = data.split;
  std::set<std::string> ids;
  if (subset == "train") {
    ids = s.train_ids;
  } else if (subset == "validation") {
    ids = s.validation_ids;
  } else if (subset == "test") {
    ids = s.test_ids;
  } else {
    ids = data.dataset.Ids();
  }
  return {ids.begin(), ids.end()};
}

std::string CellOrEmpty(const std::map<std::string, double>& m,
                        const std::string& id) {
  auto it = m.find(id);
  return it == m.end() ? "" : FormatDouble(it->second);
}

// ---- btl -------------------------------------------------------------

struct BtlArgs {
  std::string judgments;
  std::string manifest;
  std::string out;
  BtlConfig config;
};

int RunBtl(const BtlArgs& a) {
  const auto judgments = LoadJudgments(a.judgments);
  std::set<std::string> items;
  if (!a.manifest.empty()) {
    items = LoadManifest(a.manifest).Ids();
  } else {
    for (const auto& j : judgments) {
      items.insert(j.left_id);
      items.insert(j.right_id);
    }
  }
  const auto fits = FitBtlPerDimension(judgments, items, a.config);
  const fs::path out(a.out);

  std::string csv = "clip_id";
  for (Dimension d : kAllDimensions) csv += "," + std::string(DimensionColumn(d));
  csv += "\n";
  for (const std::string& id : items) {
    std::vector<std::string> row = {id};
    for (Dimension d : kAllDimensions) {
      auto it = fits.find(d);
      row.push_back(it == fits.end() ? "" : CellOrEmpty(it->second.cardinal, id));
    }
    csv += JoinRow(row) + "\n";
  }
  WriteStringToFile(out / "btl_scores.csv", csv);

  std::map<Dimension, double> entropy;
  try {
    entropy = ConsistencyEntropy(GroupByPair(judgments));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoUsablePairs) throw;
  }
  std::string text = "BTL fit over " + std::to_string(items.size()) + " items, " +
                     std::to_string(judgments.size()) + " judgments\n";
  ordered_json j;
  j["items"] = items.size();
  j["judgments"] = judgments.size();
  j["dimensions"] = ordered_json::object();
  for (const auto& [dim, scores] : fits) {
    const double acc = ReconstructionAccuracy(scores, judgments);
    text += std::string(DimensionName(dim)) + ": reconstruction accuracy " +
            FormatDouble(acc) + ", iterations " + std::to_string(scores.iterations) +
            (scores.converged ? "" : " (not converged)");
    ordered_json dj = {{"reconstruction_accuracy", acc},
                       {"iterations", scores.iterations},
                       {"converged", scores.converged}};
    if (auto it = entropy.find(dim); it != entropy.end()) {
      text += ", consistency entropy " + FormatDouble(it->second);
      dj["consistency_entropy"] = it->second;
    } else {
      dj["consistency_entropy"] = nullptr;
    }
    text += "\n";
    j["dimensions"][std::string(DimensionName(dim))] = dj;
  }
  EmitReport(out / "btl_report", text, j.dump(2) + "\n");
  return 0;
}

// ---- extract ---------------------------------------------------------

struct ExtractArgs {
  std::string kind;
  std::string frames;      // functionals: per-frame feature file
  std::string frames_dir;  // wmei: one sub-directory per clip
  std::string manifest;    // text/bow: transcript paths
  std::string transcripts; // text/bow: folder of <clip_id>.txt
  std::string split;       // bow: vocabulary from train clips only
  std::string out;
  std::string vocab_out;
  double threshold = kDefaultMotionThreshold;
  bool strict = false;
  std::size_t max_vocab = kDefaultVocabularySize;
};

// clip_id -> transcript text (nullopt when missing), sorted by id.
std::map<std::string, std::optional<std::string>> CollectTranscripts(
    const ExtractArgs& a) {
  std::map<std::string, std::optional<std::string>> out;
  if (!a.manifest.empty()) {
    const Dataset ds = LoadManifest(a.manifest);
    for (const ClipRecord& r : ds.records()) {
      auto path = ds.TranscriptPath(r);
      out[r.clip_id] = path ? std::optional(ReadFileToString(*path)) : std::nullopt;
    }
  } else if (!a.transcripts.empty()) {
    if (!fs::is_directory(a.transcripts)) {
      throw Error(ErrorCode::kMissingFile, a.transcripts);
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.transcripts)) {
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out[f.stem().string()] = ReadFileToString(f);
  } else {
    throw Error(ErrorCode::kConfigError, "give --manifest or --transcripts");
  }
  return out;
}

int RunExtract(const ExtractArgs& a) {
  const fs::path out(a.out);
  if (a.kind == "functionals") {
    std::vector<std::string> names;
    const auto seqs = LoadFrameFeatures(a.frames, &names);
    FeatureMatrix m("functionals", FunctionalColumnNames(names));
    for (const auto& seq : seqs) {
      const FunctionalDescriptor desc = ComputeFunctionals(seq, a.strict);
      if (desc.degraded) spdlog::warn("clip {} has fewer than 3 frames", seq.clip_id);
      m.AddRow(seq.clip_id, desc.Flatten());
    }
    SaveFeatureMatrix(m, out);
  } else if (a.kind == "wmei") {
    if (!fs::is_directory(a.frames_dir)) throw Error(ErrorCode::kMissingFile, a.frames_dir);
    std::vector<fs::path> clips;
    for (const auto& e : fs::directory_iterator(a.frames_dir)) {
      if (e.is_directory()) clips.push_back(e.path());
    }
    std::sort(clips.begin(), clips.end());
    FeatureMatrix m("wmei", {"wmei_mean", "wmei_median", "wmei_entropy"});
    for (const auto& clip : clips) {
      const WMeiStats s = ComputeWMeiStats(ComputeWMei(LoadFrameDirectory(clip), a.threshold));
      if (s.no_motion) spdlog::warn("clip {} shows no motion", clip.filename().string());
      m.AddRow(clip.filename().string(), {s.mean, s.median, s.entropy});
    }
    SaveFeatureMatrix(m, out);
  } else if (a.kind == "text") {
    FeatureMatrix m("text", TextFeatureColumnNames());
    std::string missing = "clip_id,missing\n";
    for (const auto& [id, text] : CollectTranscripts(a)) {
      const TranscriptStats stats = text ? TokenizeAndCount(*text) : TranscriptStats{};
      const ReadabilityResult r = Readability(stats);
      m.AddRow(id, TextFeatureRow(stats, r));
      missing += JoinRow({id, r.missing ? "1" : "0"}) + "\n";
    }
    SaveFeatureMatrix(m, out);
    WriteStringToFile(fs::path(out).replace_extension("").string() + ".missing.csv",
                      missing);
  } else if (a.kind == "bow") {
    const auto transcripts = CollectTranscripts(a);
    std::optional<DatasetSplit> split;
    if (!a.split.empty()) split = LoadSplit(a.split);
    std::vector<std::string> docs;
    for (const auto& [id, text] : transcripts) {
      if (text && (!split || split->train_ids.count(id))) docs.push_back(*text);
    }
    BowVocabulary vocab = BuildVocabulary(docs, a.max_vocab);
    vocab.stopword_list_id = std::string(kStopwordListId);
    FeatureMatrix m("bow", vocab.tokens);
    for (const auto& [id, text] : transcripts) {
      m.AddRow(id, text ? BowVectorize(*text, vocab)
                        : std::vector<double>(vocab.tokens.size(), 0.0));
    }
    SaveFeatureMatrix(m, out);
    const fs::path vocab_path =
        a.vocab_out.empty() ? fs::path(fs::path(out).replace_extension("").string() + ".vocab.tsv")
                            : fs::path(a.vocab_out);
    WriteStringToFile(vocab_path, FormatVocabulary(vocab));
  } else {
    throw Error(ErrorCode::kConfigError, "unknown extract kind '" + a.kind + "'");
  }
  return 0;
}

// ---- train / predict -------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string split;
  std::vector<std::string> features;
  std::string config;
  std::string out;
  bool impute = false;
};

LoadedDataset LoadData(const std::string& manifest, const std::string& split) {
  return LoadDataset(manifest, split.empty() ? std::nullopt
                                             : std::optional<fs::path>(split));
}

int RunTrain(const TrainArgs& a) {
  const PipelineConfig config = ParsePipelineConfig(ReadFileToString(a.config));
  const LoadedDataset data = LoadData(a.manifest, a.split);
  const auto features = LoadFeatureArgs(
      a.features, a.impute ? NonFinitePolicy::kImputeMean : NonFinitePolicy::kReject);
  for (const auto& g : config.groups) {
    for (const auto& m : g.modalities) {
      if (!features.count(m)) {
        throw Error(ErrorCode::kMissingRepresentation,
                    "config uses modality '" + m + "' but no --features was given for it");
      }
    }
  }
  spdlog::info("training on {} clips", data.split.train_ids.size());
  const StackedPipeline p = PipelineTrain(data.dataset, data.split, features, config);
  const fs::path out(a.out);
  SavePipeline(p, out / "pipeline.json");

  std::string text = "Trained pipeline: learner " + std::string(LearnerName(config.learner)) +
                     ", fusion " + std::string(FusionModeName(p.fusion)) + "\n";
  ordered_json j;
  j["learner"] = LearnerName(config.learner);
  j["fusion"] = FusionModeName(p.fusion);
  j["train_clips"] = data.split.train_ids.size();
  j["groups"] = ordered_json::array();
  for (const auto& g : p.groups) {
    text += "group " + g.name + ": " + std::to_string(g.columns.size()) +
            " columns, cross-validated MAE " + FormatDouble(g.cv_mae);
    ordered_json gj = {{"name", g.name}, {"columns", g.columns.size()}, {"cv_mae", g.cv_mae}};
    if (g.learner == LearnerKind::kElm) {
      text += ", C " + FormatDouble(g.elm.c) + ", gamma " + FormatDouble(g.elm.kernel.gamma);
      gj["c"] = g.elm.c;
      gj["gamma"] = g.elm.kernel.gamma;
    } else {
      text += ", " + std::to_string(g.pca.pca.k()) + " components";
      gj["components"] = g.pca.pca.k();
    }
    text += "\n";
    j["groups"].push_back(gj);
  }
  if (p.fusion == FusionMode::kWeighted) {
    j["weights"] = std::vector<double>(p.weights.begin(), p.weights.end());
    text += "fusion weights (first group):";
    for (double w : p.weights) text += " " + FormatDouble(w);
    text += "\n";
  }
  if (p.fusion == FusionMode::kForest) {
    ordered_json fj = ordered_json::array();
    for (std::size_t d = 0; d < p.forests.size(); ++d) {
      const auto& f = p.forests[d];
      text += "forest " + std::string(DimensionName(kAllDimensions[d])) + ": " +
              std::to_string(f.config.n_trees) + " trees, m " +
              std::to_string(f.config.features_per_split) + ", OOB MAE " +
              FormatDouble(f.oob_error) + "\n";
      fj.push_back({{"dimension", DimensionName(kAllDimensions[d])},
                    {"n_trees", f.config.n_trees},
                    {"features_per_split", f.config.features_per_split},
                    {"max_depth", f.config.max_depth},
                    {"min_leaf", f.config.min_leaf},
                    {"oob_error", f.oob_error}});
    }
    j["forests"] = fj;
  }
  if (p.tree) {
    text += "explanation tree: depth " + std::to_string(p.tree->Depth()) +
            ", training accuracy " + FormatDouble(p.tree_training_accuracy) + "\n";
    j["explanation_tree"] = {{"depth", p.tree->Depth()},
                             {"training_accuracy", p.tree_training_accuracy}};
  }
  EmitReport(out / "train_report", text, j.dump(2) + "\n");
  return 0;
}

struct PredictArgs {
  std::string pipeline;
  std::vector<std::string> features;
  std::string manifest;
  std::string split;
  std::string subset = "all";
  std::string out;
  bool impute = false;
};

std::vector<std::string> PredictionIds(const std::string& manifest,
                                       const std::string& split,
                                       const std::string& subset,
                                       const std::map<std::string, FeatureMatrix>& features) {
  if (!manifest.empty()) return SubsetIds(LoadData(manifest, split), subset);
  std::set<std::string> ids;
  bool first = true;
  for (const auto& [name, m] : features) {
    if (first) {
      ids = m.Ids();
      first = false;
      continue;
    }
    std::set<std::string> keep;
    for (const auto& id : m.Ids()) {
      if (ids.count(id)) keep.insert(id);
    }
    ids = std::move(keep);
  }
  return {ids.begin(), ids.end()};
}

int RunPredict(const PredictArgs& a) {
  const StackedPipeline p = LoadPipeline(a.pipeline);
  const auto features = LoadFeatureArgs(
      a.features, a.impute ? NonFinitePolicy::kImputeMean : NonFinitePolicy::kReject);
  const auto ids = PredictionIds(a.manifest, a.split, a.subset, features);
  if (ids.empty()) throw Error(ErrorCode::kEmptyInput, "no clips selected for prediction");
  const PipelineOutput out = PipelinePredict(p, features, ids);
  WriteStringToFile(a.out, FormatPredictions(out.ids, out.fused));
  return 0;
}

// ---- explain ---------------------------------------------------------

struct ExplainArgs {
  std::string pipeline;
  std::vector<std::string> features;
  std::vector<std::string> clips;
  std::string manifest;
  std::string split;
  std::string out;
  bool svg = false;
  bool impute = false;
};

int RunExplain(const ExplainArgs& a) {
  const StackedPipeline p = LoadPipeline(a.pipeline);
  if (!p.tree) {
    throw Error(ErrorCode::kConfigError, "pipeline was trained without an explanation tree");
  }
  const auto features = LoadFeatureArgs(
      a.features, a.impute ? NonFinitePolicy::kImputeMean : NonFinitePolicy::kReject);
  std::vector<std::string> ids = a.clips;
  if (ids.empty()) ids = PredictionIds("", "", "all", features);
  const fs::path out(a.out);

  std::optional<LoadedDataset> data;
  if (!a.manifest.empty()) data = LoadData(a.manifest, a.split);
  const bool percentile = data && p.config.learner == LearnerKind::kPcaLinReg;
  std::vector<Eigen::MatrixXd> train_rows;
  if (percentile) {
    const std::vector<std::string> train(data->split.train_ids.begin(),
                                         data->split.train_ids.end());
    for (const auto& g : p.groups) {
      train_rows.push_back(GatherGroup({g.name, g.modalities}, features, train));
    }
  }

  for (const std::string& id : ids) {
    const PipelineOutput pred = PipelinePredict(p, features, {id});
    TraceExplanation e = ExplainDecision(*p.tree, id, pred.fused[0], p.thresholds);
    if (p.groups.size() > 1) {
      std::vector<std::pair<std::string, TraitVector>> solo;
      for (std::size_t g = 0; g < p.groups.size(); ++g) {
        solo.emplace_back(p.groups[g].name, pred.per_group[g][0]);
      }
      AttributeToGroup(e, pred.fused[0], solo);
    }
    std::string text = e.narrative + "\n";
    if (e.attribution) text += *e.attribution + "\n";
    EmitReport(out / id, text, FormatExplanationJson(e));
    if (a.svg) WriteStringToFile(out / (id + ".svg"), RenderScoreBarsSvg(e));

    if (percentile) {
      PercentileReport report;
      report.clip_id = id;
      for (std::size_t g = 0; g < p.groups.size(); ++g) {
        const GroupModel& gm = p.groups[g];
        RepresentationInput in;
        in.name = gm.name;
        in.model = &gm.pca;
        // The model sees standardized rows; report in original units.
        in.train = train_rows[g];
        in.feature_names = gm.columns;
        const Eigen::MatrixXd row = GatherGroup({gm.name, gm.modalities}, features, {id});
        in.clip_values = std::vector<double>(row.data(), row.data() + row.size());
        report.representations.push_back(ReportRepresentation(in, report.target));
      }
      EmitReport(out / (id + ".report"), FormatPercentileReportText(report),
                 FormatPercentileReportJson(report));
    }
  }
  return 0;
}

// ---- evaluate --------------------------------------------------------

struct EvaluateArgs {
  std::string manifest;
  std::string split;
  std::string subset = "test";
  std::string predictions;
  std::string metric = "mae_complement";
  std::string out;
};

int RunEvaluate(const EvaluateArgs& a) {
  auto variant = ParseMetricVariant(a.metric);
  if (!variant) throw Error(ErrorCode::kConfigError, "unknown metric '" + a.metric + "'");
  const MetricConfig metric{*variant};
  const LoadedDataset data = LoadData(a.manifest, a.split);
  const auto preds = LoadPredictions(a.predictions);
  const auto ids = SubsetIds(data, a.subset);

  std::vector<TraitVector> truth, pred, train_labels;
  for (const auto& id : ids) {
    const ClipRecord& r = data.dataset.Get(id);
    auto it = preds.find(id);
    if (!r.labels || it == preds.end()) continue;
    truth.push_back(*r.labels);
    pred.push_back(it->second);
  }
  if (truth.empty()) throw Error(ErrorCode::kEmptyInput, "no labeled clips with predictions");
  for (const auto& id : data.split.train_ids) {
    train_labels.push_back(*data.dataset.Get(id).labels);
  }
  const BinarizationThresholds thresholds = ComputeThresholds(data.dataset, data.split);
  const PriorBaseline prior = PriorBaseline::Fit(train_labels);
  const std::vector<TraitVector> prior_pred(truth.size(), prior.Predict());
  const auto scores = ScorePerDimension(truth, pred, metric);
  const auto prior_scores = ScorePerDimension(truth, prior_pred, metric);

  std::string text = "Evaluation on " + std::to_string(truth.size()) + " " + a.subset +
                     " clips, metric " + std::string(MetricVariantName(*variant)) + "\n";
  text += "dimension           score     prior     accuracy\n";
  ordered_json j;
  j["subset"] = a.subset;
  j["n"] = truth.size();
  j["metric"] = MetricVariantName(*variant);
  j["dimensions"] = ordered_json::object();
  double mean_score = 0.0, mean_prior = 0.0;
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    std::vector<bool> tb, pb;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      tb.push_back(Binarize(truth[i], thresholds)[d]);
      pb.push_back(Binarize(pred[i], thresholds)[d]);
    }
    const double acc = ClassificationAccuracy(tb, pb);
    const std::string name(DimensionName(kAllDimensions[d]));
    char line[160];
    std::snprintf(line, sizeof(line), "%-18s  %.4f    %.4f    %.4f\n", name.c_str(),
                  scores[d], prior_scores[d], acc);
    text += line;
    j["dimensions"][name] = {{"score", scores[d]},
                             {"prior_score", prior_scores[d]},
                             {"classification_accuracy", acc}};
    mean_score += scores[d] / kNumDimensions;
    mean_prior += prior_scores[d] / kNumDimensions;
  }
  char line[160];
  std::snprintf(line, sizeof(line), "%-18s  %.4f    %.4f\n", "mean", mean_score, mean_prior);
  text += line;
  j["mean_score"] = mean_score;
  j["mean_prior_score"] = mean_prior;
  EmitReport(fs::path(a.out) / "evaluation", text, j.dump(2) + "\n");
  return 0;
}

// ---- audit -----------------------------------------------------------

struct AuditArgs {
  std::string manifest;
  std::string predictions;
  std::string out;
  long min_group_size = 30;
  bool include_under_14 = false;
};

int RunAudit(const AuditArgs& a) {
  const Dataset ds = LoadManifest(a.manifest);
  const auto scores = a.predictions.empty() ? LabelMap(ds.records())
                                            : LoadPredictions(a.predictions);
  BiasAuditConfig config;
  config.min_group_size = a.min_group_size;
  config.exclude_under_14 = !a.include_under_14;
  const BiasAuditReport audit = BiasAudit(ds.records(), scores, config);
  const LabelVariationReport variation = LabelVariation(ds.records());
  EmitReport(fs::path(a.out) / "audit", FormatAuditText(audit, variation),
             FormatAuditJson(audit, variation));
  return 0;
}

}  // namespace
}  // namespace impressions

int main(int argc, char** argv) {
  using namespace impressions;
  CLI::App app{"First-impression modeling toolkit: pairwise ranking, feature "
               "extraction, stacked regression, explanations and bias audits."};
  app.name("impressions");
  app.require_subcommand(1);
  app.set_version_flag("--version", "impressions 1.0.0");

  BtlArgs btl;
  auto* btl_cmd = app.add_subcommand("btl", "Fit BTL scores from pairwise judgments");
  btl_cmd->add_option("--judgments", btl.judgments, "Judgment log (left_id,right_id,dimension,outcome[,annotator_id])")
      ->required()->check(CLI::ExistingFile);
  btl_cmd->add_option("--manifest", btl.manifest, "Manifest whose clip ids form the item set (default: ids in the log)");
  btl_cmd->add_option("--out", btl.out, "Output directory")->required();
  btl_cmd->add_option("--max-iter", btl.config.max_iter, "Maximum MM iterations")->capture_default_str();
  btl_cmd->add_option("--tol", btl.config.tol, "Relative convergence tolerance")->capture_default_str();
  btl_cmd->add_option("--prior-count", btl.config.prior_count, "Phantom wins and losses per item")->capture_default_str();

  ExtractArgs ex;
  auto* ex_cmd = app.add_subcommand("extract", "Produce a feature matrix");
  ex_cmd->add_option("kind", ex.kind, "functionals | wmei | text | bow")
      ->required()->check(CLI::IsMember({"functionals", "wmei", "text", "bow"}));
  ex_cmd->add_option("--frames", ex.frames, "Per-frame feature file (functionals)");
  ex_cmd->add_option("--frames-dir", ex.frames_dir, "Directory with one frame folder per clip (wmei)");
  ex_cmd->add_option("--manifest", ex.manifest, "Manifest with transcript paths (text, bow)");
  ex_cmd->add_option("--transcripts", ex.transcripts, "Folder of <clip_id>.txt transcripts (text, bow)");
  ex_cmd->add_option("--split", ex.split, "Split file; bow vocabulary uses train clips only");
  ex_cmd->add_option("--out", ex.out, "Output feature matrix")->required();
  ex_cmd->add_option("--vocab-out", ex.vocab_out, "Vocabulary file (bow; default <out>.vocab.tsv)");
  ex_cmd->add_option("--threshold", ex.threshold, "Frame-difference threshold (wmei)")->capture_default_str();
  ex_cmd->add_option("--max-vocab", ex.max_vocab, "Vocabulary size cap (bow)")->capture_default_str();
  ex_cmd->add_flag("--strict", ex.strict, "Reject contours shorter than three frames (functionals)");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train a stacked pipeline");
  tr_cmd->add_option("--manifest", tr.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  tr_cmd->add_option("--split", tr.split, "Split file (default: every clip trains)");
  tr_cmd->add_option("--features", tr.features, "Feature matrix as modality=path (repeatable)")->required();
  tr_cmd->add_option("--config", tr.config, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  tr_cmd->add_option("--out", tr.out, "Output directory")->required();
  tr_cmd->add_flag("--impute", tr.impute, "Replace non-finite feature cells by column means");

  PredictArgs pr;
  auto* pr_cmd = app.add_subcommand("predict", "Predict trait scores with a trained pipeline");
  pr_cmd->add_option("--pipeline", pr.pipeline, "Trained pipeline file")->required()->check(CLI::ExistingFile);
  pr_cmd->add_option("--features", pr.features, "Feature matrix as modality=path (repeatable)")->required();
  pr_cmd->add_option("--manifest", pr.manifest, "Manifest used to select clips");
  pr_cmd->add_option("--split", pr.split, "Split file used with --subset");
  pr_cmd->add_option("--subset", pr.subset, "train | validation | test | all")
      ->check(CLI::IsMember({"train", "validation", "test", "all"}))->capture_default_str();
  pr_cmd->add_option("--out", pr.out, "Output prediction file")->required();
  pr_cmd->add_flag("--impute", pr.impute, "Replace non-finite feature cells by column means");

  ExplainArgs xp;
  auto* xp_cmd = app.add_subcommand("explain", "Write decision explanations per clip");
  xp_cmd->add_option("--pipeline", xp.pipeline, "Trained pipeline file")->required()->check(CLI::ExistingFile);
  xp_cmd->add_option("--features", xp.features, "Feature matrix as modality=path (repeatable)")->required();
  xp_cmd->add_option("--clip", xp.clips, "Clip to explain (repeatable; default: all)");
  xp_cmd->add_option("--manifest", xp.manifest, "Manifest; enables percentile reports for pca_linreg pipelines");
  xp_cmd->add_option("--split", xp.split, "Split file giving the training population");
  xp_cmd->add_option("--out", xp.out, "Output directory")->required();
  xp_cmd->add_flag("--svg", xp.svg, "Also write a score bar chart per clip");
  xp_cmd->add_flag("--impute", xp.impute, "Replace non-finite feature cells by column means");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Score predictions against labels");
  ev_cmd->add_option("--manifest", ev.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--split", ev.split, "Split file");
  ev_cmd->add_option("--subset", ev.subset, "train | validation | test | all")
      ->check(CLI::IsMember({"train", "validation", "test", "all"}))->capture_default_str();
  ev_cmd->add_option("--predictions", ev.predictions, "Prediction file")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--metric", ev.metric, "mae_complement | eq1_literal")->capture_default_str();
  ev_cmd->add_option("--out", ev.out, "Output directory")->required();

  AuditArgs au;
  auto* au_cmd = app.add_subcommand("audit", "Demographic bias and label variation analysis");
  au_cmd->add_option("--manifest", au.manifest, "Dataset manifest with demographics")->required()->check(CLI::ExistingFile);
  au_cmd->add_option("--predictions", au.predictions, "Audit these predictions instead of the labels");
  au_cmd->add_option("--out", au.out, "Output directory")->required();
  au_cmd->add_option("--min-group-size", au.min_group_size, "Groups below this size are flagged")->capture_default_str();
  au_cmd->add_flag("--include-under-14", au.include_under_14, "Keep the 0-6 and 7-13 age bands in age analyses");

  std::string synth_out;
  std::uint64_t synth_seed = 1;
  int synth_clips = 120;
  auto* sy_cmd = app.add_subcommand("synth", "Write a seeded synthetic workspace");
  sy_cmd->add_option("--out", synth_out, "Output directory")->required();
  sy_cmd->add_option("--seed", synth_seed, "Master seed")->capture_default_str();
  sy_cmd->add_option("--clips", synth_clips, "Number of clips")->capture_default_str()->check(CLI::Range(4, 1000000));

  CLI11_PARSE(app, argc, argv);
  SetUpLogging();
  try {
    if (btl_cmd->parsed()) return RunBtl(btl);
    if (ex_cmd->parsed()) return RunExtract(ex);
    if (tr_cmd->parsed()) return RunTrain(tr);
    if (pr_cmd->parsed()) return RunPredict(pr);
    if (xp_cmd->parsed()) return RunExplain(xp);
    if (ev_cmd->parsed()) return RunEvaluate(ev);
    if (au_cmd->parsed()) return RunAudit(au);
    if (sy_cmd->parsed()) {
      WriteSyntheticWorkspace(synth_out, synth_seed, synth_clips);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
