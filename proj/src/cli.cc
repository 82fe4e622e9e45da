// Copyright 2026 The Emorec Authors
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

#include "emorec/cli.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "emorec/batch_adjust.h"
#include "emorec/corpus.h"
#include "emorec/features.h"
#include "emorec/protocol.h"
#include "emorec/resample.h"
#include "emorec/synth.h"
#include "emorec/wav.h"
#include "json.hpp"

namespace emorec {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 64;

struct TokensArgs {
  std::string transcript, codes, out;
};

struct StatsArgs {
  std::string tokens, out;
  int bin_ms = 20;
};

struct ExtractArgs {
  std::string tokens, audio_dir, out;
  std::string group = "ALL";
  int channel = -1;
  int window_ms = kDefaultWindowMs;
  double pad_threshold = 0.5;
  double voicing_threshold = kDefaultVoicingThreshold;
  int threads = 0;
};

struct AdjustArgs {
  std::string features, out, model;
  std::string batch_col = "session_id";
  std::string design = "emotion";
  bool allow_single_batch = false;
};

struct EvaluateArgs {
  std::string features, report, speaker, model_out;
  std::string group = "ALL";
  int trees = 500;
  int mtry = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  bool no_importance = false;
};

struct PairwiseArgs {
  std::string features, grid, speaker;
  std::string group = "ALL";
  int trees = 500;
  int mtry = 0;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct SynthArgs {
  std::string spec, out;
};

int cmd_tokens(const TokensArgs& a, std::ostream& out) {
  const auto words = parse_transcript(a.transcript);
  const auto codes = parse_emotion_codes(a.codes);
  const auto tokens = assign_emotions(words, codes);
  write_tokens_csv(tokens, a.out);
  const long long unlabeled = count_words_outside_intervals(words, codes);

  nlohmann::ordered_json meta;
  meta["unlabeled_word_default"] = "Neutral";
  meta["words_outside_coded_intervals"] = unlabeled;
  meta["n_tokens"] = tokens.size();
  std::ofstream meta_out(a.out + ".meta.json");
  if (!meta_out) throw IoError("cannot write file: " + a.out + ".meta.json");
  meta_out << meta.dump(2) << "\n";

  std::map<Emotion, long long> counts;
  for (const auto& t : tokens) ++counts[t.emotion];
  out << "wrote " << tokens.size() << " tokens to " << a.out << "\n";
  for (Emotion e : kAllEmotions) {
    out << "  " << emotion_name(e) << ": " << counts[e] << "\n";
  }
  if (unlabeled > 0) {
    out << unlabeled << " word(s) fell outside every coded interval and "
        << "default to Neutral\n";
  }
  return kExitOk;
}

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  const auto tokens = read_tokens_csv(a.tokens);
  const TokenStats stats = token_stats(tokens, a.bin_ms);

  nlohmann::ordered_json j;
  j["bin_ms"] = stats.bin_ms;
  j["n_tokens"] = stats.n_tokens;
  j["n_with_duration"] = stats.n_with_duration;
  j["fraction_le_240ms"] = stats.fraction_le_240ms;
  j["histogram"] = stats.histogram;
  nlohmann::ordered_json by_speaker = nlohmann::ordered_json::object();
  for (const auto& [speaker, counts] : stats.counts_by_speaker) {
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (const auto& [emotion, n] : counts) c[emotion_name(emotion)] = n;
    by_speaker[speaker] = c;
  }
  j["counts_by_speaker"] = by_speaker;
  nlohmann::ordered_json totals = nlohmann::ordered_json::object();
  for (const auto& [emotion, n] : stats.counts_total) {
    totals[emotion_name(emotion)] = n;
  }
  j["counts_total"] = totals;
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw IoError("cannot write file: " + a.out);
    f << j.dump(2) << "\n";
  }

  out << stats.n_tokens << " tokens, " << stats.n_with_duration
      << " with defined duration\n";
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%.1f%% of durations are <= 240 ms\n",
                100.0 * stats.fraction_le_240ms);
  out << buf;
  out << "duration histogram (bin " << stats.bin_ms << " ms):\n";
  for (std::size_t b = 0; b < stats.histogram.size(); ++b) {
    if (stats.histogram[b] == 0) continue;
    std::snprintf(buf, sizeof(buf), "  [%5zu,%5zu) %lld\n",
                  b * static_cast<std::size_t>(stats.bin_ms),
                  (b + 1) * static_cast<std::size_t>(stats.bin_ms),
                  stats.histogram[b]);
    out << buf;
  }
  return kExitOk;
}

int cmd_extract(const ExtractArgs& a, std::ostream& out) {
  const auto tokens = read_tokens_csv(a.tokens);
  if (tokens.empty()) throw ValidationError(a.tokens + ": no tokens");
  const FeatureGroup group = parse_feature_group(a.group);
  if (window_frame_count(a.window_ms) != kFramesPerToken) {
    throw ArgError("window_ms must give 12 frames (240 ms)");
  }

  // Decode each session once.
  std::map<std::string, Waveform> sessions;
  for (const auto& t : tokens) {
    if (sessions.count(t.session_id)) continue;
    const auto wav_path =
        std::filesystem::path(a.audio_dir) / (t.session_id + ".wav");
    if (!std::filesystem::exists(wav_path)) {
      throw IoError("missing session audio: " + wav_path.string());
    }
    sessions[t.session_id] = resample_16k(decode_wav(wav_path.string(), a.channel));
  }

  const GammatoneBank bank(kAnalysisRateHz);
  FeatureConfig config;
  config.window_ms = a.window_ms;
  config.voicing_threshold = a.voicing_threshold;
  config.pad_exclude_threshold = a.pad_threshold;

  struct RowResult {
    bool excluded = false;
    std::vector<double> values;
  };
  std::vector<RowResult> results(tokens.size());
  parallel_for(tokens.size(), a.threads, [&](std::size_t i) {
    const auto& t = tokens[i];
    TokenWindow tw = extract_window(sessions.at(t.session_id), t.onset_ms,
                                    a.window_ms, t.token_id);
    if (tw.padding_fraction() > config.pad_exclude_threshold) {
      results[i].excluded = true;
      return;
    }
    const FrameMatrix fm = extract_frame_matrix(tw, bank, config);
    results[i].values = assemble_vector(fm, group);
  });

  FeatureTable table;
  table.group = group;
  table.var_names = make_var_names(feature_group_size(group));
  long long excluded = 0;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (results[i].excluded) ++excluded;
    else keep.push_back(i);
  }
  table.values.resize(static_cast<Eigen::Index>(keep.size()),
                      feature_group_size(group));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const auto& t = tokens[keep[r]];
    table.token_ids.push_back(t.token_id);
    table.session_ids.push_back(t.session_id);
    table.speaker_ids.push_back(t.speaker_id);
    table.emotions.push_back(t.emotion);
    for (int j = 0; j < feature_group_size(group); ++j) {
      table.values(static_cast<Eigen::Index>(r), j) =
          results[keep[r]].values[static_cast<std::size_t>(j)];
    }
  }

  FeatureSidecar sidecar;
  sidecar.group = feature_group_name(group);
  sidecar.window_ms = a.window_ms;
  sidecar.voicing_threshold = a.voicing_threshold;
  sidecar.pad_exclude_threshold = a.pad_threshold;
  sidecar.tokens_excluded_padding = excluded;
  write_feature_csv(table, a.out, sidecar);

  out << "extracted " << table.n_rows() << " x " << feature_group_size(group)
      << " features (group " << feature_group_name(group) << ") to " << a.out
      << "\n";
  if (excluded > 0) {
    out << excluded << " token(s) excluded: more than "
        << format_g9(100.0 * a.pad_threshold) << "% zero-padded\n";
  }
  return kExitOk;
}

int cmd_adjust(const AdjustArgs& a, std::ostream& out) {
  const FeatureTable table = read_feature_csv(a.features);
  BatchAdjustOptions options;
  options.design =
      a.design == "none" ? DesignMode::kNone : DesignMode::kEmotion;
  const AdjustResult result = adjust_feature_table(
      table, a.batch_col, options, a.allow_single_batch);

  FeatureSidecar sidecar;
  if (auto existing = read_feature_sidecar(a.features)) sidecar = *existing;
  sidecar.group = feature_group_name(table.group);
  write_feature_csv(result.table, a.out, sidecar);
  if (!a.model.empty()) write_batch_model_json(result.model, a.model);

  if (result.model.bypassed) {
    out << "single batch: adjustment bypassed, output equals input\n";
  } else {
    out << "adjusted " << result.table.n_rows() << " rows across "
        << result.model.batch_ids.size() << " batches (design " << a.design
        << ")\n";
    for (const auto& w : result.model.warnings) out << "warning: " << w << "\n";
  }
  return kExitOk;
}

std::map<std::string, std::string> echo_common(const std::string& features,
                                               const std::string& group,
                                               const std::string& speaker,
                                               int window_hint) {
  std::map<std::string, std::string> echo;
  echo["features_path"] = features;
  echo["group_flag"] = group;
  echo["speaker_flag"] = speaker;
  (void)window_hint;
  return echo;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const FeatureTable full = read_feature_csv(a.features);
  const FeatureTable table =
      subset_rows(full, select_speaker_rows(full, a.speaker));
  const FeatureGroup group = parse_feature_group(a.group);

  ProtocolOptions options;
  options.forest.n_trees = a.trees;
  options.forest.mtry = a.mtry;
  options.forest.seed = a.seed;
  options.forest.threads = a.threads;
  options.compute_importance = !a.no_importance;

  EvaluationReport report = run_multiclass(table, group, options);
  report.config_echo = echo_common(a.features, a.group, a.speaker, 0);
  if (!a.report.empty()) write_report_json(report, a.report);

  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "speaker %s, group %s: recognition rate %.1f%% (%zu classes)\n",
                report.speaker_id.c_str(), feature_group_name(group).c_str(),
                100.0 * report.rate, report.classes.size());
  out << buf;
  for (const auto& d : report.dropped) {
    out << "  dropped " << d.label << ": " << d.reason << "\n";
  }
  out << render_conditional_table(report);
  if (!report.importance_top.empty()) {
    out << "top variables by permutation importance:\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(5, report.importance_top.size());
         ++i) {
      std::snprintf(buf, sizeof(buf), "  %-6s %+0.5f\n",
                    report.importance_top[i].first.c_str(),
                    report.importance_top[i].second);
      out << buf;
    }
  }
  if (!a.report.empty()) out << "report written to " << a.report << "\n";
  return kExitOk;
}

int cmd_pairwise(const PairwiseArgs& a, std::ostream& out) {
  const FeatureTable full = read_feature_csv(a.features);
  const FeatureTable table =
      subset_rows(full, select_speaker_rows(full, a.speaker));
  const FeatureGroup group = parse_feature_group(a.group);

  ProtocolOptions options;
  options.forest.n_trees = a.trees;
  options.forest.mtry = a.mtry;
  options.forest.seed = a.seed;
  options.forest.threads = a.threads;

  const auto grid = run_pairwise_grid(table, group, options);
  if (!a.grid.empty()) write_pairwise_grid_csv(grid, a.grid);
  out << render_pairwise_grid(grid);
  if (!a.grid.empty()) out << "grid written to " << a.grid << "\n";
  return kExitOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const CorpusSpec spec = read_corpus_spec(a.spec);
  const CorpusFiles files = gen_corpus(spec, a.out);
  out << "generated " << files.n_tokens << " tokens across "
      << files.wav_paths.size() << " session(s) in " << a.out << "\n";
  out << "  transcript: " << files.transcript_path << "\n";
  out << "  codes:      " << files.codes_path << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"speech emotion recognition pipeline"};
  app.set_version_flag("--version", std::string(kVersionString));
  app.require_subcommand(0, 1);

  TokensArgs tokens_args;
  auto* tokens = app.add_subcommand(
      "tokens", "label transcript words with coded emotions");
  tokens->add_option("--transcript", tokens_args.transcript,
                     "transcript CSV (speaker_id,session_id,word,onset_ms)")
      ->required();
  tokens->add_option("--codes", tokens_args.codes, "emotion-code CSV")
      ->required();
  tokens->add_option("--out", tokens_args.out, "token CSV output")->required();

  StatsArgs stats_args;
  auto* stats = app.add_subcommand(
      "stats", "token duration histogram and per-emotion counts");
  stats->add_option("--tokens", stats_args.tokens, "token CSV")->required();
  stats->add_option("--bin-ms", stats_args.bin_ms, "histogram bin width (ms)")
      ->check(CLI::PositiveNumber);
  stats->add_option("--out", stats_args.out, "stats JSON output");

  ExtractArgs extract_args;
  auto* extract =
      app.add_subcommand("extract", "acoustic features per token window");
  extract->add_option("--tokens", extract_args.tokens, "token CSV")->required();
  extract
      ->add_option("--audio-dir", extract_args.audio_dir,
                   "directory with <session_id>.wav recordings")
      ->required();
  extract->add_option("--out", extract_args.out, "feature CSV output")
      ->required();
  extract->add_option("--group", extract_args.group, "feature group")
      ->check(CLI::IsMember({"FB", "F", "VQ", "ALL"}));
  extract->add_option("--channel", extract_args.channel,
                      "channel of multi-channel WAVs (0-based)");
  extract->add_option("--window-ms", extract_args.window_ms,
                      "analysis window (default 240; reads window+20 ms)");
  extract->add_option("--pad-threshold", extract_args.pad_threshold,
                      "exclude tokens padded more than this fraction")
      ->check(CLI::Range(0.0, 1.0));
  extract->add_option("--voicing-threshold", extract_args.voicing_threshold,
                      "periodicity below this is unvoiced");
  extract->add_option("--threads", extract_args.threads, "0 = all cores");

  AdjustArgs adjust_args;
  auto* adjust = app.add_subcommand(
      "adjust", "remove per-session batch effects from FB variables");
  adjust->add_option("--features", adjust_args.features, "feature CSV")
      ->required();
  adjust->add_option("--batch-col", adjust_args.batch_col, "batch column")
      ->check(CLI::IsMember({"session_id", "speaker_id"}));
  adjust->add_option("--design", adjust_args.design, "design matrix mode")
      ->check(CLI::IsMember({"emotion", "none"}));
  adjust->add_option("--out", adjust_args.out, "adjusted feature CSV")
      ->required();
  adjust->add_option("--model", adjust_args.model, "batch model JSON (audit)");
  adjust->add_flag("--allow-single-batch", adjust_args.allow_single_batch,
                   "pass a single-batch table through unchanged");

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand(
      "evaluate", "balanced multiclass recognition with OOB scoring");
  evaluate->add_option("--features", evaluate_args.features, "feature CSV")
      ->required();
  evaluate->add_option("--group", evaluate_args.group, "feature group")
      ->check(CLI::IsMember({"FB", "F", "VQ", "ALL"}));
  evaluate->add_option("--speaker", evaluate_args.speaker,
                       "speaker to evaluate (required for multi-speaker tables)");
  evaluate->add_option("--trees", evaluate_args.trees, "number of trees")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--mtry", evaluate_args.mtry,
                       "features per node (0 = floor(sqrt(M)))");
  evaluate->add_option("--seed", evaluate_args.seed, "RNG seed");
  evaluate->add_option("--threads", evaluate_args.threads, "0 = all cores");
  evaluate->add_option("--report", evaluate_args.report, "report JSON output");
  evaluate->add_flag("--no-importance", evaluate_args.no_importance,
                     "skip permutation importance");

  PairwiseArgs pairwise_args;
  auto* pairwise = app.add_subcommand(
      "pairwise", "pairwise recognition grid over emotion pairs");
  pairwise->add_option("--features", pairwise_args.features, "feature CSV")
      ->required();
  pairwise->add_option("--group", pairwise_args.group, "feature group")
      ->check(CLI::IsMember({"FB", "F", "VQ", "ALL"}));
  pairwise->add_option("--speaker", pairwise_args.speaker, "speaker");
  pairwise->add_option("--trees", pairwise_args.trees, "number of trees")
      ->check(CLI::PositiveNumber);
  pairwise->add_option("--mtry", pairwise_args.mtry, "features per node");
  pairwise->add_option("--seed", pairwise_args.seed, "RNG seed");
  pairwise->add_option("--threads", pairwise_args.threads, "0 = all cores");
  pairwise->add_option("--grid", pairwise_args.grid, "grid CSV output");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic labeled corpus from a JSON spec");
  synth->add_option("--spec", synth_args.spec, "CorpusSpec JSON")->required();
  synth->add_option("--out", synth_args.out, "output directory")->required();

  std::vector<const char*> argv;
  argv.push_back("emorec");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersionString << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << app.help();
    return kExitUsage;
  }

  try {
    if (tokens->parsed()) return cmd_tokens(tokens_args, out);
    if (stats->parsed()) return cmd_stats(stats_args, out);
    if (extract->parsed()) return cmd_extract(extract_args, out);
    if (adjust->parsed()) return cmd_adjust(adjust_args, out);
    if (evaluate->parsed()) return cmd_evaluate(evaluate_args, out);
    if (pairwise->parsed()) return cmd_pairwise(pairwise_args, out);
    if (synth->parsed()) return cmd_synth(synth_args, out);
    out << app.help();
    return kExitOk;
  } catch (const ArgError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace emorec
