// Command-line front end for the event coreference pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evcoref/checkpoint.hpp"
#include "evcoref/coref_metrics.hpp"
#include "evcoref/coref_mlnn.hpp"
#include "evcoref/mention_extractor.hpp"

namespace {

using namespace evcoref;
using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::vector<int> parse_topic_set(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    auto dash = part.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(std::stoi(part));
    } else {
      int lo = std::stoi(part.substr(0, dash));
      int hi = std::stoi(part.substr(dash + 1));
      for (int t = lo; t <= hi; ++t) out.push_back(t);
    }
  }
  return out;
}

std::string pct(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.1f", v * 100.0);
  return buf;
}

void print_report(const CorpusScores& s, bool json_report) {
  if (json_report) {
    json j;
    j["b3"] = {{"r", s.b3.recall}, {"p", s.b3.precision}, {"f1", s.b3.f1}};
    j["muc"] = {{"r", s.muc.recall}, {"p", s.muc.precision}, {"f1", s.muc.f1}};
    j["ceaf_e"] = {{"r", s.ceafe.recall},
                   {"p", s.ceafe.precision},
                   {"f1", s.ceafe.f1}};
    j["conll_f1"] = s.conll;
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << "metric      R      P      F1\n";
  std::cout << "B3       " << pct(s.b3.recall) << "   " << pct(s.b3.precision)
            << "   " << pct(s.b3.f1) << "\n";
  std::cout << "MUC      " << pct(s.muc.recall) << "   "
            << pct(s.muc.precision) << "   " << pct(s.muc.f1) << "\n";
  std::cout << "CEAF_e   " << pct(s.ceafe.recall) << "   "
            << pct(s.ceafe.precision) << "   " << pct(s.ceafe.f1) << "\n";
  std::cout << "CoNLL F1 " << pct(s.conll) << "\n";
}

void print_stats(const std::string& label, const CorpusStats& s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", s.mean_chain_length);
  std::cout << label << ": documents " << s.documents << ", sentences "
            << s.sentences << ", mentions " << s.mentions << ", chains "
            << s.chains << ", mean chain length " << buf << "\n";
}

void write_manifest(const std::string& out_path, const json& config,
                    const std::vector<std::string>& input_files) {
  json manifest;
  manifest["format_version"] = 1;
  manifest["config"] = config;
  json hashes = json::object();
  for (const auto& f : input_files) hashes[f] = file_hash(f);
  manifest["inputs"] = hashes;
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + out_path);
  out << manifest.dump(2) << "\n";
}

void write_mentions_jsonl(const std::string& path,
                          const std::vector<std::pair<std::string,
                                                      std::vector<Mention>>>&
                              docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write mentions file: " + path);
  out << json{{"format_version", 1}, {"stage", "mentions"}}.dump() << '\n';
  for (const auto& [doc_id, mentions] : docs) {
    json arr = json::array();
    for (const auto& m : mentions)
      arr.push_back({{"sent", m.sentence_index}, {"token", m.head_index}});
    out << json{{"doc_id", doc_id}, {"mentions", arr}}.dump() << '\n';
  }
}

void write_pairs_jsonl(const std::string& path,
                       const std::vector<PairDecision>& decisions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write pairs file: " + path);
  out << json{{"format_version", 1}, {"stage", "pair_decisions"}}.dump()
      << '\n';
  for (const auto& d : decisions) {
    out << json{{"doc_id", d.doc_id},
                {"a", d.a_id},
                {"b", d.b_id},
                {"label", d.coref ? "coref" : "non_coref"},
                {"confidence", d.confidence},
                {"similarity", d.similarity}}
               .dump()
        << '\n';
  }
}

json features_json(const FeatureConfig& f) {
  return {{"context_window", f.context_window},
          {"pos_window", f.pos_window},
          {"word_dim", f.word_dim},
          {"pos_dim", f.pos_dim},
          {"lemma_dim", f.lemma_dim}};
}

struct FeatureOpts {
  void attach(CLI::App* cmd, FeatureConfig& f) {
    cmd->add_option("--context-window", f.context_window);
    cmd->add_option("--pos-window", f.pos_window);
    cmd->add_option("--word-dim", f.word_dim);
    cmd->add_option("--pos-dim", f.pos_dim);
    cmd->add_option("--lemma-dim", f.lemma_dim);
  }
};

// Shared by predict and run: gold or predicted mentions -> decisions ->
// chains, with the filter picked by the ablation mode.
struct PipelineArtifacts {
  std::vector<ChainSet> gold;
  std::vector<ChainSet> pred;
  std::vector<std::pair<std::string, std::vector<Mention>>> mentions;
  std::vector<PairDecision> decisions;
};

PipelineArtifacts run_inference(const Corpus& corpus, const MLNNModel& coref,
                                const MentionExtractorModel* extractor,
                                AblationMode mode) {
  FilterThresholds t = coref.config.thresholds;
  t.use_threshold_rule = mode_uses_threshold_rule(mode);
  PipelineArtifacts art;
  for (const auto& doc : corpus.documents) {
    std::vector<Mention> mentions =
        extractor ? align_mentions_to_gold(doc, predict_mentions(*extractor, doc))
                  : doc.gold_mentions;
    auto decisions = predict_pairs(coref, doc, mentions);
    std::vector<std::string> ids;
    for (const auto& m : mentions) ids.push_back(m.mention_id);
    art.gold.push_back(gold_chain_set(doc));
    art.pred.push_back(build_chains(doc.doc_id, ids, decisions, t));
    art.mentions.emplace_back(doc.doc_id, std::move(mentions));
    art.decisions.insert(art.decisions.end(), decisions.begin(),
                         decisions.end());
  }
  return art;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Within-document event coreference resolution pipeline"};
  app.require_subcommand(1);

  // ingest
  std::string in_path, out_path;
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus file");
  ingest->add_option("--in", in_path, "corpus JSONL")->required();
  ingest->add_option("--out", out_path, "rewrite the validated corpus");

  // stats
  std::string stats_in, stats_train, stats_dev, stats_test;
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("--in", stats_in)->required();
  stats->add_option("--train-topics", stats_train, "e.g. 1-20");
  stats->add_option("--dev-topics", stats_dev);
  stats->add_option("--test-topics", stats_test);

  // gen-synth
  std::uint64_t g_seed = 1;
  int g_topics = 2, g_docs = 3;
  double g_noise = 0.0;
  std::string g_out;
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic corpus");
  gen->add_option("--seed", g_seed);
  gen->add_option("--topics", g_topics);
  gen->add_option("--docs-per-topic", g_docs);
  gen->add_option("--noise", g_noise);
  gen->add_option("--out", g_out)->required();

  // train-mention
  ExtractorConfig ext_cfg;
  std::string tm_train, tm_dev, tm_out;
  bool tm_show = false;
  FeatureOpts tm_feat;
  auto* tm = app.add_subcommand("train-mention",
                                "Train the mention extraction model");
  tm->add_option("--train", tm_train);
  tm->add_option("--dev", tm_dev);
  tm->add_option("--out", tm_out);
  tm_feat.attach(tm, ext_cfg.features);
  tm->add_option("--ctx-fv-dim", ext_cfg.ctx_fv_dim);
  tm->add_option("--pos-fv-dim", ext_cfg.pos_fv_dim);
  tm->add_option("--hidden1", ext_cfg.hidden1);
  tm->add_option("--hidden2", ext_cfg.hidden2);
  tm->add_option("--epochs", ext_cfg.epochs);
  tm->add_option("--batch-size", ext_cfg.batch_size);
  tm->add_option("--seed", ext_cfg.seed);
  tm->add_option("--min-count", ext_cfg.min_count);
  tm->add_flag("--restrict-candidates", ext_cfg.restrict_candidates);
  tm->add_option("--negative-keep", ext_cfg.negative_keep);
  tm->add_flag("--show-config", tm_show);

  // train-coref
  MLNNConfig mlnn_cfg;
  std::string tc_train, tc_dev, tc_out, tc_mode = "MLNN";
  bool tc_show = false;
  FeatureOpts tc_feat;
  auto* tc = app.add_subcommand("train-coref", "Train the coreference model");
  tc->add_option("--train", tc_train);
  tc->add_option("--dev", tc_dev);
  tc->add_option("--out", tc_out);
  tc->add_option("--mode", tc_mode, "C-NN, C-MLNN or MLNN");
  tc_feat.attach(tc, mlnn_cfg.features);
  tc->add_option("--ctx-fv-dim", mlnn_cfg.ctx_fv_dim);
  tc->add_option("--pos-fv-dim", mlnn_cfg.pos_fv_dim);
  tc->add_option("--cn-hidden1", mlnn_cfg.cn_hidden1);
  tc->add_option("--cn-hidden2", mlnn_cfg.cn_hidden2);
  tc->add_option("--sn-hidden1", mlnn_cfg.sn_hidden1);
  tc->add_option("--sn-hidden2", mlnn_cfg.sn_hidden2);
  tc->add_option("--epochs", mlnn_cfg.epochs);
  tc->add_option("--batch-size", mlnn_cfg.batch_size);
  tc->add_option("--seed", mlnn_cfg.seed);
  tc->add_option("--min-count", mlnn_cfg.min_count);
  tc->add_option("--negative-keep", mlnn_cfg.negative_keep);
  tc->add_option("--similarity-min", mlnn_cfg.thresholds.similarity_min);
  tc->add_option("--confidence-max", mlnn_cfg.thresholds.confidence_max);
  tc->add_flag("--show-config", tc_show);

  // predict
  std::string p_corpus, p_coref_model, p_mention_model, p_out_dir = ".";
  std::string p_mode = "MLNN", p_source = "predicted";
  auto* predict = app.add_subcommand("predict", "Run inference stages");
  predict->add_option("--corpus", p_corpus)->required();
  predict->add_option("--coref-model", p_coref_model)->required();
  predict->add_option("--mention-model", p_mention_model);
  predict->add_option("--mode", p_mode);
  predict->add_option("--mention-source", p_source, "gold or predicted");
  predict->add_option("--out-dir", p_out_dir);

  // score
  std::string s_gold, s_pred;
  bool s_json = false;
  auto* score = app.add_subcommand("score", "Score chain files");
  score->add_option("--gold", s_gold)->required();
  score->add_option("--pred", s_pred)->required();
  score->add_flag("--json-report", s_json);

  // run
  std::string r_corpus, r_coref_model, r_mention_model, r_out_dir = ".";
  std::string r_mode = "MLNN", r_source = "predicted";
  bool r_json = false;
  auto* run = app.add_subcommand("run", "End-to-end pipeline with report");
  run->add_option("--corpus", r_corpus)->required();
  run->add_option("--coref-model", r_coref_model)->required();
  run->add_option("--mention-model", r_mention_model);
  run->add_option("--mode", r_mode);
  run->add_option("--mention-source", r_source, "gold or predicted");
  run->add_option("--out-dir", r_out_dir);
  run->add_flag("--json-report", r_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    // CLI11 signals --help with 0; everything else is a usage error.
    return rc == 0 ? 0 : kExitUsage;
  }

  if (ingest->parsed()) {
    Corpus corpus = load_corpus(in_path);
    print_stats("corpus", corpus_stats(corpus));
    if (!out_path.empty()) write_corpus(corpus, out_path);
    return 0;
  }

  if (stats->parsed()) {
    Corpus corpus = load_corpus(stats_in);
    if (!stats_train.empty() || !stats_dev.empty() || !stats_test.empty()) {
      auto split = split_topics(corpus, parse_topic_set(stats_train),
                                parse_topic_set(stats_dev),
                                parse_topic_set(stats_test));
      print_stats("train", corpus_stats(split.train));
      print_stats("dev", corpus_stats(split.dev));
      print_stats("test", corpus_stats(split.test));
      Corpus covered;
      for (const auto* part : {&split.train, &split.dev, &split.test})
        for (const auto& d : part->documents) covered.documents.push_back(d);
      print_stats("total", corpus_stats(covered));
      if (split.dropped > 0)
        std::cout << "dropped (topic in no split): " << split.dropped << "\n";
    } else {
      print_stats("total", corpus_stats(corpus));
    }
    return 0;
  }

  if (gen->parsed()) {
    Corpus corpus =
        generate_synthetic_corpus(g_seed, g_topics, g_docs, g_noise);
    write_corpus(corpus, g_out);
    print_stats("generated", corpus_stats(corpus));
    write_manifest(g_out + ".manifest.json",
                   {{"command", "gen-synth"},
                    {"seed", g_seed},
                    {"topics", g_topics},
                    {"docs_per_topic", g_docs},
                    {"noise", g_noise}},
                   {g_out});
    return 0;
  }

  if (tm->parsed()) {
    json cfg = {{"command", "train-mention"},
                {"features", features_json(ext_cfg.features)},
                {"ctx_fv_dim", ext_cfg.ctx_fv_dim},
                {"pos_fv_dim", ext_cfg.pos_fv_dim},
                {"hidden1", ext_cfg.hidden1},
                {"hidden2", ext_cfg.hidden2},
                {"epochs", ext_cfg.epochs},
                {"batch_size", ext_cfg.batch_size},
                {"seed", ext_cfg.seed},
                {"min_count", ext_cfg.min_count},
                {"restrict_candidates", ext_cfg.restrict_candidates},
                {"negative_keep", ext_cfg.negative_keep}};
    if (tm_show) {
      std::cout << cfg.dump(2) << "\n";
      return 0;
    }
    if (tm_train.empty() || tm_dev.empty() || tm_out.empty()) {
      std::cerr << "train-mention requires --train, --dev and --out\n";
      return kExitUsage;
    }
    Corpus train = load_corpus(tm_train);
    Corpus dev = load_corpus(tm_dev);
    auto model = train_extractor(train, dev, ext_cfg, nullptr, &std::cout);
    save_extractor(model, tm_out);
    write_manifest(tm_out + ".manifest.json", cfg,
                   {tm_train, tm_dev, tm_out});
    std::cout << "saved " << tm_out << "\n";
    return 0;
  }

  if (tc->parsed()) {
    json cfg = {{"command", "train-coref"},
                {"mode", tc_mode},
                {"features", features_json(mlnn_cfg.features)},
                {"ctx_fv_dim", mlnn_cfg.ctx_fv_dim},
                {"pos_fv_dim", mlnn_cfg.pos_fv_dim},
                {"cn_hidden1", mlnn_cfg.cn_hidden1},
                {"cn_hidden2", mlnn_cfg.cn_hidden2},
                {"sn_hidden1", mlnn_cfg.sn_hidden1},
                {"sn_hidden2", mlnn_cfg.sn_hidden2},
                {"epochs", mlnn_cfg.epochs},
                {"batch_size", mlnn_cfg.batch_size},
                {"seed", mlnn_cfg.seed},
                {"min_count", mlnn_cfg.min_count},
                {"negative_keep", mlnn_cfg.negative_keep},
                {"similarity_min", mlnn_cfg.thresholds.similarity_min},
                {"confidence_max", mlnn_cfg.thresholds.confidence_max}};
    if (tc_show) {
      std::cout << cfg.dump(2) << "\n";
      return 0;
    }
    if (tc_train.empty() || tc_dev.empty() || tc_out.empty()) {
      std::cerr << "train-coref requires --train, --dev and --out\n";
      return kExitUsage;
    }
    AblationMode mode = parse_mode(tc_mode);
    Corpus train = load_corpus(tc_train);
    Corpus dev = load_corpus(tc_dev);
    auto model = train_joint(train, dev, mlnn_cfg, mode, nullptr, &std::cout);
    save_mlnn(model, tc_out);
    write_manifest(tc_out + ".manifest.json", cfg,
                   {tc_train, tc_dev, tc_out});
    std::cout << "saved " << tc_out << "\n";
    return 0;
  }

  if (predict->parsed() || run->parsed()) {
    bool is_run = run->parsed();
    const std::string& corpus_path = is_run ? r_corpus : p_corpus;
    const std::string& coref_path = is_run ? r_coref_model : p_coref_model;
    const std::string& mention_path =
        is_run ? r_mention_model : p_mention_model;
    const std::string& out_dir = is_run ? r_out_dir : p_out_dir;
    const std::string& mode_str = is_run ? r_mode : p_mode;
    const std::string& source = is_run ? r_source : p_source;

    AblationMode mode = parse_mode(mode_str);
    std::filesystem::create_directories(out_dir);
    Corpus corpus = load_corpus(corpus_path);
    MLNNModel coref = load_mlnn(coref_path);
    std::optional<MentionExtractorModel> extractor;
    if (source == "predicted") {
      if (mention_path.empty()) {
        std::cerr << "--mention-model required with --mention-source "
                     "predicted\n";
        return kExitUsage;
      }
      extractor = load_extractor(mention_path);
    } else if (source != "gold") {
      std::cerr << "--mention-source must be gold or predicted\n";
      return kExitUsage;
    }

    PipelineArtifacts art = run_inference(
        corpus, coref, extractor ? &*extractor : nullptr, mode);
    write_mentions_jsonl(out_dir + "/mentions.jsonl", art.mentions);
    write_pairs_jsonl(out_dir + "/pairs.jsonl", art.decisions);
    write_chain_sets(art.gold, out_dir + "/gold_chains.jsonl", "gold");
    write_chain_sets(art.pred, out_dir + "/pred_chains.jsonl",
                     "clustering:" + mode_str);

    std::vector<std::string> inputs = {corpus_path, coref_path};
    if (!mention_path.empty() && extractor) inputs.push_back(mention_path);
    write_manifest(out_dir + "/run.manifest.json",
                   {{"command", is_run ? "run" : "predict"},
                    {"mode", mode_str},
                    {"mention_source", source}},
                   inputs);

    if (is_run) {
      CorpusScores scores = score_corpus(art.gold, art.pred);
      print_report(scores, r_json);
    }
    return 0;
  }

  if (score->parsed()) {
    auto gold = read_chain_sets(s_gold);
    auto pred = read_chain_sets(s_pred);
    print_report(score_corpus(gold, pred), s_json);
    return 0;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const CorpusError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
