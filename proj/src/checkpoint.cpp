#include "evcoref/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace evcoref {

using nlohmann::json;

namespace {

void emit_double(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  s += buf;
}

void emit_vec(std::string& s, const Vec& v) {
  s += '[';
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    emit_double(s, v[i]);
  }
  s += ']';
}

void emit_mat(std::string& s, const Mat& m) {
  s += '[';
  for (int r = 0; r < m.rows; ++r) {
    if (r) s += ',';
    s += '[';
    for (int c = 0; c < m.cols; ++c) {
      if (c) s += ',';
      emit_double(s, m.at(r, c));
    }
    s += ']';
  }
  s += ']';
}

void emit_layer(std::string& s, const std::string& name,
                const DenseLayer& layer) {
  s += json(name).dump();
  s += ":{\"act\":";
  s += layer.act == Activation::Tanh ? "\"tanh\"" : "\"identity\"";
  s += ",\"w\":";
  emit_mat(s, layer.w);
  s += ",\"b\":";
  emit_vec(s, layer.b);
  s += '}';
}

void emit_table(std::string& s, const std::string& name,
                const EmbeddingTable& t) {
  s += json(name).dump();
  s += ':';
  emit_mat(s, t.m);
}

// Vocab maps serialized as id-ordered [string, id] pairs.
void emit_vocab_map(std::string& s, const std::string& name,
                    const std::unordered_map<std::string, int>& map) {
  std::map<int, std::string> by_id;
  for (const auto& [k, v] : map) by_id[v] = k;
  s += json(name).dump();
  s += ":[";
  bool first = true;
  for (const auto& [id, k] : by_id) {
    if (!first) s += ',';
    first = false;
    s += '[';
    s += json(k).dump();
    s += ',';
    s += std::to_string(id);
    s += ']';
  }
  s += ']';
}

void emit_vocab(std::string& s, const Vocab& v) {
  s += "\"vocab\":{";
  emit_vocab_map(s, "word", v.word_to_id);
  s += ',';
  emit_vocab_map(s, "pos", v.pos_to_id);
  s += ',';
  emit_vocab_map(s, "lemma", v.lemma_to_id);
  s += '}';
}

void emit_features(std::string& s, const FeatureConfig& f) {
  s += "\"features\":{\"context_window\":" + std::to_string(f.context_window) +
       ",\"pos_window\":" + std::to_string(f.pos_window) +
       ",\"word_dim\":" + std::to_string(f.word_dim) +
       ",\"pos_dim\":" + std::to_string(f.pos_dim) +
       ",\"lemma_dim\":" + std::to_string(f.lemma_dim) + "}";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << content;
}

json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  return json::parse(in);
}

FeatureConfig load_features(const json& j) {
  FeatureConfig f;
  f.context_window = j.at("context_window").get<int>();
  f.pos_window = j.at("pos_window").get<int>();
  f.word_dim = j.at("word_dim").get<int>();
  f.pos_dim = j.at("pos_dim").get<int>();
  f.lemma_dim = j.at("lemma_dim").get<int>();
  return f;
}

std::unordered_map<std::string, int> load_vocab_map(const json& j) {
  std::unordered_map<std::string, int> out;
  for (const auto& pair : j)
    out[pair.at(0).get<std::string>()] = pair.at(1).get<int>();
  return out;
}

Vocab load_vocab(const json& j) {
  Vocab v;
  v.word_to_id = load_vocab_map(j.at("word"));
  v.pos_to_id = load_vocab_map(j.at("pos"));
  v.lemma_to_id = load_vocab_map(j.at("lemma"));
  return v;
}

void load_mat(const json& j, Mat& m) {
  if (static_cast<int>(j.size()) != m.rows)
    throw std::runtime_error("checkpoint matrix row mismatch");
  for (int r = 0; r < m.rows; ++r) {
    const auto& row = j.at(r);
    if (static_cast<int>(row.size()) != m.cols)
      throw std::runtime_error("checkpoint matrix col mismatch");
    for (int c = 0; c < m.cols; ++c) m.at(r, c) = row.at(c).get<double>();
  }
}

void load_layer(const json& j, DenseLayer& layer) {
  load_mat(j.at("w"), layer.w);
  const auto& b = j.at("b");
  if (b.size() != layer.b.size())
    throw std::runtime_error("checkpoint bias size mismatch");
  for (size_t i = 0; i < layer.b.size(); ++i) layer.b[i] = b.at(i).get<double>();
  std::string act = j.at("act").get<std::string>();
  layer.act = act == "tanh" ? Activation::Tanh : Activation::Identity;
}

void check_version(const json& j, const std::string& expected_type) {
  if (j.at("format_version").get<int>() != 1)
    throw std::runtime_error("unsupported checkpoint format_version");
  if (j.at("model_type").get<std::string>() != expected_type)
    throw std::runtime_error("checkpoint model_type is not " + expected_type);
}

}  // namespace

void save_extractor(const MentionExtractorModel& model,
                    const std::string& path) {
  const auto& c = model.config;
  std::string s = "{\"format_version\":1,\"model_type\":\"mention_extractor\","
                  "\"config\":{";
  emit_features(s, c.features);
  s += ",\"ctx_fv_dim\":" + std::to_string(c.ctx_fv_dim) +
       ",\"pos_fv_dim\":" + std::to_string(c.pos_fv_dim) +
       ",\"hidden1\":" + std::to_string(c.hidden1) +
       ",\"hidden2\":" + std::to_string(c.hidden2) +
       ",\"epochs\":" + std::to_string(c.epochs) +
       ",\"batch_size\":" + std::to_string(c.batch_size) +
       ",\"min_count\":" + std::to_string(c.min_count) +
       ",\"restrict_candidates\":" +
       (c.restrict_candidates ? "true" : "false") + ",\"negative_keep\":";
  emit_double(s, c.negative_keep);
  s += "},\"seed\":" + std::to_string(c.seed) + ",";
  emit_vocab(s, model.vocab);
  s += ",\"tables\":{";
  emit_table(s, "word_emb", model.encoder.word_emb);
  s += ',';
  emit_table(s, "pos_emb", model.encoder.pos_emb);
  s += ',';
  emit_table(s, "lemma_emb", model.encoder.lemma_emb);
  s += "},\"layers\":{";
  emit_layer(s, "ctx_proj", model.encoder.ctx_proj);
  s += ',';
  emit_layer(s, "pos_proj", model.encoder.pos_proj);
  s += ',';
  emit_layer(s, "hidden1", model.hidden1);
  s += ',';
  emit_layer(s, "hidden2", model.hidden2);
  s += ',';
  emit_layer(s, "output", model.output);
  s += "}}\n";
  write_file(path, s);
}

MentionExtractorModel load_extractor(const std::string& path) {
  json j = read_file(path);
  check_version(j, "mention_extractor");
  const auto& jc = j.at("config");
  ExtractorConfig c;
  c.features = load_features(jc.at("features"));
  c.ctx_fv_dim = jc.at("ctx_fv_dim").get<int>();
  c.pos_fv_dim = jc.at("pos_fv_dim").get<int>();
  c.hidden1 = jc.at("hidden1").get<int>();
  c.hidden2 = jc.at("hidden2").get<int>();
  c.epochs = jc.at("epochs").get<int>();
  c.batch_size = jc.at("batch_size").get<int>();
  c.min_count = jc.at("min_count").get<int>();
  c.restrict_candidates = jc.at("restrict_candidates").get<bool>();
  c.negative_keep = jc.at("negative_keep").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();

  MentionExtractorModel model =
      make_extractor_model(c, load_vocab(j.at("vocab")));
  load_mat(j.at("tables").at("word_emb"), model.encoder.word_emb.m);
  load_mat(j.at("tables").at("pos_emb"), model.encoder.pos_emb.m);
  load_mat(j.at("tables").at("lemma_emb"), model.encoder.lemma_emb.m);
  load_layer(j.at("layers").at("ctx_proj"), model.encoder.ctx_proj);
  load_layer(j.at("layers").at("pos_proj"), model.encoder.pos_proj);
  load_layer(j.at("layers").at("hidden1"), model.hidden1);
  load_layer(j.at("layers").at("hidden2"), model.hidden2);
  load_layer(j.at("layers").at("output"), model.output);
  return model;
}

void save_mlnn(const MLNNModel& model, const std::string& path) {
  const auto& c = model.config;
  std::string s = "{\"format_version\":1,\"model_type\":\"mlnn\",\"config\":{";
  emit_features(s, c.features);
  s += ",\"ctx_fv_dim\":" + std::to_string(c.ctx_fv_dim) +
       ",\"pos_fv_dim\":" + std::to_string(c.pos_fv_dim) +
       ",\"cn_hidden1\":" + std::to_string(c.cn_hidden1) +
       ",\"cn_hidden2\":" + std::to_string(c.cn_hidden2) +
       ",\"sn_hidden1\":" + std::to_string(c.sn_hidden1) +
       ",\"sn_hidden2\":" + std::to_string(c.sn_hidden2) +
       ",\"epochs\":" + std::to_string(c.epochs) +
       ",\"batch_size\":" + std::to_string(c.batch_size) +
       ",\"min_count\":" + std::to_string(c.min_count) + ",\"negative_keep\":";
  emit_double(s, c.negative_keep);
  s += ",\"similarity_min\":";
  emit_double(s, c.thresholds.similarity_min);
  s += ",\"confidence_max\":";
  emit_double(s, c.thresholds.confidence_max);
  s += "},\"seed\":" + std::to_string(c.seed) + ",";
  emit_vocab(s, model.vocab);
  s += ",\"tables\":{";
  emit_table(s, "word_emb", model.encoder.word_emb);
  s += ',';
  emit_table(s, "pos_emb", model.encoder.pos_emb);
  s += ',';
  emit_table(s, "lemma_emb", model.encoder.lemma_emb);
  s += "},\"layers\":{";
  emit_layer(s, "ctx_proj", model.encoder.ctx_proj);
  s += ',';
  emit_layer(s, "pos_proj", model.encoder.pos_proj);
  s += ',';
  emit_layer(s, "cn_hidden1", model.cn_hidden1);
  s += ',';
  emit_layer(s, "cn_hidden2", model.cn_hidden2);
  s += ',';
  emit_layer(s, "cn_output", model.cn_output);
  s += ',';
  emit_layer(s, "sn_hidden1", model.sn_hidden1);
  s += ',';
  emit_layer(s, "sn_hidden2", model.sn_hidden2);
  s += "}}\n";
  write_file(path, s);
}

MLNNModel load_mlnn(const std::string& path) {
  json j = read_file(path);
  check_version(j, "mlnn");
  const auto& jc = j.at("config");
  MLNNConfig c;
  c.features = load_features(jc.at("features"));
  c.ctx_fv_dim = jc.at("ctx_fv_dim").get<int>();
  c.pos_fv_dim = jc.at("pos_fv_dim").get<int>();
  c.cn_hidden1 = jc.at("cn_hidden1").get<int>();
  c.cn_hidden2 = jc.at("cn_hidden2").get<int>();
  c.sn_hidden1 = jc.at("sn_hidden1").get<int>();
  c.sn_hidden2 = jc.at("sn_hidden2").get<int>();
  c.epochs = jc.at("epochs").get<int>();
  c.batch_size = jc.at("batch_size").get<int>();
  c.min_count = jc.at("min_count").get<int>();
  c.negative_keep = jc.at("negative_keep").get<double>();
  c.thresholds.similarity_min = jc.at("similarity_min").get<double>();
  c.thresholds.confidence_max = jc.at("confidence_max").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();

  MLNNModel model = make_mlnn_model(c, load_vocab(j.at("vocab")));
  load_mat(j.at("tables").at("word_emb"), model.encoder.word_emb.m);
  load_mat(j.at("tables").at("pos_emb"), model.encoder.pos_emb.m);
  load_mat(j.at("tables").at("lemma_emb"), model.encoder.lemma_emb.m);
  load_layer(j.at("layers").at("ctx_proj"), model.encoder.ctx_proj);
  load_layer(j.at("layers").at("pos_proj"), model.encoder.pos_proj);
  load_layer(j.at("layers").at("cn_hidden1"), model.cn_hidden1);
  load_layer(j.at("layers").at("cn_hidden2"), model.cn_hidden2);
  load_layer(j.at("layers").at("cn_output"), model.cn_output);
  load_layer(j.at("layers").at("sn_hidden1"), model.sn_hidden1);
  load_layer(j.at("layers").at("sn_hidden2"), model.sn_hidden2);
  return model;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file: " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  std::ostringstream os;
  os << std::hex << h;
  return "fnv1a:" + os.str();
}

}  // namespace evcoref
