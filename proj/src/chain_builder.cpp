#include "evcoref/chain_builder.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace evcoref {

bool filter_decision(const PairDecision& d, const FilterThresholds& t) {
  if (d.coref) return true;
  if (!t.use_threshold_rule) return false;
  return d.similarity > t.similarity_min && d.confidence < t.confidence_max;
}

namespace {

void sort_clusters(ChainSet& cs) {
  for (auto& c : cs.clusters) std::sort(c.begin(), c.end());
  std::sort(cs.clusters.begin(), cs.clusters.end());
}

}  // namespace

ChainSet build_chains(const std::string& doc_id,
                      const std::vector<std::string>& mention_ids,
                      const std::vector<PairDecision>& decisions,
                      const FilterThresholds& t) {
  std::unordered_map<std::string, int> slot;
  for (const auto& id : mention_ids)
    slot.emplace(id, static_cast<int>(slot.size()));

  UnionFind uf(static_cast<int>(mention_ids.size()));
  for (const auto& d : decisions) {
    auto a = slot.find(d.a_id);
    auto b = slot.find(d.b_id);
    if (a == slot.end() || b == slot.end())
      throw std::invalid_argument("build_chains: decision references unknown "
                                  "mention '" +
                                  (a == slot.end() ? d.a_id : d.b_id) + "'");
    if (filter_decision(d, t)) uf.unite(a->second, b->second);
  }

  std::map<int, std::vector<std::string>> components;
  for (size_t i = 0; i < mention_ids.size(); ++i)
    components[uf.find(static_cast<int>(i))].push_back(mention_ids[i]);

  ChainSet cs;
  cs.doc_id = doc_id;
  for (auto& [root, members] : components)
    cs.clusters.push_back(std::move(members));
  sort_clusters(cs);
  return cs;
}

ChainSet lemma_baseline(const Document& doc) {
  std::map<std::string, std::vector<std::string>> by_lemma;
  for (const auto& m : doc.gold_mentions)
    by_lemma[doc.head_token(m).lemma].push_back(m.mention_id);
  ChainSet cs;
  cs.doc_id = doc.doc_id;
  for (auto& [lemma, members] : by_lemma)
    cs.clusters.push_back(std::move(members));
  sort_clusters(cs);
  return cs;
}

ChainSet gold_chain_set(const Document& doc) {
  ChainSet cs;
  cs.doc_id = doc.doc_id;
  std::unordered_map<std::string, bool> chained;
  for (const auto& chain : doc.gold_chains) {
    cs.clusters.push_back(chain.mention_ids);
    for (const auto& id : chain.mention_ids) chained[id] = true;
  }
  // Mentions outside every gold chain score as singletons.
  for (const auto& m : doc.gold_mentions)
    if (!chained.count(m.mention_id)) cs.clusters.push_back({m.mention_id});
  sort_clusters(cs);
  return cs;
}

void write_chain_sets(const std::vector<ChainSet>& sets,
                      const std::string& path, const std::string& stage) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write chain file: " + path);
  out << nlohmann::json{{"format_version", 1}, {"stage", stage}}.dump()
      << '\n';
  for (const auto& cs : sets) {
    nlohmann::json obj;
    obj["doc_id"] = cs.doc_id;
    obj["clusters"] = cs.clusters;
    out << obj.dump() << '\n';
  }
}

std::vector<ChainSet> read_chain_sets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read chain file: " + path);
  std::vector<ChainSet> sets;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded())
      throw std::runtime_error("chain file " + path + " line " +
                               std::to_string(line_no) + ": malformed JSON");
    if (obj.contains("format_version")) continue;  // header line
    ChainSet cs;
    cs.doc_id = obj.at("doc_id").get<std::string>();
    for (const auto& jc : obj.at("clusters"))
      cs.clusters.push_back(jc.get<std::vector<std::string>>());
    sort_clusters(cs);
    sets.push_back(std::move(cs));
  }
  return sets;
}

}  // namespace evcoref
