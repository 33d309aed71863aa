#include "monoslicer/decompose.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "monoslicer/io.hpp"
#include "monoslicer/kernels.hpp"

namespace monoslicer::decompose {

std::uint64_t Classification::internal_weight() const {
  std::uint64_t sum = 0;
  for (const auto& c : edges)
    if (c.verdict == Verdict::Internal) sum += c.edge.weight;
  return sum;
}

std::uint64_t Classification::external_weight() const {
  std::uint64_t sum = 0;
  for (const auto& c : edges)
    if (c.verdict == Verdict::External) sum += c.edge.weight;
  return sum;
}

Classification classify_edges(const ClassGraph& g, const Decomposition& d) { return kernels::classify(g, d); }

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::UserSpecified: return "user_specified";
    case Provenance::BaseClustering: return "base_clustering";
    case Provenance::DuplicateVariant: return "duplicate_variant";
    case Provenance::MergeVariant: return "merge_variant";
    case Provenance::ExternalVariant: return "external_variant";
  }
  return "user_specified";
}

Provenance provenance_from_string(std::string_view text) {
  for (auto p : {Provenance::UserSpecified, Provenance::BaseClustering, Provenance::DuplicateVariant,
                 Provenance::MergeVariant, Provenance::ExternalVariant})
    if (to_string(p) == text) return p;
  throw std::invalid_argument("unknown provenance '" + std::string(text) + "'");
}

const Candidate* CandidateSet::find(std::string_view id) const {
  for (const auto& c : candidates)
    if (c.decomposition.id == id) return &c;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Candidate generation

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  // The smaller root wins so cluster identity follows table order.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) {
      ++common;
      ++i;
      ++j;
    } else if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

std::string service_name(std::size_t index) { return "MS" + std::to_string(index + 1); }

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ", ") + p;
  return out;
}

void remove_member(Decomposition& d, const std::string& service, const std::string& container) {
  auto it = d.assignment.find(service);
  if (it == d.assignment.end()) return;
  it->second.erase(container);
  if (it->second.empty()) d.assignment.erase(it);
}

}  // namespace

CandidateSet generate_candidates(const ClassGraph& g, const PathFrequencyTable& table, const GenerateOptions& opts) {
  if (g.nodes().empty()) throw EmptyGraphError();

  // Container sets per path row, table order.
  const auto& rows = table.rows();
  std::vector<std::set<std::string>> row_containers(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& n : rows[r].signature.sequence)
      if (g.contains(n.container)) row_containers[r].insert(n.container);

  // Similar paths form one cluster; clusters are numbered by first row.
  DisjointSets sets(rows.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = a + 1; b < rows.size(); ++b)
      if (jaccard(row_containers[a], row_containers[b]) >= opts.path_similarity) sets.unite(a, b);
  std::map<std::size_t, std::size_t> cluster_of_root;
  std::vector<std::size_t> row_cluster(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto [it, _] = cluster_of_root.emplace(sets.find(r), cluster_of_root.size());
    row_cluster[r] = it->second;
  }
  const std::size_t n_clusters = cluster_of_root.size();

  // Fingerprint = rows a container appears in; it fixes the clusters touched.
  std::map<std::string, std::vector<std::size_t>> fingerprint;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& c : row_containers[r]) fingerprint[c].push_back(r);
  std::map<std::vector<std::size_t>, std::vector<std::string>> groups;
  for (const auto& [c, fp] : fingerprint) groups[fp].push_back(c);

  std::vector<std::set<std::string>> cluster_members(n_clusters);
  std::map<std::set<std::size_t>, std::vector<std::string>> shared_by_touch;
  std::map<std::string, std::set<std::size_t>> touch_of_shared;
  for (const auto& [fp, members] : groups) {
    std::set<std::size_t> touched;
    for (auto r : fp) touched.insert(row_cluster[r]);
    if (touched.size() == 1) {
      cluster_members[*touched.begin()].insert(members.begin(), members.end());
    } else {
      auto& bucket = shared_by_touch[touched];
      bucket.insert(bucket.end(), members.begin(), members.end());
      for (const auto& m : members) touch_of_shared[m] = touched;
    }
  }

  // Containers absent from every path follow their heaviest clustered neighbour.
  std::map<std::string, std::size_t> home;
  for (std::size_t k = 0; k < n_clusters; ++k)
    for (const auto& c : cluster_members[k]) home[c] = k;
  for (const auto& node : g.nodes()) {
    if (fingerprint.count(node.name)) continue;
    std::map<std::size_t, std::uint64_t> pull;
    for (const auto& e : g.edges()) {
      if (e.source == node.name && home.count(e.target)) pull[home[e.target]] += e.weight;
      if (e.target == node.name && home.count(e.source)) pull[home[e.source]] += e.weight;
    }
    if (pull.empty()) continue;  // left unassigned; validation reports it
    auto best = std::max_element(pull.begin(), pull.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    cluster_members[best->first].insert(node.name);
  }

  Decomposition base;
  base.id = "base";
  base.label = "path clusters, shared containers split out";
  for (std::size_t k = 0; k < n_clusters; ++k)
    if (!cluster_members[k].empty()) base.assignment[service_name(k)] = cluster_members[k];
  if (n_clusters == 0)  // no path data: the monolith itself
    for (const auto& node : g.nodes()) base.assignment[service_name(0)].insert(node.name);
  std::map<std::string, std::string> shared_service;  // container -> its shared service
  std::size_t next_index = n_clusters;
  for (const auto& [touched, members] : shared_by_touch) {
    const std::string name = service_name(next_index++);
    base.assignment[name].insert(members.begin(), members.end());
    for (const auto& m : members) shared_service[m] = name;
  }

  // Expansion order: busiest shared containers first.
  std::map<std::string, std::uint64_t> traffic;
  for (const auto& e : g.edges()) {
    if (touch_of_shared.count(e.source)) traffic[e.source] += e.weight;
    if (!e.self_loop() && touch_of_shared.count(e.target)) traffic[e.target] += e.weight;
  }
  std::vector<std::string> shared(touch_of_shared.size());
  std::transform(touch_of_shared.begin(), touch_of_shared.end(), shared.begin(), [](const auto& kv) { return kv.first; });
  std::stable_sort(shared.begin(), shared.end(),
                   [&](const std::string& a, const std::string& b) { return traffic[a] > traffic[b]; });
  if (shared.size() > opts.max_shared_expansion) shared.resize(opts.max_shared_expansion);

  std::vector<Candidate> generated;
  generated.push_back({base, Provenance::BaseClustering});
  for (const auto& s : shared) {
    std::vector<std::string> targets;
    for (auto k : touch_of_shared[s]) targets.push_back(service_name(k));

    Decomposition dup = base;
    remove_member(dup, shared_service[s], s);
    for (const auto& t : targets) dup.assignment[t].insert(s);
    dup.id = "dup:" + s;
    dup.label = "duplicate " + s + " into " + join(targets);
    generated.push_back({std::move(dup), Provenance::DuplicateVariant});

    Decomposition merged = base;
    remove_member(merged, shared_service[s], s);
    auto& into = merged.assignment[targets.front()];
    into.insert(s);
    for (std::size_t i = 1; i < targets.size(); ++i) {
      auto it = merged.assignment.find(targets[i]);
      if (it == merged.assignment.end()) continue;
      into.insert(it->second.begin(), it->second.end());
      merged.assignment.erase(it);
    }
    merged.id = "merge:" + s;
    merged.label = "merge " + join(targets) + " around " + s;
    generated.push_back({std::move(merged), Provenance::MergeVariant});

    // Call instances s takes part in, per touching cluster.
    std::map<std::string, std::uint64_t> instances;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!row_containers[r].count(s)) continue;
      const auto& seq = rows[r].signature.sequence;
      std::uint64_t pairs = 0;
      for (std::size_t i = 0; i + 1 < seq.size(); ++i)
        if (seq[i].container == s || seq[i + 1].container == s) ++pairs;
      instances[service_name(row_cluster[r])] += pairs * rows[r].frequency;
    }
    std::string owner = targets.front();
    for (const auto& t : targets)
      if (instances[t] > instances[owner]) owner = t;
    Decomposition external = base;
    remove_member(external, shared_service[s], s);
    external.assignment[owner].insert(s);
    external.id = "ext:" + s;
    external.label = "keep " + s + " in " + owner + ", calls from other services stay external";
    generated.push_back({std::move(external), Provenance::ExternalVariant});
  }

  CandidateSet out;
  std::set<std::string> ids;
  auto admit = [&](Candidate c) {
    if (out.candidates.size() >= opts.max_candidates) return;
    for (const auto& existing : out.candidates)
      if (existing.decomposition.assignment == c.decomposition.assignment) return;
    std::string id = c.decomposition.id;
    for (int k = 2; ids.count(id); ++k) id = c.decomposition.id + "#" + std::to_string(k);
    c.decomposition.id = id;
    ids.insert(id);
    out.candidates.push_back(std::move(c));
  };
  for (const auto& user : opts.user_specified) {
    auto v = validate_decomposition(user, g);
    if (!v.ok()) throw std::invalid_argument("user decomposition '" + user.id + "': " + v.errors().front().message);
    if (ids.count(user.id)) throw std::invalid_argument("duplicate decomposition id '" + user.id + "'");
    if (out.candidates.size() >= opts.max_candidates) break;
    ids.insert(user.id);
    out.candidates.push_back({user, Provenance::UserSpecified});
  }
  for (auto& c : generated) admit(std::move(c));
  return out;
}

void for_each_partition(const ClassGraph& g, const std::function<void(const Decomposition&)>& visit) {
  const std::size_t n = g.nodes().size();
  if (n > kMaxPartitionContainers)
    throw std::invalid_argument("exhaustive partitioning is limited to " + std::to_string(kMaxPartitionContainers) +
                                " containers");
  if (n == 0) return;

  // Restricted growth strings: block[i] <= 1 + max(block[0..i-1]).
  std::vector<std::size_t> block(n, 0);
  std::vector<std::size_t> prefix_max(n, 0);
  std::size_t counter = 0;
  while (true) {
    Decomposition d;
    d.id = "P" + std::to_string(counter++);
    for (std::size_t i = 0; i < n; ++i) d.assignment["S" + std::to_string(block[i] + 1)].insert(g.nodes()[i].name);
    visit(d);

    std::size_t i = n - 1;
    while (i > 0 && block[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) return;
    ++block[i];
    prefix_max[i] = std::max(prefix_max[i - 1], block[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      block[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
}

std::vector<Decomposition> load_decompositions(std::string_view bytes) {
  io::json doc;
  try {
    doc = io::parse_json(bytes);
  } catch (const io::FormatError& e) {
    throw DocumentError(e.what());
  }
  if (!doc.is_array()) throw DocumentError("decomposition file must be a JSON array");

  std::vector<Decomposition> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    Decomposition d;
    try {
      d = io::decomposition_from_json(doc[i]);
    } catch (const io::FormatError& e) {
      throw DocumentError("decomposition #" + std::to_string(i) + ": " + e.what());
    }
    if (d.assignment.empty()) throw DocumentError("decomposition '" + d.id + "' has no services");
    if (d.assignment.count("")) throw DocumentError("decomposition '" + d.id + "' has an empty service name");
    if (!ids.insert(d.id).second) throw DocumentError("duplicate decomposition id '" + d.id + "'");
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace monoslicer::decompose
