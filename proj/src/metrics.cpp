#include "monoslicer/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "monoslicer/kernels.hpp"

namespace monoslicer::metrics {

namespace {

bool is_class(const ClassGraph& g, const std::string& container, const MetricsOptions& opts) {
  auto idx = g.index_of(container);
  return idx && counts_as_class(g.nodes()[*idx].kind, opts.include_entrypoints);
}

std::map<std::string, int> membership_counts(const Decomposition& d) {
  std::map<std::string, int> counts;
  for (const auto& [_, members] : d.assignment)
    for (const auto& c : members) ++counts[c];
  return counts;
}

}  // namespace

std::vector<ServiceMetrics> service_metrics(const ClassGraph& g, const Decomposition& d,
                                            const decompose::Classification& classification,
                                            const MetricsOptions& opts) {
  const auto counts = membership_counts(d);

  struct Tally {
    std::set<std::string> link_targets;
    std::set<std::pair<std::string, std::string>> call_sites;
    std::uint64_t instances = 0;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& c : classification.edges) {
    if (c.verdict != decompose::Verdict::External) continue;
    auto& t = tallies[c.attributed_service];
    t.link_targets.insert(*c.target_service);
    t.call_sites.insert({c.edge.source, c.edge.target});
    t.instances += c.edge.weight;
  }
  if (opts.count_unassigned_links) {
    for (const auto& u : classification.unassigned) {
      if (!u.source_service) continue;
      auto& t = tallies[*u.source_service];
      // Prefix keeps outside containers apart from service names.
      t.link_targets.insert("\x1f" + u.container);
      t.call_sites.insert({u.edge.source, u.edge.target});
    }
  }

  std::vector<ServiceMetrics> out;
  out.reserve(d.assignment.size());
  for (const auto& [service, members] : d.assignment) {
    ServiceMetrics m;
    m.service = service;
    for (const auto& c : members) {
      if (!is_class(g, c, opts)) continue;
      ++m.cla;
      if (counts.at(c) > 1) ++m.dup;
    }
    if (auto it = tallies.find(service); it != tallies.end()) {
      m.links = static_cast<std::int64_t>(opts.link_mode == LinkMode::DistinctServices ? it->second.link_targets.size()
                                                                                      : it->second.call_sites.size());
      m.external_call_instances = it->second.instances;
    }
    if (m.cla > 0) {
      m.cbm = Rational(m.links, m.cla);
      m.fec = Rational(static_cast<std::int64_t>(m.external_call_instances), m.cla);
    }
    out.push_back(std::move(m));
  }
  return out;
}

SystemMetrics system_metrics(const ClassGraph& g, const Decomposition& d,
                             const decompose::Classification& classification, const MetricsOptions& opts) {
  if (opts.external_weight <= 0) throw std::invalid_argument("external weight must be positive");
  SystemMetrics s;
  s.internal_calls = classification.internal_weight();
  s.external_calls = classification.external_weight();
  s.external_weight = opts.external_weight;
  s.load = Rational(static_cast<std::int64_t>(s.internal_calls)) +
           opts.external_weight * Rational(static_cast<std::int64_t>(s.external_calls));
  for (const auto& [c, n] : membership_counts(d))
    if (n > 1 && is_class(g, c, opts)) ++s.duplicated_classes_total;
  return s;
}

Evaluation assemble_evaluation(const ClassGraph& g, const Decomposition& d, decompose::Classification classification,
                               const MetricsOptions& opts) {
  Evaluation e;
  e.id = d.id;
  e.label = d.label;
  e.services = service_metrics(g, d, classification, opts);
  e.system = system_metrics(g, d, classification, opts);
  e.unassigned = std::move(classification.unassigned);
  e.violations = validate_decomposition(d, g).violations;
  for (const auto& m : e.services)
    if (!m.defined())
      e.violations.push_back({Severity::Warning, "zero_class_service", m.service,
                              "service " + m.service + " holds no classes; CBM and FEC are undefined"});
  return e;
}

Evaluation evaluate(const ClassGraph& g, const Decomposition& d, const MetricsOptions& opts) {
  return assemble_evaluation(g, d, kernels::classify(g, d), opts);
}

Summary summarize(const Evaluation& e) {
  Summary s;
  Rational cbm_sum = 0;
  std::int64_t defined = 0;
  for (const auto& m : e.services) {
    s.max_cla = std::max(s.max_cla, m.cla);
    if (m.cbm) {
      cbm_sum += *m.cbm;
      ++defined;
    }
  }
  if (defined > 0) s.mean_cbm = cbm_sum / defined;
  s.duplicated_classes_total = e.system.duplicated_classes_total;
  s.load = e.system.load;
  return s;
}

bool dominates(const Summary& a, const Summary& b) {
  const bool no_worse = a.mean_cbm <= b.mean_cbm && a.max_cla <= b.max_cla &&
                        a.duplicated_classes_total <= b.duplicated_classes_total && a.load <= b.load;
  const bool better = a.mean_cbm < b.mean_cbm || a.max_cla < b.max_cla ||
                      a.duplicated_classes_total < b.duplicated_classes_total || a.load < b.load;
  return no_worse && better;
}

std::vector<bool> pareto_front(const std::vector<Summary>& points) {
  // A dominating point precedes the dominated one in lexicographic order,
  // and dominance is transitive, so checking against the front found so
  // far is enough.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    const auto& p = points[i];
    return std::tie(p.mean_cbm, p.max_cla, p.duplicated_classes_total, p.load);
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  std::vector<bool> optimal(points.size(), false);
  std::vector<std::size_t> front;
  for (auto i : order) {
    bool dominated = std::any_of(front.begin(), front.end(), [&](std::size_t f) { return dominates(points[f], points[i]); });
    if (!dominated) {
      optimal[i] = true;
      front.push_back(i);
    }
  }
  return optimal;
}

ComparisonReport compare(const decompose::CandidateSet& candidates, const ClassGraph& g, const MetricsOptions& opts) {
  if (candidates.candidates.empty()) throw std::invalid_argument("compare needs at least one candidate");
  std::vector<Decomposition> ds;
  ds.reserve(candidates.candidates.size());
  for (const auto& c : candidates.candidates) ds.push_back(c.decomposition);
  auto evaluations = kernels::evaluate_all(ds, g, opts);

  ComparisonReport report;
  std::vector<Summary> summaries;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ComparisonEntry entry;
    entry.id = ds[i].id;
    entry.label = ds[i].label;
    entry.provenance = candidates.candidates[i].provenance;
    entry.summary = summarize(evaluations[i]);
    entry.evaluation = std::move(evaluations[i]);
    summaries.push_back(entry.summary);
    report.entries.push_back(std::move(entry));
  }
  auto flags = pareto_front(summaries);
  for (std::size_t i = 0; i < flags.size(); ++i) report.entries[i].pareto_optimal = flags[i];
  return report;
}

}  // namespace monoslicer::metrics
