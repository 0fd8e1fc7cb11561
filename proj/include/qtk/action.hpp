#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qtk/gns.hpp"
#include "qtk/implicit.hpp"
#include "qtk/separation.hpp"

namespace qtk {

using PointId = std::uint32_t;
using Word = std::vector<std::uint32_t>;  // generator indices; the last entry acts first

// A group acting on an explored point set by named partial bijections.
// Generators always come paired with inverses. Applications that would leave
// the explored region return nullopt from the try_* entry points and throw
// ExplorationExceeded from the throwing ones.
class Action {
 public:
  virtual ~Action() = default;

  std::size_t generator_count() const { return names_.size(); }
  const std::string& generator_name(std::size_t g) const { return names_[g]; }
  std::size_t inverse_generator(std::size_t g) const { return inverse_[g]; }

  virtual std::optional<PointId> try_apply_generator(std::size_t g, PointId p) const = 0;
  virtual PointId basepoint() const = 0;
  virtual std::size_t point_count() const = 0;

  // Edge-path distance of the underlying space (word metric for Cayley
  // trees); exact hops.
  virtual std::uint32_t distance(PointId x, PointId y) const = 0;
  virtual std::string point_label(PointId p) const { return std::to_string(p); }

  virtual std::optional<PointId> try_apply_word(std::span<const std::uint32_t> word,
                                                PointId p) const {
    PointId current = p;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
      const auto next = try_apply_generator(*it, current);
      if (!next) return std::nullopt;
      current = *next;
    }
    return current;
  }

  PointId apply_word(std::span<const std::uint32_t> word, PointId p) const {
    const auto result = try_apply_word(word, p);
    if (!result)
      fail(ErrorCode::ExplorationExceeded, "word application leaves the explored region");
    return *result;
  }

  // Identity key of the element the word realizes: equal keys exactly when
  // the realized (partial) maps agree on the whole explored region. No group
  // relations are assumed anywhere else.
  virtual std::string element_key(std::span<const std::uint32_t> word) const {
    std::string key;
    key.reserve(point_count() * 4);
    for (PointId p = 0; p < point_count(); ++p) {
      const auto image = try_apply_word(word, p);
      const std::uint32_t v = image ? *image + 1 : 0;
      key.push_back(static_cast<char>(v & 0xff));
      key.push_back(static_cast<char>((v >> 8) & 0xff));
      key.push_back(static_cast<char>((v >> 16) & 0xff));
      key.push_back(static_cast<char>((v >> 24) & 0xff));
    }
    return key;
  }

  std::vector<PointId> orbit_of_basepoint() const {
    std::vector<bool> seen(point_count(), false);
    std::vector<PointId> orbit{basepoint()};
    seen[basepoint()] = true;
    for (std::size_t head = 0; head < orbit.size(); ++head) {
      for (std::size_t g = 0; g < generator_count(); ++g) {
        const auto image = try_apply_generator(g, orbit[head]);
        if (image && !seen[*image]) {
          seen[*image] = true;
          orbit.push_back(*image);
        }
      }
    }
    std::sort(orbit.begin(), orbit.end());
    return orbit;
  }

  // Points whose images stay defined under every word of length <= cap.
  std::vector<PointId> stable_points(std::uint32_t cap) const {
    std::vector<bool> stable(point_count(), true);
    for (std::uint32_t step = 0; step < cap; ++step) {
      std::vector<bool> next(point_count(), true);
      for (PointId p = 0; p < point_count(); ++p) {
        for (std::size_t g = 0; g < generator_count() && next[p]; ++g) {
          const auto image = try_apply_generator(g, p);
          if (!image || !stable[*image]) next[p] = false;
        }
      }
      stable.swap(next);
    }
    std::vector<PointId> out;
    for (PointId p = 0; p < point_count(); ++p)
      if (stable[p]) out.push_back(p);
    return out;
  }

 protected:
  void set_generators(std::vector<std::string> names, std::vector<std::size_t> inverse) {
    names_ = std::move(names);
    inverse_ = std::move(inverse);
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> inverse_;
};

inline Word inverse_word(const Action& action, std::span<const std::uint32_t> word) {
  Word out;
  out.reserve(word.size());
  for (auto it = word.rbegin(); it != word.rend(); ++it)
    out.push_back(static_cast<std::uint32_t>(action.inverse_generator(*it)));
  return out;
}

inline Word concat_words(std::span<const std::uint32_t> s, std::span<const std::uint32_t> t) {
  Word out(s.begin(), s.end());
  out.insert(out.end(), t.begin(), t.end());
  return out;
}

// Named automorphisms of a finite graph. Each generator must preserve the
// edge relation; missing inverses are derived.
class GraphAutomorphismAction final : public Action {
 public:
  GraphAutomorphismAction(const Graph& g,
                          std::vector<std::pair<std::string, std::vector<Vertex>>> generators,
                          Vertex basepoint)
      : graph_(&g), dist_(g), basepoint_(basepoint) {
    g.check_vertex(basepoint);
    if (generators.empty()) fail(ErrorCode::InvalidSpec, "action needs at least one generator");
    std::vector<std::string> names;
    for (auto& [name, perm] : generators) {
      validate_automorphism(g, perm);
      perms_.push_back(std::move(perm));
      names.push_back(name);
    }
    // pair up inverses, deriving any that are missing
    std::vector<std::size_t> inverse(perms_.size(), SIZE_MAX);
    for (std::size_t i = 0; i < perms_.size(); ++i) {
      if (inverse[i] != SIZE_MAX) continue;
      std::vector<Vertex> inv(perms_[i].size());
      for (Vertex v = 0; v < perms_[i].size(); ++v) inv[perms_[i][v]] = v;
      std::size_t j = 0;
      for (; j < perms_.size(); ++j)
        if (perms_[j] == inv) break;
      if (j == perms_.size()) {
        perms_.push_back(std::move(inv));
        names.push_back(names[i] + "^-1");
        inverse.push_back(i);
        inverse[i] = perms_.size() - 1;
      } else {
        inverse[i] = j;
        inverse[j] = i;
      }
    }
    set_generators(std::move(names), std::move(inverse));
  }

  std::optional<PointId> try_apply_generator(std::size_t g, PointId p) const override {
    return perms_[g][p];
  }
  PointId basepoint() const override { return basepoint_; }
  std::size_t point_count() const override { return graph_->vertex_count(); }
  std::uint32_t distance(PointId x, PointId y) const override { return dist_(x, y); }
  const Graph& graph() const { return *graph_; }

  static void validate_automorphism(const Graph& g, const std::vector<Vertex>& perm) {
    if (perm.size() != g.vertex_count())
      fail(ErrorCode::InvalidSpec, "permutation size must match vertex count");
    std::vector<bool> hit(perm.size(), false);
    for (Vertex v : perm) {
      if (v >= perm.size() || hit[v]) fail(ErrorCode::InvalidSpec, "not a bijection");
      hit[v] = true;
    }
    for (const auto& [u, v] : g.edges())
      if (!g.has_edge(perm[u], perm[v]))
        fail(ErrorCode::InvalidSpec, "generator does not preserve the edge relation");
  }

 private:
  const Graph* graph_;
  DistanceMatrix dist_;
  Vertex basepoint_;
  std::vector<std::vector<Vertex>> perms_;
};

inline GraphAutomorphismAction make_cycle_rotation_action(const Graph& cycle, Vertex basepoint,
                                                          const std::string& name = "r") {
  const Vertex n = cycle.vertex_count();
  for (Vertex v = 0; v < n; ++v)
    if (cycle.neighbors(v).size() != 2) fail(ErrorCode::InvalidSpec, "cycle_rotation needs a cycle graph");
  std::vector<Vertex> rot(n);
  for (Vertex v = 0; v < n; ++v) rot[v] = (v + 1) % n;
  GraphAutomorphismAction::validate_automorphism(cycle, rot);
  return GraphAutomorphismAction(cycle, {{name, std::move(rot)}}, basepoint);
}

// Left multiplication of a free group on its Cayley tree, explored to a
// fixed radius. Points are interned reduced words; element identity is the
// reduced word itself, which coincides with realized-map equality here.
class FreeGroupTreeAction final : public Action {
 public:
  FreeGroupTreeAction(std::size_t rank, std::uint32_t radius)
      : rank_(rank), radius_(radius) {
    if (rank < 1 || rank > 13) fail(ErrorCode::InvalidSpec, "free group rank must be in 1..13");
    intern("");
    for (std::size_t head = 0; head < words_.size(); ++head) {
      const std::string w = words_[head];
      if (w.size() >= radius_) continue;
      for (std::size_t g = 0; g < 2 * rank_; ++g) {
        const std::string next = free_words::reduce(std::string(1, free_words::letter(g, rank_)) + w);
        if (next.size() > radius_) continue;
        if (!ids_.count(next)) intern(next);
      }
    }
    std::vector<std::string> names;
    std::vector<std::size_t> inverse;
    for (std::size_t g = 0; g < 2 * rank_; ++g) {
      names.emplace_back(1, free_words::letter(g, rank_));
      inverse.push_back(g < rank_ ? g + rank_ : g - rank_);
    }
    set_generators(std::move(names), std::move(inverse));
  }

  std::optional<PointId> try_apply_generator(std::size_t g, PointId p) const override {
    return lookup(free_words::reduce(std::string(1, free_words::letter(g, rank_)) + words_[p]));
  }

  // Whole-word application reduces algebraically first, so an element whose
  // endpoints lie inside the region never fails on an intermediate step.
  std::optional<PointId> try_apply_word(std::span<const std::uint32_t> word,
                                        PointId p) const override {
    return lookup(free_words::reduce(word_string(word) + words_[p]));
  }

  std::string element_key(std::span<const std::uint32_t> word) const override {
    return free_words::reduce(word_string(word));
  }

  PointId basepoint() const override { return 0; }
  std::size_t point_count() const override { return words_.size(); }
  std::uint32_t distance(PointId x, PointId y) const override {
    return free_words::word_distance(words_[x], words_[y]);
  }
  std::string point_label(PointId p) const override {
    return words_[p].empty() ? std::string("e") : words_[p];
  }
  std::uint32_t radius() const { return radius_; }

 private:
  void intern(const std::string& w) {
    ids_.emplace(w, static_cast<PointId>(words_.size()));
    words_.push_back(w);
  }
  std::optional<PointId> lookup(const std::string& w) const {
    const auto it = ids_.find(w);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  std::string word_string(std::span<const std::uint32_t> word) const {
    std::string s;
    s.reserve(word.size());
    for (std::uint32_t g : word) s.push_back(free_words::letter(g, rank_));
    return free_words::reduce(s);
  }

  std::size_t rank_;
  std::uint32_t radius_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, PointId> ids_;
};

// Integer translations restricted to a window, the group structure behind
// the weak-Haagerup samples. Applications past the window edge are
// undefined.
class TranslationWindowAction final : public Action {
 public:
  TranslationWindowAction(std::int64_t lo, std::int64_t hi)
      : lo_(lo), hi_(hi) {
    if (lo > 0 || hi < 0) fail(ErrorCode::InvalidSpec, "window must contain 0");
    set_generators({"+1", "-1"}, {1, 0});
  }

  std::optional<PointId> try_apply_generator(std::size_t g, PointId p) const override {
    const std::int64_t value = lo_ + static_cast<std::int64_t>(p) + (g == 0 ? 1 : -1);
    if (value < lo_ || value > hi_) return std::nullopt;
    return static_cast<PointId>(value - lo_);
  }
  PointId basepoint() const override { return static_cast<PointId>(-lo_); }
  std::size_t point_count() const override { return static_cast<std::size_t>(hi_ - lo_ + 1); }
  std::uint32_t distance(PointId x, PointId y) const override {
    return static_cast<std::uint32_t>(x > y ? x - y : y - x);
  }
  std::string point_label(PointId p) const override {
    return std::to_string(lo_ + static_cast<std::int64_t>(p));
  }

  // Translations are determined by their net displacement; domain-restricted
  // compositions of the same displacement are the same realized map wherever
  // defined, so this is the canonical element key.
  std::string element_key(std::span<const std::uint32_t> word) const override {
    std::int64_t displacement = 0;
    for (std::uint32_t g : word) displacement += (g == 0 ? 1 : -1);
    return std::to_string(displacement);
  }

  std::int64_t value_of(PointId p) const { return lo_ + static_cast<std::int64_t>(p); }
  PointId id_of(std::int64_t value) const {
    if (value < lo_ || value > hi_)
      fail(ErrorCode::ExplorationExceeded, "integer outside window");
    return static_cast<PointId>(value - lo_);
  }

 private:
  std::int64_t lo_, hi_;
};

// Factor-wise automorphisms of a product space; points are row-major tuple
// indices and the metric is the l1 sum of factor metrics.
class ProductAutomorphismAction final : public Action {
 public:
  ProductAutomorphismAction(
      const ProductSpace& space,
      std::vector<std::pair<std::string, std::vector<std::vector<Vertex>>>> generators)
      : space_(&space) {
    std::size_t total = 1;
    for (const auto& f : space.factors) {
      dists_.emplace_back(f);
      total *= f.vertex_count();
      if (total > 200000) fail(ErrorCode::SizeCapExceeded, "product too large to act on");
    }
    point_count_ = total;
    basepoint_ = index_of(space.basepoints);
    if (generators.empty()) fail(ErrorCode::InvalidSpec, "action needs at least one generator");
    std::vector<std::string> names;
    for (auto& [name, factor_perms] : generators) {
      if (factor_perms.size() != space.arity())
        fail(ErrorCode::ArityMismatch, "one permutation per factor");
      for (std::size_t i = 0; i < factor_perms.size(); ++i)
        GraphAutomorphismAction::validate_automorphism(space.factors[i], factor_perms[i]);
      perms_.push_back(std::move(factor_perms));
      names.push_back(name);
    }
    std::vector<std::size_t> inverse(perms_.size(), SIZE_MAX);
    for (std::size_t i = 0; i < perms_.size(); ++i) {
      if (inverse[i] != SIZE_MAX) continue;
      std::vector<std::vector<Vertex>> inv(perms_[i].size());
      for (std::size_t f = 0; f < perms_[i].size(); ++f) {
        inv[f].resize(perms_[i][f].size());
        for (Vertex v = 0; v < perms_[i][f].size(); ++v) inv[f][perms_[i][f][v]] = v;
      }
      std::size_t j = 0;
      for (; j < perms_.size(); ++j)
        if (perms_[j] == inv) break;
      if (j == perms_.size()) {
        perms_.push_back(std::move(inv));
        names.push_back(names[i] + "^-1");
        inverse.push_back(i);
        inverse[i] = perms_.size() - 1;
      } else {
        inverse[i] = j;
        inverse[j] = i;
      }
    }
    set_generators(std::move(names), std::move(inverse));
  }

  std::optional<PointId> try_apply_generator(std::size_t g, PointId p) const override {
    std::vector<Vertex> tuple = tuple_of(p);
    for (std::size_t f = 0; f < tuple.size(); ++f) tuple[f] = perms_[g][f][tuple[f]];
    return index_of(tuple);
  }
  PointId basepoint() const override { return basepoint_; }
  std::size_t point_count() const override { return point_count_; }
  std::uint32_t distance(PointId x, PointId y) const override {
    const auto tx = tuple_of(x);
    const auto ty = tuple_of(y);
    std::uint32_t d = 0;
    for (std::size_t f = 0; f < tx.size(); ++f) d += dists_[f](tx[f], ty[f]);
    return d;
  }

  std::vector<Vertex> tuple_of(PointId p) const {
    std::vector<Vertex> tuple(space_->arity());
    for (std::size_t f = space_->arity(); f-- > 0;) {
      const Vertex n = space_->factors[f].vertex_count();
      tuple[f] = static_cast<Vertex>(p % n);
      p /= n;
    }
    return tuple;
  }
  PointId index_of(std::span<const Vertex> tuple) const {
    PointId p = 0;
    for (std::size_t f = 0; f < tuple.size(); ++f)
      p = p * space_->factors[f].vertex_count() + tuple[f];
    return p;
  }

 private:
  const ProductSpace* space_;
  std::vector<DistanceMatrix> dists_;
  std::size_t point_count_ = 0;
  PointId basepoint_ = 0;
  std::vector<std::vector<std::vector<Vertex>>> perms_;  // [gen][factor][vertex]
};

// ---- Word enumeration ----

struct GroupElement {
  Word word;            // shortest representative found (BFS order)
  std::uint32_t length = 0;
  std::string key;
};

struct WordEnumeration {
  std::vector<GroupElement> elements;  // [0] is the identity
  std::unordered_map<std::string, std::uint32_t> index_by_key;
  std::vector<std::uint32_t> inverse_of;
  std::uint32_t cap = 0;

  std::optional<std::uint32_t> find(const std::string& key) const {
    const auto it = index_by_key.find(key);
    if (it == index_by_key.end()) return std::nullopt;
    return it->second;
  }
};

inline WordEnumeration enumerate_elements(const Action& action, std::uint32_t cap) {
  WordEnumeration out;
  out.cap = cap;
  out.elements.push_back({{}, 0, action.element_key({})});
  out.index_by_key.emplace(out.elements[0].key, 0);
  for (std::size_t head = 0; head < out.elements.size(); ++head) {
    if (out.elements[head].length >= cap) continue;
    const GroupElement current = out.elements[head];  // copy: vector may grow
    for (std::size_t g = 0; g < action.generator_count(); ++g) {
      Word word;
      word.reserve(current.word.size() + 1);
      word.push_back(static_cast<std::uint32_t>(g));
      word.insert(word.end(), current.word.begin(), current.word.end());
      std::string key = action.element_key(word);
      if (out.index_by_key.count(key)) continue;
      const auto index = static_cast<std::uint32_t>(out.elements.size());
      out.index_by_key.emplace(key, index);
      out.elements.push_back({std::move(word), current.length + 1, std::move(key)});
    }
  }
  out.inverse_of.resize(out.elements.size());
  for (std::size_t i = 0; i < out.elements.size(); ++i) {
    const Word inv = inverse_word(action, out.elements[i].word);
    const auto idx = out.find(action.element_key(inv));
    if (!idx) fail(ErrorCode::InvalidConfig, "inverse element missing from enumeration");
    out.inverse_of[i] = *idx;
  }
  return out;
}

// ---- Representation, cocycle, reports ----

inline std::optional<MeanZeroVector> try_apply_rep(const Action& action, const GroupElement& s,
                                                   const MeanZeroVector& v) {
  std::vector<std::pair<std::uint32_t, double>> coeffs;
  coeffs.reserve(v.entries().size());
  for (const auto& [p, c] : v.entries()) {
    const auto image = action.try_apply_word(s.word, p);
    if (!image) return std::nullopt;
    coeffs.emplace_back(*image, c);
  }
  return MeanZeroVector::from_coeffs(std::move(coeffs));
}

inline MeanZeroVector apply_rep(const Action& action, const GroupElement& s,
                                const MeanZeroVector& v) {
  auto result = try_apply_rep(action, s, v);
  if (!result)
    fail(ErrorCode::ExplorationExceeded, "support transport leaves the explored region");
  return std::move(*result);
}

inline MeanZeroVector cocycle(const Action& action, std::span<const std::uint32_t> word) {
  return MeanZeroVector::delta_diff(action.apply_word(word, action.basepoint()),
                                    action.basepoint());
}

inline MeanZeroVector cocycle(const Action& action, const GroupElement& s) {
  return cocycle(action, s.word);
}

// b(st) = pi(s) b(t) + b(s), coefficientwise exact, over all element pairs.
inline Verdict cocycle_identity_check(const Action& action, const WordEnumeration& words) {
  for (const auto& s : words.elements) {
    for (const auto& t : words.elements) {
      const MeanZeroVector lhs = cocycle(action, concat_words(s.word, t.word));
      const MeanZeroVector rhs = apply_rep(action, s, cocycle(action, t)).plus(cocycle(action, s));
      if (!(lhs == rhs)) {
        std::ostringstream msg;
        msg << "pair (" << s.length << "-word, " << t.length << "-word) violates the identity";
        return {false, msg.str()};
      }
    }
  }
  return {};
}

// b(s^-1) = -pi(s^-1) b(s).
inline Verdict cocycle_inverse_check(const Action& action, const WordEnumeration& words) {
  for (std::size_t i = 0; i < words.elements.size(); ++i) {
    const auto& s = words.elements[i];
    const auto& s_inv = words.elements[words.inverse_of[i]];
    const MeanZeroVector lhs = cocycle(action, s_inv);
    const MeanZeroVector rhs = apply_rep(action, s_inv, cocycle(action, s)).scaled(-1.0);
    if (!(lhs == rhs)) return {false, "inverse identity fails for element " + std::to_string(i)};
  }
  return {};
}

struct CocycleNormReport {
  bool pass = true;
  double max_abs_dev = 0.0;
  std::size_t checked = 0;
  std::string detail;
};

// ||b(s)||_E == sqrt(2 d(s a, a) + 2) + 2 (0 when s fixes the basepoint).
inline CocycleNormReport cocycle_norm_check(const Action& action, const WordEnumeration& words,
                                            const GnsForm& form, double tol = 1e-12) {
  CocycleNormReport report;
  for (const auto& s : words.elements) {
    const PointId image = action.apply_word(s.word, action.basepoint());
    const MeanZeroVector b = MeanZeroVector::delta_diff(image, action.basepoint());
    const double actual = e_norm(b, form).e_norm;
    const double expected =
        image == action.basepoint()
            ? 0.0
            : std::sqrt(2.0 * action.distance(image, action.basepoint()) + 2.0) + 2.0;
    const double dev = std::fabs(actual - expected);
    report.max_abs_dev = std::max(report.max_abs_dev, dev);
    ++report.checked;
    if (dev > tol && report.pass) {
      report.pass = false;
      report.detail = "norm deviates by " + std::to_string(dev);
    }
  }
  return report;
}

struct RepBoundReport {
  double max_ratio = 0.0;
  double defect = 0.0;  // max |psi(s x, s y) - psi(x, y)| observed
  bool defect_exhaustive = true;
  double bound = 0.0;   // 1 + sqrt(delta_x or defect)
  std::optional<double> delta_x;
  double max_chain_excess = 0.0;  // violation of |h(pv)^2 - h(v)^2| <= defect l1^2
  double max_l1_drift = 0.0;
  std::size_t vectors_sampled = 0;
  bool pass = true;
};

// Sampled operator ratios ||pi(s) v||_E / ||v||_E against the invariance
// bound. Sample vectors are seeded random mean-zero vectors on stable orbit
// points plus every cocycle vector of the enumeration, so the constant also
// covers the displacement checks downstream.
inline RepBoundReport rep_bound_report(const Action& action, const WordEnumeration& words,
                                       const GnsForm& form, std::size_t vectors_per_element,
                                       std::uint64_t seed, std::optional<double> delta_x,
                                       double tol = 1e-9) {
  RepBoundReport report;
  report.delta_x = delta_x;

  std::vector<PointId> sample_points;
  {
    const std::vector<PointId> stable = action.stable_points(words.cap);
    for (PointId p : stable)
      if (form.contains(p)) sample_points.push_back(p);
  }

  // invariance defect over orbit pairs (exhaustive when small)
  const auto& orbit = form.points();
  std::vector<std::pair<PointId, PointId>> pairs;
  if (orbit.size() <= 128) {
    for (std::size_t i = 0; i < orbit.size(); ++i)
      for (std::size_t j = i; j < orbit.size(); ++j) pairs.emplace_back(orbit[i], orbit[j]);
  } else {
    report.defect_exhaustive = false;
    std::mt19937_64 rng(seed ^ 0xD1CEC0DEULL);
    std::uniform_int_distribution<std::size_t> pick(0, orbit.size() - 1);
    for (std::size_t k = 0; k < 512; ++k)
      pairs.emplace_back(orbit[pick(rng)], orbit[pick(rng)]);
  }
  for (const auto& s : words.elements) {
    for (const auto& [x, y] : pairs) {
      const auto sx = action.try_apply_word(s.word, x);
      const auto sy = action.try_apply_word(s.word, y);
      if (!sx || !sy) continue;
      report.defect = std::max(report.defect, std::fabs(form.psi(*sx, *sy) - form.psi(x, y)));
    }
  }
  report.bound = 1.0 + std::sqrt(delta_x ? *delta_x : report.defect);

  std::vector<MeanZeroVector> samples;
  for (const auto& u : words.elements) {
    const MeanZeroVector b = cocycle(action, u);
    if (!b.zero()) samples.push_back(b);
  }
  // all delta differences over a small orbit: these are the displacement
  // vectors the coarse-embedding bound quotes this constant for
  if (orbit.size() <= 64) {
    for (std::size_t i = 0; i < orbit.size(); ++i)
      for (std::size_t j = i + 1; j < orbit.size(); ++j)
        samples.push_back(MeanZeroVector::delta_diff(orbit[i], orbit[j]));
  }
  if (sample_points.size() >= 2) {
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < vectors_per_element; ++k)
      samples.push_back(random_mean_zero(sample_points, rng));
  }
  report.vectors_sampled = samples.size();

  for (const auto& s : words.elements) {
    for (const auto& v : samples) {
      const auto transported = try_apply_rep(action, s, v);
      if (!transported) continue;
      const MeanZeroVector& pv = *transported;
      const ENormValue nv = e_norm(v, form);
      const ENormValue npv = e_norm(pv, form);
      if (nv.e_norm > 0.0) report.max_ratio = std::max(report.max_ratio, npv.e_norm / nv.e_norm);
      report.max_l1_drift = std::max(report.max_l1_drift, std::fabs(npv.l1_norm - nv.l1_norm));
      const double h2_gap = std::fabs(npv.h_norm * npv.h_norm - nv.h_norm * nv.h_norm);
      const double allowance = report.defect * nv.l1_norm * nv.l1_norm +
                               1e-9 * std::max(1.0, nv.h_norm * nv.h_norm);
      report.max_chain_excess = std::max(report.max_chain_excess, h2_gap - allowance);
    }
  }
  report.pass = report.max_ratio <= report.bound + tol && report.max_l1_drift == 0.0 &&
                report.max_chain_excess <= 0.0;
  return report;
}

struct PropernessRow {
  std::uint32_t length = 0;
  std::size_t count = 0;
  double min_norm = 0.0;
  double max_norm = 0.0;
};

struct PropernessReport {
  std::vector<PropernessRow> rows;  // one per word length 0..cap
  bool lower_envelope_strictly_increasing = true;
};

inline PropernessReport properness_report(const Action& action, const WordEnumeration& words,
                                          const GnsForm& form) {
  PropernessReport report;
  report.rows.resize(words.cap + 1);
  for (std::uint32_t l = 0; l <= words.cap; ++l) report.rows[l].length = l;
  for (const auto& s : words.elements) {
    const double norm = e_norm(cocycle(action, s), form).e_norm;
    auto& row = report.rows[s.length];
    if (row.count == 0) {
      row.min_norm = row.max_norm = norm;
    } else {
      row.min_norm = std::min(row.min_norm, norm);
      row.max_norm = std::max(row.max_norm, norm);
    }
    ++row.count;
  }
  double previous = -1.0;
  for (const auto& row : report.rows) {
    if (row.count == 0) continue;
    if (row.min_norm <= previous) report.lower_envelope_strictly_increasing = false;
    previous = row.min_norm;
  }
  return report;
}

struct CoarseEnvelopeRow {
  std::uint32_t length = 0;
  std::size_t count = 0;
  double rho_minus = 0.0;
  double rho_plus = 0.0;
};

struct CoarseEnvelopeReport {
  bool displacement_exact = true;
  std::string first_mismatch;
  std::vector<CoarseEnvelopeRow> rows;  // indexed by l(s^-1 t)
  double c_used = 1.0;
  bool bounds_hold = true;
  std::size_t pairs_checked = 0;
};

// Displacement identity b(t) - b(s) = pi(s) b(s^-1 t), then empirical
// envelopes of ||b(t) - b(s)||_E by the length of s^-1 t, checked against
// C^-1 ||b(s^-1 t)|| <= ||b(t) - b(s)|| <= C ||b(s^-1 t)||.
inline CoarseEnvelopeReport coarse_envelopes(const Action& action, const WordEnumeration& words,
                                             const GnsForm& form, double c_bound,
                                             std::uint32_t pair_cap, double tol = 1e-9) {
  CoarseEnvelopeReport report;
  report.c_used = c_bound;
  report.rows.resize(2 * pair_cap + 1);
  for (std::uint32_t l = 0; l < report.rows.size(); ++l) report.rows[l].length = l;
  for (const auto& s : words.elements) {
    if (s.length > pair_cap) continue;
    for (const auto& t : words.elements) {
      if (t.length > pair_cap) continue;
      const Word u_word = concat_words(inverse_word(action, s.word), t.word);
      const auto u_index = words.find(action.element_key(u_word));
      if (!u_index)
        fail(ErrorCode::InvalidConfig, "enumeration cap too small to classify s^-1 t");
      const GroupElement& u = words.elements[*u_index];

      const MeanZeroVector displacement = cocycle(action, t).minus(cocycle(action, s));
      const MeanZeroVector transported = apply_rep(action, s, cocycle(action, u));
      if (!(displacement == transported) && report.displacement_exact) {
        report.displacement_exact = false;
        report.first_mismatch = "pair with l(s)=" + std::to_string(s.length) +
                                ", l(t)=" + std::to_string(t.length);
      }

      const double disp_norm = e_norm(displacement, form).e_norm;
      const double u_norm = e_norm(cocycle(action, u), form).e_norm;
      auto& row = report.rows[u.length];
      if (row.count == 0) {
        row.rho_minus = row.rho_plus = disp_norm;
      } else {
        row.rho_minus = std::min(row.rho_minus, disp_norm);
        row.rho_plus = std::max(row.rho_plus, disp_norm);
      }
      ++row.count;
      ++report.pairs_checked;
      const double slack = tol * std::max(1.0, u_norm);
      if (disp_norm > c_bound * u_norm + slack || u_norm > c_bound * disp_norm + slack)
        report.bounds_hold = false;
    }
  }
  return report;
}

// GNS form whose kernel is the basepointed semimetric of the action's graph,
// restricted to the orbit.
inline GnsForm form_from_separation(const Action& action,
                                    std::shared_ptr<const SeparationTable> table, double tol = 1e-9,
                                    std::uint64_t seed = 1) {
  if (table->basepoint() != action.basepoint())
    fail(ErrorCode::BasepointMismatch, "form and action basepoints differ");
  return GnsForm::certified(
      action.orbit_of_basepoint(),
      [table](Vertex x, Vertex y) { return static_cast<double>(table->semimetric(x, y)); }, tol,
      seed);
}

// GNS form with the space's own metric as kernel (trees: the semimetric
// equals the metric, so this is the invariant case).
inline GnsForm form_from_metric(const Action& action, double tol = 1e-9, std::uint64_t seed = 1) {
  const Action* a = &action;
  return GnsForm::certified(
      action.orbit_of_basepoint(),
      [a](PointId x, PointId y) { return static_cast<double>(a->distance(x, y)); }, tol, seed);
}

}  // namespace qtk
