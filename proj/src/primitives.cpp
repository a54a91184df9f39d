#include "dp/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dp {

namespace {

bool all_in(const std::vector<std::string>& tokens, const std::set<std::string>& pool) {
  return !tokens.empty() &&
         std::all_of(tokens.begin(), tokens.end(), [&](const std::string& t) { return pool.count(t) > 0; });
}

[[noreturn]] void unknown(const std::vector<std::string>& tokens, const StatementContext& ctx) {
  for (const auto& t : tokens)
    if (!ctx.elements.count(t) && !ctx.norms.count(t) && !ctx.attributes.count(t))
      throw Error(ErrorCode::UnknownReference, "'" + t + "' names no element, norm or attribute");
  throw Error(ErrorCode::UnsupportedStatement, "operands fit no statement kind");
}

std::string pair_text(const ElementPair& p) { return "(" + p.first.str() + ", " + p.second.str() + ")"; }

std::vector<std::string> sorted(std::span<const std::string> v) {
  std::vector<std::string> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> united(std::span<const std::string> a, std::span<const std::string> b) {
  std::set<std::string> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

bool strictly(const Relation& r, std::size_t x, std::size_t y) { return r.holds(x, y) && !r.holds(y, x); }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(PreferenceKind k) {
  switch (k) {
    case PreferenceKind::first_order_relative: return "first_order_relative";
    case PreferenceKind::first_order_absolute: return "first_order_absolute";
    case PreferenceKind::extended: return "extended";
    case PreferenceKind::intensity: return "intensity";
    case PreferenceKind::multi_attribute: return "multi_attribute";
    case PreferenceKind::second_order: return "second_order";
  }
  return "?";
}

StatementContext make_context(std::span<const ElementId> carrier, const ProblemFormulation& f) {
  StatementContext ctx;
  for (const auto& e : carrier) ctx.elements.insert(e.str());
  if (f.statement.norms)
    for (const auto& level : f.statement.norms->levels) ctx.norms.insert(level.id);
  for (const auto& a : f.attributes) ctx.attributes.insert(a.name);
  return ctx;
}

PreferenceKind classify_preference_statement(const PreferenceStatement& s, const StatementContext& ctx) {
  for (const auto& a : s.scope)
    if (!ctx.attributes.count(a)) throw Error(ErrorCode::UnknownReference, "scope names unknown attribute '" + a + "'");
  PreferenceKind kind;
  const bool elems = all_in(s.lhs, ctx.elements) && all_in(s.rhs, ctx.elements);
  if (s.intensity) {
    if (!elems) unknown(s.lhs.size() ? s.lhs : s.rhs, ctx);
    if (s.lhs.size() != 2 || s.rhs.size() != 2)
      throw Error(ErrorCode::UnsupportedStatement, "intensity compares two ordered pairs");
    kind = PreferenceKind::intensity;
  } else if (!elems && all_in(s.lhs, ctx.attributes) && all_in(s.rhs, ctx.attributes)) {
    kind = PreferenceKind::second_order;
  } else if (s.lhs.size() == 1 && s.rhs.size() == 1 && ctx.elements.count(s.lhs[0]) && ctx.norms.count(s.rhs[0]) &&
             !ctx.elements.count(s.rhs[0])) {
    kind = PreferenceKind::first_order_absolute;
  } else if (elems) {
    if (s.lhs.size() == 1 && s.rhs.size() == 1)
      kind = s.scope.size() >= 2 ? PreferenceKind::multi_attribute : PreferenceKind::first_order_relative;
    else
      kind = PreferenceKind::extended;
  } else {
    std::vector<std::string> all = s.lhs;
    all.insert(all.end(), s.rhs.begin(), s.rhs.end());
    unknown(all, ctx);
  }
  if (s.kind && *s.kind != kind)
    throw Error(ErrorCode::UnsupportedStatement, "declared " + std::string(to_string(*s.kind)) + " but operands read as " +
                                                     std::string(to_string(kind)));
  return kind;
}

std::string scope_key(std::span<const std::string> attributes) {
  std::string out;
  for (const auto& a : sorted(attributes)) {
    if (!out.empty()) out += '+';
    out += a;
  }
  return out;
}

const Relation* PrimitiveBase::relation_on(std::span<const std::string> attributes) const {
  const std::string key = scope_key(attributes);
  const auto& pool = attributes.size() == 1 ? per_dimension : multi_attribute;
  auto it = pool.find(key);
  return it == pool.end() ? nullptr : &it->second;
}

CompiledBase compile_primitive_base(std::span<const PreferenceStatement> statements, const ProblemFormulation& f,
                                    std::vector<ElementId> carrier) {
  CompiledBase out;
  PrimitiveBase& base = out.base;
  base.carrier = carrier;
  const StatementContext ctx = make_context(carrier, f);
  if (f.statement.norms)
    for (const auto& level : f.statement.norms->levels) base.norm_ids.push_back(level.id);
  std::map<std::string, std::set<ElementPair>> strict_pairs;

  auto scope_of = [&](const PreferenceStatement& s) -> std::string {
    if (!s.scope.empty()) return scope_key(s.scope);
    if (f.attributes.size() == 1) return f.attributes.front().name;
    throw Error(ErrorCode::UnknownReference, "statement needs a dimension scope");
  };
  auto target = [&](const std::string& key, bool multi) -> Relation& {
    auto& pool = multi ? base.multi_attribute : base.per_dimension;
    auto it = pool.find(key);
    if (it == pool.end()) it = pool.emplace(key, Relation(carrier).reflexive_closure()).first;
    return it->second;
  };
  auto assert_pair = [&](Relation& r, const std::string& key, const ElementPair& p) {
    if (base.negatives[key].count(p))
      throw Error(ErrorCode::InconsistentStatements, pair_text(p) + " on " + key + " was explicitly denied");
    if (strict_pairs[key].count({p.second, p.first}))
      throw Error(ErrorCode::InconsistentStatements, pair_text(p) + " on " + key + " contradicts a strict statement");
    r.add(p.first, p.second);
  };
  auto deny_pair = [&](const Relation& r, const std::string& key, const ElementPair& p) {
    if (r.holds(p.first, p.second))
      throw Error(ErrorCode::InconsistentStatements, pair_text(p) + " on " + key + " is asserted and denied");
    base.negatives[key].insert(p);
  };

  for (std::size_t i = 0; i < statements.size(); ++i) {
    const PreferenceStatement& s = statements[i];
    const PreferenceKind kind = classify_preference_statement(s, ctx);
    switch (kind) {
      case PreferenceKind::second_order:
        base.parked.push_back(s);
        out.rejections.push_back({i, kind, "not a primitive: importance is derived from first-order comparisons"});
        break;
      case PreferenceKind::intensity:
        base.parked.push_back(s);
        out.rejections.push_back({i, kind, "not a primitive: intensity is derived through indifference swaps"});
        break;
      case PreferenceKind::extended:
        base.extended.push_back(s);
        break;
      case PreferenceKind::first_order_absolute: {
        const std::string key = scope_of(s);
        if (s.scope.size() > 1) throw Error(ErrorCode::UnsupportedStatement, "absolute comparison on one attribute");
        auto it = base.norms.find(key);
        if (it == base.norms.end()) {
          std::vector<ElementId> norm_ids(base.norm_ids.begin(), base.norm_ids.end());
          it = base.norms.emplace(key, Relation(carrier, RelationKind::absolute, norm_ids)).first;
        }
        const ElementPair p{s.lhs[0], s.rhs[0]};
        if (s.polarity == Polarity::explicit_negative)
          deny_pair(it->second, "norm:" + key, p);
        else if (base.negatives["norm:" + key].count(p))
          throw Error(ErrorCode::InconsistentStatements, pair_text(p) + " was explicitly denied");
        else
          it->second.add(p.first, p.second);
        break;
      }
      case PreferenceKind::first_order_relative:
      case PreferenceKind::multi_attribute: {
        const std::string key = scope_of(s);
        Relation& r = target(key, kind == PreferenceKind::multi_attribute);
        const ElementPair p{s.lhs[0], s.rhs[0]};
        const ElementPair q{s.rhs[0], s.lhs[0]};
        if (s.polarity == Polarity::explicit_negative) {
          deny_pair(r, key, p);
          if (s.comparator == Comparator::indifferent) deny_pair(r, key, q);
          break;
        }
        assert_pair(r, key, p);
        if (s.comparator == Comparator::indifferent) assert_pair(r, key, q);
        if (s.comparator == Comparator::strict) {
          if (r.holds(q.first, q.second))
            throw Error(ErrorCode::InconsistentStatements, pair_text(p) + " on " + key + " is strict but reversed elsewhere");
          strict_pairs[key].insert(p);
        }
        break;
      }
    }
  }
  return out;
}

IndependenceReport check_preferential_independence(const PrimitiveBase& base, std::span<const std::string> h,
                                                   std::span<const std::string> g) {
  IndependenceReport report;
  if (!base.performances) return report;
  const PerformanceTable& t = *base.performances;
  const auto both = united(h, g);
  const Relation* r = base.relation_on(both);
  if (!r) throw Error(ErrorCode::UnknownReference, "no relation on " + scope_key(both));
  std::vector<std::size_t> hc, gc;
  for (const auto& a : h) hc.push_back(t.attribute_index(a));
  for (const auto& a : g) gc.push_back(t.attribute_index(a));
  std::vector<std::size_t> idx;
  for (const auto& e : t.carrier) idx.push_back(r->index_of(e));

  auto levels = [&](std::size_t row, const std::vector<std::size_t>& cols) {
    std::vector<double> v;
    for (auto c : cols) v.push_back(t.at(row, c));
    return v;
  };
  struct Seen {
    std::vector<double> g_level;
    int verdict;
    ElementPair pair;
    bool across = false;
  };
  std::map<std::pair<std::vector<double>, std::vector<double>>, Seen> seen;
  const std::size_t n = t.carrier.size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      auto gx = levels(x, gc);
      if (gx != levels(y, gc)) continue;
      auto hx = levels(x, hc), hy = levels(y, hc);
      if (hx == hy) continue;
      const int verdict = (r->holds(idx[x], idx[y]) ? 1 : 0) | (r->holds(idx[y], idx[x]) ? 2 : 0);
      ElementPair pair{t.carrier[x], t.carrier[y]};
      auto [it, fresh] = seen.try_emplace({hx, hy}, Seen{gx, verdict, pair});
      if (fresh || it->second.g_level == gx) {
        if (!fresh && it->second.verdict != verdict) {
          // Same H and G levels, different answers: the relation is not a
          // function of these attributes alone; treat as dependence.
          report.verdict = IndependenceVerdict::dependent;
          report.counterexample = Counterexample{it->second.pair, pair};
          return report;
        }
        continue;
      }
      if (!it->second.across) {
        it->second.across = true;
        ++report.compared;
      }
      if (it->second.verdict != verdict) {
        report.verdict = IndependenceVerdict::dependent;
        report.counterexample = Counterexample{it->second.pair, pair};
        return report;
      }
    }
  report.verdict = report.compared ? IndependenceVerdict::independent : IndependenceVerdict::inconclusive;
  return report;
}

ImportanceVerdict derive_importance(const PrimitiveBase& base, std::span<const std::string> h,
                                    std::span<const std::string> g) {
  ImportanceVerdict v;
  v.h = sorted(h);
  v.g = sorted(g);
  const IndependenceReport ind = check_preferential_independence(base, h, g);
  v.independence = ind.verdict;
  if (ind.verdict == IndependenceVerdict::dependent)
    throw Error(ErrorCode::DependentDimensions, "preferences on " + scope_key(h) + " depend on " + scope_key(g) +
                                                    ": " + pair_text(ind.counterexample->first) + " vs " +
                                                    pair_text(ind.counterexample->second));
  const auto both = united(h, g);
  const Relation* rh = base.relation_on(h);
  const Relation* rg = base.relation_on(g);
  const Relation* rhg = base.relation_on(both);
  if (!rh || !rg || !rhg) throw Error(ErrorCode::UnknownReference, "derive_importance needs relations on H, G and both");
  if (!rh->same_carrier(*rg) || !rh->same_carrier(*rhg)) throw Error(ErrorCode::CarrierMismatch, "relations differ in carrier");
  const std::size_t n = rh->size();
  for (std::size_t x = 0; x < n && !(v.witness && v.reverse_witness); ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y || !strictly(*rhg, x, y)) continue;
      if (!v.witness && rh->holds(x, y) && strictly(*rg, y, x)) v.witness = ElementPair{rh->id(x), rh->id(y)};
      if (!v.reverse_witness && rg->holds(x, y) && strictly(*rh, y, x))
        v.reverse_witness = ElementPair{rh->id(x), rh->id(y)};
    }
  if (v.witness && !v.reverse_witness)
    v.verdict = Importance::h_over_g;
  else if (v.reverse_witness && !v.witness)
    v.verdict = Importance::g_over_h;
  else
    v.verdict = Importance::incomparable;
  return v;
}

std::vector<ConsistencyCheck> check_parked_importance(const PrimitiveBase& base) {
  std::vector<ConsistencyCheck> out;
  for (const auto& s : base.parked) {
    if (s.intensity) continue;
    ConsistencyCheck c{s, false, {}};
    try {
      const ImportanceVerdict v = derive_importance(base, s.lhs, s.rhs);
      const Importance expected =
          s.comparator == Comparator::indifferent ? Importance::incomparable : Importance::h_over_g;
      c.consistent = v.verdict == expected;
      c.detail = v.verdict == Importance::h_over_g   ? "derived " + scope_key(s.lhs) + " >> " + scope_key(s.rhs)
                 : v.verdict == Importance::g_over_h ? "derived " + scope_key(s.rhs) + " >> " + scope_key(s.lhs)
                                                     : "no importance derived";
      if (v.witness) c.detail += ", witness " + pair_text(*v.witness);
    } catch (const Error& e) {
      c.detail = e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

double ValueFunction::operator()(double u) const {
  if (points.empty()) throw Error(ErrorCode::EvaluationFailure, "empty value function");
  if (points.size() == 1 || u <= points.front()) return values.front();
  if (u >= points.back()) return values.back();
  auto it = std::upper_bound(points.begin(), points.end(), u);
  const std::size_t k = static_cast<std::size_t>(it - points.begin());
  const double t = (u - points[k - 1]) / (points[k] - points[k - 1]);
  return values[k - 1] + t * (values[k] - values[k - 1]);
}

OracleQuery SwapQuestion::query() const {
  OracleQuery q;
  q.kind = "swap";
  q.key = "swap:" + attribute + ":" + num(from) + "->" + num(to) + "|" + ref_attribute + ":" + num(ref_from) + "->" +
          num(ref_to);
  q.payload = {{"attribute", attribute}, {"from", from},         {"to", to},
               {"ref_attribute", ref_attribute}, {"ref_from", ref_from}, {"ref_to", ref_to}};
  return q;
}

SwapAnswer parse_swap_answer(const Json& answer) {
  if (answer.is_string()) {
    const auto& s = answer.get_ref<const std::string&>();
    if (s == "less") return SwapAnswer::less;
    if (s == "indifferent") return SwapAnswer::indifferent;
    if (s == "more") return SwapAnswer::more;
  }
  throw Error(ErrorCode::ProtocolViolation, "swap answers are \"less\", \"indifferent\" or \"more\", got " + answer.dump());
}

Json swap_answer_json(SwapAnswer a) {
  return a == SwapAnswer::less ? "less" : a == SwapAnswer::more ? "more" : "indifferent";
}

namespace {

struct Ends {
  double worst;
  double best;
};

Ends ends_of(const Attribute& a) {
  if (a.scale == Scale::nominal || !a.codomain.numeric())
    throw Error(ErrorCode::NotRepresentable, "attribute '" + a.name + "' needs a numeric ordered codomain for swaps");
  return a.direction == Direction::increasing ? Ends{a.codomain.lo, a.codomain.hi} : Ends{a.codomain.hi, a.codomain.lo};
}

}  // namespace

ValueFunction derive_value_function(const PrimitiveBase& /*base*/, const Attribute& attr, Oracle& oracle,
                                    const ValueFunctionOptions& options) {
  const Ends e = ends_of(attr);
  ValueFunction fn{attr.name, {}, {}};
  if (e.worst == e.best) {
    fn.points = {e.worst};
    fn.values = {0.0};
    return fn;
  }
  if (options.grid < 2) throw Error(ErrorCode::InvalidFormulation, "grid needs at least two points");
  const Attribute& ref = options.reference ? *options.reference : attr;
  const Ends re = ends_of(ref);
  if (re.worst == re.best) throw Error(ErrorCode::NotRepresentable, "reference attribute has a single level");
  const double tol = options.tolerance;

  auto ask = [&](double from, double to, double ref_to) {
    return parse_swap_answer(oracle.ask(SwapQuestion{attr.name, from, to, ref.name, re.worst, ref_to}.query()));
  };
  // Point y between x and the best end whose swap from x matches the unit.
  auto next = [&](double x, double ref_to) -> std::optional<double> {
    const SwapAnswer whole = ask(x, e.best, ref_to);
    if (whole == SwapAnswer::less) return std::nullopt;
    if (whole == SwapAnswer::indifferent) return e.best;
    double lo = x, hi = e.best;
    for (int it = 0; it < 200 && std::fabs(hi - lo) > tol; ++it) {
      const double mid = lo + (hi - lo) / 2;
      const SwapAnswer a = ask(x, mid, ref_to);
      if (a == SwapAnswer::indifferent) return mid;
      (a == SwapAnswer::more ? hi : lo) = mid;
    }
    return lo + (hi - lo) / 2;
  };
  auto sequence = [&](double ref_to) {
    std::vector<double> pts{e.worst};
    while (pts.size() < options.grid) {
      auto y = next(pts.back(), ref_to);
      if (!y) break;
      if (std::fabs(*y - pts.back()) <= tol)
        throw Error(ErrorCode::IntransitiveSwaps, "a positive unit step is matched by a null swap");
      pts.push_back(*y);
    }
    return pts;
  };

  // Outer bisection on the unit: too large a unit leaves the sequence short.
  double small = re.worst, large = re.best;
  std::vector<double> best_seq;
  {
    auto full = sequence(large);
    if (full.size() == options.grid && std::fabs(full.back() - e.best) <= tol) best_seq = std::move(full);
  }
  for (int it = 0; best_seq.empty() && it < 200 && std::fabs(large - small) > tol; ++it) {
    const double mid = small + (large - small) / 2;
    auto seq = sequence(mid);
    if (seq.size() < options.grid) {
      large = mid;
    } else {
      small = mid;
      if (std::fabs(seq.back() - e.best) <= tol) best_seq = std::move(seq);
    }
  }
  if (best_seq.empty()) {
    best_seq = sequence(small);
    if (best_seq.size() < options.grid)
      throw Error(ErrorCode::IntransitiveSwaps, "no unit step yields a complete standard sequence");
  }
  best_seq.back() = e.best;
  for (std::size_t k = 0; k + 2 < best_seq.size(); ++k) {
    const double ref_to = best_seq[1];
    if (&ref != &attr) break;
    if (ask(best_seq[k], best_seq[k + 2], ref_to) != SwapAnswer::more)
      throw Error(ErrorCode::IntransitiveSwaps, "two unit steps judged no better than one");
  }

  fn.points = best_seq;
  fn.values.resize(best_seq.size());
  for (std::size_t k = 0; k < best_seq.size(); ++k) fn.values[k] = static_cast<double>(k);
  if (e.best < e.worst) {
    std::reverse(fn.points.begin(), fn.points.end());
    std::reverse(fn.values.begin(), fn.values.end());
  }
  return fn;
}

bool check_swap_consistency(const ValueFunction& fn, Oracle& oracle, double tolerance) {
  const std::size_t m = fn.points.size();
  if (m < 2) return true;
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fn.values[a] < fn.values[b]; });
  std::vector<double> p, v;
  for (auto i : order) {
    p.push_back(fn.points[i]);
    v.push_back(fn.values[i]);
  }
  const double unit = v[1] - v[0];
  if (!(unit > 0)) return false;
  auto predicted = [&](double diff) {
    if (std::fabs(diff - unit) <= tolerance * std::fabs(unit)) return SwapAnswer::indifferent;
    return diff > unit ? SwapAnswer::more : SwapAnswer::less;
  };
  auto answer = [&](double from, double to) {
    return parse_swap_answer(oracle.ask(SwapQuestion{fn.attribute, from, to, fn.attribute, p[0], p[1]}.query()));
  };
  for (std::size_t k = 0; k + 1 < m; ++k)
    if (answer(p[k], p[k + 1]) != predicted(v[k + 1] - v[k])) return false;
  for (std::size_t k = 0; k + 2 < m; ++k)
    if (answer(p[k], p[k + 2]) != predicted(v[k + 2] - v[k])) return false;
  return true;
}

SeparabilityReport check_separability(const std::string& attribute, const PrimitiveBase& base) {
  SeparabilityReport report;
  if (!base.performances) return report;
  const PerformanceTable& t = *base.performances;
  const std::size_t col = t.attribute_index(attribute);
  const Relation* r = base.relation_on(t.attributes);
  if (!r) throw Error(ErrorCode::UnknownReference, "no overall relation on " + scope_key(t.attributes));
  const std::size_t n = t.carrier.size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      if (t.at(x, col) == t.at(y, col)) continue;
      bool twins = true;
      for (std::size_t c = 0; c < t.attributes.size() && twins; ++c)
        if (c != col && t.at(x, c) != t.at(y, c)) twins = false;
      if (!twins) continue;
      ++report.twins;
      const std::size_t ix = r->index_of(t.carrier[x]), iy = r->index_of(t.carrier[y]);
      if (strictly(*r, ix, iy) || strictly(*r, iy, ix)) {
        report.verdict = SeparabilityVerdict::separable;
        report.witness = strictly(*r, ix, iy) ? ElementPair{t.carrier[x], t.carrier[y]}
                                              : ElementPair{t.carrier[y], t.carrier[x]};
        return report;
      }
    }
  report.verdict = report.twins ? SeparabilityVerdict::not_separable : SeparabilityVerdict::inconclusive;
  return report;
}

}  // namespace dp
