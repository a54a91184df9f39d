#include "dp/covering.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "dp/error.hpp"

namespace dp {

namespace {

using Mask = std::uint32_t;

struct Compiled {
  std::size_t n = 0;
  Mask all = 0;
  std::vector<Mask> reach;  // districts covered by a facility at j
};

Compiled compile(const CoveringInstance& inst) {
  Compiled c;
  c.n = inst.size();
  c.all = c.n == 32 ? ~Mask{0} : (Mask{1} << c.n) - 1;
  c.reach.assign(c.n, 0);
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t j = 0; j < c.n; ++j)
      if (inst.gamma[i][j]) c.reach[j] |= Mask{1} << i;
  return c;
}

double population_of(const CoveringInstance& inst, Mask covered) {
  if (inst.populations.empty()) return std::popcount(covered);
  double p = 0;
  for (std::size_t i = 0; i < inst.size(); ++i)
    if (covered >> i & 1) p += inst.populations[i];
  return p;
}

CoveringSolution from_mask(const CoveringInstance& inst, Mask open) {
  std::vector<bool> v(inst.size());
  for (std::size_t j = 0; j < inst.size(); ++j) v[j] = open >> j & 1;
  return evaluate_openings(inst, v);
}

bool within_budget(const CoveringInstance& inst, double cost) {
  return !inst.budget || cost <= *inst.budget + 1e-9;
}

bool meets_target(const CoveringInstance& inst, Mask covered) {
  return !inst.target || population_of(inst, covered) >= *inst.target - 1e-9;
}

Mask covered_by(const Compiled& c, Mask open) {
  Mask cov = 0;
  for (std::size_t j = 0; j < c.n; ++j)
    if (open >> j & 1) cov |= c.reach[j];
  return cov;
}

double cost_of(const CoveringInstance& inst, Mask open) {
  double s = 0;
  for (std::size_t j = 0; j < inst.size(); ++j)
    if (open >> j & 1) s += inst.cost(j);
  return s;
}

std::optional<Mask> greedy(const CoveringInstance& inst, const Compiled& c) {
  Mask open = 0, cov = 0;
  double spent = 0;
  while (cov != c.all) {
    std::size_t pick = c.n;
    int gain = 0;
    for (std::size_t j = 0; j < c.n; ++j) {
      if (open >> j & 1 || !within_budget(inst, spent + inst.cost(j))) continue;
      const int g = std::popcount(c.reach[j] & ~cov);
      if (g > gain) {
        gain = g;
        pick = j;
      }
    }
    if (pick == c.n) break;
    open |= Mask{1} << pick;
    cov |= c.reach[pick];
    spent += inst.cost(pick);
  }
  if (inst.mode == CoverMode::full_cover && cov != c.all) return std::nullopt;
  if (!meets_target(inst, cov)) return std::nullopt;
  return open;
}

std::optional<Mask> exact_full(const CoveringInstance& inst, const Compiled& c) {
  int max_reach = 1;
  for (auto r : c.reach) max_reach = std::max(max_reach, std::popcount(r));
  std::optional<Mask> best = greedy(inst, c);
  int best_count = best ? std::popcount(*best) : static_cast<int>(c.n) + 1;
  std::function<void(Mask, Mask, int, double)> dfs = [&](Mask cov, Mask open, int count, double spent) {
    if (cov == c.all) {
      if (count < best_count && meets_target(inst, cov)) {
        best_count = count;
        best = open;
      }
      return;
    }
    const int missing = std::popcount(c.all & ~cov);
    if (count + (missing + max_reach - 1) / max_reach >= best_count) return;
    const std::size_t i = static_cast<std::size_t>(std::countr_zero(c.all & ~cov));
    for (std::size_t j = 0; j < c.n; ++j) {
      if (!(c.reach[j] >> i & 1) || open >> j & 1) continue;
      if (!within_budget(inst, spent + inst.cost(j))) continue;
      dfs(cov | c.reach[j], open | Mask{1} << j, count + 1, spent + inst.cost(j));
    }
  };
  dfs(0, 0, 0, 0.0);
  return best;
}

std::optional<Mask> exact_max(const CoveringInstance& inst, const Compiled& c) {
  std::vector<Mask> suffix(c.n + 1, 0);
  for (std::size_t j = c.n; j-- > 0;) suffix[j] = suffix[j + 1] | c.reach[j];
  std::optional<Mask> best;
  int best_cov = -1, best_count = 0;
  std::function<void(std::size_t, Mask, Mask, int, double)> dfs = [&](std::size_t j, Mask cov, Mask open, int count,
                                                                       double spent) {
    const int here = std::popcount(cov);
    if (meets_target(inst, cov) && (here > best_cov || (here == best_cov && count < best_count))) {
      best_cov = here;
      best_count = count;
      best = open;
    }
    if (j == c.n) return;
    const Mask ub = cov | suffix[j];
    if (!meets_target(inst, ub)) return;
    const int ub_cov = std::popcount(ub);
    if (ub_cov < best_cov || (ub_cov == best_cov && count + 1 >= best_count)) return;
    if (within_budget(inst, spent + inst.cost(j)) && (c.reach[j] & ~cov))
      dfs(j + 1, cov | c.reach[j], open | Mask{1} << j, count + 1, spent + inst.cost(j));
    dfs(j + 1, cov, open, count, spent);
  };
  dfs(0, 0, 0, 0, 0.0);
  return best;
}

std::optional<Mask> brute_force(const CoveringInstance& inst, const Compiled& c) {
  std::optional<Mask> best;
  int best_cov = -1, best_count = 0;
  const std::uint64_t total = std::uint64_t{1} << c.n;
  for (std::uint64_t m = 0; m < total; ++m) {
    const Mask open = static_cast<Mask>(m);
    const Mask cov = covered_by(c, open);
    if (inst.mode == CoverMode::full_cover && cov != c.all) continue;
    if (!meets_target(inst, cov) || !within_budget(inst, cost_of(inst, open))) continue;
    const int here = std::popcount(cov), count = std::popcount(open);
    if (here > best_cov || (here == best_cov && count < best_count)) {
      best_cov = here;
      best_count = count;
      best = open;
    }
  }
  return best;
}

}  // namespace

void CoveringInstance::validate() const {
  const std::size_t n = gamma.size();
  if (n == 0) throw Error(ErrorCode::InvalidFixture, "no districts");
  if (n > 32) throw Error(ErrorCode::InvalidFixture, "at most 32 districts");
  for (std::size_t i = 0; i < n; ++i) {
    if (gamma[i].size() != n) throw Error(ErrorCode::InvalidFixture, "adjacency matrix must be square");
    if (!gamma[i][i])
      throw Error(ErrorCode::InvalidFixture, "district " + std::to_string(i + 1) + " does not cover itself");
  }
  if (!costs.empty() && costs.size() != n) throw Error(ErrorCode::InvalidFixture, "one cost per district");
  if (!populations.empty() && populations.size() != n)
    throw Error(ErrorCode::InvalidFixture, "one population per district");
  for (double k : costs)
    if (k < 0) throw Error(ErrorCode::InvalidFixture, "negative cost");
}

CoveringSolution evaluate_openings(const CoveringInstance& inst, const std::vector<bool>& open) {
  const std::size_t n = inst.size();
  CoveringSolution s;
  s.open = open;
  s.covered.assign(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (!open[j]) continue;
    ++s.openings;
    s.cost += inst.cost(j);
    for (std::size_t i = 0; i < n; ++i)
      if (inst.gamma[i][j]) s.covered[i] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (s.covered[i]) {
      ++s.coverage;
      s.population += inst.population(i);
    }
  return s;
}

CoveringSolution optimize_covering(const CoveringInstance& inst, CoverAlgorithm algorithm) {
  inst.validate();
  const Compiled c = compile(inst);
  std::optional<Mask> open;
  switch (algorithm) {
    case CoverAlgorithm::greedy:
      open = greedy(inst, c);
      break;
    case CoverAlgorithm::exact:
      if (c.n > kCoveringExactCap)
        throw Error(ErrorCode::CapExceeded, "exact covering limited to " + std::to_string(kCoveringExactCap) + " districts");
      open = inst.mode == CoverMode::full_cover ? exact_full(inst, c) : exact_max(inst, c);
      break;
    case CoverAlgorithm::brute_force:
      if (c.n > kCoveringBruteForceCap)
        throw Error(ErrorCode::CapExceeded, "brute force limited to " + std::to_string(kCoveringBruteForceCap) + " districts");
      open = brute_force(inst, c);
      break;
  }
  if (!open) throw Error(ErrorCode::Infeasible, "no opening vector meets the covering constraints");
  return from_mask(inst, *open);
}

CoveringInstance parse_covering_matrix(const std::string& text) {
  CoveringInstance inst;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::vector<bool> row;
    for (char ch : line) {
      if (ch == '0' || ch == '1')
        row.push_back(ch == '1');
      else if (ch != ' ' && ch != '\t' && ch != ',' && ch != '\r')
        throw Error(ErrorCode::InvalidFixture, "line " + std::to_string(lineno) + ": unexpected '" + ch + "'");
    }
    if (!row.empty()) inst.gamma.push_back(std::move(row));
  }
  inst.validate();
  return inst;
}

std::string format_covering_matrix(const CoveringInstance& inst) {
  std::string out;
  for (const auto& row : inst.gamma) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ' ';
      out += row[j] ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

CoveringInstance path_instance(std::size_t n) {
  CoveringInstance inst;
  inst.gamma.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    inst.gamma[i][i] = true;
    if (i + 1 < n) inst.gamma[i][i + 1] = inst.gamma[i + 1][i] = true;
  }
  return inst;
}

CoveringInstance complete_instance(std::size_t n) {
  CoveringInstance inst;
  inst.gamma.assign(n, std::vector<bool>(n, true));
  return inst;
}

CoveringInstance random_geometric_instance(std::size_t n, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  CoveringInstance inst;
  inst.gamma.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      inst.gamma[i][j] = i == j || std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second) < radius;
  return inst;
}

std::string format_openings(const CoveringSolution& s) {
  std::string out = "{";
  bool first = true;
  for (std::size_t j = 0; j < s.open.size(); ++j)
    if (s.open[j]) {
      if (!first) out += ',';
      out += std::to_string(j + 1);
      first = false;
    }
  return out + "}";
}

}  // namespace dp
