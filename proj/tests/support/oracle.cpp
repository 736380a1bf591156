#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace llfba::test {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-9;

/// Standard-form translation bookkeeping: original variable j is recovered as
/// offset[j] + scale[j] * y[pos[j]] (+ the paired negative part for free vars).
struct StandardForm {
  Mat a;
  std::vector<int> sense;
  Vec rhs;
  Vec cost;
  std::vector<int> pos;       // index of the (first) nonnegative part
  std::vector<int> neg;       // second part for free variables, else -1
  std::vector<double> scale;  // +1 or -1
  std::vector<double> offset;
};

StandardForm to_standard(const OracleLp& lp) {
  const int rows = static_cast<int>(lp.a.rows());
  const int cols = static_cast<int>(lp.a.cols());
  StandardForm sf;
  sf.pos.resize(cols);
  sf.neg.assign(cols, -1);
  sf.scale.assign(cols, 1.0);
  sf.offset.assign(cols, 0.0);

  int y_count = 0;
  std::vector<std::pair<int, double>> upper_rows;  // (variable, width) for l <= x <= u
  for (int j = 0; j < cols; ++j) {
    const double l = lp.lb[j];
    const double u = lp.ub[j];
    if (l > u) throw std::invalid_argument("crossed bounds");
    if (std::isfinite(l)) {
      sf.pos[j] = y_count++;
      sf.offset[j] = l;
      if (std::isfinite(u)) upper_rows.emplace_back(j, u - l);
    } else if (std::isfinite(u)) {
      sf.pos[j] = y_count++;
      sf.scale[j] = -1.0;
      sf.offset[j] = u;
    } else {
      sf.pos[j] = y_count++;
      sf.neg[j] = y_count++;
    }
  }

  const int total_rows = rows + static_cast<int>(upper_rows.size());
  sf.a = Mat::Zero(total_rows, y_count);
  sf.rhs = Vec::Zero(total_rows);
  sf.sense.assign(total_rows, -1);
  sf.cost = Vec::Zero(y_count);

  for (int i = 0; i < rows; ++i) {
    double shift = 0.0;
    for (int j = 0; j < cols; ++j) {
      const double coef = lp.a(i, j);
      if (coef == 0.0) continue;
      sf.a(i, sf.pos[j]) += coef * sf.scale[j];
      if (sf.neg[j] >= 0) sf.a(i, sf.neg[j]) -= coef;
      shift += coef * sf.offset[j];
    }
    sf.rhs[i] = lp.rhs[i] - shift;
    sf.sense[i] = lp.sense[i];
  }
  for (size_t k = 0; k < upper_rows.size(); ++k) {
    const int i = rows + static_cast<int>(k);
    sf.a(i, sf.pos[upper_rows[k].first]) = 1.0;
    sf.rhs[i] = upper_rows[k].second;
    sf.sense[i] = -1;
  }
  for (int j = 0; j < cols; ++j) {
    const double c = lp.maximize ? lp.cost[j] : -lp.cost[j];
    sf.cost[sf.pos[j]] += c * sf.scale[j];
    if (sf.neg[j] >= 0) sf.cost[sf.neg[j]] -= c;
  }
  return sf;
}

}  // namespace

namespace {

/// One round of full-tableau minimization over the allowed columns. Returns
/// true at optimality, false when an unbounded descent ray was found.
bool tableau_simplex(Mat& tab, std::vector<int>& basis, const Vec& cost,
                     const std::vector<bool>& allowed) {
  const int m = static_cast<int>(tab.rows());
  const int total = static_cast<int>(tab.cols()) - 1;

  Vec reduced = cost;
  for (int i = 0; i < m; ++i) {
    if (cost[basis[i]] != 0.0) {
      reduced -= cost[basis[i]] * tab.row(i).head(total).transpose();
    }
  }

  const long max_iter = 5000 + 100L * total;
  long stalls = 0;
  double last_z = kInf;
  for (long iter = 0; iter < max_iter; ++iter) {
    int entering = -1;
    if (stalls < 300) {
      double best = -1e-7;
      for (int j = 0; j < total; ++j) {
        if (allowed[j] && reduced[j] < best) {
          best = reduced[j];
          entering = j;
        }
      }
    } else {  // Bland
      for (int j = 0; j < total; ++j) {
        if (allowed[j] && reduced[j] < -1e-7) {
          entering = j;
          break;
        }
      }
    }
    if (entering < 0) return true;

    int leaving = -1;
    double best_ratio = kInf;
    for (int i = 0; i < m; ++i) {
      if (tab(i, entering) > kTol) {
        const double ratio = tab(i, total) / tab(i, entering);
        if (ratio < best_ratio - kTol ||
            (ratio < best_ratio + kTol && (leaving < 0 || basis[i] < basis[leaving]))) {
          best_ratio = ratio;
          leaving = i;
        }
      }
    }
    if (leaving < 0) return false;

    tab.row(leaving) /= tab(leaving, entering);
    for (int i = 0; i < m; ++i) {
      if (i != leaving && std::fabs(tab(i, entering)) > 0.0) {
        tab.row(i) -= tab(i, entering) * tab.row(leaving);
      }
    }
    const double step = reduced[entering];
    reduced -= step * tab.row(leaving).head(total).transpose();
    reduced[entering] = 0.0;
    basis[leaving] = entering;

    double cur = 0.0;
    for (int i = 0; i < m; ++i) cur += cost[basis[i]] * tab(i, total);
    if (cur > last_z - 1e-12) {
      ++stalls;
    } else {
      stalls = 0;
    }
    last_z = cur;
  }
  return true;
}

}  // namespace

OracleOutcome oracle_solve(const OracleLp& lp) {
  StandardForm sf = to_standard(lp);
  const int m = static_cast<int>(sf.a.rows());
  const int n = static_cast<int>(sf.a.cols());

  // Flip rows to nonnegative right-hand sides, then count columns: one slack
  // or surplus per inequality, one artificial per row.
  for (int i = 0; i < m; ++i) {
    if (sf.rhs[i] < 0.0) {
      sf.a.row(i) *= -1.0;
      sf.rhs[i] *= -1.0;
      sf.sense[i] = -sf.sense[i];
    }
  }
  int slack_count = 0;
  for (int i = 0; i < m; ++i) {
    if (sf.sense[i] != 0) ++slack_count;
  }

  const int total = n + slack_count + m;
  Mat tab = Mat::Zero(m, total + 1);
  tab.block(0, 0, m, n) = sf.a;
  tab.col(total) = sf.rhs;

  std::vector<int> basis(m, -1);
  int slack_at = n;
  const int artificial_at = n + slack_count;
  for (int i = 0; i < m; ++i) {
    if (sf.sense[i] == -1) {
      tab(i, slack_at) = 1.0;
      ++slack_at;
    } else if (sf.sense[i] == 1) {
      tab(i, slack_at) = -1.0;  // surplus
      ++slack_at;
    }
    tab(i, artificial_at + i) = 1.0;
    basis[i] = artificial_at + i;
  }

  // Phase 1: minimize the artificial sum with unit costs so every magnitude
  // in the tableau stays O(1).
  Vec phase1_cost = Vec::Zero(total);
  for (int i = 0; i < m; ++i) phase1_cost[artificial_at + i] = 1.0;
  std::vector<bool> allowed(total, true);
  tableau_simplex(tab, basis, phase1_cost, allowed);
  double infeas = 0.0;
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= artificial_at) infeas += tab(i, total);
  }
  if (infeas > 1e-6) return {OracleStatus::Infeasible, {}, 0.0};

  // Pivot degenerate artificials out where possible; rows with no usable
  // pivot are redundant and can stay with the artificial pinned at zero.
  for (int i = 0; i < m; ++i) {
    if (basis[i] < artificial_at) continue;
    for (int j = 0; j < artificial_at; ++j) {
      if (std::fabs(tab(i, j)) > 1e-8) {
        tab.row(i) /= tab(i, j);
        for (int r = 0; r < m; ++r) {
          if (r != i && std::fabs(tab(r, j)) > 0.0) tab.row(r) -= tab(r, j) * tab.row(i);
        }
        basis[i] = j;
        break;
      }
    }
  }

  // Phase 2: original costs, artificials barred from re-entering.
  Vec cost = Vec::Zero(total);
  cost.head(n) = -sf.cost;  // internal minimization
  for (int j = artificial_at; j < total; ++j) allowed[j] = false;
  if (!tableau_simplex(tab, basis, cost, allowed)) {
    return {OracleStatus::Unbounded, {}, 0.0};
  }

  Vec y = Vec::Zero(total);
  for (int i = 0; i < m; ++i) y[basis[i]] = tab(i, total);

  const int cols = static_cast<int>(lp.a.cols());
  OracleOutcome out;
  out.status = OracleStatus::Optimal;
  out.x = Vec::Zero(cols);
  for (int j = 0; j < cols; ++j) {
    out.x[j] = sf.offset[j] + sf.scale[j] * y[sf.pos[j]];
    if (sf.neg[j] >= 0) out.x[j] -= y[sf.neg[j]];
  }
  out.objective = lp.cost.dot(out.x);
  return out;
}

namespace {

OracleLp signed_potential_lp(const SparseMat& s_internal, const std::vector<int>& a,
                             double epsilon, const std::vector<int>* subset) {
  const int m = static_cast<int>(s_internal.rows());
  std::vector<int> all;
  if (subset == nullptr) {
    for (int k = 0; k < static_cast<int>(s_internal.cols()); ++k) all.push_back(k);
    subset = &all;
  }
  OracleLp lp;
  lp.a = Mat::Zero(static_cast<int>(subset->size()), m);
  lp.sense.resize(subset->size());
  lp.rhs = Vec::Zero(static_cast<int>(subset->size()));
  for (size_t r = 0; r < subset->size(); ++r) {
    const int k = (*subset)[r];
    for (SparseMat::InnerIterator it(s_internal, k); it; ++it) {
      lp.a(static_cast<int>(r), static_cast<int>(it.row())) = it.value();
    }
    lp.sense[r] = a[k] == 1 ? -1 : 1;
    lp.rhs[r] = a[k] == 1 ? -epsilon : epsilon;
  }
  lp.lb = Vec::Constant(m, -kInf);
  lp.ub = Vec::Constant(m, kInf);
  lp.cost = Vec::Zero(m);
  return lp;
}

}  // namespace

bool oracle_sp_feasible(const SparseMat& s_internal, const std::vector<int>& a, double epsilon) {
  OracleLp lp = signed_potential_lp(s_internal, a, epsilon, nullptr);
  return oracle_solve(lp).status == OracleStatus::Optimal;
}

OracleLlfba oracle_llfba(const MetabolicModel& model, double epsilon) {
  const int n = model.num_reactions();
  const int ni = model.num_internal();
  const SparseMat s_internal = internal_submatrix(model);

  OracleLlfba best;
  for (unsigned mask = 0; mask < (1u << ni); ++mask) {
    std::vector<int> a(ni);
    for (int k = 0; k < ni; ++k) a[k] = (mask >> k) & 1u;
    if (ni > 0 && !oracle_sp_feasible(s_internal, a, epsilon)) continue;

    OracleLp lp;
    lp.a = Mat(model.stoichiometry);
    lp.sense.assign(model.num_metabolites(), 0);
    lp.rhs = Vec::Zero(model.num_metabolites());
    lp.lb = model.lower_bounds;
    lp.ub = model.upper_bounds;
    lp.cost = model.objective;
    for (int k = 0; k < ni; ++k) {
      const int j = model.internal_indices[k];
      if (a[k] == 1) {
        lp.lb[j] = std::max(lp.lb[j], 0.0);
      } else {
        lp.ub[j] = std::min(lp.ub[j], 0.0);
      }
      if (lp.lb[j] > lp.ub[j]) lp.lb[j] = lp.ub[j];  // cannot happen with 0 in range
    }
    OracleOutcome res = oracle_solve(lp);
    if (res.status != OracleStatus::Optimal) continue;
    if (best.status != OracleStatus::Optimal || res.objective > best.objective) {
      best.status = OracleStatus::Optimal;
      best.objective = res.objective;
      best.v = res.x;
    }
  }
  (void)n;
  return best;
}

std::vector<std::vector<int>> oracle_all_mis(const SparseMat& s_internal,
                                             const std::vector<int>& a, double epsilon,
                                             const std::vector<int>& internal_indices) {
  const int ni = static_cast<int>(s_internal.cols());
  auto feasible = [&](const std::vector<int>& subset) {
    OracleLp lp = signed_potential_lp(s_internal, a, epsilon, &subset);
    return oracle_solve(lp).status == OracleStatus::Optimal;
  };

  std::vector<std::vector<int>> result;
  for (unsigned mask = 1; mask < (1u << ni); ++mask) {
    std::vector<int> subset;
    for (int k = 0; k < ni; ++k) {
      if ((mask >> k) & 1u) subset.push_back(k);
    }
    if (feasible(subset)) continue;
    bool minimal = true;
    for (size_t drop = 0; drop < subset.size() && minimal; ++drop) {
      std::vector<int> smaller;
      for (size_t q = 0; q < subset.size(); ++q) {
        if (q != drop) smaller.push_back(subset[q]);
      }
      if (!smaller.empty() && !feasible(smaller)) minimal = false;
    }
    if (!minimal) continue;
    std::vector<int> mapped;
    for (int k : subset) mapped.push_back(internal_indices[k]);
    result.push_back(std::move(mapped));
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace llfba::test
