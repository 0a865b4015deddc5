#include "mcd/credit_engine.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <tuple>

#include "mcd/error.h"
#include "mcd/parallel.h"

namespace mcd {

std::vector<double> direct_credits(std::span<const double> delays, std::span<const double> taus) {
  if (delays.empty() || delays.size() != taus.size()) {
    throw DomainError("direct credits need one tau per delay and at least one neighbor");
  }
  std::vector<double> exponents(delays.size());
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (!(taus[i] > 0.0)) throw DomainError("tau must be positive");
    if (!(delays[i] > 0.0)) throw DomainError("effective delay must be positive");
    exponents[i] = delays[i] / taus[i];
    smallest = std::min(smallest, exponents[i]);
  }
  // Shifting every exponent by the same amount leaves the normalized values
  // unchanged and keeps the largest weight at exp(0) = 1.
  std::vector<double> out(delays.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(-(exponents[i] - smallest));
    norm += out[i];
  }
  for (double& g : out) g /= norm;
  return out;
}

std::optional<std::uint32_t> CreditModel::Action::local_index(UserId u) const {
  // Nodes are sorted by time, not id; linear scan is fine for lookups
  // outside hot loops.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] == u) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

CreditModel::CreditModel(std::vector<Action> actions, const EventLog& log, ScanStats stats)
    : actions_(std::move(actions)), users_(log.users()), stats_(stats) {
  user_index_.reserve(users_.size());
  for (std::size_t i = 0; i < users_.size(); ++i) {
    user_index_.emplace(users_[i], static_cast<std::uint32_t>(i));
  }
  distinct_.resize(users_.size());
  for (std::size_t i = 0; i < users_.size(); ++i) distinct_[i] = log.distinct_actions(users_[i]);

  std::vector<std::uint32_t> counts(users_.size() + 1, 0);
  for (std::size_t a = 0; a < actions_.size(); ++a) {
    auto& act = actions_[a];
    action_index_.emplace(act.id, a);
    act.dense.resize(act.nodes.size());
    act.node_weight.resize(act.nodes.size());
    for (std::size_t i = 0; i < act.nodes.size(); ++i) {
      const auto d = user_index_.at(act.nodes[i]);
      act.dense[i] = d;
      act.node_weight[i] = 1.0 / static_cast<double>(distinct_[d]);
      ++counts[d + 1];
    }
    act.weighted_reach.assign(act.nodes.size(), 0.0);
    for (std::size_t v = 0; v < act.nodes.size(); ++v) {
      for (auto p = act.row_ptr[v]; p < act.row_ptr[v + 1]; ++p) {
        act.weighted_reach[v] += act.total[p] * act.node_weight[act.row_recv[p]];
      }
    }
  }
  member_ptr_.assign(users_.size() + 1, 0);
  for (std::size_t i = 0; i < users_.size(); ++i) member_ptr_[i + 1] = member_ptr_[i] + counts[i + 1];
  members_.resize(member_ptr_.back());
  std::vector<std::uint32_t> fill(member_ptr_.begin(), member_ptr_.end() - 1);
  for (std::size_t a = 0; a < actions_.size(); ++a) {
    const auto& act = actions_[a];
    for (std::size_t i = 0; i < act.nodes.size(); ++i) {
      members_[fill[act.dense[i]]++] =
          Membership{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(i)};
    }
  }
}

const CreditModel::Action* CreditModel::find_action(ActionId a) const {
  auto it = action_index_.find(a);
  return it == action_index_.end() ? nullptr : &actions_[it->second];
}

std::optional<std::uint32_t> CreditModel::dense_index(UserId u) const {
  auto it = user_index_.find(u);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const CreditModel::Membership> CreditModel::memberships(std::uint32_t dense) const {
  return std::span<const Membership>(members_).subspan(member_ptr_[dense],
                                                       member_ptr_[dense + 1] - member_ptr_[dense]);
}

std::size_t CreditModel::entry_count() const {
  std::size_t n = 0;
  for (const auto& a : actions_) n += a.entry_count();
  return n;
}

namespace {

// Position of receiver `u` in row `v`, if stored.
std::optional<std::size_t> find_entry(const CreditModel::Action& act, std::uint32_t v,
                                      std::uint32_t u) {
  const auto first = act.row_recv.begin() + act.row_ptr[v];
  const auto last = act.row_recv.begin() + act.row_ptr[v + 1];
  auto it = std::lower_bound(first, last, u);
  if (it == last || *it != u) return std::nullopt;
  return static_cast<std::size_t>(it - act.row_recv.begin());
}

CreditModel::Action scan_action(const SocialGraph& graph, const LearnedParams& params,
                                const EventLog& log, ActionId a, double fallback_tau,
                                std::size_t& missing) {
  const PropagationGraph pg = propagation_graph(graph, log, a);
  const auto times = performance_times(log, pg);
  const std::size_t n = pg.nodes.size();

  CreditModel::Action act;
  act.id = a;
  act.nodes = pg.nodes;
  act.parent_ptr.assign(n + 1, 0);

  // cols[u]: (source w, Gamma_{w,u}) for every w != u reaching u.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> cols(n);
  std::vector<double> acc(n, 0.0);
  std::vector<std::uint32_t> touched;
  std::vector<double> delays, taus;

  for (std::uint32_t u = 0; u < n; ++u) {
    const auto& parents = pg.parents[u];
    act.parent_ptr[u + 1] = act.parent_ptr[u] + static_cast<std::uint32_t>(parents.size());
    if (parents.empty()) continue;

    delays.clear();
    taus.clear();
    for (auto v : parents) {
      delays.push_back(effective_delay(delays_before(times[v], pg.first_times[u])));
      auto tau = params.tau_of(pg.nodes[v], pg.nodes[u]);
      if (!tau) ++missing;
      taus.push_back(tau.value_or(fallback_tau));
    }
    const auto gamma = direct_credits(delays, taus);

    // Gamma_{w,u} = sum_{v in parents} Gamma_{w,v} gamma_{v,u}, Gamma_{v,v} = 1.
    touched.clear();
    auto add = [&](std::uint32_t w, double value) {
      if (acc[w] == 0.0) touched.push_back(w);
      acc[w] += value;
    };
    for (std::size_t j = 0; j < parents.size(); ++j) {
      const auto v = parents[j];
      act.parent_idx.push_back(v);
      act.gamma.push_back(gamma[j]);
      add(v, gamma[j]);
      for (const auto& [w, credit] : cols[v]) add(w, credit * gamma[j]);
    }
    std::sort(touched.begin(), touched.end());
    cols[u].reserve(touched.size());
    for (auto w : touched) {
      if (acc[w] > 0.0) cols[u].emplace_back(w, acc[w]);
      acc[w] = 0.0;
    }
  }

  // Transpose into source-major rows, diagonal first.
  act.row_ptr.assign(n + 1, 0);
  for (std::uint32_t u = 0; u < n; ++u) {
    ++act.row_ptr[u + 1];
    for (const auto& [w, credit] : cols[u]) ++act.row_ptr[w + 1];
  }
  for (std::size_t i = 0; i < n; ++i) act.row_ptr[i + 1] += act.row_ptr[i];
  const std::size_t nnz = act.row_ptr[n];
  act.row_recv.resize(nnz);
  act.total.resize(nnz);
  std::vector<std::uint32_t> fill(act.row_ptr.begin(), act.row_ptr.end() - 1);
  act.col_ptr.assign(n + 1, 0);
  act.col_src.reserve(nnz);
  act.col_pos.reserve(nnz);
  for (std::uint32_t u = 0; u < n; ++u) {
    // Receivers are visited in ascending order, so every row stays sorted
    // and its diagonal (u == w) lands first.
    for (const auto& [w, credit] : cols[u]) {
      const auto pos = fill[w]++;
      act.row_recv[pos] = u;
      act.total[pos] = credit;
      act.col_src.push_back(w);
      act.col_pos.push_back(pos);
    }
    const auto pos = fill[u]++;
    act.row_recv[pos] = u;
    act.total[pos] = 1.0;
    act.col_src.push_back(u);
    act.col_pos.push_back(pos);
    act.col_ptr[u + 1] = static_cast<std::uint32_t>(act.col_src.size());
  }
  return act;
}

}  // namespace

std::shared_ptr<const CreditModel> scan_log(const SocialGraph& graph, const LearnedParams& params,
                                            const EventLog& test, unsigned threads) {
  ScanStats stats;
  stats.fallback_tau = params.mean_tau();
  const auto& ids = test.actions();
  std::vector<CreditModel::Action> actions(ids.size());
  std::vector<std::size_t> missing(ids.size(), 0);
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    actions[i] = scan_action(graph, params, test, ids[i], stats.fallback_tau, missing[i]);
  });
  for (std::size_t i = 0; i < ids.size(); ++i) {
    stats.missing_tau += missing[i];
    stats.edges += actions[i].parent_idx.size();
  }
  return std::make_shared<const CreditModel>(std::move(actions), test, stats);
}

double CreditModel::total_credit(ActionId a, UserId v, UserId u) const {
  const Action* act = find_action(a);
  if (!act) return 0.0;
  auto lv = act->local_index(v);
  auto lu = act->local_index(u);
  if (!lv || !lu) return 0.0;
  auto pos = find_entry(*act, *lv, *lu);
  return pos ? act->total[*pos] : 0.0;
}

void write_credit_dump(std::ostream& out, const CreditModel& model) {
  struct Line {
    ActionId a;
    UserId v, u;
    double value;
  };
  std::vector<Line> lines;
  for (const auto& act : model.actions()) {
    for (std::size_t v = 0; v < act.size(); ++v) {
      for (auto p = act.row_ptr[v]; p < act.row_ptr[v + 1]; ++p) {
        lines.push_back({act.id, act.nodes[v], act.nodes[act.row_recv[p]], act.total[p]});
      }
    }
  }
  std::sort(lines.begin(), lines.end(), [](const Line& x, const Line& y) {
    return std::tie(x.a, x.v, x.u) < std::tie(y.a, y.v, y.u);
  });
  char buf[64];
  for (const auto& l : lines) {
    std::snprintf(buf, sizeof buf, "%.17g", l.value);
    out << l.a << ' ' << l.v << ' ' << l.u << ' ' << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// CreditState

CreditState::CreditState(std::shared_ptr<const CreditModel> model) : model_(std::move(model)) {
  const auto& actions = model_->actions();
  values_.reserve(actions.size());
  for (const auto& act : actions) {
    auto v = std::make_shared<Values>();
    v->uc = act.total;
    v->sc.assign(act.size(), 0.0);
    values_.push_back(std::move(v));
  }
  owned_.assign(actions.size(), false);
  seeded_.assign(model_->users().size(), false);
}

CreditState::Values& CreditState::writable(std::uint32_t action) {
  if (!owned_[action]) {
    values_[action] = std::make_shared<Values>(*values_[action]);
    owned_[action] = true;
  }
  return *values_[action];
}

bool CreditState::contains(UserId x) const {
  if (auto d = model_->dense_index(x)) return seeded_[*d];
  return outside_seeds_.count(x) != 0;
}

double CreditState::marginal_gain(UserId x) const {
  auto d = model_->dense_index(x);
  if (!d) {
    if (outside_seeds_.count(x)) {
      throw ContractViolation("user " + std::to_string(x) + " is already a seed");
    }
    return 0.0;
  }
  return marginal_gain_dense(*d);
}

double CreditState::marginal_gain_dense(std::uint32_t dense) const {
  if (seeded_[dense]) {
    throw ContractViolation("user " + std::to_string(model_->users()[dense]) +
                            " is already a seed");
  }
  const auto& actions = model_->actions();
  double gain = 0.0;
  for (const auto& m : model_->memberships(dense)) {
    const auto& act = actions[m.action];
    const auto& vals = *values_[m.action];
    double reach = 0.0;
    for (auto p = act.row_ptr[m.local]; p < act.row_ptr[m.local + 1]; ++p) {
      reach += vals.uc[p] * act.node_weight[act.row_recv[p]];
    }
    gain += reach * (1.0 - vals.sc[m.local]);
  }
  return gain;
}

void CreditState::absorb(UserId x) {
  auto d = model_->dense_index(x);
  if (!d) {
    if (!outside_seeds_.insert(x).second) {
      throw ContractViolation("user " + std::to_string(x) + " is already a seed");
    }
    seeds_.push_back(x);
    return;
  }
  if (seeded_[*d]) throw ContractViolation("user " + std::to_string(x) + " is already a seed");
  absorb_dense(*d);
  seeded_[*d] = true;
  seeds_.push_back(x);
}

void CreditState::absorb_dense(std::uint32_t dense) {
  const auto& actions = model_->actions();
  std::vector<std::pair<std::uint32_t, double>> row, col;
  for (const auto& m : model_->memberships(dense)) {
    const auto& act = actions[m.action];
    Values& vals = writable(m.action);
    const auto x = m.local;

    row.clear();
    for (auto p = act.row_ptr[x]; p < act.row_ptr[x + 1]; ++p) {
      if (vals.uc[p] != 0.0) row.emplace_back(act.row_recv[p], vals.uc[p]);
    }
    col.clear();
    for (auto q = act.col_ptr[x]; q < act.col_ptr[x + 1]; ++q) {
      const double c = vals.uc[act.col_pos[q]];
      if (c != 0.0) col.emplace_back(act.col_src[q], c);
    }

    // SC[a][u] += UC_old[a][x][u] * (1 - SC_old[a][x]).
    const double residual = 1.0 - vals.sc[x];
    for (const auto& [u, credit] : row) vals.sc[u] += credit * residual;

    // UC[a][v][u] -= UC_old[a][v][x] * UC_old[a][x][u]. Every (v, u) pair
    // here is connected through x, so the entry exists in row v; both lists
    // are ascending by receiver.
    for (const auto& [v, to_x] : col) {
      auto p = act.row_ptr[v];
      for (const auto& [u, from_x] : row) {
        while (act.row_recv[p] != u) ++p;
        const double updated = vals.uc[p] - to_x * from_x;
        vals.uc[p] = updated > 0.0 ? updated : 0.0;
      }
    }
  }
}

double CreditState::sigma() const {
  const auto& actions = model_->actions();
  double total = 0.0;
  for (std::size_t a = 0; a < actions.size(); ++a) {
    const auto& act = actions[a];
    const auto& sc = values_[a]->sc;
    for (std::size_t i = 0; i < act.size(); ++i) total += sc[i] * act.node_weight[i];
  }
  return total;
}

double CreditState::action_sigma(ActionId a) const {
  const auto* act = model_->find_action(a);
  if (!act) return 0.0;
  const auto& sc = values_[static_cast<std::size_t>(act - model_->actions().data())]->sc;
  double total = 0.0;
  for (double v : sc) total += v;
  return total;
}

double CreditState::uc(ActionId a, UserId v, UserId u) const {
  const auto* act = model_->find_action(a);
  if (!act) return 0.0;
  auto lv = act->local_index(v);
  auto lu = act->local_index(u);
  if (!lv || !lu) return 0.0;
  auto pos = find_entry(*act, *lv, *lu);
  if (!pos) return 0.0;
  return values_[static_cast<std::size_t>(act - model_->actions().data())]->uc[*pos];
}

double CreditState::sc(ActionId a, UserId u) const {
  const auto* act = model_->find_action(a);
  if (!act) return 0.0;
  auto lu = act->local_index(u);
  if (!lu) return 0.0;
  return values_[static_cast<std::size_t>(act - model_->actions().data())]->sc[*lu];
}

// ---------------------------------------------------------------------------
// PathCreditState

PathCreditState::PathCreditState(std::shared_ptr<const CreditModel> model)
    : model_(std::move(model)) {
  actions_.resize(model_->actions().size());
  seeded_.assign(model_->users().size(), false);
}

bool PathCreditState::contains(UserId x) const {
  if (auto d = model_->dense_index(x)) return seeded_[*d];
  return outside_seeds_.count(x) != 0;
}

void PathCreditState::forward(std::uint32_t action, std::uint32_t x) const {
  const auto& act = model_->actions()[action];
  const auto& seeds = actions_[action];
  if (scratch_.size() < act.size()) {
    scratch_.resize(act.size());
    stamp_.resize(act.size(), 0);
  }
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  // The pristine row of x lists every node x can reach, in topological order.
  for (auto q = act.row_ptr[x]; q < act.row_ptr[x + 1]; ++q) {
    const auto j = act.row_recv[q];
    double credit = 0.0;
    if (j == x) {
      credit = 1.0;
    } else if (!seeds.seeded[j]) {
      for (auto p = act.parent_ptr[j]; p < act.parent_ptr[j + 1]; ++p) {
        const auto v = act.parent_idx[p];
        if (stamp_[v] == epoch_) credit += scratch_[v] * act.gamma[p];
      }
    }
    scratch_[j] = credit;
    stamp_[j] = epoch_;
  }
}

double PathCreditState::residual_reach(std::uint32_t action, std::uint32_t x) const {
  const auto& act = model_->actions()[action];
  const auto& seeds = actions_[action];
  if (seeds.sc.empty() || seeds.last_seed < x) return act.weighted_reach[x];
  forward(action, x);
  double reach = 0.0;
  for (auto q = act.row_ptr[x]; q < act.row_ptr[x + 1]; ++q) {
    const auto j = act.row_recv[q];
    reach += scratch_[j] * act.node_weight[j];
  }
  return reach;
}

double PathCreditState::marginal_gain(UserId x) const {
  auto d = model_->dense_index(x);
  if (!d) {
    if (outside_seeds_.count(x)) {
      throw ContractViolation("user " + std::to_string(x) + " is already a seed");
    }
    return 0.0;
  }
  if (seeded_[*d]) throw ContractViolation("user " + std::to_string(x) + " is already a seed");
  double gain = 0.0;
  for (const auto& m : model_->memberships(*d)) {
    const auto& seeds = actions_[m.action];
    const double covered = seeds.sc.empty() ? 0.0 : seeds.sc[m.local];
    if (covered >= 1.0) continue;
    gain += (1.0 - covered) * residual_reach(m.action, m.local);
  }
  return gain;
}

void PathCreditState::absorb(UserId x) {
  auto d = model_->dense_index(x);
  if (!d) {
    if (!outside_seeds_.insert(x).second) {
      throw ContractViolation("user " + std::to_string(x) + " is already a seed");
    }
    seeds_.push_back(x);
    return;
  }
  if (seeded_[*d]) throw ContractViolation("user " + std::to_string(x) + " is already a seed");
  for (const auto& m : model_->memberships(*d)) {
    const auto& act = model_->actions()[m.action];
    auto& seeds = actions_[m.action];
    if (seeds.sc.empty()) {
      seeds.sc.assign(act.size(), 0.0);
      seeds.seeded.assign(act.size(), 0);
    }
    const auto x_local = m.local;
    const double residual = 1.0 - seeds.sc[x_local];
    if (residual > 0.0) {
      // Gamma_{S+x,u} = Gamma_{S,u} + Gamma^{V-S}_{x,u} (1 - Gamma_{S,x}).
      forward(m.action, x_local);
      for (auto q = act.row_ptr[x_local]; q < act.row_ptr[x_local + 1]; ++q) {
        const auto j = act.row_recv[q];
        const double add = scratch_[j];
        if (add != 0.0) seeds.sc[j] = std::min(1.0, seeds.sc[j] + add * residual);
      }
    }
    seeds.sc[x_local] = 1.0;
    seeds.seeded[x_local] = 1;
    if (seeds.last_seed == kNone || x_local > seeds.last_seed) seeds.last_seed = x_local;
  }
  seeded_[*d] = true;
  seeds_.push_back(x);
}

double PathCreditState::sigma() const {
  double total = 0.0;
  for (std::size_t a = 0; a < actions_.size(); ++a) {
    const auto& sc = actions_[a].sc;
    const auto& weight = model_->actions()[a].node_weight;
    for (std::size_t i = 0; i < sc.size(); ++i) total += sc[i] * weight[i];
  }
  return total;
}

double PathCreditState::sc(ActionId a, UserId u) const {
  const auto* act = model_->find_action(a);
  if (!act) return 0.0;
  auto lu = act->local_index(u);
  const auto& sc = actions_[static_cast<std::size_t>(act - model_->actions().data())].sc;
  if (!lu || sc.empty()) return 0.0;
  return sc[*lu];
}

// ---------------------------------------------------------------------------
// From-scratch evaluation

std::vector<double> set_credit(const CreditModel::Action& action,
                               const std::unordered_set<UserId>& seeds) {
  std::vector<double> credit(action.size(), 0.0);
  for (std::size_t u = 0; u < action.size(); ++u) {
    if (seeds.count(action.nodes[u])) {
      credit[u] = 1.0;
      continue;
    }
    double sum = 0.0;
    for (auto p = action.parent_ptr[u]; p < action.parent_ptr[u + 1]; ++p) {
      sum += credit[action.parent_idx[p]] * action.gamma[p];
    }
    credit[u] = sum;
  }
  return credit;
}

double evaluate_sigma(const CreditModel& model, std::span<const UserId> seeds) {
  const std::unordered_set<UserId> set(seeds.begin(), seeds.end());
  double total = 0.0;
  for (const auto& act : model.actions()) {
    const auto credit = set_credit(act, set);
    for (std::size_t u = 0; u < act.size(); ++u) total += credit[u] * act.node_weight[u];
  }
  return total;
}

double action_estimate(const CreditModel& model, ActionId a, std::span<const UserId> seeds) {
  const auto* act = model.find_action(a);
  if (!act) throw DomainError("unknown action " + std::to_string(a));
  const std::unordered_set<UserId> set(seeds.begin(), seeds.end());
  double total = 0.0;
  for (double c : set_credit(*act, set)) total += c;
  return total;
}

}  // namespace mcd
