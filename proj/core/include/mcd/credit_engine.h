#ifndef MCD_CREDIT_ENGINE_H_
#define MCD_CREDIT_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mcd/event_log.h"
#include "mcd/model_learner.h"
#include "mcd/social_graph.h"
#include "mcd/types.h"

namespace mcd {

// Direct credits a receiver hands to its in-neighbors for one action:
// exp(-delay_i / tau_i) normalized to sum to 1. Throws DomainError when the
// spans are empty or of unequal size, or when any delay or tau is not
// positive.
std::vector<double> direct_credits(std::span<const double> delays, std::span<const double> taus);

struct ScanStats {
  std::size_t edges = 0;
  // Edges of some G(a) whose pair never propagated in training.
  std::size_t missing_tau = 0;
  double fallback_tau = 1.0;
};

// Immutable output of the log scanner: for every action the propagation DAG,
// its direct credits, and the total credit Gamma_{v,u}(a) for every pair
// connected by a directed path (diagonal Gamma_{v,v} = 1 included).
class CreditModel {
 public:
  struct Action {
    ActionId id = 0;
    std::vector<UserId> nodes;          // ascending (t_1, user)
    std::vector<std::uint32_t> dense;   // dense user index of each node
    std::vector<double> node_weight;    // 1 / |A_u| of each node

    // Direct credits, CSR by receiver: parents of node i are
    // parent_idx[parent_ptr[i] .. parent_ptr[i+1]) with credits `gamma`.
    std::vector<std::uint32_t> parent_ptr;
    std::vector<std::uint32_t> parent_idx;
    std::vector<double> gamma;

    // Total credits, CSR by source: receivers of source v are
    // row_recv[row_ptr[v] .. row_ptr[v+1]), ascending, starting with v.
    std::vector<std::uint32_t> row_ptr;
    std::vector<std::uint32_t> row_recv;
    std::vector<double> total;  // parallel to row_recv
    // sum_u Gamma_{v,u} / |A_u| over row v.
    std::vector<double> weighted_reach;

    // Column view of the same entries: sources reaching receiver u and the
    // entry's position in the row arrays.
    std::vector<std::uint32_t> col_ptr;
    std::vector<std::uint32_t> col_src;
    std::vector<std::uint32_t> col_pos;

    std::size_t size() const { return nodes.size(); }
    std::size_t entry_count() const { return row_recv.size(); }
    std::optional<std::uint32_t> local_index(UserId u) const;
  };

  struct Membership {
    std::uint32_t action;  // index into actions()
    std::uint32_t local;   // node index within that action
  };

  CreditModel(std::vector<Action> actions, const EventLog& log, ScanStats stats);

  const std::vector<Action>& actions() const { return actions_; }
  const Action* find_action(ActionId a) const;

  // Users appearing in the scanned log, ascending; dense index = position.
  const std::vector<UserId>& users() const { return users_; }
  std::optional<std::uint32_t> dense_index(UserId u) const;
  std::span<const Membership> memberships(std::uint32_t dense) const;
  std::size_t distinct_actions(std::uint32_t dense) const { return distinct_[dense]; }

  // |union over a of V(a)|.
  std::size_t performer_count() const { return users_.size(); }
  std::size_t entry_count() const;
  const ScanStats& stats() const { return stats_; }

  // Gamma_{v,u}(a) before any seed is absorbed; 0 when no path exists.
  double total_credit(ActionId a, UserId v, UserId u) const;

 private:
  std::vector<Action> actions_;
  std::unordered_map<ActionId, std::size_t> action_index_;
  std::vector<UserId> users_;
  std::unordered_map<UserId, std::uint32_t> user_index_;
  std::vector<std::size_t> distinct_;
  std::vector<std::uint32_t> member_ptr_;
  std::vector<Membership> members_;
  ScanStats stats_;
};

// One chronological pass per action over the first performances of `test`.
// Pairs missing from params.tau fall back to params.mean_tau().
std::shared_ptr<const CreditModel> scan_log(const SocialGraph& graph, const LearnedParams& params,
                                            const EventLog& test, unsigned threads = 1);

// Lines `a v u gamma_total` for every stored entry, sorted.
void write_credit_dump(std::ostream& out, const CreditModel& model);

// Mutable credit state for a growing seed set S: the residual total credits
// Gamma^{V-S}_{v,u}(a) (UC) and the set credits Gamma_{S,u}(a) (SC).
// Copies share untouched per-action storage and clone an action's values on
// first write, so a copy of a pristine state is cheap.
class CreditState {
 public:
  explicit CreditState(std::shared_ptr<const CreditModel> model);

  const CreditModel& model() const { return *model_; }

  // sigma(S + x) - sigma(S). Throws ContractViolation if x is in S.
  // Users absent from the scanned log have zero gain.
  double marginal_gain(UserId x) const;
  double marginal_gain_dense(std::uint32_t dense) const;

  // Adds x to S, removing all paths through x from UC and crediting S with
  // x's residual reach in SC. Throws ContractViolation if x is already in S.
  void absorb(UserId x);

  // sigma(S) = sum_u (1/|A_u|) sum_a SC[a][u].
  double sigma() const;
  // sum_u SC[a][u] for one action (0 for unknown actions).
  double action_sigma(ActionId a) const;

  double uc(ActionId a, UserId v, UserId u) const;
  double sc(ActionId a, UserId u) const;

  const std::vector<UserId>& seeds() const { return seeds_; }
  bool contains(UserId x) const;

 private:
  struct Values {
    std::vector<double> uc;  // parallel to Action::row_recv
    std::vector<double> sc;  // per node
  };

  Values& writable(std::uint32_t action);
  void absorb_dense(std::uint32_t dense);

  std::shared_ptr<const CreditModel> model_;
  std::vector<std::shared_ptr<Values>> values_;
  std::vector<bool> owned_;
  std::vector<bool> seeded_;  // per dense user
  std::unordered_set<UserId> outside_seeds_;
  std::vector<UserId> seeds_;
};

// Holds only the set credits SC. Residual credits Gamma^{V-S}_{x,u}(a) are
// recomputed from the direct credits when needed, which makes a fresh copy
// nearly free and an absorb linear in the edges x can reach. Gains and
// values match CreditState. Not safe for concurrent use of one object.
class PathCreditState {
 public:
  explicit PathCreditState(std::shared_ptr<const CreditModel> model);

  const CreditModel& model() const { return *model_; }

  double marginal_gain(UserId x) const;
  void absorb(UserId x);
  double sigma() const;
  double sc(ActionId a, UserId u) const;

  const std::vector<UserId>& seeds() const { return seeds_; }
  bool contains(UserId x) const;

 private:
  static constexpr std::uint32_t kNone = ~std::uint32_t{0};

  struct ActionSeeds {
    std::vector<double> sc;            // empty until the first seed lands here
    std::vector<unsigned char> seeded;
    std::uint32_t last_seed = kNone;   // highest seeded node index
  };

  // Fills scratch_[u] = Gamma^{V-S}_{x,u}(a) for u in x's pristine row.
  void forward(std::uint32_t action, std::uint32_t x) const;
  // sum_u Gamma^{V-S}_{x,u}(a) / |A_u|.
  double residual_reach(std::uint32_t action, std::uint32_t x) const;

  std::shared_ptr<const CreditModel> model_;
  std::vector<ActionSeeds> actions_;
  std::vector<bool> seeded_;
  std::unordered_set<UserId> outside_seeds_;
  std::vector<UserId> seeds_;
  mutable std::vector<double> scratch_;     // indexed by node
  mutable std::vector<std::uint32_t> stamp_;  // scratch_[u] valid iff stamp_[u] == epoch_
  mutable std::uint32_t epoch_ = 0;
};

// From-scratch evaluation through the direct-credit recursion
//   Gamma_{S,u}(a) = 1 if u in S, else sum_{w in N_in(u,a)} Gamma_{S,w}(a) gamma_{w,u}(a),
// independent of the UC/SC update path.
std::vector<double> set_credit(const CreditModel::Action& action,
                               const std::unordered_set<UserId>& seeds);
double evaluate_sigma(const CreditModel& model, std::span<const UserId> seeds);
// sum_{u in V(a)} Gamma_{S,u}(a): the model's estimate of how many performers
// of action a were influenced by S.
double action_estimate(const CreditModel& model, ActionId a, std::span<const UserId> seeds);

}  // namespace mcd

#endif  // MCD_CREDIT_ENGINE_H_
