#ifndef RIFT_RULE_MANAGER_HPP
#define RIFT_RULE_MANAGER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rift/gmm.hpp"
#include "rift/rule.hpp"

namespace rift {

struct ArchivedRule {
    Rule rule;
    int64_t pruned_at = 0;  // sample counter at prune time
};

// Bounded FIFO of pruned rules kept for possible recall.
struct RuleArchive {
    std::vector<ArchivedRule> items;
    int cap = 50;

    void push(Rule r, int64_t when) {
        items.push_back(ArchivedRule{std::move(r), when});
        if (static_cast<int>(items.size()) > cap) items.erase(items.begin());
    }
    bool empty() const { return items.empty(); }
    int size() const { return static_cast<int>(items.size()); }
};

namespace rule_manager {

// Statistical contribution of a rule: its consequent magnitude weighted by
// the input density mass its premise covers, upper and lower bounds blended
// by the crisp design factor q.
double rule_significance(const Rule& rule, double beta_norm, double q, const GmmDensity& gmm,
                         double u);

// Remoteness threshold delta2 = exp(-chi2_quantile(1 - alpha, p)).
double remoteness_threshold(int p, double alpha);

// Crisp spatial firing q * r_lower + (1 - q) * r_upper.
double crisp_firing(const IntervalFiring& f, double q);

// Candidate rule built from a sample: centroid x +/- delta, isotropic
// spread from the distance to the two nearest centroid midpoints, so the
// new fuzzy set still reaches its neighbours with membership epsilon.
// Premise and population fields only; consequent comes from init_consequent.
Rule make_hypothetical(std::span<const Rule> rules, const Vec& x, double delta, double epsilon);

// First rule of an empty model: centroid x +/- delta, fixed isotropic
// spread (no neighbour exists to derive one from).
Rule make_bootstrap(const Vec& x, double delta, double epsilon, double init_spread, int n_out,
                    double lambda_init, double omega);

// Consequent of a freshly grown rule: winner's weights, omega * I covariance.
void init_consequent(Rule& fresh, const Rule& winner, double omega);

// Growth test: the hypothetical out-scores every live rule AND the sample
// is remote from all of them (max crisp spatial firing <= delta2).
struct GrowthDecision {
    bool grow = false;
    double hypothetical_significance = 0.0;
    double max_live_significance = 0.0;
    double max_crisp_firing = 0.0;
};
GrowthDecision should_grow(std::span<const Rule> rules, const Rule& hypothetical,
                           std::span<const double> live_significance, double hypothetical_beta_norm,
                           double q, const GmmDensity& gmm, double u, double delta2,
                           std::span<const IntervalFiring> firings);

// Bayesian winner: argmax of population prior times crisp spatial firing.
int select_winner(std::span<const Rule> rules, std::span<const IntervalFiring> firings, double q);

// Absorb a sample into the winner: running-mean centroid shift, rank-one
// inverse covariance recursion (exact Sherman-Morrison counterpart of
// cov <- (1-a) cov + a d d'), population statistics.
// Returns false when the covariance step had to be skipped.
bool update_premise(Rule& winner, const Vec& x);

// Prune rules whose low-utility streak filled a whole window of accepted
// samples (the engine feeds the streaks). At least one rule always
// survives. Returns pruned indices (ascending, positions at call time)
// after archiving them.
std::vector<int> prune_rules(std::vector<Rule>& rules, RuleArchive& archive, int64_t window,
                             int64_t now);

// Before growing, look for an archived rule that already covers x, is at
// least as significant as the hypothetical, and predicts the current
// target at least as well as the live model does (so stale rules cannot
// ride back in on coverage alone). Reinstates it and returns its new index
// in the rule list.
std::optional<int> try_recall(std::vector<Rule>& rules, RuleArchive& archive, const Vec& x,
                              const Vec& x_ext, double hypothetical_significance, double q,
                              const GmmDensity& gmm, double u, double delta2, const Vec& target,
                              const Vec& current_prediction);

// Lowest-utility victim for capacity eviction, never the winner.
int lowest_utility_index(std::span<const Rule> rules, int protect);

}  // namespace rule_manager
}  // namespace rift

#endif
