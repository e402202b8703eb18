#ifndef RIFT_GATE_HPP
#define RIFT_GATE_HPP

#include <cmath>
#include <span>

#include "rift/rule.hpp"

namespace rift {

// Adaptive acceptance threshold for the entropy-based sample gate.
struct GateState {
    double delta1 = 0.34657359027997264;  // ln(2)/2
    double step = 0.01;
    int max_rules_seen = 1;

    static constexpr double kFloor = 1e-4;

    void observe_rule_count(int r) {
        if (r > max_rules_seen) max_rules_seen = r;
    }
    double cap() const { return std::log(static_cast<double>(max_rules_seen)) + 1.0; }
    void clamp() {
        const double hi = cap();
        if (delta1 < kFloor) delta1 = kFloor;
        if (delta1 > hi) delta1 = hi;
    }
};

namespace gate {

// Mean squared Euclidean distance from x to the rule's absorbed population,
// recovered from the rule's running sums (no sample is revisited).
double local_density(const Rule& rule, const Vec& x);

// P(i) proportional to 1 / (1 + local_density_i); sums to one.
Vec neighborhood_probability(std::span<const Rule> rules, const Vec& x);

// H = -sum p ln p with 0 ln 0 = 0.
double esem_entropy(const Vec& probabilities);

// Accept iff H >= delta1. The threshold rises on accept and falls on
// reject, then gets clamped to [floor, ln(max R seen) + 1].
bool gate_decide(GateState& gate, double entropy);

}  // namespace gate
}  // namespace rift

#endif
