#include "rift/gate.hpp"

#include <cmath>

#include "rift/linalg.hpp"

namespace rift {
namespace gate {

double local_density(const Rule& rule, const Vec& x) {
    const double n = static_cast<double>(rule.n_pop);
    const double cross = linalg::dot(x, rule.coord_sum);
    double d = (n * linalg::squared_norm(x) - 2.0 * cross + rule.sq_sum) / n;
    return d > 0.0 ? d : 0.0;  // rounding can push the exact zero negative
}

Vec neighborhood_probability(std::span<const Rule> rules, const Vec& x) {
    Vec p(rules.size(), 0.0);
    double total = 0.0;
    for (size_t i = 0; i < rules.size(); ++i) {
        p[i] = 1.0 / (1.0 + local_density(rules[i], x));
        total += p[i];
    }
    for (double& v : p) v /= total;
    return p;
}

double esem_entropy(const Vec& probabilities) {
    double h = 0.0;
    for (double p : probabilities)
        if (p > 0.0) h -= p * std::log(p);
    return h > 0.0 ? h : 0.0;
}

bool gate_decide(GateState& gate, double entropy) {
    const bool accept = entropy >= gate.delta1;
    gate.delta1 *= accept ? (1.0 + gate.step) : (1.0 - gate.step);
    gate.clamp();
    return accept;
}

}  // namespace gate
}  // namespace rift
