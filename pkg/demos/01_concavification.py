"""Walk through the belief-concavification route on the benchmark insider game.

The defender's prior-utility function v(p) is piecewise linear in the belief
p = P(honeypot). Splitting the prior into posteriors with a signaling scheme
lets the defender reach the least concave majorant of v instead of v itself.
This script prints the linear pieces, the concave closure, the optimal split
at p = 0.6, and checks that the LP over incentive-compatible security
policies reaches the same value.
"""

import numpy as np

import decmech as dm


def print_pwl(label, f):
    print(label)
    for k in range(len(f.slopes)):
        lo, hi = f.breakpoints[k], f.breakpoints[k + 1]
        print(f"  p in [{lo:.4f}, {hi:.4f}]: {f.intercepts[k]:+.4f} "
              f"{f.slopes[k]:+.4f} * p")


def main():
    game, beliefs, mod = dm.insider_game()

    pwl = dm.prior_utility_pwl(game, beliefs.b_D, mod)
    print_pwl("prior utility v(p), piecewise linear:", pwl)

    env = dm.concave_closure(game, beliefs.b_D, mod)
    print_pwl("\nconcave closure V(p):", env)

    p0 = 0.6
    print(f"\nat prior p = {p0}:")
    print(f"  no information:    v({p0}) = {pwl.value(p0):+.5f}")
    print(f"  optimal generator: V({p0}) = {env.value(p0):+.5f}")

    # same value via the LP over incentive-compatible security policies
    profile = dm.BeliefProfile.overt([p0, 1.0 - p0], beliefs.b_D)
    report = dm.optimal_generator(game, profile, mod)
    print(f"  LP over policies:  {report.objective_value:+.5f}")
    print(f"  agreement gap:     {abs(report.objective_value - env.value(p0)):.2e}")

    # decompose the LP solution into posteriors: weight(s) = sum_x b(x)pi(s|x)
    pi = report.generator.pi
    weights = profile.b @ pi
    print("\ninduced posteriors:")
    for s, weight in enumerate(weights):
        if weight > 1e-9:
            post = profile.b * pi[:, s] / weight
            actions = report.generator.policy_space.actions_matrix()[s]
            print(f"  policy {tuple(int(a) for a in actions)}: "
                  f"weight {weight:.4f}, posterior p = {post[0]:.4f}, "
                  f"v(post) = {pwl.value(post[0]):+.5f}")


if __name__ == "__main__":
    main()
