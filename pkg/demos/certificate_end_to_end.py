"""Solve a random instance, then audit the answer against brute force.

The solver returns a mixed leader strategy plus a lower bound on the
optimal value.  For small graphs both can be checked exactly.
"""
from rmvci import solve_rmvci
from rmvci.generators import random_instance, rng_from
from rmvci.oracle import exact_rmvci_matrix_game

rng = rng_from(11)
g, ml, mf = random_instance(rng, 7, leader_kind="partition", follower_kind="graphic")
print(g.vertex_count, "vertices,", g.edge_count, "edges")
print("leader:", ml)
print("follower:", mf)

cert = solve_rmvci(g, ml, mf)
print()
print("surrogate LP value:", round(cert.surrogate_value, 6))
print("support size      :", len(cert.pi_prime))
for p, s in cert.pi_prime.support:
    print(f"   {p:.4f}  protect {sorted(s)}")
print("follower reply    :", sorted(cert.attack_set))

_, opt = exact_rmvci_matrix_game(g, ml, mf)
print()
print(f"lower bound {cert.lower_bound:.4f} <= optimum {opt:.4f} <= achieved {cert.theta_achieved:.4f}")
print(f"achieved / optimum = {cert.theta_achieved / opt:.4f}, certified at most {cert.guaranteed_ratio:.4f}")
