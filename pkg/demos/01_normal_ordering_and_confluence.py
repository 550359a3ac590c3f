"""Normal ordering and confluence.

The engine represents the kappa-deformed Galilei algebra as a finitely
presented algebra with a fixed PBW order (M, L, P, P0, then the formal
grouplike EE = e^{P0/2kappa}).  Every out-of-order digram has one oriented
rewrite rule, so every element has a unique normal form, and the diamond
lemma overlap check replaces the Jacobi identity (which cannot even be
stated directly: the [L,L] bracket has a cubic right-hand side).
"""

from kappa_hopf import commutator, confluence_residual, confluence_triples, normal_order
from kappa_hopf.models import load_model

kappa = load_model("galilei_algebra_kappa")

# [L_1, P0] = i P_1, straight from the rewrite rules
L1 = kappa.gen_element("L", (1,))
P0 = kappa.gen_element("P0")
print("[L_1, P0] =", commutator(L1, P0).render())

# the deformed boost bracket: cubic right-hand side, exactly normal ordered
L2 = kappa.gen_element("L", (2,))
print("[L_1, L_2] =", commutator(L1, L2).render())

# a deliberately scrambled word and its unique PBW normal form
E = kappa.gen_element("EE")
word = P0 * L1 * E * kappa.gen_element("M", (2,))
print("\nP0 * L_1 * E * M_2  normal-orders to:")
print("  ", normal_order(word).render())

# the overlap check: every triple z > y > x reduces the same way down
# both reduction paths
triples = confluence_triples(kappa)
bad = [t for t in triples if not confluence_residual(kappa, t).is_zero()]
print(f"\nconfluence: {len(triples)} overlap triples, {len(bad)} nonzero residuals")
