"""Group-algebra duality and the Poisson structure that quantizes to the
quantum group.

The classical pairing <Phi, X> is computed in a faithful 5x5 matrix model
of the Galilei group, fixed by the printed single-generator table.  The
Poisson bracket {f,g} defined by <{f,g},X> = -i <f (x) g, sigma(X)> then
reproduces every commutator of the quantum group, bracket by bracket.
"""

from kappa_hopf import Poly, pair
from kappa_hopf.duality import PairingEngine, model_4d, sigma_matrix_terms, quantization_crosscheck
from kappa_hopf.hopf import cocommutator
from kappa_hopf.models import load_model

model = model_4d()
print("<tau, P0> =", pair(Poly.var("tau"), ("P0",)))
print("<R[1,2], M[3]> =", pair(Poly.var("R[1,2]"), ("M[3]",)))
print("<a[1], L[1] P0> =", pair(Poly.var("a[1]"), ("L[1]", "P0")))
print("<v[2], M[3] L[1]> =", pair(Poly.var("v[2]"), ("M[3]", "L[1]")))

kappa = load_model("galilei_algebra_kappa")
classical = load_model("galilei_algebra_classical")
sigma = {}
for gi, g in enumerate(classical.gens):
    w, _ = cocommutator(kappa, (g.name, g.index))
    sigma[gi] = {k: v.coeff(0).const_value() for k, v in w.pairs.items()}
engine = PairingEngine(model, [g.label() for g in classical.gens],
                       sigma_matrix_terms(classical, sigma))

group = load_model("galilei_group_kappa")
checks = quantization_crosscheck(group, engine)
print(f"\nquantization crosscheck: {len(checks)} brackets, "
      f"{sum(1 for c in checks if c.status != 'pass')} failures")
print("e.g.", checks[0].check_id, "->", checks[0].status,
      f"({checks[0].detail})")
