"""Acceptance criteria.

Each criterion runs the relevant suite(s) end to end at the stated exactness
(zero tolerance everywhere: all arithmetic is Gaussian-rational) and prints
one [PASS]/[FAIL] line with its runtime against the stated budget.  Run with
`pytest -s tests/test_acceptance.py` to see the lines.
"""

import json
import time

import pytest

from kappa_hopf.report import FAIL, INFO, PASS
from kappa_hopf.suites import SuiteConfig, run_suite


def _run(suite, **kw):
    cfg = SuiteConfig(suite=suite, **kw)
    t0 = time.perf_counter()
    rep = run_suite(cfg)
    elapsed = time.perf_counter() - t0
    return rep, elapsed


def _criterion(num, label, ok, elapsed, budget):
    in_time = elapsed < budget
    verdict = "PASS" if (ok and in_time) else "FAIL"
    print(f"CRITERION {num:2d} [{verdict}] {label}: "
          f"{'identities hold' if ok else 'RESIDUALS REMAIN'}, "
          f"{elapsed:.1f}s (budget {budget}s)")
    assert ok, f"criterion {num}: {label}"
    assert in_time, f"criterion {num} exceeded {budget}s ({elapsed:.1f}s)"


def test_criterion_1_group_structure():
    rep, elapsed = _run("group")
    core = [c for c in rep.checks if not c.check_id.startswith("no_orthogonality")]
    aug_ok = all(c.status == PASS for c in core)
    # the orthogonality-stripped run is emitted alongside, never silently
    stripped = [c for c in rep.checks if c.check_id.startswith("no_orthogonality")]
    both_ran = bool(stripped)
    findings_are_reported = all(c.status in (PASS, INFO) for c in stripped)
    _criterion(1, "Eq. 11 confluence + Hopf axioms exactly 0 (quotiented model; "
                  "bare variant emitted with findings)",
               aug_ok and both_ran and findings_are_reported, elapsed, 30)


def test_criterion_2_algebra_structure():
    rep, elapsed = _run("algebra", order=4, mode="both")
    confluence = [c for c in rep.checks if c.check_id.startswith("confluence")]
    assert confluence, "confluence residuals must be reported"
    families = ("coassoc", "counit[", "antipode[")
    axioms = [c for c in rep.checks
              if c.check_id.startswith(families) and "printed" not in c.check_id]
    modes_agree = all("modes agree" in c.detail for c in axioms)
    ok = (all(c.status == PASS for c in axioms) and modes_agree
          and all(c.status == PASS for c in confluence if "printed" not in c.check_id))
    # any nonzero residual (the verbatim-printed [L,L] variant) is surfaced
    surfaced = [c for c in rep.checks
                if "printed_variant" in c.check_id and c.status == INFO
                and c.residual != "0"]
    ok = ok and bool(surfaced) and rep.n_failed == 0
    _criterion(2, "Eq. 1 E-extended: axioms in formal+series mode (order 4) "
                  "agree exactly; printed-variant residual surfaced verbatim",
               ok, elapsed, 60)


def test_criterion_3_casimirs():
    rep, elapsed = _run("casimirs", order=4, mode="both")
    c1 = [c for c in rep.checks if c.check_id.startswith("casimir[C1")]
    c2 = [c for c in rep.checks if c.check_id.startswith("casimir[C2")]
    ok = (len(c1) == 11 and all(c.status == PASS for c in c1)
          and len(c2) == 11 and all(c.status == PASS for c in c2)
          and all("modes agree" in c.detail for c in c1 + c2))
    printed = [c for c in rep.checks if "printed_variant" in c.check_id]
    ok = ok and any(c.status == INFO and c.residual != "0" for c in printed)
    _criterion(3, "Eq. 2 Casimirs: C1/C2 central in both modes, modes agree "
                  "exactly; printed-variant C2 residual reported",
               ok and rep.n_failed == 0, elapsed, 60)


def test_criterion_4_cocommutator():
    rep, elapsed = _run("cocommutator")
    sigma = [c for c in rep.checks if c.check_id.startswith("sigma[")]
    cojac = [c for c in rep.checks if c.check_id.startswith("co_jacobi")]
    ok = (len(sigma) == 10 and all(c.status == PASS for c in sigma)
          and len(cojac) == 45 and all(c.status == PASS for c in cojac))
    _criterion(4, "Eqs. 8-9: sigma matches the printed table for all ten "
                  "generators; co-Jacobi holds",
               ok and rep.n_failed == 0, elapsed, 10)


def test_criterion_5_rmatrix():
    rep, elapsed = _run("rmatrix")
    non = next(c for c in rep.checks if c.check_id == "rmatrix_nonexistence")
    rt = next(c for c in rep.checks if c.check_id == "rmatrix_roundtrip")
    ok = (non.status == PASS and "rank(A) = 44 < rank(A|b) = 45" in non.detail
          and "re-validates" in non.detail
          and rt.status == PASS and "20 random coboundaries" in rt.detail)
    _criterion(5, "no classical r-matrix: infeasibility certificate with "
                  "auditable rank data; 20 round-trips solvable",
               ok and rep.n_failed == 0, elapsed, 10)


def test_criterion_6_bicrossproduct():
    rep, elapsed = _run("bicross", order=4, mode="both")
    tilde = [c for c in rep.checks if c.check_id.startswith("tilde_bicross")]
    group = [c for c in rep.checks if c.check_id.startswith("group_bicross")]
    ok = (tilde and all(c.status == PASS for c in tilde)
          and all("modes agree" in c.detail for c in tilde)
          and group and all(c.status == PASS for c in group))
    coaction_note = [c for c in rep.checks if c.check_id == "printed_coaction[Lt]"]
    ok = ok and coaction_note and coaction_note[0].status == INFO
    _criterion(6, "Eqs. 3-7 reconstruction vanishes through series order 4; "
                  "Eqs. 14-16 exactly; printed delta(Lt) mismatch documented",
               ok and rep.n_failed == 0, elapsed, 60)


def test_criterion_7_spacetime():
    rep, elapsed = _run("spacetime")
    cov = [c for c in rep.checks if c.check_id.startswith("comodule:covariance")]
    ok = len(cov) == 6 and all(c.status == PASS for c in cov)
    _criterion(7, "Eqs. 17-18: [t',x'] and [x',x'] covariance residuals "
                  "vanish exactly",
               ok and rep.n_failed == 0, elapsed, 5)


def test_criterion_8_duality():
    rep, elapsed = _run("duality", degree=6)
    eq13 = next(c for c in rep.checks if c.check_id == "eq13_table")
    a2 = [c for c in rep.checks if c.check_id.startswith("a2_")]
    appendix = [c for c in rep.checks if c.check_id.startswith("appendix_bracket")]
    quant = [c for c in rep.checks if c.check_id.startswith("quantize[")]
    ok = (eq13.status == PASS
          and len(a2) == 3 and all(c.status in (PASS, INFO) for c in a2)
          and all(c.status == PASS for c in a2)  # conventions match verbatim
          and len(appendix) == 27 and all(c.status == PASS for c in appendix)
          and all(c.degree == 6 for c in appendix)
          and len(quant) == 120 and all(c.status == PASS for c in quant))
    _criterion(8, "Eq. 13 table exact; {R,a} verified at degree 6; Eq. 11 "
                  "reproduced by quantization; A2 identities verbatim",
               ok and rep.n_failed == 0, elapsed, 120)


def test_criterion_9_projective_representation():
    rep, elapsed = _run("projrep", order=4)
    by_id = {c.check_id: c for c in rep.checks}
    ok = (by_id["phi1_equation"].status == PASS
          and by_id["cocycle_residual"].status == PASS
          and by_id["cocycle_residual"].order == 3
          and all(by_id[f"rep_compose[n={n}]"].status == PASS for n in (0, 1, 2, 3))
          and all(by_id[f"rep_compose[n={n}]"].order == 3 for n in (0, 1, 2, 3))
          and by_id["mutation[phi1_deleted]"].status == PASS
          and by_id["mutation[omega_identity]"].status == PASS)
    _criterion(9, "phi1 solves Eq. 27 exactly; Eq. 20 cocycle holds at order 3; "
                  "Eq. 19 composition for n in 0..3 through h^3; mutations fail "
                  "at the predicted orders",
               ok and rep.n_failed == 0, elapsed, 300)


def test_criterion_10_determinism_and_oracles():
    t0 = time.perf_counter()
    cfg = dict(order=3, mode="both", seed=42)
    rep1, _ = _run("all", **cfg)
    rep2, _ = _run("all", **cfg)
    elapsed = time.perf_counter() - t0
    same = rep1.to_json() == rep2.to_json()
    pf1 = next(c for c in rep1.checks if c.check_id == "prefilter_agreement")
    agree = pf1.status == PASS and "0 of" not in pf1.detail.split(" residual")[0]
    counted = int(pf1.detail.split(" of ")[1].split(" ")[0]) > 500
    _criterion(10, "run_suite(all) byte-identical across two seeded runs; "
                   "random-substitution prefilters agree with every exact "
                   "verdict (counted)",
               same and pf1.status == PASS and counted
               and rep1.n_failed == 0 and rep2.n_failed == 0,
               elapsed, 600)
