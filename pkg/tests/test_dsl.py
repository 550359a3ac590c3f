"""Parser, validation diagnostics, round-trips, determinism."""

from fractions import Fraction as F

import pytest

from kappa_hopf.dsl import (
    DslError,
    parse_presentation,
    parse_source,
    print_presentation,
)
from kappa_hopf.models import CATALOG_NAMES, load_model
from kappa_hopf.scalars import GaussianRational, HSeries, Poly, RationalFn


MINI = """
presentation mini {
  generators: M[1] M[2] M[3] P[1] P[2] P[3];
  relation M[i]*M[j] - M[j]*M[i] = I*eps(i,j,k)*M[k];
  relation M[i]*P[j] - P[j]*M[i] = I*eps(i,j,k)*P[k];
  relation P[i]*P[j] - P[j]*P[i] = 0;
}
"""


def test_parse_relation_to_oriented_rule():
    p = parse_presentation(MINI)
    m1, p2 = p.gen_index("M", (1,)), p.gen_index("P", (2,))
    corr = p.rules[(p2, m1)]
    # P[2]*M[1] -> M[1]*P[2] + [P_2, M_1] = M[1]P[2] - i eps(1,2,3) P[3]
    assert len(corr) == 1
    c, w = corr[0]
    assert w == ((p.gen_index("P", (3,)), 1),)
    assert c == HSeries.const(GaussianRational(0, -1))


def test_empty_presentation_is_valid():
    p = parse_presentation("presentation empty { generators: ; }")
    assert p.gens == ()
    assert p.missing_digrams() == []


def test_round_trip_all_shipped_presentations():
    for name in CATALOG_NAMES:
        model = load_model(name)
        from kappa_hopf.ncalg import Presentation
        if not isinstance(model, Presentation):
            continue
        text = print_presentation(model)
        again = parse_presentation(text)
        assert again == model, name


def test_round_trip_relation_example():
    text = """
presentation toy {
  generators: a tau;
  relation tau*a - a*tau = I*h*a;
}
"""
    p = parse_presentation(text)
    q = parse_presentation(print_presentation(p))
    assert p == q


def test_determinism_same_text_same_presentation():
    a = parse_presentation(MINI)
    b = parse_presentation(MINI)
    assert a == b and a is not b


def test_explicit_order_section():
    text = """
presentation ordered {
  generators: y x;
  order: x y;
  relation y*x - x*y = I*h*x;
}
"""
    p = parse_presentation(text)
    assert [g.label() for g in p.gens] == ["x", "y"]
    assert (1, 0) in p.rules
    # order must cover every generator exactly once
    bad = text.replace("order: x y;", "order: x;")
    module, diags = parse_source(bad)
    assert module is None
    assert any("order section" in d.message for d in diags)


def test_syntax_error_carries_span():
    module, diags = parse_source("presentation broken { generators: x %; }", "f.hopf")
    assert module is None
    assert diags and diags[0].severity == "error"
    assert diags[0].line == 1 and diags[0].col > 1
    assert "f.hopf" in str(diags[0])


def test_unknown_symbol_diagnostic():
    bad = """
presentation bad {
  generators: x y;
  relation y*x - x*y = nosuch;
}
"""
    module, diags = parse_source(bad)
    assert module is None
    assert any("unknown symbol" in d.message for d in diags)


def test_index_out_of_range_diagnostic():
    bad = MINI.replace("I*eps(i,j,k)*P[k];", "I*eps(i,j,k)*P[k] + delta(i,j)*P[4];")
    module, diags = parse_source(bad)
    assert module is None
    assert any("out of range" in d.message or "unknown generator" in d.message
               for d in diags)


def test_unbalanced_index_diagnostic():
    bad = """
presentation bad {
  generators: P[1] P[2] P[3] Q[1] Q[2] Q[3];
  relation P[i]*Q[j] - Q[j]*P[i] = I*Q[l];
}
"""
    module, diags = parse_source(bad)
    assert module is None
    assert any("unbalanced index" in d.message for d in diags)


def test_missing_digram_diagnostic():
    bad = """
presentation bad {
  generators: x y z;
  relation y*x - x*y = 0;
}
"""
    module, diags = parse_source(bad)
    assert module is None
    assert any("no relation covers digrams" in d.message for d in diags)


def test_unorientable_relation_diagnostic():
    # left side must be a commutator difference
    bad = """
presentation bad {
  generators: x y;
  relation y*x + x*y = 0;
}
"""
    module, diags = parse_source(bad)
    assert module is None
    assert any("commutator difference" in d.message for d in diags)


def test_kappa_sugar_and_pole_rejection():
    ok = """
presentation sugared {
  generators: x y;
  relation y*x - x*y = (1/(4*kappa^2))*h^2*h*x;
}
"""
    p = parse_presentation(ok)
    (c, w), = p.rules[(1, 0)]
    # 1/(4 kappa^2) = h^2/4, times h^3
    assert c == HSeries({5: RationalFn(Poly.const(F(1, 4)))})
    bad = """
presentation poley {
  generators: x y;
  relation y*x - x*y = kappa*x;
}
"""
    module, diags = parse_source(bad)
    assert module is None
    assert any("pole" in d.message for d in diags)


def test_dsl_error_wrapper():
    with pytest.raises(DslError):
        parse_presentation("presentation x { generators: a b; }")
