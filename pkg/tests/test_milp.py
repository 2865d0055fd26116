import itertools
from decimal import Decimal

import pytest
from hypothesis import given, settings

from mmbp.graph import Instance, parse_instance
from mmbp.milp import (
    LPFormatError,
    Witness,
    build_model,
    check_solution,
    emit_lp,
    format_solution,
    parse_lp,
    parse_solution,
    witness_from_bisection,
    witness_from_values,
)

from oracles import instances

SINGLE = "2 1 1\n1 2 3.000\n"


def row_text(lp: str, name: str) -> str:
    return next(line.strip() for line in lp.splitlines() if line.strip().startswith(f"{name}:"))


def test_counts_k4(k4):
    model = build_model(k4)
    assert len(model.constraints) == 2 + 12 + 1
    assert len(model.binaries) == 4 + 6
    assert model.continuous == ("U",)


def test_single_edge_transcription():
    model = build_model(parse_instance(SINGLE))
    (dim,) = model.dim_constraints
    assert dim.terms == ((1000, "U"), (-3000, "y1_2")) and dim.sense == "<=" and dim.rhs == 0
    (lb,) = model.cut_lb_constraints
    assert lb.terms == ((1000, "x1"), (1000, "x2"), (-1000, "y1_2")) and lb.sense == ">=" and lb.rhs == 0
    (ub,) = model.cut_ub_constraints
    assert ub.terms == ((1000, "x1"), (1000, "x2"), (1000, "y1_2")) and ub.sense == "<=" and ub.rhs == 2000
    bal = model.balance_constraint
    assert bal.terms == ((1000, "x1"), (1000, "x2")) and bal.sense == "=" and bal.rhs == 1000


def test_zero_edge_model_forces_zero():
    model = build_model(Instance(4, 3, ()))
    assert [r.terms for r in model.dim_constraints] == [((1000, "U"),)] * 3
    lp = emit_lp(model)
    assert row_text(lp, "dim2") == "dim2: U <= 0"


def test_lp_lines():
    lp = emit_lp(build_model(parse_instance(SINGLE)))
    assert row_text(lp, "dim1") == "dim1: U - 3.000 y1_2 <= 0"
    assert row_text(lp, "lb1_2") == "lb1_2: x1 + x2 - y1_2 >= 0"
    assert row_text(lp, "ub1_2") == "ub1_2: x1 + x2 + y1_2 <= 2"
    assert [l.strip() for l in lp.splitlines()][1:4] == ["Maximize", "obj: U", "Subject To"]
    assert lp.rstrip().endswith("End")


def test_balance_line_k4(k4):
    assert row_text(emit_lp(build_model(k4)), "bal") == "bal: x1 + x2 + x3 + x4 = 2"


def test_unit_weight_stays_explicit_in_dim_rows():
    lp = emit_lp(build_model(parse_instance("2 1 1\n1 2 1.000\n")))
    assert row_text(lp, "dim1") == "dim1: U - 1.000 y1_2 <= 0"


def test_emit_is_deterministic(k4):
    assert emit_lp(build_model(k4)) == emit_lp(build_model(k4))


def test_long_rows_wrap_and_round_trip():
    n = 12
    edges = [(u, v, [1000 + u * 37 + v]) for u, v in itertools.combinations(range(1, n + 1), 2)]
    inst = Instance.from_edges(n, 1, edges)
    lp = emit_lp(build_model(inst))
    assert max(len(line) for line in lp.splitlines()) < 200
    assert parse_lp(lp) == build_model(inst)


@settings(max_examples=60, deadline=None)
@given(instances(max_n=10))
def test_lp_round_trip(inst):
    model = build_model(inst)
    assert parse_lp(emit_lp(model)) == model
    assert model.edge_weights() == [e.weights for e in inst.edges]


@pytest.mark.parametrize(
    "mutate",
    [
        lambda t: t.replace("End\n", ""),
        lambda t: t.replace("3.000", "3.0001"),
        lambda t: t.replace("3.000", "3.00"),
        lambda t: t.replace("y1_2 <=", "z9 <="),
        lambda t: t.replace("Bounds", "Bounds\n U <= 10"),
        lambda t: t.replace("Subject To", "Subject"),
        lambda t: t.replace("bal:", "foo:"),
        lambda t: t.replace("obj: U", "obj: x1"),
        lambda t: t.replace("- 3.000 y1_2", "- 3.000"),
        lambda t: t + "stray\n",
    ],
)
def test_parse_lp_rejects(mutate):
    text = emit_lp(build_model(parse_instance(SINGLE)))
    with pytest.raises(LPFormatError):
        parse_lp(mutate(text))


def test_optimum_witness_is_feasible_and_tight(k4):
    w = witness_from_bisection(k4, [1, 4])
    assert w.x == (1, 0, 0, 1)
    cut = {(k4.edges[i].u, k4.edges[i].v) for i, y in enumerate(w.y) if y}
    assert cut == {(1, 2), (1, 3), (2, 4), (3, 4)}
    assert w.u_value == 8000
    report = check_solution(build_model(k4), w)
    assert report.feasible and report.tight and report.violated == []


def test_dropped_cut_edge_violates_dim_family(k4):
    w = witness_from_bisection(k4, [1, 4])
    y = list(w.y)
    y[0] = 0  # edge (1,2): coordinate sums become (5, 7) < U = 8
    report = check_solution(build_model(k4), Witness(w.x, tuple(y), w.u_value))
    assert not report.families["dim"]
    assert set(report.violated) == {"dim1", "dim2"}
    assert report.families["cut_lb"] and report.families["cut_ub"]
    assert not report.feasible and not report.tight


def test_dropped_cut_edge_with_lower_u_is_feasible_not_tight(k4):
    w = witness_from_bisection(k4, [1, 4])
    y = list(w.y)
    y[0] = 0
    report = check_solution(build_model(k4), Witness(w.x, tuple(y), 5000))
    assert report.feasible and not report.tight


def test_unbalanced_x_violates_balance(k4):
    report = check_solution(build_model(k4), Witness((0, 0, 0, 0), (0,) * 6, 0))
    assert not report.families["balance"]
    assert report.violated == ["bal"]


def test_edge_inside_side_cannot_be_counted(k4):
    w = witness_from_bisection(k4, [1, 4])
    y = list(w.y)
    y[2] = 1  # edge (1,4), both endpoints in S
    report = check_solution(build_model(k4), Witness(w.x, tuple(y), w.u_value))
    assert report.violated == ["ub1_4"]


def test_non_binary_and_negative_u_fail_domain(k4):
    model = build_model(k4)
    assert not check_solution(model, Witness((1, 0, 0, 1), (2, 0, 0, 0, 0, 0), 0)).families["domain"]
    assert not check_solution(model, Witness((1, 0, 0, 1), (0,) * 6, -1)).families["domain"]


def test_size_mismatch(k4):
    with pytest.raises(ValueError):
        check_solution(build_model(k4), Witness((1, 0, 0), (0,) * 6, 0))


def test_zero_edge_witness():
    inst = Instance(6, 2, ())
    w = witness_from_bisection(inst, [1, 2, 3])
    assert w.y == () and w.u_value == 0
    assert check_solution(build_model(inst), w).tight


def test_complement_witness(k4):
    a = witness_from_bisection(k4, [1, 4])
    b = witness_from_bisection(k4, [2, 3])
    assert a.y == b.y and a.u_value == b.u_value
    assert all(p + q == 1 for p, q in zip(a.x, b.x))


def test_solution_text_round_trip(k4):
    model = build_model(k4)
    w = witness_from_bisection(k4, [1, 4])
    assert witness_from_values(model, parse_solution(format_solution(w, model))) == w


def test_solver_style_values():
    model = build_model(parse_instance(SINGLE))
    values = {"U": Decimal("2.99999999"), "x1": Decimal("1.0000000001"), "y1_2": Decimal("1")}
    w = witness_from_values(model, values)
    assert w == Witness((1, 0), (1,), 3000)
    with pytest.raises(ValueError):
        witness_from_values(model, {"x1": Decimal("0.5")})
    with pytest.raises(ValueError):
        witness_from_values(model, {"q": Decimal("1")})
    with pytest.raises(ValueError):
        parse_solution("x1 1 2\n")
