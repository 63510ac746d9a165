import random

import pytest

from corpus import random_call_pair
from mwpflow.analysis import analyze_program
from mwpflow.frontend import parse, render
from mwpflow.inline import (
    build_inlined,
    check_call_theorem,
    choice_projection,
    project_variables,
)
from mwpflow.frontend import Program

INLINE_PAIR = """
function f(X1){
    loop X1 { X2 = X2 + X3; }
    return X2;
}
function main(){
    X3 = X1 + X2;
    X2 = X3 + X1;
    X1 = f(X2);
}
"""


def test_build_inlined_golden():
    prog = parse(INLINE_PAIR)
    inlined = build_inlined(prog.function("main"), prog.function("f"))
    assert render(Program((inlined,))) == (
        "function main() {\n"
        "    X3 = X1 + X2;\n"
        "    X2 = X3 + X1;\n"
        "    __y1 = X2;\n"
        "    loop __y1 {\n"
        "        __r1 = __r1 + __v1;\n"
        "    }\n"
        "    X1 = __r1;\n"
        "}\n"
    )


def test_build_inlined_identity_callee():
    src = "function f(X1){ X2 = X1; return X2; } function main(){ X3 = f(X4); }"
    prog = parse(src)
    inlined = build_inlined(prog.function("main"), prog.function("f"))
    assert render(Program((inlined,))) == (
        "function main() {\n"
        "    __y1 = X4;\n"
        "    __r1 = __y1;\n"
        "    X3 = __r1;\n"
        "}\n"
    )


def test_build_inlined_param_returning_callee_collapses_names():
    # when the return variable is itself a parameter, one fresh name
    # serves both roles so the flow through the copies is preserved
    src = "function f(X1){ return X1; } function main(){ X2 = f(X3); }"
    prog = parse(src)
    inlined = build_inlined(prog.function("main"), prog.function("f"))
    assert render(Program((inlined,))) == (
        "function main() {\n"
        "    __r1 = X3;\n"
        "    X2 = __r1;\n"
        "}\n"
    )


def test_build_inlined_keeps_nonclashing_shared_variable():
    src = (
        "function f(X1){ X2 = X1 + X9; return X2; }"
        " function main(){ X5 = f(X4); }"
    )
    prog = parse(src)
    inlined = build_inlined(prog.function("main"), prog.function("f"))
    body = render(Program((inlined,)))
    assert "X9" in body
    assert "__v" not in body


def test_build_inlined_requires_unique_call():
    src = (
        "function f(X1){ return X1; }"
        " function main(){ X2 = f(X1); X3 = f(X2); }"
    )
    prog = parse(src)
    with pytest.raises(ValueError):
        build_inlined(prog.function("main"), prog.function("f"))


def test_inlined_output_reanalyzes_cleanly():
    prog = parse(INLINE_PAIR)
    inlined = build_inlined(prog.function("main"), prog.function("f"))
    reparsed = parse(render(Program((inlined,))).replace("__", "Z"))
    assert reparsed.functions[0].name == "main"
    res = analyze_program(Program((inlined,)))
    r = res.functions["main"]
    assert set(r.variables) == {"X1", "X2", "X3", "__y1", "__r1", "__v1"}


def test_project_variables():
    prog = parse(INLINE_PAIR)
    res = analyze_program(Program((build_inlined(
        prog.function("main"), prog.function("f")
    ),)))
    m = res.functions["main"].matrix
    assert project_variables(m, m.variables) == m
    sub = project_variables(m, ("X1", "X2", "X3"))
    assert sub.variables == ("X1", "X2", "X3")
    for a in ("X1", "X2", "X3"):
        for b in ("X1", "X2", "X3"):
            assert sub.entry(sub.index(a), sub.index(b)) == m.entry(m.index(a), m.index(b))
    empty = project_variables(m, ())
    assert empty.variables == () and empty.entries == ()
    with pytest.raises(KeyError):
        project_variables(m, ("X1", "NOPE"))


def test_choice_projection_partition():
    pi = choice_projection(i0=2, k=3, total_inlined=6)
    assert [pi(j) for j in range(6)] == [0, 1, 2, 2, 2, 3]
    with pytest.raises(ValueError):
        choice_projection(i0=2, k=3, total_inlined=4)
    # splicing a caller assignment across the call block and projecting
    # back is the identity on caller indices
    caller_len = 4
    for i0 in range(caller_len):
        pi = choice_projection(i0, 2, caller_len - 1 + 2)
        spliced_positions = list(range(i0)) + [i0, i0] + [
            j + 2 - 1 for j in range(i0 + 1, caller_len)
        ]
        for caller_j in range(caller_len):
            if caller_j == i0:
                assert all(
                    pi(p) == i0 for p in range(i0, i0 + 2)
                )
            else:
                inlined_j = caller_j if caller_j < i0 else caller_j + 2 - 1
                assert pi(inlined_j) == caller_j


def test_theorem_on_inline_pair():
    prog = parse(INLINE_PAIR)
    report = check_call_theorem(prog.function("main"), prog.function("f"))
    assert report.ok, report.failure
    assert report.checked_images == 9
    assert report.checked_poisoned == 18
    assert report.checked_merged == 0


def test_theorem_identity_callee():
    src = "function f(X1){ return X1; } function main(){ X2 = f(X3); }"
    prog = parse(src)
    report = check_call_theorem(prog.function("main"), prog.function("f"))
    assert report.ok, report.failure
    assert report.checked_poisoned == 0


def test_theorem_three_behavior_callee():
    src = (
        "function f(X1, X2){ X3 = X1 + X2; return X3; }"
        " function main(){ X4 = X1 - X2; X3 = f(X1, X4); }"
    )
    prog = parse(src)
    report = check_call_theorem(prog.function("main"), prog.function("f"))
    assert report.ok, report.failure
    # the three call-rule behaviors match the three inlined choices
    assert report.checked_images == 9
    assert report.checked_poisoned == 0
    assert report.checked_merged == 0


def test_theorem_call_nested_in_branch():
    src = """
    function f(X1){ X2 = X1 + X1; return X2; }
    function main(){
        X3 = X1 + X2;
        if (X1 < X2) { X4 = f(X3); } else { X4 = X3 * X1; }
        X1 = X4 - X2;
    }
    """
    prog = parse(src)
    report = check_call_theorem(prog.function("main"), prog.function("f"))
    assert report.ok, report.failure
    assert report.checked_merged > 0


def test_theorem_merged_behaviors():
    # X1 + X1 merges two of its three choices into one behavior
    src = (
        "function f(X1){ X2 = X1 + X1; return X2; }"
        " function main(){ X3 = f(X4); }"
    )
    prog = parse(src)
    report = check_call_theorem(prog.function("main"), prog.function("f"))
    assert report.ok, report.failure
    assert report.checked_merged == 1


def test_theorem_budget_refusal():
    src = (
        "function f(X1){ X2 = X1 + X1; return X2; }"
        " function main(){ X3 = f(X4); }"
    )
    prog = parse(src)
    with pytest.raises(ValueError):
        check_call_theorem(prog.function("main"), prog.function("f"), budget=2)


def test_theorem_unbounded_callee_reports_failure():
    src = (
        "function f(X1){ while (X1 < X1) { X2 = X2 + X2; } return X2; }"
        " function main(){ X1 = f(X3); }"
    )
    prog = parse(src)
    report = check_call_theorem(prog.function("main"), prog.function("f"))
    assert not report.ok
    assert "summary" in report.failure


def test_theorem_random_pairs():
    rng = random.Random(301)
    checked = 0
    while checked < 25:
        src = random_call_pair(rng)
        prog = parse(src)
        try:
            report = check_call_theorem(prog.function("main"), prog.function("f"))
        except ValueError:
            continue
        if not report.ok and "summary" in (report.failure or ""):
            continue
        assert report.ok, f"{src}\n{report.failure}"
        checked += 1
