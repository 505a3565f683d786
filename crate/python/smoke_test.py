"""Smoke test for the lph_py extension module.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

from pathlib import Path

import lph_py

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    k3 = lph_py.Graph.parse((DATA / "k3.lg").read_text())
    k4 = lph_py.Graph.complete(4)
    three_col = lph_py.Formula.parse((DATA / "3col.lso").read_text())
    assert three_col.classify() == "monadic Sigma(1)"
    assert lph_py.evaluate(k3, three_col)
    assert not lph_py.evaluate(k4, three_col)
    assert lph_py.arbitrate_formula(k3, three_col)
    assert not lph_py.arbitrate_formula(k4, three_col)

    p2 = lph_py.Graph.path(2)
    assert not lph_py.check_property("hamiltonian", p2)
    assert lph_py.check_property("colorable(2)", p2)

    graphs = lph_py.enumerate_graphs(4, ["0", "1"])
    assert len(graphs) == 65
    for g in graphs:
        out, clusters = lph_py.reduce("as2ham", g)
        assert len(clusters) == out.node_count
        assert lph_py.check_property("allselected", g) == lph_py.check_property("hamiltonian", out)

    sat = lph_py.cook_levin(three_col, k3)
    assert lph_py.check_property("satgraph", sat)

    verdicts, outputs, rounds = lph_py.run(k3, (DATA / "copy.dtm").read_text())
    assert rounds == 1 and outputs == ["##"] * 3 and not any(verdicts)
    verdicts, _, _ = lph_py.run(k3.with_labels(["1", "1", "1"]), "allselected")
    assert all(verdicts)

    ts = lph_py.TilingSystem.parse((DATA / "even.ts").read_text())
    assert ts.accepts(lph_py.Picture.blank(2, 4))
    assert not ts.accepts(lph_py.Picture.parse((DATA / "odd.pic").read_text()))
    assert lph_py.evaluate_picture(lph_py.Picture.blank(2, 2), ts.to_formula(), no_caps=True)
    assert lph_py.Picture.blank(2, 3).encode().node_count == 30

    passed, line = lph_py.acceptance(2)
    assert passed, line

    try:
        lph_py.Formula.parse("E x .")
    except ValueError:
        pass
    else:
        raise AssertionError("parse error expected")
    print("smoke test passed")


if __name__ == "__main__":
    main()
