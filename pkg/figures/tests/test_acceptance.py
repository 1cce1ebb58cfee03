"""Criterion 9: regenerate every figure kind from the solver's real CSVs.

Needs the primary acceptance suite to have run first (it leaves its
artifacts in ../out/acceptance). Each kind is rendered twice and must
reproduce identical image bytes.
"""

from pathlib import Path

import pytest

from mfg_figures import FigureSpec, render

ARTIFACTS = Path(__file__).resolve().parent.parent.parent / "out" / "acceptance"

CASES = [
    ("trace", ("solve_cyber/trace.csv",), {}),
    ("trace", ("solve_beach/trace.csv",), {}),
    ("policy", ("solve_cyber/policy.csv",), {}),
    ("policy", ("solve_hetero_cyber/policy.csv",), {}),
    ("infection", ("solve_cyber/meanfield.csv",), {"states": (0, 2)}),
    ("beach", ("solve_beach/meanfield.csv",), {}),
    ("sweep", ("sweep_cyber/sweep.csv",), {}),
    ("sweep", ("sweep_beta/sweep.csv",), {}),
]


@pytest.mark.parametrize("kind,inputs,options", CASES,
                         ids=[f"{k}-{i[0].split('/')[0]}" for k, i, _ in CASES])
def test_criterion_9_regenerates_from_real_artifacts(kind, inputs, options, tmp_path):
    paths = [ARTIFACTS / rel for rel in inputs]
    if not all(p.exists() for p in paths):
        pytest.skip("run the primary acceptance suite first (pytest ../tests/test_acceptance.py)")
    out = tmp_path / f"{kind}_{inputs[0].split('/')[0]}"
    written = render(FigureSpec(kind=kind, inputs=tuple(str(p) for p in paths),
                                out=str(out), options=options))
    blobs = {p: Path(p).read_bytes() for p in written}
    rewritten = render(FigureSpec(kind=kind, inputs=tuple(str(p) for p in paths),
                                  out=str(out), options=options))
    assert rewritten == written
    for p, blob in blobs.items():
        assert Path(p).read_bytes() == blob, f"rerun changed {p}"
    print(f"criterion 9 [{kind} from {inputs[0]}]: PASS - {len(written)} identical images")
