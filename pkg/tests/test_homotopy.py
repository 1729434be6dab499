"""Total-degree homotopy: start systems, tracking, endgame, post-processing."""

import json

import numpy as np
import pytest

from quadmap.homotopy import (
    CONVERGED,
    DIVERGED,
    FAILED,
    PolySystem,
    TrackSettings,
    bezout_number,
    certify,
    dedup,
    refine,
    start_system,
    track,
)


def poly(terms, nvars):
    exps = np.array([t[0] for t in terms]).reshape(-1, nvars)
    coeffs = np.array([t[1] for t in terms], dtype=complex)
    return exps, coeffs


def dense_random(rng, degrees, nvars):
    eqs = []
    for d in degrees:
        grid = np.array(np.meshgrid(*[range(d + 1)] * nvars, indexing="ij")).reshape(nvars, -1).T
        exps = grid[grid.sum(axis=1) <= d]
        coeffs = rng.standard_normal(len(exps)) + 1j * rng.standard_normal(len(exps))
        eqs.append((exps, coeffs))
    return PolySystem(eqs, nvars)


def test_start_system_roots():
    start, pts = start_system([2, 3])
    assert len(pts) == 6
    X = np.hstack([np.ones((6, 1)), pts])
    vals, _ = start.evaluate(X)
    assert np.abs(vals).max() < 1e-12


def test_quadratic_two_roots():
    S = PolySystem([poly([([2], 1), ([0], -1)], 1)], 1)
    run = track(S, seed=0)
    roots = sorted(p.endpoint[0].real for p in run.converged())
    assert np.allclose(roots, [-1, 1])


def test_circle_and_line():
    S = PolySystem([poly([([2, 0], 1), ([0, 2], 1), ([0, 0], -2)], 2), poly([([1, 0], 1), ([0, 1], -1)], 2)], 2)
    run = track(S, seed=3)
    assert run.count(CONVERGED) == 2 and run.count(DIVERGED) == 0
    pts = sorted(tuple(np.round(p.endpoint.real, 8)) for p in run.converged())
    assert pts == [(-1.0, -1.0), (1.0, 1.0)]


def test_double_root_multiplicity():
    S = PolySystem([poly([([2], 1), ([1], -2), ([0], 1)], 1)], 1)
    run = track(S, seed=1)
    assert all(p.status == CONVERGED for p in run.paths)
    assert [p.multiplicity for p in run.paths] == [2, 2]
    assert all(p.singular for p in run.paths)


def test_paths_to_infinity():
    # x*y = 1, x = 2: Bezout 2, one finite root
    S = PolySystem([poly([([1, 1], 1), ([0, 0], -1)], 2), poly([([1, 0], 1), ([0, 0], -2)], 2)], 2)
    run = track(S, seed=0)
    assert run.count(CONVERGED) == 1 and run.count(DIVERGED) == 1
    assert np.allclose(run.converged()[0].endpoint, [2, 0.5])


def test_generic_332_system():
    rng = np.random.default_rng(1)
    S = dense_random(rng, [3, 3, 2], 3)
    run = track(S, seed=0)
    assert run.count(CONVERGED) == 18
    cl = dedup([p.endpoint for p in run.converged()], 1e-6)
    assert len(cl) == 18


@pytest.mark.parametrize("k", range(50))
def test_path_conservation_random(k):
    rng = np.random.default_rng(1000 + k)
    nvars = int(rng.integers(1, 4))
    degrees = [int(d) for d in rng.integers(1, 4 if nvars < 3 else 3, size=nvars)]
    S = dense_random(rng, degrees, nvars)
    run = track(S, seed=k)
    total = run.count(CONVERGED) + run.count(DIVERGED) + run.count(FAILED)
    assert total == len(run.paths) == bezout_number(S) == int(np.prod(degrees))
    # dense generic coefficients: every root is finite and simple
    assert run.count(CONVERGED) == bezout_number(S)
    pts = [p.endpoint for p in run.converged()]
    assert len(dedup(pts, 1e-6)) == len(pts)
    assert certify(S, pts).max() < 1e-8


def test_refine_detects_quadratic_rate():
    S = PolySystem([poly([([2], 1), ([0], -2)], 1)], 1)
    r = refine([1.4], S)
    assert r.converged and not r.singular
    assert abs(r.point[0] - np.sqrt(2)) < 1e-14


def test_settings_validation():
    with pytest.raises(ValueError):
        TrackSettings(min_step=1.0)
    with pytest.raises(ValueError):
        TrackSettings(endgame_ratio=1.5)
    with pytest.raises(ValueError):
        TrackSettings(final_tol=-1)


def test_json_lines_log(tmp_path):
    S = PolySystem([poly([([2], 1), ([0], -1)], 1)], 1)
    log = tmp_path / "paths.jsonl"
    track(S, seed=0, log_path=str(log))
    recs = [json.loads(line) for line in log.read_text().splitlines()]
    assert len(recs) == 2 and {r["status"] for r in recs} == {CONVERGED}


def test_nonsquare_rejected():
    S = PolySystem([poly([([1, 0], 1)], 2)], 2)
    with pytest.raises(ValueError):
        track(S)
