from __future__ import annotations

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from spohn_lab import _kernels
from spohn_lab.catalog import example_4player, named_graph
from spohn_lab.game import random_game
from spohn_lab.numeric import compile_system
from spohn_lab.spohnci import build_system

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


@pytest.fixture(scope="module")
def system():
    game = random_game(np.random.default_rng(0), 4, generic=True)
    return compile_system(build_system(named_graph("line4"), game).polynomials)


@pytest.fixture(scope="module")
def points(system):
    return np.random.default_rng(1).uniform(0.1, 2.0, size=(32, system.n))


@needs_numba
def test_evaluate_backends_agree(system, points):
    assert np.allclose(system.evaluate(points, "numba"), system.evaluate(points, "numpy"), rtol=1e-12, atol=1e-12)


@needs_numba
def test_jacobian_backends_agree(system, points):
    assert np.allclose(system.jacobian(points, "numba"), system.jacobian(points, "numpy"), rtol=1e-12, atol=1e-12)


@needs_numba
def test_newton_backends_agree():
    game = example_4player()
    from spohn_lab.graph import Graph
    cs = compile_system([F.specialize({f"s{i}_2": 1 for i in range(1, 5)})
                         for F in build_system(Graph.empty(4), game).polynomials])
    X0 = np.random.default_rng(2).uniform(0, 1, size=(64, cs.n))
    Xa, ca, _, _ = cs.newton(X0, 1e-10, 100, "numba")
    Xb, cb, _, _ = cs.newton(X0, 1e-10, 100, "numpy")
    assert (ca == cb).all() and ca.any()
    assert np.allclose(Xa[ca], Xb[cb], atol=1e-9)


def test_unknown_backend(system, points):
    with pytest.raises(ValueError):
        system.evaluate(points, "fortran")


def _solve_json(env_extra: dict) -> dict:
    env = dict(os.environ, **env_extra)
    code = ("import json; from spohn_lab import _kernels; from spohn_lab.cli import run; import io; b = io.StringIO();"
            "run(['solve-nash', '--game', 'example-4player', '--seed', '3'], stdout=b);"
            "print(json.dumps({'backend': _kernels.backend_name(), 'out': json.loads(b.getvalue())}))")
    proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def test_disable_jit_switch():
    off = _solve_json({"SPOHN_LAB_DISABLE_JIT": "1"})
    assert off["backend"] == "numpy"
    on = _solve_json({"SPOHN_LAB_DISABLE_JIT": "0", "SPOHN_LAB_THREADS": "2"})
    assert on["backend"] == ("numba" if _kernels.HAVE_NUMBA else "numpy")
    a, b = off["out"]["points"], on["out"]["points"]
    assert len(a) == len(b) == 1
    assert np.allclose(a[0]["p"], b[0]["p"], atol=1e-12)


def test_newton_rejects_non_square(system):
    with pytest.raises(ValueError, match="square"):
        system.newton(np.ones((1, system.n)), 1e-10, 10, "numpy")


def test_numpy_chunking_does_not_change_results(system, points, monkeypatch):
    F, J = system.evaluate(points, "numpy"), system.jacobian(points, "numpy")
    monkeypatch.setattr(_kernels, "_CHUNK_ELEMS", 7)
    assert np.array_equal(system.evaluate(points, "numpy"), F)
    assert np.array_equal(system.jacobian(points, "numpy"), J)
