"""Regenerate the reference numbers for the line, ring and dangling-bond
examples and diff them against stored golden values."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .bounds import (distance_s, lower_bound_commutator, path_count, path_count_bound, sweep_s,
                     upper_bound_dark, variance_in_state)
from .graphs import (StateVector, basis_state, build_dangling_bond, build_line, build_ring,
                     hamiltonian_from_graph, node_index, uniform_state)
from .serialize import dumps
from .subspaces import dark_complement, detection_probability_exact, krylov_bright_basis

TARGETS = ("fig1", "fig2", "fig3", "fig4", "table1", "appendix")
GOLDEN_TOL = 1e-9
OUTPUT_ENV = "DARKBRIGHT_OUTPUT_DIR"


def load_golden() -> dict:
    text = resources.files("darkbright").joinpath("golden/reference.json").read_text()
    return json.loads(text)


def _distance_bound(g, h, r: int, d: int) -> float:
    s = int(distance_s(g, r, d))
    return lower_bound_commutator(h, basis_state(g.node_count, d), basis_state(g.node_count, r), s).value


def compute_fig1() -> dict:
    g = build_line(5)
    h = hamiltonian_from_graph(g)
    out: dict = {}
    for dl in ("1", "2", "3"):
        d = node_index(g, dl)
        dv = basis_state(5, d)
        bright = krylov_bright_basis(h, dv)
        out[f"dark_dim/d={dl}"] = 5 - bright.rank
        for r in range(5):
            out[f"pdet/d={dl}/r={r + 1}"] = detection_probability_exact(bright, basis_state(5, r)).p_det
            if r != d:
                out[f"lower/d={dl}/r={r + 1}"] = _distance_bound(g, h, r, d)
        out[f"pdet/d={dl}/r=uniform"] = detection_probability_exact(bright, uniform_state(5)).p_det
        out[f"lower_s1/d={dl}/r=uniform"] = lower_bound_commutator(h, dv, uniform_state(5), 1).value
    # detector in the middle: dark pair (|2>-|4>)/sqrt2 and (|1>-|5>)/sqrt2
    dark_24 = StateVector.from_raw([0, 1, 0, -1, 0])
    dark_15 = StateVector.from_raw([1, 0, 0, 0, -1])
    out["upper/d=3/r=1"] = upper_bound_dark(h, dark_24, basis_state(5, 0)).value
    out["upper/d=3/r=2"] = upper_bound_dark(h, dark_15, basis_state(5, 1)).value
    return out


def compute_fig2() -> dict:
    g = build_ring(6)
    h = hamiltonian_from_graph(g)
    a = g.adjacency()
    d = basis_state(6, 0)
    bright = krylov_bright_basis(h, d)
    out: dict = {"dark_dim": 6 - bright.rank}
    for r in range(6):
        out[f"pdet/r={r}"] = detection_probability_exact(bright, basis_state(6, r)).p_det
    for r in (1, 2, 3):
        out[f"lower/r={r}"] = path_count_bound(a, r, 0, int(distance_s(g, r, 0))).value
        out[f"lower_commutator/r={r}"] = _distance_bound(g, h, r, 0)
    dark_24 = StateVector.from_raw([0, 0, 1, 0, -1, 0])
    dark_15 = StateVector.from_raw([0, 1, 0, 0, 0, -1])
    out["upper/r=1"] = upper_bound_dark(h, dark_24, basis_state(6, 1)).value
    out["upper/r=2"] = upper_bound_dark(h, dark_15, basis_state(6, 2)).value
    out["var_H/d=0"] = variance_in_state(h, 1, d)
    out["var_H2/d=0"] = variance_in_state(h, 2, d)
    out["var_H3/d=0"] = variance_in_state(h, 3, d)
    out["var_H/delta"] = variance_in_state(h, 1, dark_24)
    out["paths/2->0/s=2"] = path_count(a, 2, 0, 2)
    out["paths/3->0/s=3"] = path_count(a, 3, 0, 3)
    out["paths/N00(6)-N00(3)^2"] = path_count(a, 0, 0, 6) - path_count(a, 0, 0, 3) ** 2
    return out


def compute_fig3() -> dict:
    g = build_dangling_bond()
    h = hamiltonian_from_graph(g)
    bright = krylov_bright_basis(h, basis_state(7, 0))
    out: dict = {}
    for r in range(7):
        out[f"pdet/r={r}"] = detection_probability_exact(bright, basis_state(7, r)).p_det
        if r:
            out[f"lower/r={r}"] = _distance_bound(g, h, r, 0)
            out[f"distance/r={r}"] = int(distance_s(g, r, 0))
    out["pdet/r=uniform"] = detection_probability_exact(bright, uniform_state(7)).p_det
    return out


def _fig4_sweeps(s_max: int | None = None):
    h = hamiltonian_from_graph(build_dangling_bond())
    d = basis_state(7, 0)
    return h, d, {"uniform": sweep_s(h, d, uniform_state(7), s_max),
                  "local5": sweep_s(h, d, basis_state(7, 5), s_max)}


def compute_fig4(s_max: int | None = None) -> dict:
    h, d, sweeps = _fig4_sweeps(s_max)
    bright = krylov_bright_basis(h, d)
    out: dict = {}
    for name, sw in sweeps.items():
        for s, v in zip(sw.s_values, sw.values):
            out[f"{name}/s={s}"] = v
        out[f"{name}/saturated"] = int(sw.saturated)
        out[f"{name}/best_s"] = sw.best_s
        out[f"{name}/best_value"] = sw.best_value
    out["uniform/exact"] = detection_probability_exact(bright, uniform_state(7)).p_det
    out["local5/exact"] = detection_probability_exact(bright, basis_state(7, 5)).p_det
    return out


def compute_table1() -> dict:
    h = hamiltonian_from_graph(build_dangling_bond())
    sw = sweep_s(h, basis_state(7, 0), uniform_state(7), s_max=5)
    return {f"s={s}": v for s, v in zip(sw.s_values, sw.values)}


APPENDIX_HAMILTONIAN = np.array([
    [0, 1, 0, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0],
    [0, 1, 0, 1, 0, 0, 1],
    [0, 0, 1, 0, 1, 0, 0],
    [0, 0, 0, 1, 0, 1, 0],
    [0, 0, 0, 0, 1, 0, 0],
    [0, 0, 1, 0, 0, 0, 0],
])

# six bright states as (unnormalized) coefficient vectors on nodes 0..6
APPENDIX_BRIGHT = np.array([
    [1, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0],
    [0, 2, 0, 1, 0, 0, 1],
    [2, 0, 4, 0, 1, 0, 0],
    [0, 6, 0, 5, 0, 1, 4],
], dtype=float)
APPENDIX_DARK = np.array([0, 0, 0, -1, 0, 1, 1]) / np.sqrt(3)


def compute_appendix() -> dict:
    g = build_dangling_bond()
    h = hamiltonian_from_graph(g)
    d = basis_state(7, 0)
    bright = krylov_bright_basis(h, d)
    listed = APPENDIX_BRIGHT / np.linalg.norm(APPENDIX_BRIGHT, axis=1, keepdims=True)
    q, _ = np.linalg.qr(listed.T)
    dark = dark_complement(bright)
    out: dict = {
        "hamiltonian_max_abs_diff": float(np.max(np.abs(h.matrix - APPENDIX_HAMILTONIAN))),
        "bright_dim": bright.rank,
        "listed_states_orthonormal_error": float(np.max(np.abs(listed @ listed.T - np.eye(6)))),
        "bright_span_projector_diff": float(np.max(np.abs(q @ q.T - bright.projector))),
        "dark_state_overlap": float(abs(dark.vectors[:, 0].conj() @ APPENDIX_DARK)) if dark.rank == 1 else 0.0,
        "dark_state_variance": variance_in_state(h, 1, APPENDIX_DARK),
        "var_H5/d=0": variance_in_state(h, 5, d),
    }
    for r in range(7):
        out[f"pdet/r={r}"] = detection_probability_exact(bright, basis_state(7, r)).p_det
        if r:
            out[f"lower/r={r}"] = _distance_bound(g, h, r, 0)
    return out


_COMPUTE = {
    "fig1": compute_fig1,
    "fig2": compute_fig2,
    "fig3": compute_fig3,
    "fig4": compute_fig4,
    "table1": compute_table1,
    "appendix": compute_appendix,
}


def compare(values: dict, golden: dict, tol: float = GOLDEN_TOL) -> list[dict]:
    """Golden entries that are missing from ``values`` or differ by more than ``tol``."""
    bad = []
    for key, ref in sorted(golden.items()):
        expected = float(Fraction(ref))
        got = values.get(key)
        if got is None or not abs(float(got) - expected) <= tol:
            bad.append({"key": key, "expected": ref, "got": got})
    return bad


def reproduce(target: str, golden: dict | None = None) -> dict:
    if target not in _COMPUTE:
        raise KeyError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    golden = load_golden() if golden is None else golden
    values = _COMPUTE[target]()
    ref = golden.get(target, {})
    mismatches = compare(values, ref)
    notes = {k.split("/", 1)[1]: v for k, v in golden.get("notes", {}).items()
             if k.split("/", 1)[0] == target}
    return {"target": target, "values": values, "golden": ref, "mismatches": mismatches,
            "ok": not mismatches, "notes": notes}


def reproduce_many(targets, out_dir: str | os.PathLike | None = None) -> list[dict]:
    """Run targets concurrently; results come back in the order requested."""
    golden = load_golden()
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda t: reproduce(t, golden), targets))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for res in results:
            (out / f"{res['target']}.json").write_text(dumps(res))
        if "fig4" in targets:
            _, _, sweeps = _fig4_sweeps()
            for name, sw in sweeps.items():
                (out / f"fig4_{name}.csv").write_text(sw.to_csv())
    return results
