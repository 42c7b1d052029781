"""Verification reports and table writers.

Every check row names the identity it exercises through an anchor key
registered in ``ANCHORS``; the registry is the list of identities the
package verifies, and a test checks that the commands cover all of them.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

SCHEMA_VERSION = 1

ANCHORS = {
    # closed-form families
    "umbilical.curvature": "umbilical slice <x,v> = c: kappa_i = c / sqrt(1 - c^2)",
    "clifford.curvature": "Clifford product: kappa = -s/r (k times), r/s (n-k times)",
    "umbilical.relation": "umbilical slice: f_w = -c / sqrt(1 - c^2) ell_w for w perpendicular to v",
    "clifford.relation": "Clifford product: ell_w = (r/s) f_w on the first factor, -(s/r) f_w on the second",
    "gram.dimensions": "dim V1 and dim V2 below n+2 only on great spheres",
    # support-function calculus
    "gradient.ell": "grad ell_v = v^T",
    "gradient.f": "grad f_v = -A(v^T)",
    "laplacian.ell": "Delta ell_v = -n ell_v + nH f_v",
    "laplacian.f": "Delta f_v = -|A|^2 f_v + nH ell_v (constant H)",
    "proportionality": "ell_v = lambda f_v",
    # geodesic circles
    "geodesic.flow": "integral curves of v^T, reparametrized by arc length, are geodesics",
    "geodesic.circle_law": "(beta')'' + (1 + lambda^-2) beta' = 0",
    "geodesic.sphere_circle": "beta'' + beta + lambda^-1 nu(beta) = 0",
    "geodesic.ell_law": "ell_v(beta(s)) = sin(ws - ws1) / w",
    "geodesic.closed_form": "beta(s) = sin(ws)/w v + (cos(ws) - 1)/w^2 (x + nu/lambda) + x",
    "geodesic.normal": "nu(beta(s)) = lambda w sin(ws) v + lambda cos(ws)(x + nu/lambda) - lambda beta",
    "geodesic.frame": "on N: grad ell_v = v and A(v) = -v / lambda",
    "geodesic.transport": "transported principal direction scales by mu_i(s)",
    "geodesic.kappa": "lambda_i(s) = -1/lambda + (1+lambda^2)(1/lambda + lambda_i) / (lambda(lambda - lambda_i) cos(ws) + 1 + lambda lambda_i)",
    "geodesic.cmc_closure": "sum of propagated curvatures - 1/lambda = nH",
    "obstruction.partition": "constant H forces I3 empty and d = 0",
    # exact lemma
    "lemma.independence": "deleted products q_i of distinct-root linear factors are independent",
    "lemma.partial_fraction": "sum a_i / p_i = d only for a_i = d = 0",
    # counter-example
    "counterexample.bounds": "base hypersurface N has principal curvatures in (1, 2)",
    "counterexample.immersion": "(1 - lambda_i) cos(sqrt2 s) + 1 + lambda_i stays away from 0",
    "counterexample.ell_eq_f": "ell_v = f_v on the product immersion of S^1 x N",
    "counterexample.non_cmc": "the product immersion has non-constant mean curvature",
    "counterexample.normal": "closed-form Gauss map agrees with the computed normal",
    # spectra and index
    "spectrum.constants": "alpha_+-, mu_+- and jac_+- = mu_+- - (|A|^2 + n)",
    "spectrum.lines": "mu_+- are Laplace lines of the product spectrum",
    "spectrum.test_functions": "Delta u + mu_+- u = 0 for u = ell_v - alpha_+- f_v, integral of u = 0",
    "spectrum.minimal": "J ell_v = |A|^2 ell_v and J f_v = n f_v when H = 0",
    "spectrum.dimension": "index lower bound dim U+ + dim U- (or dim V1 + dim V2)",
    "spectrum.orthogonality": "eigenfunctions for distinct eigenvalues are L^2 orthogonal",
    "index.counts": "weak index counts nonconstant lines below |A|^2 + n; ties are Jacobi fields",
    "index.plateau": "weak index n+2 on the middle radius range of M_1(r) in S^3",
    "mesh.crosscheck": "five-point torus Laplacian converges at second order to the analytic lines",
}


class UnknownAnchor(KeyError):
    pass


@dataclass
class CheckRow:
    status: str  # "pass" | "fail" | "skip"
    residual: Optional[float]
    anchor: str
    tolerance: Optional[float] = None
    detail: str = ""

    def as_dict(self) -> dict:
        out = {"status": self.status, "residual": _clean(self.residual), "anchor": self.anchor}
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        if self.detail:
            out["detail"] = self.detail
        return out


def _clean(x):
    if x is None:
        return None
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


@dataclass
class VerificationReport:
    command: str
    config: dict
    checks: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    def add(self, check_id: str, anchor_key: str, residual, tolerance: Optional[float] = None, *, passed=None, detail: str = "") -> CheckRow:
        """Record a check. ``passed`` defaults to ``residual <= tolerance``."""
        if anchor_key not in ANCHORS:
            raise UnknownAnchor(anchor_key)
        if passed is None:
            passed = residual is not None and tolerance is not None and residual <= tolerance
        row = CheckRow("pass" if passed else "fail", _as_float(residual), ANCHORS[anchor_key], tolerance, detail)
        self.checks[check_id] = row
        return row

    def skip(self, check_id: str, anchor_key: str, detail: str) -> CheckRow:
        if anchor_key not in ANCHORS:
            raise UnknownAnchor(anchor_key)
        row = CheckRow("skip", None, ANCHORS[anchor_key], None, detail)
        self.checks[check_id] = row
        return row

    @property
    def ok(self) -> bool:
        return all(row.status != "fail" for row in self.checks.values())

    def as_dict(self) -> dict:
        statuses = [r.status for r in self.checks.values()]
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "checks": {k: v.as_dict() for k, v in self.checks.items()},
            "summary": {s: statuses.count(s) for s in ("pass", "fail", "skip")},
            "data": self.data,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2, ensure_ascii=False, default=_json_default) + "\n"


def _as_float(x):
    if x is None:
        return None
    return float(x)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    return str(obj)


def write_csv(path: Path, rows: Sequence[dict], columns: Sequence[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row.get(k)) for k in columns})


def write_tsv(path: Path, rows: Iterable[Sequence], columns: Sequence[str]) -> None:
    """Tab-separated columns under a '#'-prefixed header that gnuplot skips."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + "\t".join(columns) + "\n")
        for row in rows:
            fh.write("\t".join(_cell(x) for x in row) + "\n")


def _cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (list, tuple)):
        return ";".join(_cell(y) for y in x)
    return "" if x is None else str(x)
