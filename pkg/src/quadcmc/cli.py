"""Command-line driver: ``quadcmc <command> [options]``.

Options may also come from a ``key=value`` file given with ``--config``;
flags on the command line win. Exit status is 0 when every check passes
or is skipped, 1 when a check fails and 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import exact, families, geodesics, spectral, support
from .errors import AnchorNotOnN, BadSpec, NotCMC, QuadCmcError
from .geometry import ChartPoint, cofactor_normal, immersion_jet, shape_operator, unit_normal
from .report import VerificationReport, write_csv, write_tsv
from .sampling import Lcg64, quadrature, sample_points

COMMANDS = ("verify", "geodesics", "spectrum", "index-sweep", "counterexample", "lemma22")

TOLERANCES = {
    "grad": 1e-8,
    "lap": 1e-4,
    "prop": 1e-7,
    "curv": 1e-9,
    "geo": 1e-4,
    "ell": 1e-6,
    "class": 1e-7,
    "gram": 1e-6,
    "normal": 1e-8,
}

DEFAULT_ANCHOR_SHIFT = 0.3
DEFAULT_SWEEP = "0.2,0.3,0.5,0.6,0.707,0.8,0.866,0.95"


class ConfigError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"tolerance must be positive, got {text}")
    return x


@dataclass
class RunConfig:
    command: str
    family: str = "clifford"
    n: int = 2
    k: int = 1
    r: float = 0.6
    c: float = 0.5
    eps: float = 0.02
    m_freq: int = 2
    v: Optional[list] = None
    anchor: Optional[list] = None
    anchor_mode: str = "project"
    samples: int = 200
    seed: int = 0
    out: Optional[str] = None
    r_grid: Optional[list] = None
    grid: int = 64
    j_max: Optional[int] = None
    tol: dict = field(default_factory=lambda: dict(TOLERANCES))

    def as_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__ if k not in ("out",)}
        return out

    def family_kwargs(self) -> dict:
        return {"n": self.n, "k": self.k, "r": self.r, "c": self.c, "eps": self.eps, "m_freq": self.m_freq}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadcmc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value file; command-line flags override it")
        p.add_argument("--family", choices=("clifford", "umbilical", "counterexample"))
        p.add_argument("--n", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--r", type=float)
        p.add_argument("--c", type=float)
        p.add_argument("--eps", type=float)
        p.add_argument("--m-freq", dest="m_freq", type=int)
        p.add_argument("--v", type=_floats, help="ambient vector, comma-separated")
        p.add_argument("--anchor", type=_floats, help="chart parameters of the geodesic anchor")
        p.add_argument("--anchor-mode", dest="anchor_mode", choices=("project", "keep"))
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--r-grid", dest="r_grid", type=_floats)
        p.add_argument("--grid", type=int)
        p.add_argument("--j-max", dest="j_max", type=int)
        for key in TOLERANCES:
            p.add_argument(f"--tol-{key}", dest=f"tol_{key}", type=_positive_float)
    return parser


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment, dashes in keys
    are read as underscores."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for number, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve_config(argv: Sequence[str]) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    given = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config")}
    if args.config:
        sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
        actions = {a.dest: a for a in sub._actions}  # noqa: SLF001
        for key, text in read_config_file(args.config).items():
            if key not in actions or key in ("config", "help"):
                raise ConfigError(f"unknown config key {key!r}")
            if key in given:
                continue
            action = actions[key]
            try:
                value = action.type(text) if action.type else text
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from exc
            if action.choices and value not in action.choices:
                raise ConfigError(f"{key} must be one of {sorted(action.choices)}")
            given[key] = value
    cfg = RunConfig(command=args.command)
    for key, value in given.items():
        if key.startswith("tol_"):
            cfg.tol[key[4:]] = value
        else:
            setattr(cfg, key, value)
    if cfg.samples < 1:
        raise ConfigError("samples must be positive")
    return cfg


# ------------------------------------------------------------- commands


def _expected_relations(surface, cfg: RunConfig):
    """(vector, lambda) pairs for which ell_v = lambda f_v on the family."""
    fam = surface.meta["family"]
    dim = surface.ambient_dim
    eye = np.eye(dim)
    if fam == "clifford":
        return [(eye[0], surface.meta["lambda_first"]), (eye[cfg.k + 1], surface.meta["lambda_second"])]
    if fam == "umbilical":
        c = surface.meta["c"]
        if c == 0:
            return []
        axis = surface.meta["axis"]
        w = families.complement_basis(axis)[0]
        return [(w, -math.sqrt(1 - c * c) / c)]
    return [(eye[0], 1.0)]


def closed_form_curvature_error(surface, points) -> float:
    """Largest deviation of computed kappa, H and |A|^2 from the closed forms."""
    want = np.sort(np.asarray(surface.meta["kappas"], dtype=float))
    worst = 0.0
    for p in points:
        curv = shape_operator(surface, p)
        worst = max(
            worst,
            float(np.max(np.abs(np.sort(curv.kappas) - want))),
            abs(curv.mean_h - surface.meta["mean_h"]),
            abs(curv.norm_a_sq - surface.meta["norm_a_sq"]),
        )
    return worst


def _expected_gram(surface) -> tuple[int, int]:
    n = surface.dim_n
    if surface.meta["family"] == "umbilical" and surface.meta["c"] == 0:
        return n + 1, 1
    return n + 2, n + 2


def cmd_verify(cfg: RunConfig) -> VerificationReport:
    surface = families.make_family(cfg.family, **cfg.family_kwargs())
    rep = VerificationReport("verify", cfg.as_dict())
    points = sample_points(surface, cfg.samples, cfg.seed)
    dim = surface.ambient_dim
    vectors = [np.asarray(cfg.v, dtype=float)] if cfg.v is not None else list(np.eye(dim))
    if vectors[0].shape != (dim,):
        raise BadSpec(f"--v must have {dim} components")

    g_ell = g_f = 0.0
    for j, p in enumerate(points):
        res = support.check_gradient_identities(surface, p, vectors[j % len(vectors)])
        g_ell, g_f = max(g_ell, res.ell_residual), max(g_f, res.f_residual)
    rep.add("gradient.ell", "gradient.ell", g_ell, cfg.tol["grad"])
    rep.add("gradient.f", "gradient.f", g_f, cfg.tol["grad"])

    h_spread = support.mean_curvature_spread(surface, points)
    l_ell, l_f = 0.0, 0.0
    for j, p in enumerate(points):
        res = support.check_laplacian_identities(surface, p, vectors[j % len(vectors)], h_spread=h_spread)
        l_ell = max(l_ell, res.ell_residual)
        if res.f_residual is not None:
            l_f = max(l_f, res.f_residual)
    rep.add("laplacian.ell", "laplacian.ell", l_ell, cfg.tol["lap"])
    if h_spread < support.TAU_H:
        rep.add("laplacian.f", "laplacian.f", l_f, cfg.tol["lap"])
    else:
        rep.skip("laplacian.f", "laplacian.f", f"NotCMC: mean curvature spread {h_spread:.3e}")

    fam = surface.meta["family"]
    if fam in ("clifford", "umbilical"):
        rep.add(f"{fam}.curvature", f"{fam}.curvature", closed_form_curvature_error(surface, points), cfg.tol["curv"])

    prop_points = points if len(points) >= 100 else sample_points(surface, 100, cfg.seed)
    relation_anchor = {"clifford": "clifford.relation", "umbilical": "umbilical.relation"}.get(fam, "counterexample.ell_eq_f")
    for idx, (v, lam) in enumerate(_expected_relations(surface, cfg)):
        res = support.proportionality_scan(surface, v, prop_points)
        err = max(res.max_residual, abs(res.lam - lam))
        rep.add(f"relation.{idx}", relation_anchor, err, cfg.tol["prop"], detail=f"lambda = {res.lam:.10g}, expected {lam:.10g}")
        rep.data[f"lambda.{idx}"] = res.lam
    if cfg.v is not None:
        res = support.proportionality_scan(surface, vectors[0], prop_points)
        rep.add("proportionality.v", "proportionality", res.max_residual, cfg.tol["prop"], detail=f"least-squares lambda = {res.lam:.10g}")

    quad = quadrature(surface, 24 if surface.dim_n <= 2 else 12)
    want1, want2 = _expected_gram(surface)
    d1 = support.gram_dimension(surface, "V1", quad)
    d2 = support.gram_dimension(surface, "V2", quad)
    rep.add("gram.V1", "gram.dimensions", abs(d1 - want1), 0, detail=f"rank {d1}, expected {want1}")
    rep.add("gram.V2", "gram.dimensions", abs(d2 - want2), 0, detail=f"rank {d2}, expected {want2}")
    rep.data.update(h_spread=h_spread, dim_v1=d1, dim_v2=d2)
    return rep


def _geodesic_setup(surface, cfg: RunConfig):
    relations = _expected_relations(surface, cfg)
    if cfg.v is not None:
        v = np.asarray(cfg.v, dtype=float)
        if v.shape != (surface.ambient_dim,):
            raise BadSpec(f"--v must have {surface.ambient_dim} components")
        scan = support.proportionality_scan(surface, v, sample_points(surface, 100, cfg.seed))
        if not scan.holds:
            raise BadSpec(f"ell_v is not proportional to f_v for this v (residual {scan.max_residual:.3e})")
        return v, scan.lam
    if not relations:
        raise BadSpec("this family has no vector with ell_v = lambda f_v")
    return relations[0]


def cmd_geodesics(cfg: RunConfig) -> VerificationReport:
    surface = families.make_family(cfg.family, **cfg.family_kwargs())
    rep = VerificationReport("geodesics", cfg.as_dict())
    v, lam = _geodesic_setup(surface, cfg)
    chart = surface.charts[0]
    if cfg.anchor is not None:
        start = ChartPoint(np.asarray(cfg.anchor, dtype=float))
    else:
        # chart centres of the symmetric families are often critical points of ell_v
        start = ChartPoint(chart.center + DEFAULT_ANCHOR_SHIFT)
    if cfg.anchor_mode == "project":
        anchor = geodesics.find_anchor_on_n(surface, start, v)
    else:
        anchor = start
    tol = cfg.tol
    rep.data["lambda"] = lam
    rep.data["anchor"] = anchor.params.tolist()

    cp = geodesics.circle_params(surface, anchor, v, lam)
    if abs(cp.a) >= geodesics.ANCHOR_TOL:
        detail = f"AnchorNotOnN: ell_v(anchor) = {cp.a:.3e}"
        for key in ("closed_form", "normal"):
            rep.add(f"geodesic.{key}", f"geodesic.{key}", None, tol["geo"], passed=False, detail=detail)
        rep.add("geodesic.ell_law", "geodesic.ell_law", geodesics.ell_law_residual(surface, anchor, v, lam), tol["ell"])
        return rep

    suite = geodesics.geodesic_suite(surface, anchor, v, lam)
    rep.add("geodesic.closed_form", "geodesic.closed_form", suite.closed_form_point, tol["geo"])
    rep.add("geodesic.normal", "geodesic.normal", suite.closed_form_normal, tol["geo"])
    rep.add("geodesic.ell_law.anchor_on_n", "geodesic.ell_law", suite.ell_law, tol["ell"])
    off = ChartPoint(anchor.params + 0.3 * _unit_chart_direction(surface, anchor, v))
    rep.add("geodesic.ell_law.anchor_off_n", "geodesic.ell_law", geodesics.ell_law_residual(surface, off, v, lam), tol["ell"])
    rep.add("geodesic.flow", "geodesic.flow", suite.geodesic_tangential, tol["geo"])
    rep.add("geodesic.circle_law", "geodesic.circle_law", suite.circle_law, 1e-3 * suite.w**2)
    rep.add("geodesic.sphere_circle", "geodesic.sphere_circle", suite.sphere_circle, tol["geo"])
    rep.add("geodesic.frame", "geodesic.frame", max(suite.frame_gradient, suite.frame_shape), tol["normal"])
    rep.add("geodesic.transport", "geodesic.transport", suite.transport, tol["geo"])
    rep.add("geodesic.kappa", "geodesic.kappa", suite.kappa_propagation, tol["geo"])
    if suite.cmc_closure is not None:
        rep.add("geodesic.cmc_closure", "geodesic.cmc_closure", suite.cmc_closure, tol["ell"])
    else:
        rep.skip("geodesic.cmc_closure", "geodesic.cmc_closure", "NotCMC: the surface has no constant mean curvature")

    kappas, _ = geodesics.anchor_curvatures(surface, anchor, v)
    mean_h = shape_operator(surface, anchor).mean_h
    result = geodesics.partition_and_obstruction(kappas, lam, mean_h, n=surface.dim_n, tau_class=tol["class"])
    verdict = type(result.verdict).__name__
    if not result.partition.i3_groups:
        # only d remains, and rationalizing an irrational d makes the exact verdict meaningless
        verdict = f"I3 empty, |d| = {abs(result.partition.d_x):.3e}"
    rep.data["partition"] = {
        "i1": list(result.partition.i1),
        "i2": list(result.partition.i2),
        "i3_groups": [list(g) for g in result.partition.i3_groups],
        "d": result.partition.d_x,
        "verdict": verdict,
    }
    if surface.meta.get("mean_h") is not None:
        rep.add("obstruction.partition", "obstruction.partition", result.residual, tol["class"], passed=result.consistent, detail=verdict)
    else:
        rep.skip("obstruction.partition", "obstruction.partition", f"NotCMC: exact verdict {verdict}")
    rep.data["table"] = suite.table
    rep.data["w"] = suite.w
    return rep


def _unit_chart_direction(surface, p: ChartPoint, v) -> np.ndarray:
    jet = immersion_jet(surface, p, order=1)
    coords = np.linalg.solve(jet.metric, jet.d1 @ v)
    return coords / math.sqrt(coords @ jet.metric @ coords)


def _geodesic_tsv_rows(rep: VerificationReport):
    rows = []
    for entry in rep.data.get("table", []):
        rows.append([entry["s"], *entry["point"], entry["ell"], *entry["kappa_predicted"], *entry["kappa_measured"]])
    return rows


def cmd_spectrum(cfg: RunConfig) -> VerificationReport:
    if cfg.family != "clifford":
        raise BadSpec("spectra are available for the Clifford family only")
    spec = families.CliffordSpec(cfg.n, cfg.k, cfg.r)
    surface = families.make_clifford(spec)
    rep = VerificationReport("spectrum", cfg.as_dict())
    index = spectral.index_counts(spec, cfg.j_max)
    rep.data.update(
        threshold=index.threshold,
        weak_index=index.weak_index,
        strong_index=index.strong_index,
        kernel=[list(ln.label) for ln in index.kernel_lines],
        rows=spectral.spectrum_rows(index.lines, index.threshold),
    )
    rep.add("index.counts", "index.counts", 0.0, 0.0, passed=index.strong_index == index.weak_index + 1, detail=f"weak {index.weak_index}, strong {index.strong_index}")
    mean_h, norm_a, n = surface.meta["mean_h"], surface.meta["norm_a_sq"], spec.dim_n
    points = sample_points(surface, min(cfg.samples, 50), cfg.seed)
    quad = quadrature(surface, 24 if n <= 2 else 12)
    minimal = abs(mean_h) < support.TAU_H
    if not minimal:
        c = spectral.index_test_constants(mean_h, norm_a, n)
        rep.data["constants"] = c.__dict__
        identity = max(abs(c.jac_plus - (c.mu_plus - norm_a - n)), abs(c.jac_minus - (c.mu_minus - norm_a - n)))
        rep.add("spectrum.constants", "spectrum.constants", identity, 1e-12, passed=identity <= 1e-12 and c.jac_minus < c.jac_plus < 0)
        for label, mu in (("plus", c.mu_plus), ("minus", c.mu_minus)):
            line = spectral.find_line(index.lines, mu)
            gap = min(abs(ln.eigenvalue - mu) for ln in index.lines)
            rep.add(f"spectrum.lines.{label}", "spectrum.lines", gap, spectral.TAU_TIE, detail=f"line {line.label if line else None}")
    else:
        c = None
        rep.skip("spectrum.constants", "spectrum.constants", "MinimalCase: H = 0")
    worst, integral = 0.0, 0.0
    for v in np.eye(surface.ambient_dim):
        for res in spectral.verify_test_functions(surface, v, c, points, quad):
            worst = max(worst, res.residual)
            integral = max(integral, abs(res.integral))
    key = "spectrum.minimal" if minimal else "spectrum.test_functions"
    rep.add(key, key, worst, cfg.tol["lap"])
    rep.add(f"{key}.mean_zero", key, integral, 1e-8)
    dims = spectral.dimension_bound_report(surface, quad)
    rep.data["dimension"] = {
        "families": list(dims.families),
        "ranks": list(dims.ranks),
        "degenerate": [list(d) for d in dims.degenerate],
        "lower_bound": dims.lower_bound,
        "joint_rank": dims.joint_rank,
    }
    rep.add("spectrum.dimension", "spectrum.dimension", abs(dims.joint_rank - dims.lower_bound), 0, detail=f"ranks {dims.ranks}, joint {dims.joint_rank}")
    rep.add("spectrum.orthogonality", "spectrum.orthogonality", dims.cross_gram, cfg.tol["gram"])
    if n == 2:
        coarse = spectral.mesh_laplacian_crosscheck(spec, cfg.grid, seed=cfg.seed)
        fine = spectral.mesh_laplacian_crosscheck(spec, 2 * cfg.grid, seed=cfg.seed)
        ratios = spectral.convergence_ratios(coarse, fine)
        worst_ratio = max(abs(x - 4.0) for x in ratios)
        rep.data["mesh"] = {"grid": cfg.grid, "fitted_c": coarse.fitted_c, "ratios": ratios}
        rep.add("mesh.crosscheck", "mesh.crosscheck", worst_ratio, 0.5, passed=worst_ratio <= 0.5 and coarse.separated and coarse.row_sum_max == 0)
    return rep


def cmd_index_sweep(cfg: RunConfig) -> VerificationReport:
    grid = cfg.r_grid if cfg.r_grid is not None else _floats(DEFAULT_SWEEP)
    if not grid:
        raise ConfigError("the r grid is empty")
    if cfg.n not in (2, 3):
        raise BadSpec("index sweeps support n = 2 or 3")
    rep = VerificationReport("index-sweep", cfg.as_dict())
    lo, hi = math.sqrt(cfg.k / (cfg.n + 2)), math.sqrt((cfg.k + 2) / (cfg.n + 2))
    rows, plateau = [], []
    for r in grid:
        idx = spectral.index_counts(families.CliffordSpec(cfg.n, cfg.k, r), cfg.j_max)
        kernel = [list(ln.label) for ln in idx.kernel_lines]
        rows.append({"r": r, "weak": idx.weak_index, "strong": idx.strong_index, "kernel": kernel})
        if idx.weak_index == cfg.n + 2:
            plateau.append(r)
        inside = lo - 1e-12 <= r <= hi + 1e-12
        ok = idx.weak_index == cfg.n + 2 if inside else idx.weak_index > cfg.n + 2
        rep.add(f"index.plateau.r={r:g}", "index.plateau", float(idx.weak_index), None, passed=ok, detail=f"{'inside' if inside else 'outside'} [{lo:.6f}, {hi:.6f}]")
    rep.data["rows"] = rows
    rep.data["plateau"] = [min(plateau), max(plateau)] if plateau else None
    return rep


def cmd_counterexample(cfg: RunConfig) -> VerificationReport:
    base_spec = families.BaseSurfaceSpec(eps=cfg.eps, m=cfg.m_freq, dim_n=cfg.n)
    surface = families.make_counterexample(families.CounterexampleSpec(base_spec))
    base = surface.meta["base"]
    rep = VerificationReport("counterexample", cfg.as_dict())
    kmin, kmax = base.meta["kappa_min"], base.meta["kappa_max"]
    rep.add("counterexample.bounds", "counterexample.bounds", max(1 - kmin, kmax - 2), 0.0, passed=1 < kmin and kmax < 2, detail=f"[{kmin:.6f}, {kmax:.6f}]")
    factor = surface.meta["min_immersion_factor"]
    rep.add("counterexample.immersion", "counterexample.immersion", factor, None, passed=factor > 1e-12, detail="minimum of the stretch factor")
    points = sample_points(surface, max(cfg.samples, 100), cfg.seed)
    scan = support.proportionality_scan(surface, np.eye(surface.ambient_dim)[0], points)
    rep.add("counterexample.ell_eq_f", "counterexample.ell_eq_f", max(scan.max_residual, abs(scan.lam - 1)), cfg.tol["prop"])
    spread = support.mean_curvature_spread(surface, points)
    rep.add("counterexample.non_cmc", "counterexample.non_cmc", spread, None, passed=spread > 1e-4, detail="mean curvature spread must exceed 1e-4")
    worst = 0.0
    for p in points:
        jet = immersion_jet(surface, p, order=1)
        nu_c, _ = cofactor_normal(jet.value, jet.d1)
        nu = unit_normal(surface, p).nu
        worst = max(worst, min(np.linalg.norm(nu - nu_c), np.linalg.norm(nu + nu_c)))
    rep.add("counterexample.normal", "counterexample.normal", worst, cfg.tol["normal"])
    rep.data.update(kappa_min=kmin, kappa_max=kmax, min_immersion_factor=factor, h_spread=spread, lam=scan.lam)
    return rep


def _random_fraction(rng: Lcg64, nonzero: bool = False) -> Fraction:
    while True:
        x = Fraction(rng.integer(-20, 20), rng.integer(1, 12))
        if x or not nonzero:
            return x


def cmd_lemma22(cfg: RunConfig) -> VerificationReport:
    rep = VerificationReport("lemma22", cfg.as_dict())
    rng = Lcg64(cfg.seed)
    dependent = false_holds = instances = 0
    for _ in range(cfg.samples):
        k = rng.integer(2, 5)
        ps, roots = [], set()
        while len(ps) < k:
            p = exact.RationalLinear(_random_fraction(rng, True), _random_fraction(rng))
            if p.root not in roots:
                roots.add(p.root)
                ps.append(p)
        qs = exact.build_q(ps)
        cert = exact.independence_verdict(qs, ps)
        if not (cert.independent and cert.evaluation_diagonal):
            dependent += 1
        a = [_random_fraction(rng) for _ in range(k)]
        if not any(a):
            a[0] = Fraction(1)
        d = _random_fraction(rng)
        if isinstance(exact.partial_fraction_verdict(ps, a, d), exact.IdentityHolds):
            false_holds += 1
        instances += 1
    rep.add("lemma.independence", "lemma.independence", float(dependent), 0.0)
    rep.add("lemma.partial_fraction", "lemma.partial_fraction", float(false_holds), 0.0, detail=f"{instances} random instances")

    synthetic_false = 0
    for _ in range(cfg.samples):
        lam = float(_random_fraction(rng, True))
        size = rng.integer(1, 4)
        kappas = []
        while len(kappas) < size:
            x = float(_random_fraction(rng))
            if abs(x - lam) > 1e-3 and abs(x + 1 / lam) > 1e-3:
                kappas.append(x)
        n = size + 1
        result = geodesics.partition_and_obstruction(kappas, lam, float(_random_fraction(rng)), n=n)
        if isinstance(result.verdict, exact.IdentityHolds) or result.consistent:
            synthetic_false += 1
    rep.add("obstruction.partition", "obstruction.partition", float(synthetic_false), 0.0, detail="synthetic curvature lists with a generic value")
    rep.data.update(instances=instances, synthetic=cfg.samples)
    return rep


HANDLERS = {
    "verify": cmd_verify,
    "geodesics": cmd_geodesics,
    "spectrum": cmd_spectrum,
    "index-sweep": cmd_index_sweep,
    "counterexample": cmd_counterexample,
    "lemma22": cmd_lemma22,
}


def write_outputs(rep: VerificationReport, cfg: RunConfig) -> None:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(rep.to_json(), encoding="utf-8")
    if rep.command == "spectrum":
        write_csv(out / "spectrum.csv", rep.data["rows"], ("p", "q", "mu", "mult", "jac", "class"))
    elif rep.command == "index-sweep":
        write_csv(out / "index_sweep.csv", rep.data["rows"], ("r", "weak", "strong", "kernel"))
        write_tsv(out / "index_sweep.tsv", [(r["r"], r["weak"], r["strong"]) for r in rep.data["rows"]], ("r", "weak", "strong"))
    elif rep.command == "geodesics" and rep.data.get("table"):
        table = rep.data["table"]
        dim = len(table[0]["point"])
        kcount = len(table[0]["kappa_predicted"])
        columns = (
            ["s"]
            + [f"x{i}" for i in range(dim)]
            + ["ell"]
            + [f"kappa_pred{i + 1}" for i in range(kcount)]
            + [f"kappa_meas{i + 1}" for i in range(kcount)]
        )
        write_tsv(out / "geodesic.tsv", _geodesic_tsv_rows(rep), columns)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = resolve_config(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code) if exc.code is not None else 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        rep = HANDLERS[cfg.command](cfg)
    except (ConfigError, BadSpec, ValueError) as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except QuadCmcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        write_outputs(rep, cfg)
    else:
        sys.stdout.write(rep.to_json())
    return 0 if rep.ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
