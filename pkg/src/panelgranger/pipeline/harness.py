"""Monte-Carlo power/FDR experiments, gamma sweeps and directional studies.

Every simulated repetition pairs a causal panel with a null panel built
from the same seed, so both share coefficients and innovations and differ
only in the cross coefficients.  Discoveries are scored as

    power = S / R_valid        FDR = V / (V + S)   (0 when V + S = 0)

where S counts rejected causal panels and V rejected null panels.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..aggregation import qppa_fixed, qppa_gamma_min
from ..dh import DEFAULT_BREPS, dh_block_bootstrap, dh_statistics
from ..errors import DomainError, StatisticalError
from ..granger import DIRECTIONS, Panel, granger_panel, p_values
from ..simulate import SimConfig, simulate_panel

log = logging.getLogger(__name__)

METHODS = ("qppa", "dh", "dh_bb")
VERDICTS = ("x_to_y", "y_to_x", "both_ambiguous", "none")


def _check_methods(methods: Iterable[str]) -> tuple[str, ...]:
    methods = tuple(methods)
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise DomainError(f"methods must be drawn from {METHODS}, got {list(methods)}")
    return methods


def _check_gammas(gammas) -> np.ndarray:
    g = np.atleast_1d(np.asarray(gammas, dtype=np.float64))
    if g.size == 0 or np.any(g <= 0) or np.any(g >= 1):
        raise DomainError("gammas must lie in (0, 1)")
    return g


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return float(alpha)


def repetition_seed(seed: int, *key: int) -> int:
    """Independent 32-bit seed for one repetition of one grid cell."""
    return int(np.random.SeedSequence([int(seed), *[int(k) for k in key]]).generate_state(1)[0])


def qppa_pvalue(member_p: np.ndarray, gamma: float | None = 0.5, gamma_min: float | None = None) -> float:
    if gamma_min is not None:
        return qppa_gamma_min(member_p, gamma_min).p_value
    return qppa_fixed(member_p, gamma).p_value


def panel_pvalue(
    panel: Panel,
    method: str,
    lag_order: int = 1,
    direction: str = "x_to_y",
    gamma: float = 0.5,
    gamma_min: float | None = None,
    breps: int = DEFAULT_BREPS,
    block_size: int = 1,
    seed: int = 0,
    strict: bool = True,
) -> float:
    """Panel p-value of one method; DH variants use the finite-T standardization."""
    if method == "qppa":
        p = p_values(granger_panel(panel, lag_order, direction, strict=strict))
        if p.size == 0:
            raise StatisticalError("every member failed the Granger regression")
        return qppa_pvalue(p, gamma, gamma_min)
    if method == "dh":
        return dh_statistics(panel, lag_order, direction, strict=strict).p_semi
    if method == "dh_bb":
        return dh_block_bootstrap(panel, lag_order, direction, breps, block_size, seed, strict=strict).p_value
    raise DomainError(f"unknown method {method!r}")


def _score(rej_causal: np.ndarray, rej_null: np.ndarray) -> tuple[float, float]:
    s = int(rej_causal.sum())
    v = int(rej_null.sum())
    power = s / rej_causal.size if rej_causal.size else float("nan")
    fdr = v / (v + s) if v + s else 0.0
    return power, fdr


@dataclass
class CellResult:
    n_timestamps: int
    n_members: int
    method: str
    direction: str
    gamma: float | None
    power: float
    fdr: float
    true_rejections: int
    false_rejections: int
    valid: int
    errors: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class PowerFdrReport:
    cells: list[CellResult]
    repetitions: int
    alpha: float
    gamma: float | None
    gamma_min: float | None
    seed: int
    lag_order: int = 1
    breps: int | None = None
    config: dict = field(default_factory=dict)

    def cell(self, n_timestamps: int, n_members: int, method: str, gamma: float | None = None) -> CellResult:
        for c in self.cells:
            if (c.n_timestamps, c.n_members, c.method) == (n_timestamps, n_members, method) and (
                gamma is None or c.gamma == gamma
            ):
                return c
        raise KeyError((n_timestamps, n_members, method, gamma))

    def to_dict(self) -> dict:
        return {
            "repetitions": self.repetitions,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "gamma_min": self.gamma_min,
            "lag_order": self.lag_order,
            "breps": self.breps,
            "seed": self.seed,
            "config": self.config,
            "cells": [c.to_dict() for c in self.cells],
        }

    def table(self) -> tuple[list[str], list[list]]:
        headers = ["T", "N", "method", "power", "FDR", "S", "V", "valid", "errors"]
        rows = [
            [c.n_timestamps, c.n_members, c.method, f"{c.power:.3f}", f"{c.fdr:.3f}",
             c.true_rejections, c.false_rejections, c.valid, c.errors]
            for c in self.cells
        ]
        return headers, rows


def _simulated_pvalues(
    cfg: SimConfig,
    methods: Sequence[str],
    gammas: np.ndarray,
    gamma_min: float | None,
    lag_order: int,
    direction: str,
    breps: int,
    block_size: int,
) -> dict[tuple[str, float | None], tuple[float, float]] | None:
    """p-values of every method on one matched causal/null pair, or None on error."""
    out = {}
    try:
        for causal in (True, False):
            panel = simulate_panel(cfg.replace(causal=causal)).panel
            for method in methods:
                if method == "qppa":
                    p = p_values(granger_panel(panel, lag_order, direction))
                    if gamma_min is not None:
                        keys = [(("qppa", None), qppa_gamma_min(p, gamma_min).p_value)]
                    else:
                        keys = [(("qppa", float(g)), qppa_fixed(p, g).p_value) for g in gammas]
                else:
                    pv = panel_pvalue(panel, method, lag_order, direction,
                                      breps=breps, block_size=block_size, seed=cfg.seed)
                    keys = [((method, None), pv)]
                for key, pv in keys:
                    out.setdefault(key, [None, None])[0 if causal else 1] = pv
    except StatisticalError as exc:
        log.warning("repetition with seed %d excluded: %s", cfg.seed, exc)
        return None
    return {k: (v[0], v[1]) for k, v in out.items()}


def _run_cell(template, T, N, methods, gammas, gamma_min, repetitions, alpha, seed,
              lag_order, direction, breps, block_size):
    collected: dict = {}
    errors = 0
    for r in range(repetitions):
        cfg = template.replace(n_timestamps=T, n_members=N, seed=repetition_seed(seed, T, N, r))
        res = _simulated_pvalues(cfg, methods, gammas, gamma_min, lag_order, direction, breps, block_size)
        if res is None:
            errors += 1
            continue
        for key, pair in res.items():
            collected.setdefault(key, []).append(pair)
    cells = []
    for method in methods:
        keys = [("qppa", float(g)) for g in gammas] if method == "qppa" and gamma_min is None else [(method, None)]
        for key in keys:
            pairs = np.array(collected.get(key, []), dtype=np.float64).reshape(-1, 2)
            rc, rn = pairs[:, 0] <= alpha, pairs[:, 1] <= alpha
            power, fdr = _score(rc, rn)
            cells.append(CellResult(T, N, method, direction, key[1], power, fdr,
                                    int(rc.sum()), int(rn.sum()), len(pairs), errors))
    return cells


def run_power_fdr(
    template: SimConfig,
    grid: Sequence[tuple[int, int]] | None = None,
    methods: Sequence[str] = ("qppa",),
    repetitions: int = 100,
    alpha: float = 0.05,
    gamma: float = 0.5,
    seed: int = 0,
    gamma_min: float | None = None,
    lag_order: int = 1,
    breps: int = DEFAULT_BREPS,
    block_size: int = 1,
    direction: str = "x_to_y",
) -> PowerFdrReport:
    """Power and FDR of each method on each ``(T, N)`` cell.

    ``gamma_min`` switches QPPA to the adaptive rule.  Repetitions that
    raise a statistical error are excluded and counted in ``errors``.
    """
    if repetitions < 1:
        raise DomainError("repetitions must be at least 1")
    if direction not in DIRECTIONS:
        raise DomainError(f"direction must be one of {DIRECTIONS}")
    methods = _check_methods(methods)
    alpha = _check_alpha(alpha)
    gammas = _check_gammas([gamma])
    grid = list(grid) if grid is not None else [(template.n_timestamps, template.n_members)]
    cells = []
    for T, N in grid:
        cells += _run_cell(template, int(T), int(N), methods, gammas, gamma_min, repetitions,
                           alpha, seed, lag_order, direction, breps, block_size)
    return PowerFdrReport(
        cells, repetitions, alpha, None if gamma_min is not None else float(gamma), gamma_min, seed,
        lag_order, breps if "dh_bb" in methods else None, _config_dict(template),
    )


def _config_dict(cfg: SimConfig) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.__dict__.items()}


@dataclass
class GammaSweepReport:
    gammas: np.ndarray
    power: np.ndarray
    fdr: np.ndarray
    repetitions: int
    alpha: float
    seed: int
    source: str
    valid: int = 0
    errors: int = 0
    subset_size: int | None = None

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "repetitions": self.repetitions,
            "alpha": self.alpha,
            "seed": self.seed,
            "valid": self.valid,
            "errors": self.errors,
            "subset_size": self.subset_size,
            "rows": [{"gamma": float(g), "power": float(p), "fdr": float(f)}
                     for g, p, f in zip(self.gammas, self.power, self.fdr)],
        }

    def table(self) -> tuple[list[str], list[list]]:
        return ["gamma", "power", "FDR"], [
            [f"{g:.2f}", f"{p:.3f}", f"{f:.3f}"] for g, p, f in zip(self.gammas, self.power, self.fdr)
        ]


DEFAULT_GAMMA_GRID = np.round(np.arange(1, 100) / 100, 2)


def gamma_sweep(
    source: SimConfig | Panel,
    gammas: Sequence[float] = DEFAULT_GAMMA_GRID,
    alpha: float = 0.05,
    repetitions: int = 100,
    seed: int = 0,
    lag_order: int = 1,
    subset_size: int | None = None,
    true_direction: str = "x_to_y",
    strict: bool | None = None,
) -> GammaSweepReport:
    """Power and FDR of QPPA as a function of the quantile level.

    With a :class:`SimConfig` each repetition is a matched causal/null pair.
    With an observed :class:`Panel` each repetition draws ``subset_size``
    members without replacement and tests both directions; a rejection of
    ``true_direction`` is a true discovery and a rejection of the reverse
    direction a false one.  FDR is then the discovery ratio V/(V+S); the
    plain rejection rate of the reverse direction is another reading and can
    be recovered from ``fdr`` and ``power`` only when both are known per run.
    """
    g = _check_gammas(gammas)
    alpha = _check_alpha(alpha)
    if repetitions < 1:
        raise DomainError("repetitions must be at least 1")
    if isinstance(source, SimConfig):
        cells = _run_cell(source, source.n_timestamps, source.n_members, ("qppa",), g, None,
                          repetitions, alpha, seed, lag_order, "x_to_y", DEFAULT_BREPS, 1)
        return GammaSweepReport(
            g, np.array([c.power for c in cells]), np.array([c.fdr for c in cells]),
            repetitions, alpha, seed, "simulated", cells[0].valid, cells[0].errors,
        )
    if not isinstance(source, Panel):
        raise DomainError("source must be a SimConfig or a Panel")
    if true_direction not in DIRECTIONS:
        raise DomainError(f"true_direction must be one of {DIRECTIONS}")
    strict = False if strict is None else strict
    size = source.n_members if subset_size is None else int(subset_size)
    if not 1 <= size <= source.n_members:
        raise DomainError(f"subset_size must lie in [1, {source.n_members}]")
    false_direction = DIRECTIONS[1 - DIRECTIONS.index(true_direction)]
    rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
    true_rej = np.zeros(g.size, dtype=int)
    false_rej = np.zeros(g.size, dtype=int)
    valid = errors = 0
    for _ in range(repetitions):
        idx = np.sort(rng.choice(source.n_members, size=size, replace=False))
        sub = source.subset(idx)
        try:
            pt = p_values(granger_panel(sub, lag_order, true_direction, strict=strict))
            pf = p_values(granger_panel(sub, lag_order, false_direction, strict=strict))
            if pt.size == 0 or pf.size == 0:
                raise StatisticalError("no usable members in subset")
        except StatisticalError as exc:
            log.warning("subset excluded: %s", exc)
            errors += 1
            continue
        valid += 1
        true_rej += [qppa_fixed(pt, x).p_value <= alpha for x in g]
        false_rej += [qppa_fixed(pf, x).p_value <= alpha for x in g]
    power = true_rej / valid if valid else np.full(g.size, np.nan)
    total = true_rej + false_rej
    fdr = np.divide(false_rej, total, out=np.zeros(g.size), where=total > 0)
    return GammaSweepReport(g, power, fdr, repetitions, alpha, seed, "panel", valid, errors, size)


def verdict(p_xy: float, p_yx: float, alpha: float) -> str:
    """Pruning rule: a rejection in both directions is treated as possible confounding."""
    fwd, back = p_xy <= alpha, p_yx <= alpha
    if fwd and back:
        return "both_ambiguous"
    if fwd:
        return "x_to_y"
    if back:
        return "y_to_x"
    return "none"


@dataclass
class StudyRow:
    lag_order: int
    method: str
    p_x_to_y: float
    p_y_to_x: float
    verdict: str


@dataclass
class DirectionalStudyResult:
    rows: list[StudyRow]
    alpha: float
    gamma: float

    def verdicts(self, method: str) -> dict[int, str]:
        return {r.lag_order: r.verdict for r in self.rows if r.method == method}

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "gamma": self.gamma, "rows": [dict(r.__dict__) for r in self.rows]}

    def table(self) -> tuple[list[str], list[list]]:
        return ["P", "method", "p(x->y)", "p(y->x)", "verdict"], [
            [r.lag_order, r.method, f"{r.p_x_to_y:.3f}", f"{r.p_y_to_x:.3f}", r.verdict] for r in self.rows
        ]


def directional_study(
    panel: Panel,
    lag_orders: Sequence[int],
    methods: Sequence[str] = METHODS,
    alpha: float = 0.05,
    gamma: float = 0.5,
    breps: int = 20,
    block_size: int = 1,
    seed: int = 0,
    strict: bool = False,
) -> DirectionalStudyResult:
    """Test both directions for every lag order and method, then apply :func:`verdict`."""
    methods = _check_methods(methods)
    alpha = _check_alpha(alpha)
    rows = []
    for P in lag_orders:
        for method in methods:
            kw = dict(lag_order=int(P), gamma=gamma, breps=breps, block_size=block_size, seed=seed, strict=strict)
            p_xy = panel_pvalue(panel, method, direction="x_to_y", **kw)
            p_yx = panel_pvalue(panel, method, direction="y_to_x", **kw)
            rows.append(StudyRow(int(P), method, p_xy, p_yx, verdict(p_xy, p_yx, alpha)))
    return DirectionalStudyResult(rows, alpha, gamma)
