"""Fisher curves in the 3-D information space and their asymmetry.

A trajectory of records maps to the parametric curve
F(beta) = (I1(beta), I2(beta), H(beta)) for one tensor component, where I1
and I2 are the matching entries of the two Fisher tensors and H is the
entropy. An up-then-down schedule yields a forward (beta increasing) and a
backward (beta decreasing) leg; the hysteresis gap is the mean Euclidean
distance between beta-aligned points of the two legs, zero iff the system
retraces its path exactly.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

COMPONENTS = ("mumu", "s2s2", "s2b", "bb")
LEGS = ("forward", "backward")

# math-notation aliases accepted anywhere a component name is taken
_COMPONENT_ALIASES = {
    "μμ": "mumu",
    "σ²σ²": "s2s2",
    "σ²β": "s2b",
    "ββ": "bb",
}

# tensor attribute holding each component (tensors store the 3x3 matrix as
# its four independent entries x, y, z, w)
_COMPONENT_ATTR = {"mumu": "x", "s2s2": "y", "s2b": "w", "bb": "z"}


def canonical_component(component: str) -> str:
    name = _COMPONENT_ALIASES.get(component, component)
    if name not in COMPONENTS:
        raise ValueError(f"component must be one of {COMPONENTS}, got {component!r}")
    return name


@dataclass(frozen=True)
class FisherCurve:
    """One leg of a Fisher curve: points (i1, i2, h) parameterized by beta."""

    points: np.ndarray  # (n, 3)
    betas: np.ndarray  # (n,)
    component: str
    leg: str

    def __post_init__(self) -> None:
        points = np.ascontiguousarray(self.points, dtype=np.float64)
        betas = np.ascontiguousarray(self.betas, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 3:
            raise ValueError(f"points must be (n, 3), got shape {points.shape}")
        if betas.shape != (points.shape[0],):
            raise ValueError("betas must parallel points")
        if len(betas) < 2:
            raise ValueError("a curve needs at least 2 points")
        component = canonical_component(self.component)
        if self.leg not in LEGS:
            raise ValueError(f"leg must be one of {LEGS}, got {self.leg!r}")
        diffs = np.diff(betas)
        if self.leg == "forward" and np.any(diffs < 0):
            raise ValueError("forward leg requires non-decreasing betas")
        if self.leg == "backward" and np.any(diffs > 0):
            raise ValueError("backward leg requires non-increasing betas")
        points.flags.writeable = False
        betas.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "component", component)

    def __len__(self) -> int:
        return len(self.betas)


def _split_legs(records) -> tuple[list, list]:
    """Split records at the beta peak; constant-beta runs split in half."""
    betas = np.array([r.beta_set for r in records], dtype=np.float64)
    if np.all(betas == betas[0]):
        half = len(records) // 2
        return list(records[:half]), list(records[half:])
    peak = int(np.argmax(betas))
    if peak == len(records) - 1:
        return list(records), []
    if peak == 0:
        return [], list(records)
    return list(records[: peak + 1]), list(records[peak + 1 :])


def build_fisher_curve(records, component: str, leg: str) -> FisherCurve:
    """Project trajectory records onto one leg of a Fisher curve.

    Parameters
    ----------
    records : sequence of TrajectoryRecord
    component : {"mumu", "s2s2", "s2b", "bb"} (math spellings accepted)
    leg : {"forward", "backward"}
        Forward is the beta-increasing sub-sequence up to and including the
        peak; backward is everything after it. A constant-beta (null)
        trajectory is split in half so both legs exist.
    """
    records = list(records)
    if not records:
        raise ValueError("records must be non-empty")
    component = canonical_component(component)
    if leg not in LEGS:
        raise ValueError(f"leg must be one of {LEGS}, got {leg!r}")
    forward, backward = _split_legs(records)
    chosen = forward if leg == "forward" else backward
    if len(chosen) < 2:
        raise ValueError(f"{leg} leg has fewer than 2 records")
    attr = _COMPONENT_ATTR[component]
    points = np.array(
        [(getattr(r.g1, attr), getattr(r.g2, attr), r.entropy) for r in chosen]
    )
    betas = np.array([r.beta_set for r in chosen])
    return FisherCurve(points=points, betas=betas, component=component, leg=leg)


def hysteresis_gap(forward: FisherCurve, backward: FisherCurve) -> float:
    """Mean Euclidean distance between beta-aligned points of two legs.

    The second curve is reversed so both run over increasing beta. Exactly
    matching grids pair up positionally; an up-then-down schedule's legs sit
    on grids shifted by one increment (the peak belongs to the forward leg),
    so the overlap forward[:-1] vs reversed-backward[1:] is used instead.
    Returns 0 for perfectly retraced curves.
    """
    if forward.component != backward.component:
        raise ValueError(
            f"component mismatch: {forward.component!r} vs {backward.component!r}"
        )
    fb = forward.betas
    bb = backward.betas[::-1]
    fp = forward.points
    bp = backward.points[::-1]
    if fb.shape == bb.shape and np.allclose(fb, bb, rtol=0.0, atol=1e-9):
        pass  # same grid, positional pairing
    elif fb.shape == bb.shape and np.allclose(fb[:-1], bb[1:], rtol=0.0, atol=1e-9):
        fb, fp = fb[:-1], fp[:-1]
        bb, bp = bb[1:], bp[1:]
    else:
        raise ValueError("beta grids do not align between the two curves")
    return float(np.mean(np.linalg.norm(fp - bp, axis=1)))


def export_curve(curve: FisherCurve, format: str = "csv") -> bytes:
    """Serialize a curve as CSV (columns beta,i1,i2,h) or JSON; lossless."""
    if format == "csv":
        out = io.StringIO()
        out.write("beta,i1,i2,h\n")
        for beta, (i1, i2, h) in zip(curve.betas, curve.points):
            out.write(f"{beta:.17g},{i1:.17g},{i2:.17g},{h:.17g}\n")
        return out.getvalue().encode()
    if format == "json":
        rows = [
            {"beta": float(beta), "i1": float(i1), "i2": float(i2), "h": float(h)}
            for beta, (i1, i2, h) in zip(curve.betas, curve.points)
        ]
        return json.dumps(rows, indent=2).encode()
    raise ValueError(f"format must be 'csv' or 'json', got {format!r}")
