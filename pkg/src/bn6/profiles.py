"""Radial profiles: the common currency of every solver in this package.

A profile stores values and first derivatives on a strictly increasing node
array starting at 0; evaluation between nodes is C^1 cubic Hermite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RadialProfile", "PROFILE_HEADER"]

PROFILE_HEADER = "# bn6 radial-profile"


def _locate(nodes, r):
    idx = np.searchsorted(nodes, r, side="right") - 1
    return np.clip(idx, 0, len(nodes) - 2)


@dataclass
class RadialProfile:
    """A radially symmetric function on [0, R] with C^1 Hermite interpolation.

    nodes: strictly increasing grid, nodes[0] == 0, nodes[-1] == R.
    values, derivs: samples of the function and its radial derivative.
    """

    nodes: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.ascontiguousarray(self.nodes, dtype=float)
        self.values = np.ascontiguousarray(self.values, dtype=float)
        self.derivs = np.ascontiguousarray(self.derivs, dtype=float)
        if self.nodes.ndim != 1 or self.nodes.shape != self.values.shape != self.derivs.shape:
            if self.nodes.shape != self.values.shape or self.nodes.shape != self.derivs.shape:
                raise ValueError("nodes, values, derivs must share one 1-D shape")
        if self.nodes[0] != 0.0:
            raise ValueError("profile grid must start at r = 0")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("profile grid must be strictly increasing")

    @property
    def radius(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_cells(self) -> int:
        return len(self.nodes) - 1

    def validate_bc(self, tol_bc: float) -> bool:
        """Check the symmetry and Dirichlet boundary conditions."""
        return abs(self.derivs[0]) <= tol_bc and abs(self.values[-1]) <= tol_bc

    # -- Hermite evaluation ------------------------------------------------

    def _cell_data(self, r):
        r = np.asarray(r, dtype=float)
        idx = _locate(self.nodes, r)
        x0 = self.nodes[idx]
        h = self.nodes[idx + 1] - x0
        t = (r - x0) / h
        return idx, h, t

    def __call__(self, r):
        idx, h, t = self._cell_data(r)
        y0 = self.values[idx]
        y1 = self.values[idx + 1]
        d0 = self.derivs[idx]
        d1 = self.derivs[idx + 1]
        omt = 1.0 - t
        return (
            (1.0 + 2.0 * t) * omt * omt * y0
            + t * omt * omt * h * d0
            + t * t * (3.0 - 2.0 * t) * y1
            + t * t * (t - 1.0) * h * d1
        )

    def derivative(self, r):
        idx, h, t = self._cell_data(r)
        y0 = self.values[idx]
        y1 = self.values[idx + 1]
        d0 = self.derivs[idx]
        d1 = self.derivs[idx + 1]
        return (
            6.0 * t * (t - 1.0) / h * (y0 - y1)
            + (1.0 - t) * (1.0 - 3.0 * t) * d0
            + t * (3.0 * t - 2.0) * d1
        )

    def second_derivative(self, r):
        """Curvature of the Hermite interpolant (piecewise linear per cell)."""
        idx, h, t = self._cell_data(r)
        y0 = self.values[idx]
        y1 = self.values[idx + 1]
        d0 = self.derivs[idx]
        d1 = self.derivs[idx + 1]
        return (
            (12.0 * t - 6.0) / (h * h) * (y0 - y1)
            + (6.0 * t - 4.0) / h * d0
            + (6.0 * t - 2.0) / h * d1
        )

    # -- structure ----------------------------------------------------------

    def node_count(self, rel_floor: float = 1e-12) -> int:
        """Interior sign changes, excluding the Dirichlet endpoint."""
        v = self.values[:-1]
        scale = np.max(np.abs(self.values))
        if scale == 0.0:
            return 0
        keep = np.abs(v) > rel_floor * scale
        sg = np.sign(v[keep])
        if sg.size < 2:
            return 0
        return int(np.sum(sg[1:] != sg[:-1]))

    def resample(self, new_nodes) -> "RadialProfile":
        new_nodes = np.ascontiguousarray(new_nodes, dtype=float)
        return RadialProfile(new_nodes, self(new_nodes), self.derivative(new_nodes))

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{PROFILE_HEADER} R={self.radius:.17g} N={self.n_cells}"]
        for r, v, d in zip(self.nodes, self.values, self.derivs):
            lines.append(f"{r:.17g} {v:.17g} {d:.17g}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "RadialProfile":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith(PROFILE_HEADER):
            raise ValueError("not a bn6 radial-profile stream")
        data = np.array([[float(tok) for tok in ln.split()] for ln in lines[1:]])
        return cls(data[:, 0], data[:, 1], data[:, 2])

    @classmethod
    def read(cls, path) -> "RadialProfile":
        with open(path, "r", encoding="ascii") as fh:
            return cls.from_text(fh.read())
