"""Discrete half-plane grid shared by geometry, linearization, and solver.

x1 in [0, X1] with N1 nodes including the interface node x1 = 0; x2 in
[0, X2) with N2 nodes, periodic.  Derivative stencils: 2nd-order centered
interior, first-order one-sided rows at the x1 ends (the combination with
trapezoid weights satisfies exact discrete integration by parts).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid:
    N1: int
    N2: int
    X1: float
    X2: float
    dt: float = 0.0
    T_final: float = 0.0
    cfl_max: float = 0.4

    def __post_init__(self):
        if self.N1 < 4 or self.N2 < 4:
            raise ValueError("grid needs at least 4 nodes per direction")
        if self.X1 <= 0 or self.X2 <= 0:
            raise ValueError("grid extents must be positive")

    @property
    def h1(self) -> float:
        return self.X1 / (self.N1 - 1)

    @property
    def h2(self) -> float:
        return self.X2 / self.N2

    @property
    def x1(self) -> np.ndarray:
        return np.linspace(0.0, self.X1, self.N1)

    @property
    def x2(self) -> np.ndarray:
        return np.arange(self.N2) * self.h2

    def mesh(self):
        """(x1, x2) coordinate arrays broadcast to shape (N1, N2)."""
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    @property
    def n_steps(self) -> int:
        if self.dt <= 0:
            return 0
        return int(round(self.T_final / self.dt))

    @property
    def p_weights1(self) -> np.ndarray:
        """Trapezoid quadrature weights in x1 (the SBP norm)."""
        w = np.full(self.N1, self.h1)
        w[0] = w[-1] = 0.5 * self.h1
        return w


def d1_field(U: np.ndarray, h1: float) -> np.ndarray:
    """x1-derivative along axis -2: centered interior, one-sided ends."""
    out = np.empty_like(U)
    out[..., 1:-1, :] = (U[..., 2:, :] - U[..., :-2, :]) / (2.0 * h1)
    out[..., 0, :] = (U[..., 1, :] - U[..., 0, :]) / h1
    out[..., -1, :] = (U[..., -1, :] - U[..., -2, :]) / h1
    return out


def d2_field(U: np.ndarray, h2: float) -> np.ndarray:
    """Periodic centered x2-derivative along the last axis."""
    return (np.roll(U, -1, axis=-1) - np.roll(U, 1, axis=-1)) / (2.0 * h2)


def d2_line(phi: np.ndarray, h2: float, order: int = 4) -> np.ndarray:
    """Periodic x2-derivative of a boundary line (4th-order by default)."""
    if order == 2:
        return (np.roll(phi, -1) - np.roll(phi, 1)) / (2.0 * h2)
    return (
        -np.roll(phi, -2) + 8.0 * np.roll(phi, -1) - 8.0 * np.roll(phi, 1) + np.roll(phi, 2)
    ) / (12.0 * h2)


def one_sided_d1_at_wall(field: np.ndarray, h1: float) -> np.ndarray:
    """2nd-order one-sided x1-derivative at the interface node (axis -2)."""
    return (-3.0 * field[..., 0, :] + 4.0 * field[..., 1, :] - field[..., 2, :]) / (2.0 * h1)
