"""Reference-interval Legendre algebra.

Everything in this module lives on the reference coordinate s in [-1, 1],
with the classical normalization L_m(1) = 1 (so |L_m| <= 1 on the interval
and L_m(-1) = (-1)^m).  Mesh cells elsewhere map onto this interval, which
makes every operator here mesh independent: evaluation, differentiation,
the antiderivative started at s = -1, Gauss quadrature, and the interior
Radau point sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RefPoly",
    "QuadratureRule",
    "eval_legendre",
    "legendre_table",
    "derivative_matrix",
    "ds_inverse",
    "gauss_rule",
    "rule_for_degree",
    "radau_points",
]


def eval_legendre(m, s):
    """Evaluate L_m(s) via the three-term recurrence.

    Works for scalars, numpy arrays, and exact rational scalars (the
    recurrence only needs +, *, and division by small integers).
    """
    if m < 0:
        raise ValueError("degree must be nonnegative")
    p0 = s * 0 + 1
    if m == 0:
        return p0
    p1 = s
    for n in range(2, m + 1):
        p0, p1 = p1, ((2 * n - 1) * s * p1 - (n - 1) * p0) / n
    return p1


def legendre_table(max_degree: int, s) -> np.ndarray:
    """Values L_0(s)..L_max(s), shape (max_degree + 1,) + s.shape."""
    s = np.asarray(s, dtype=float)
    table = np.empty((max_degree + 1,) + s.shape)
    table[0] = 1.0
    if max_degree >= 1:
        table[1] = s
    for n in range(2, max_degree + 1):
        table[n] = ((2 * n - 1) * s * table[n - 1] - (n - 1) * table[n - 2]) / n
    return table


def derivative_matrix(k: int) -> np.ndarray:
    """D with (coeffs @ D) = Legendre coefficients of d/ds of a degree-k poly.

    From L_m' = sum_{n < m, m - n odd} (2n + 1) L_n; the top row/column keep
    the output at the same length with a zero leading coefficient.
    """
    d = np.zeros((k + 1, k + 1))
    for m in range(1, k + 1):
        for n in range(m - 1, -1, -2):
            d[m, n] = 2 * n + 1
    return d


@dataclass(frozen=True)
class RefPoly:
    """Polynomial on [-1, 1] stored as Legendre coefficients (c_0, .., c_M).

    Coefficients are kept in a tuple so values are hashable and safely
    shared; entries may be floats or exact rationals.
    """

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, s):
        acc = s * 0
        p0 = s * 0 + 1
        p1 = s
        for m, c in enumerate(self.coeffs):
            if m == 0:
                p = p0
            elif m == 1:
                p = p1
            else:
                p0, p1 = p1, ((2 * m - 1) * s * p1 - (m - 1) * p0) / m
                p = p1
            acc = acc + c * p
        return acc

    def at_one(self):
        """Right-endpoint value; exact since L_m(1) = 1."""
        return sum(self.coeffs)

    def at_minus_one(self):
        """Left-endpoint value; exact since L_m(-1) = (-1)^m."""
        return sum(c if m % 2 == 0 else -c for m, c in enumerate(self.coeffs))

    def derivative(self) -> "RefPoly":
        c = self.coeffs
        top = len(c) - 1
        if top <= 0:
            return RefPoly((0 * c[0],))
        out = [0] * top
        for n in range(top):
            acc = 0
            for m in range(n + 1, top + 1):
                if (m - n) % 2 == 1:
                    acc = acc + c[m]
            out[n] = (2 * n + 1) * acc
        return RefPoly(tuple(out))

    def antiderivative(self) -> "RefPoly":
        """The integral from -1 to s, one degree higher, zero at s = -1.

        Mode rule: L_0 -> L_1 + L_0 and L_m -> (L_{m+1} - L_{m-1})/(2m + 1)
        for m >= 1.
        """
        c = self.coeffs
        out = [0] * (len(c) + 1)
        out[0] = out[0] + c[0]
        out[1] = out[1] + c[0]
        for m in range(1, len(c)):
            out[m + 1] = out[m + 1] + c[m] / (2 * m + 1)
            out[m - 1] = out[m - 1] - c[m] / (2 * m + 1)
        return RefPoly(tuple(out))

    def padded(self, length: int) -> np.ndarray:
        """Coefficients as a float array of this length (zero filled)."""
        if length < len(self.coeffs):
            raise ValueError("cannot pad below the polynomial degree")
        out = np.zeros(length)
        out[: len(self.coeffs)] = [float(c) for c in self.coeffs]
        return out

    def __add__(self, other: "RefPoly") -> "RefPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return RefPoly(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "RefPoly") -> "RefPoly":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "RefPoly":
        return RefPoly(tuple(scalar * c for c in self.coeffs))


def ds_inverse(p: RefPoly) -> RefPoly:
    """Antiderivative operator on the reference interval (zero at s = -1)."""
    return p.antiderivative()


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule on [-1, 1]: nodes in (-1, 1), positive weights summing to 2."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return self.nodes.size


def gauss_rule(n: int) -> QuadratureRule:
    """Gauss-Legendre rule with n nodes, exact for degree <= 2n - 1."""
    if n < 1:
        raise ValueError("node count must be positive")
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(nodes, weights)


def rule_for_degree(d: int) -> QuadratureRule:
    """Rule for polynomial integrands of degree <= d, with 2 nodes of headroom."""
    return gauss_rule((d + 2) // 2 + 2)


def _legendre_pair(k: int, sign: int, s):
    """L_{k+1}(s) + sign * L_k(s) evaluated along with its s-derivative."""
    s = np.asarray(s, dtype=float)
    table = legendre_table(k + 1, s)
    val = table[k + 1] + sign * table[k]
    # (1 - s^2) L_n' = n (L_{n-1} - s L_n); interior points keep |s| < 1
    denom = 1.0 - s * s
    dval = ((k + 1) * (table[k] - s * table[k + 1]) + sign * k * (table[k - 1] - s * table[k])) / denom
    return val, dval


def radau_points(k: int, side: str) -> np.ndarray:
    """The k interior Radau abscissae for degree k, sorted ascending.

    side='left'  -> roots of L_{k+1} + L_k, excluding s = -1;
    side='right' -> roots of L_{k+1} - L_k, excluding s = +1.

    Roots are bracketed by sign changes on a dense grid and polished by
    Newton iteration with a bisection fallback; convergence failure raises
    rather than returning unverified points.
    """
    if k < 1:
        raise ValueError("degree must be at least 1")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    sign = 1 if side == "left" else -1

    # Chebyshev-style grid clusters points near the endpoints where the
    # extreme roots sit; the margin excludes the known endpoint root.
    margin = 1e-7
    grid = -np.cos(np.linspace(0.0, np.pi, 64 * (k + 2)))
    grid = np.clip(grid, -1.0 + margin, 1.0 - margin)
    vals, _ = _legendre_pair(k, sign, grid)
    flips = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    roots = []
    for i in flips:
        lo, hi = grid[i], grid[i + 1]
        flo = vals[i]
        x = 0.5 * (lo + hi)
        converged = False
        for _ in range(100):
            f, df = _legendre_pair(k, sign, x)
            f, df = float(f), float(df)
            step_ok = df != 0.0
            if step_ok:
                x_new = x - f / df
                step_ok = lo < x_new < hi
            if not step_ok:
                # bisection keeps the bracket valid
                if flo * f < 0:
                    hi = x
                else:
                    lo, flo = x, f
                x_new = 0.5 * (lo + hi)
            if abs(x_new - x) < 1e-15:
                x = x_new
                converged = True
                break
            x = x_new
        residual = abs(float(_legendre_pair(k, sign, x)[0]))
        if not converged and residual > 1e-13:
            raise RuntimeError(
                f"Radau root finding failed: k={k}, side={side}, "
                f"bracket=({lo}, {hi}), residual={residual:.3e}"
            )
        roots.append(x)
    roots = np.array(sorted(roots))
    if roots.size != k:
        raise RuntimeError(
            f"Radau root count mismatch: k={k}, side={side}, found {roots.size}"
        )
    res = np.abs(_legendre_pair(k, sign, roots)[0])
    if np.any(res > 1e-13):
        raise RuntimeError(
            f"Radau residual too large: k={k}, side={side}, max={res.max():.3e}"
        )
    return roots
