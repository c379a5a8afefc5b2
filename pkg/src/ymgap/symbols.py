"""Polynomial symbols in conjugate variable pairs (z*, z) and their calculus.

A term ``c * z*^beta z^alpha`` is stored as ``terms[(beta, alpha)] = c`` with
``beta`` and ``alpha`` dense exponent tuples. Coefficients are Python
``complex`` by default; ``Fraction``/``int`` coefficients are kept exact,
which the oracle tests use.

Composition conventions: the left factor ``p2`` is applied after ``p1``,
i.e. star products give the symbol of the operator product ``Q2 Q1``.
"""
from __future__ import annotations

import enum
import itertools
import math
from fractions import Fraction
from numbers import Number
from typing import Iterable, Mapping, Sequence

Key = tuple[tuple[int, ...], tuple[int, ...]]


class Ordering(str, enum.Enum):
    NORMAL = "normal"
    WEYL = "weyl"
    ANTINORMAL = "antinormal"


# Weierstrass parameter t taking a symbol of ordering ``src`` to ordering ``dst``
_POSITION = {Ordering.NORMAL: 0.0, Ordering.WEYL: -0.5, Ordering.ANTINORMAL: -1.0}


def _coerce(c):
    if isinstance(c, (Fraction, int)) and not isinstance(c, bool):
        return c
    return complex(c)


def _is_exact(c) -> bool:
    return isinstance(c, (Fraction, int))


class PolySymbol:
    """Finitely supported polynomial in ``z*_j, z_j`` for ``j < n_modes``."""

    __slots__ = ("n_modes", "terms")

    def __init__(self, n_modes: int, terms: Mapping[Key, Number] | None = None):
        self.n_modes = int(n_modes)
        clean: dict[Key, Number] = {}
        for (beta, alpha), c in (terms or {}).items():
            beta, alpha = tuple(int(b) for b in beta), tuple(int(a) for a in alpha)
            if len(beta) != self.n_modes or len(alpha) != self.n_modes:
                raise ValueError("exponent length does not match n_modes")
            if min(beta + alpha, default=0) < 0:
                raise ValueError("negative exponent")
            c = _coerce(c)
            if c != 0:
                key = (beta, alpha)
                clean[key] = clean.get(key, 0) + c
                if clean[key] == 0:
                    del clean[key]
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, n_modes: int, c=1) -> "PolySymbol":
        zero = (0,) * n_modes
        return cls(n_modes, {(zero, zero): c})

    @classmethod
    def monomial(cls, beta: Sequence[int], alpha: Sequence[int], c=1) -> "PolySymbol":
        return cls(len(beta), {(tuple(beta), tuple(alpha)): c})

    @classmethod
    def z(cls, n_modes: int, j: int, c=1) -> "PolySymbol":
        alpha = tuple(1 if i == j else 0 for i in range(n_modes))
        return cls(n_modes, {((0,) * n_modes, alpha): c})

    @classmethod
    def zbar(cls, n_modes: int, j: int, c=1) -> "PolySymbol":
        beta = tuple(1 if i == j else 0 for i in range(n_modes))
        return cls(n_modes, {(beta, (0,) * n_modes): c})

    @classmethod
    def number(cls, n_modes: int, c=1) -> "PolySymbol":
        """Sum over modes of ``z*_j z_j``."""
        out = {}
        for j in range(n_modes):
            e = tuple(1 if i == j else 0 for i in range(n_modes))
            out[(e, e)] = c
        return cls(n_modes, out)

    # -- inspection ---------------------------------------------------
    def __repr__(self) -> str:
        return f"PolySymbol(n_modes={self.n_modes}, terms={len(self.terms)}, degree={self.degree})"

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    @property
    def degree(self) -> int:
        return max((sum(b) + sum(a) for b, a in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def exact(self) -> bool:
        return all(_is_exact(c) for c in self.terms.values())

    def coefficient(self, beta: Sequence[int], alpha: Sequence[int]):
        return self.terms.get((tuple(beta), tuple(alpha)), 0)

    def homogeneous_part(self, degree: int) -> "PolySymbol":
        return PolySymbol(
            self.n_modes, {k: c for k, c in self.terms.items() if sum(k[0]) + sum(k[1]) == degree}
        )

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def is_real_diagonal(self, tol: float = 0.0) -> bool:
        """True when ``c(beta, alpha) == conj(c(alpha, beta))`` for all pairs."""
        scale = max(self.max_abs(), 1.0)
        for (beta, alpha), c in self.terms.items():
            mirror = self.terms.get((alpha, beta), 0)
            if abs(c - mirror.conjugate()) > tol * scale:
                return False
        return True

    def conjugate(self) -> "PolySymbol":
        return PolySymbol(self.n_modes, {(a, b): c.conjugate() for (b, a), c in self.terms.items()})

    def evaluate(self, zeta) -> complex:
        """Value on the real diagonal ``z = zeta``, ``z* = conj(zeta)``."""
        zeta = [complex(v) for v in zeta]
        zbar = [v.conjugate() for v in zeta]
        total = 0j
        for (beta, alpha), c in self.terms.items():
            term = complex(c)
            for j in range(self.n_modes):
                if beta[j]:
                    term *= zbar[j] ** beta[j]
                if alpha[j]:
                    term *= zeta[j] ** alpha[j]
            total += term
        return total

    def allclose(self, other: "PolySymbol", atol: float = 1e-12) -> bool:
        return (self - other).max_abs() <= atol

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "PolySymbol"):
        if not isinstance(other, PolySymbol):
            raise TypeError("expected PolySymbol")
        if other.n_modes != self.n_modes:
            raise ValueError(f"mode count mismatch: {self.n_modes} vs {other.n_modes}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolySymbol):
            return NotImplemented
        return self.n_modes == other.n_modes and self.terms == other.terms

    __hash__ = None

    def __add__(self, other) -> "PolySymbol":
        if isinstance(other, Number):
            other = PolySymbol.constant(self.n_modes, other)
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return PolySymbol(self.n_modes, out)

    __radd__ = __add__

    def __neg__(self) -> "PolySymbol":
        return PolySymbol(self.n_modes, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "PolySymbol":
        return self + (-other)

    def __rsub__(self, other) -> "PolySymbol":
        return (-self) + other

    def __mul__(self, other) -> "PolySymbol":
        if isinstance(other, Number):
            other = _coerce(other)
            return PolySymbol(self.n_modes, {k: c * other for k, c in self.terms.items()})
        self._check(other)
        out: dict[Key, Number] = {}
        for (b1, a1), c1 in self.terms.items():
            for (b2, a2), c2 in other.terms.items():
                key = (
                    tuple(x + y for x, y in zip(b1, b2)),
                    tuple(x + y for x, y in zip(a1, a2)),
                )
                out[key] = out.get(key, 0) + c1 * c2
        return PolySymbol(self.n_modes, out)

    def __rmul__(self, other) -> "PolySymbol":
        return self * other

    def __pow__(self, n: int) -> "PolySymbol":
        out = PolySymbol.constant(self.n_modes, 1)
        for _ in range(n):
            out = out * self
        return out

    # -- serialization ------------------------------------------------
    def to_text(self) -> str:
        lines = [f"# n_modes={self.n_modes}"]
        for (beta, alpha), c in sorted(self.terms.items()):
            c = complex(c)
            lines.append(
                f"{c.real!r},{c.imag!r} {','.join(map(str, beta))} {','.join(map(str, alpha))}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PolySymbol":
        n_modes = None
        terms = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "n_modes=" in line:
                    n_modes = int(line.split("n_modes=")[1].split()[0])
                continue
            coeff, beta, alpha = line.split()
            re, im = coeff.split(",")
            terms[(_parse_idx(beta), _parse_idx(alpha))] = complex(float(re), float(im))
        if n_modes is None:
            raise ValueError("missing '# n_modes=' header")
        return cls(n_modes, terms)


def _parse_idx(s: str) -> tuple[int, ...]:
    return tuple(int(v) for v in s.split(",")) if s else ()


def _falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def _multi_range(bound: Sequence[int]):
    return itertools.product(*(range(b + 1) for b in bound))


def _prod_fact(g: Sequence[int]) -> int:
    out = 1
    for v in g:
        out *= math.factorial(v)
    return out


def diff(p: PolySymbol, j: int, conjugate: bool = False) -> PolySymbol:
    """Formal partial derivative in ``z_j`` (or ``z*_j`` if ``conjugate``)."""
    if not 0 <= j < p.n_modes:
        raise IndexError(j)
    out = {}
    for (beta, alpha), c in p.terms.items():
        exps = beta if conjugate else alpha
        e = exps[j]
        if e == 0:
            continue
        lowered = exps[:j] + (e - 1,) + exps[j + 1 :]
        key = (lowered, alpha) if conjugate else (beta, lowered)
        out[key] = out.get(key, 0) + c * e
    return PolySymbol(p.n_modes, out)


def laplacian(p: PolySymbol) -> PolySymbol:
    """``sum_j d/dz*_j d/dz_j``."""
    out = PolySymbol(p.n_modes)
    for j in range(p.n_modes):
        out = out + diff(diff(p, j), j, conjugate=True)
    return out


def weierstrass_transform(p: PolySymbol, t) -> PolySymbol:
    """``exp(t * sum_j d/dz*_j d/dz_j) p`` as a terminating series."""
    result = PolySymbol(p.n_modes, dict(p.terms))
    if t == 0:
        return result
    term = p
    m = 0
    while True:
        term = laplacian(term)
        m += 1
        if term.is_zero():
            break
        weight = t**m / math.factorial(m)
        result = result + term * weight
    return result


def _parse_ordering(tag) -> Ordering:
    try:
        return Ordering(tag)
    except ValueError:
        raise ValueError(f"unknown ordering {tag!r}; expected one of normal, weyl, antinormal") from None


def ordering_shift(src, dst) -> Fraction:
    """Weierstrass parameter converting a ``src``-ordered symbol into ``dst`` ordering."""
    src, dst = _parse_ordering(src), _parse_ordering(dst)
    return Fraction(_POSITION[dst] - _POSITION[src]).limit_denominator(2)


def convert_ordering(p: PolySymbol, src, dst) -> PolySymbol:
    """Symbol of the same operator under a different ordering convention."""
    t = ordering_shift(src, dst)
    if not p.exact:
        t = float(t)
    return weierstrass_transform(p, t)


def _half(exact: bool):
    return Fraction(1, 2) if exact else 0.5


def star_normal(p2: PolySymbol, p1: PolySymbol) -> PolySymbol:
    """Normal symbol of ``Q2 Q1`` from the normal symbols of ``Q2`` and ``Q1``.

    Sum over multi-indices g of ``(1/g!) d_z^g p2 * d_z*^g p1``.
    """
    p2._check(p1)
    out: dict[Key, Number] = {}
    for (b2, a2), c2 in p2.terms.items():
        for (b1, a1), c1 in p1.terms.items():
            bound = [min(x, y) for x, y in zip(a2, b1)]
            for g in _multi_range(bound):
                w = 1
                for j, gj in enumerate(g):
                    if gj:
                        w *= _falling(a2[j], gj) * _falling(b1[j], gj)
                w = Fraction(w, _prod_fact(g))
                key = (
                    tuple(x + y - z for x, y, z in zip(b2, b1, g)),
                    tuple(x - z + y for x, z, y in zip(a2, g, a1)),
                )
                out[key] = out.get(key, 0) + c2 * c1 * w
    return PolySymbol(p2.n_modes, out)


def star_antinormal(p2: PolySymbol, p1: PolySymbol) -> PolySymbol:
    """Anti-normal symbol of ``Q2 Q1`` from anti-normal symbols.

    Sum over g of ``((-1)^|g| / g!) d_z*^g p2 * d_z^g p1``.
    """
    p2._check(p1)
    out: dict[Key, Number] = {}
    for (b2, a2), c2 in p2.terms.items():
        for (b1, a1), c1 in p1.terms.items():
            bound = [min(x, y) for x, y in zip(b2, a1)]
            for g in _multi_range(bound):
                w = 1
                for j, gj in enumerate(g):
                    if gj:
                        w *= _falling(b2[j], gj) * _falling(a1[j], gj)
                w = Fraction((-1) ** sum(g) * w, _prod_fact(g))
                key = (
                    tuple(x - z + y for x, z, y in zip(b2, g, b1)),
                    tuple(x + y - z for x, y, z in zip(a2, a1, g)),
                )
                out[key] = out.get(key, 0) + c2 * c1 * w
    return PolySymbol(p2.n_modes, out)


def star_weyl(p2: PolySymbol, p1: PolySymbol) -> PolySymbol:
    """Weyl (Moyal) symbol of ``Q2 Q1`` from Weyl symbols.

    ``exp(Omega)`` on doubled variables restricted to the diagonal, with
    ``Omega = (1/2)(d_z2 . d_z1* - d_z2* . d_z1)``. The two commuting parts
    factorize, giving a double sum over multi-indices g (z2, z1*) and h (z2*, z1).
    """
    p2._check(p1)
    half = _half(p2.exact and p1.exact)
    out: dict[Key, Number] = {}
    for (b2, a2), c2 in p2.terms.items():
        for (b1, a1), c1 in p1.terms.items():
            gb = [min(x, y) for x, y in zip(a2, b1)]
            hb = [min(x, y) for x, y in zip(b2, a1)]
            for g in _multi_range(gb):
                wg = 1
                for j, gj in enumerate(g):
                    if gj:
                        wg *= _falling(a2[j], gj) * _falling(b1[j], gj)
                for h in _multi_range(hb):
                    wh = 1
                    for j, hj in enumerate(h):
                        if hj:
                            wh *= _falling(b2[j], hj) * _falling(a1[j], hj)
                    order = sum(g) + sum(h)
                    w = Fraction((-1) ** sum(h) * wg * wh, _prod_fact(g) * _prod_fact(h))
                    key = (
                        tuple(x - hh + y - gg for x, hh, y, gg in zip(b2, h, b1, g)),
                        tuple(x - gg + y - hh for x, gg, y, hh in zip(a2, g, a1, h)),
                    )
                    out[key] = out.get(key, 0) + c2 * c1 * w * half**order
    return PolySymbol(p2.n_modes, out)


def star(p2: PolySymbol, p1: PolySymbol, ordering) -> PolySymbol:
    ordering = _parse_ordering(ordering)
    return {
        Ordering.NORMAL: star_normal,
        Ordering.WEYL: star_weyl,
        Ordering.ANTINORMAL: star_antinormal,
    }[ordering](p2, p1)


def restrict_modes(p: PolySymbol, keep: Iterable[int]) -> PolySymbol:
    """Set ``z_j = z*_j = 0`` for modes outside ``keep``; reindex onto the kept modes."""
    keep = sorted(set(int(k) for k in keep))
    if any(not 0 <= k < p.n_modes for k in keep):
        raise IndexError("mode subset out of range")
    dropped = [j for j in range(p.n_modes) if j not in set(keep)]
    out = {}
    for (beta, alpha), c in p.terms.items():
        if any(beta[j] or alpha[j] for j in dropped):
            continue
        out[(tuple(beta[j] for j in keep), tuple(alpha[j] for j in keep))] = c
    return PolySymbol(len(keep), out)


def embed_modes(p: PolySymbol, n_modes: int, positions: Sequence[int]) -> PolySymbol:
    """Inverse of :func:`restrict_modes`: place mode ``i`` of ``p`` at ``positions[i]``."""
    if len(positions) != p.n_modes:
        raise ValueError("one position per mode required")
    out = {}
    for (beta, alpha), c in p.terms.items():
        b, a = [0] * n_modes, [0] * n_modes
        for i, pos in enumerate(positions):
            b[pos], a[pos] = beta[i], alpha[i]
        out[(tuple(b), tuple(a))] = c
    return PolySymbol(n_modes, out)


def real_coordinates(n_modes: int, scale=None) -> tuple[list[PolySymbol], list[PolySymbol]]:
    """Linear symbols for real coordinates with ``z = (x + i y) / sqrt(2)``.

    Returns ``(xs, ys)`` where ``x_j = (z_j + z*_j)/sqrt(2)`` and
    ``y_j = (z_j - z*_j)/(i sqrt(2))``.
    """
    s = 1 / math.sqrt(2) if scale is None else scale
    xs = [PolySymbol.z(n_modes, j, s) + PolySymbol.zbar(n_modes, j, s) for j in range(n_modes)]
    ys = [PolySymbol.z(n_modes, j, -1j * s) + PolySymbol.zbar(n_modes, j, 1j * s) for j in range(n_modes)]
    return xs, ys
