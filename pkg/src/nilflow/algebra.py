"""Graded nilpotent Lie algebras given by exact structure constants."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from ._exact import Echelon

__all__ = [
    "AlgebraElement",
    "AlgebraFormatError",
    "LieAlgebra",
    "Violation",
    "bracket",
    "builtin",
    "load_algebra",
    "parse_algebra",
    "validate_algebra",
    "BUILTINS",
]


class AlgebraFormatError(ValueError):
    """Raised when an algebra definition document cannot be parsed."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


class Violation(NamedTuple):
    axiom: str
    indices: tuple[int, ...]
    detail: str


class LieAlgebra:
    """Finite-dimensional graded Lie algebra with rational structure constants.

    ``brackets`` maps 0-based ``(i, j, k)`` to ``c_ij^k`` so that
    ``[e_i, e_j] = sum_k c_ij^k e_k``. Only ``i < j`` keys are kept; entries
    given with ``i > j`` are folded in by antisymmetry. Contradictory
    duplicate entries and nonzero diagonal entries are remembered and later
    reported by :func:`validate_algebra` instead of raising here.
    """

    def __init__(
        self,
        names: Sequence[str],
        brackets: Mapping[tuple[int, int, int], Fraction | int | str],
        layers: Sequence[int],
        inner_product: Sequence[Sequence[Fraction | int | str]] | None = None,
        *,
        name: str = "custom",
        casimirs: Sequence[str] = (),
    ):
        self.name = name
        self.basis_names = tuple(names)
        self.dim = len(self.basis_names)
        if self.dim == 0:
            raise ValueError("algebra must have positive dimension")
        if len(set(self.basis_names)) != self.dim:
            raise ValueError("basis names must be distinct")
        if len(layers) != self.dim:
            raise ValueError("one layer per basis element required")
        self.layers = tuple(int(l) for l in layers)

        consts: dict[tuple[int, int, int], Fraction] = {}
        seen: dict[tuple[int, int, int], Fraction] = {}
        defects: list[tuple[int, int, int]] = []
        for (i, j, k), c in brackets.items():
            for idx in (i, j, k):
                if not 0 <= idx < self.dim:
                    raise ValueError(f"structure constant index {idx} out of range")
            c = Fraction(c)
            if i == j:
                if c:
                    defects.append((i, j, k))
                continue
            key, val = ((i, j, k), c) if i < j else ((j, i, k), -c)
            if key in seen and seen[key] != val:
                defects.append(key)
                continue
            seen[key] = val
            if val:
                consts[key] = val
        self.structure_constants = consts
        self._antisymmetry_defects = tuple(defects)

        v1 = [i for i, l in enumerate(self.layers) if l == 1]
        if inner_product is None:
            ip = [[Fraction(int(a == b)) for b in range(len(v1))] for a in range(len(v1))]
        else:
            ip = [[Fraction(x) for x in row] for row in inner_product]
            if len(ip) != len(v1) or any(len(r) != len(v1) for r in ip):
                raise ValueError("inner product must be square on the layer-1 indices")
        self.inner_product = tuple(tuple(r) for r in ip)
        self.casimirs = tuple(casimirs)

    def __repr__(self) -> str:
        return f"LieAlgebra({self.name!r}, dim={self.dim})"

    @cached_property
    def generating_indices(self) -> tuple[int, ...]:
        return tuple(i for i, l in enumerate(self.layers) if l == 1)

    def index(self, name: str) -> int:
        try:
            return self.basis_names.index(name)
        except ValueError:
            raise KeyError(f"no basis element named {name!r}") from None

    def constant(self, i: int, j: int, k: int) -> Fraction:
        if i < j:
            return self.structure_constants.get((i, j, k), Fraction(0))
        if i > j:
            return -self.structure_constants.get((j, i, k), Fraction(0))
        return Fraction(0)

    @cached_property
    def _table(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j, k), c in self.structure_constants.items():
            table.setdefault((i, j), {})[k] = c
            table.setdefault((j, i), {})[k] = -c
        return table

    def bracket_basis(self, i: int, j: int) -> dict[int, Fraction]:
        """Sparse coordinates of ``[e_i, e_j]``."""
        return self._table.get((i, j), {})

    def element(self, spec: str | Iterable[Fraction | int]) -> "AlgebraElement":
        if isinstance(spec, str):
            coords = [Fraction(0)] * self.dim
            coords[self.index(spec)] = Fraction(1)
        else:
            coords = [Fraction(c) for c in spec]
        return AlgebraElement(self, tuple(coords))

    def basis(self) -> list["AlgebraElement"]:
        return [self.element(n) for n in self.basis_names]

    def to_document(self) -> dict:
        """Definition document (1-based indices) accepted by :func:`parse_algebra`."""
        brackets = []
        for (i, j, k), c in sorted(self.structure_constants.items()):
            brackets.append([i + 1, j + 1, f"{k + 1}:{c.numerator}/{c.denominator}"])
        doc = {
            "name": self.name,
            "dim": self.dim,
            "names": list(self.basis_names),
            "layers": list(self.layers),
            "brackets": brackets,
            "inner_product": [[str(x) for x in r] for r in self.inner_product],
        }
        if self.casimirs:
            doc["casimirs"] = list(self.casimirs)
        return doc


@dataclass(frozen=True)
class AlgebraElement:
    algebra: LieAlgebra
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.algebra.dim:
            raise ValueError(
                f"expected {self.algebra.dim} coordinates, got {len(self.coords)}"
            )

    def _check(self, other: "AlgebraElement") -> None:
        if other.algebra is not self.algebra:
            raise ValueError("elements belong to different algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "AlgebraElement":
        s = Fraction(scalar)
        return AlgebraElement(self.algebra, tuple(s * a for a in self.coords))

    def __neg__(self) -> "AlgebraElement":
        return (-1) * self

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __str__(self) -> str:
        parts = []
        for c, n in zip(self.coords, self.algebra.basis_names):
            if c:
                parts.append(n if c == 1 else f"-{n}" if c == -1 else f"{c}*{n}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Lie bracket ``[a, b]`` extended bilinearly from the structure constants."""
    a._check(b)
    alg = a.algebra
    out = [Fraction(0)] * alg.dim
    for i, ai in enumerate(a.coords):
        if not ai:
            continue
        for j, bj in enumerate(b.coords):
            if not bj:
                continue
            for k, c in alg.bracket_basis(i, j).items():
                out[k] += ai * bj * c
    return AlgebraElement(alg, tuple(out))


def _positive_definite(m: Sequence[Sequence[Fraction]]) -> bool:
    # exact LDL^T; every pivot must be positive
    a = [list(r) for r in m]
    n = len(a)
    for p in range(n):
        if a[p][p] <= 0:
            return False
        for r in range(p + 1, n):
            f = a[r][p] / a[p][p]
            for c in range(p, n):
                a[r][c] -= f * a[p][c]
    return True


def validate_algebra(alg: LieAlgebra) -> list[Violation]:
    """Check antisymmetry, Jacobi, grading, generation and the inner product.

    Returns every violation found; an empty list means the algebra is a
    valid graded nilpotent (Carnot) algebra.
    """
    report: list[Violation] = []
    n = alg.dim
    for t in alg._antisymmetry_defects:
        report.append(Violation("antisymmetry", t, "c_ij^k != -c_ji^k"))

    for i, j, k in combinations(range(n), 3):
        # J = [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]
        total: dict[int, Fraction] = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for m, cm in alg.bracket_basis(b, c).items():
                for l, cl in alg.bracket_basis(a, m).items():
                    total[l] = total.get(l, Fraction(0)) + cm * cl
        if any(total.values()):
            report.append(Violation("jacobi", (i, j, k), f"Jacobiator {total}"))

    for (i, j, k), c in sorted(alg.structure_constants.items()):
        if alg.layers[k] != alg.layers[i] + alg.layers[j]:
            report.append(
                Violation(
                    "grading",
                    (i, j, k),
                    f"layer {alg.layers[k]} != {alg.layers[i]} + {alg.layers[j]}",
                )
            )

    if any(l < 1 for l in alg.layers):
        report.append(Violation("grading", (), "layers must be positive integers"))

    gen = alg.generating_indices
    if not gen:
        report.append(Violation("generation", (), "layer 1 is empty"))
    else:
        ech = Echelon()
        frontier = []
        for i in gen:
            ech.add({i: 1})
            frontier.append({i: Fraction(1)})
        while frontier:
            new = []
            for v in frontier:
                for g in gen:
                    w: dict[int, Fraction] = {}
                    for i, vi in v.items():
                        for k, c in alg.bracket_basis(g, i).items():
                            w[k] = w.get(k, Fraction(0)) + vi * c
                    w = {k: c for k, c in w.items() if c}
                    if w and ech.add(w):
                        new.append(w)
            frontier = new
        if ech.rank < n:
            report.append(
                Violation("generation", (), f"layer 1 generates only {ech.rank} of {n} dimensions")
            )

    ip = alg.inner_product
    for a in range(len(ip)):
        for b in range(a + 1, len(ip)):
            if ip[a][b] != ip[b][a]:
                report.append(Violation("inner_product", (a, b), "not symmetric"))
    if ip and not _positive_definite(ip):
        report.append(Violation("inner_product", (), "not positive definite"))
    return report


def _n4() -> LieAlgebra:
    # basis X=E21, Y=E32, Z=E43, U=E31, V=E42, W=E41
    X, Y, Z, U, V, W = range(6)
    brackets = {
        (X, Y, U): -1,
        (Y, Z, V): -1,
        (X, V, W): -1,
        (Z, U, W): 1,
    }
    return LieAlgebra(
        "XYZUVW",
        brackets,
        (1, 1, 1, 2, 2, 3),
        name="n4_lower_triangular",
        casimirs=("w", "u*v - y*w"),
    )


def _heisenberg3() -> LieAlgebra:
    return LieAlgebra(
        "XYW", {(0, 1, 2): 1}, (1, 1, 2), name="heisenberg3", casimirs=("w",)
    )


BUILTINS = {"n4_lower_triangular": _n4, "heisenberg3": _heisenberg3}
_ALIASES = {"n4": "n4_lower_triangular"}


def builtin(name: str) -> LieAlgebra:
    """Return a built-in algebra: ``n4_lower_triangular`` (alias ``n4``) or ``heisenberg3``."""
    key = _ALIASES.get(name, name)
    try:
        return BUILTINS[key]()
    except KeyError:
        raise KeyError(f"unknown builtin algebra {name!r}; choose from {sorted(BUILTINS)}") from None


def _parse_constant(text, loc: str) -> tuple[int, Fraction]:
    if not isinstance(text, str) or ":" not in text:
        raise AlgebraFormatError(loc, f"expected 'k:num/den', got {text!r}")
    k, _, value = text.partition(":")
    try:
        return int(k), Fraction(value.strip())
    except ValueError as exc:
        raise AlgebraFormatError(loc, str(exc)) from None


def parse_algebra(doc: Mapping) -> LieAlgebra:
    """Build an algebra from a definition document (1-based indices).

    Required keys: ``dim``, ``names``, ``layers``, ``brackets`` (list of
    ``[i, j, "k:num/den"]``). Optional: ``name``, ``inner_product``,
    ``casimirs``.
    """
    if not isinstance(doc, Mapping):
        raise AlgebraFormatError("<root>", "expected an object")
    for key in ("dim", "names", "layers", "brackets"):
        if key not in doc:
            raise AlgebraFormatError(key, "missing required field")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise AlgebraFormatError("dim", "must be a positive integer")
    names = doc["names"]
    if not isinstance(names, list) or len(names) != dim or not all(isinstance(s, str) for s in names):
        raise AlgebraFormatError("names", f"expected {dim} strings")
    layers = doc["layers"]
    if not isinstance(layers, list) or len(layers) != dim or not all(isinstance(l, int) for l in layers):
        raise AlgebraFormatError("layers", f"expected {dim} integers")
    if not isinstance(doc["brackets"], list):
        raise AlgebraFormatError("brackets", "expected a list")
    brackets: dict[tuple[int, int, int], Fraction] = {}
    for n, entry in enumerate(doc["brackets"]):
        loc = f"brackets[{n}]"
        if not isinstance(entry, list) or len(entry) != 3:
            raise AlgebraFormatError(loc, "expected [i, j, 'k:num/den']")
        i, j = entry[0], entry[1]
        k, c = _parse_constant(entry[2], loc)
        for idx in (i, j, k):
            if not isinstance(idx, int) or not 1 <= idx <= dim:
                raise AlgebraFormatError(loc, f"index {idx!r} outside [1, {dim}]")
        key = (i - 1, j - 1, k - 1)
        if key in brackets:
            raise AlgebraFormatError(loc, "duplicate entry")
        brackets[key] = c
    ip = doc.get("inner_product")
    try:
        return LieAlgebra(
            names,
            brackets,
            layers,
            ip,
            name=str(doc.get("name", "custom")),
            casimirs=tuple(doc.get("casimirs", ())),
        )
    except (ValueError, TypeError) as exc:
        raise AlgebraFormatError("<root>", str(exc)) from None


def load_algebra(source: str | Path) -> LieAlgebra:
    """Load a builtin by name, or a JSON definition file by path."""
    key = _ALIASES.get(str(source), str(source))
    if key in BUILTINS:
        return builtin(key)
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise AlgebraFormatError(str(path), exc.strerror or str(exc)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFormatError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return parse_algebra(doc)
