"""Sparse multilinear polynomials over {-1,+1}^p.

A polynomial is stored as a map from monomials (strictly increasing tuples of
1-based variable indices, the empty tuple being the constant term) to real
coefficients.  Coefficients with magnitude below ``COEF_TOL`` are dropped so
the term map never carries zeros.
"""

from __future__ import annotations

from typing import Dict, Iterable, Mapping, Sequence, Tuple

Monomial = Tuple[int, ...]

COEF_TOL = 1e-15


def canonical_monomial(indices: Iterable[int], p: int) -> Monomial:
    """Validate and canonicalize a monomial index set for dimension p."""
    idx = tuple(sorted(int(i) for i in indices))
    for a, b in zip(idx, idx[1:]):
        if a == b:
            raise ValueError(f"repeated variable index {a} in monomial")
    if idx and (idx[0] < 1 or idx[-1] > p):
        raise ValueError(f"monomial {idx} has indices outside [1, {p}]")
    return idx


class MultilinearPolynomial:
    """Sparse multilinear polynomial in p variables over {-1,+1}^p."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms: Mapping[Iterable[int], float] | None = None):
        if p < 0:
            raise ValueError("dimension must be nonnegative")
        self.p = int(p)
        clean: Dict[Monomial, float] = {}
        if terms:
            for mono, coef in terms.items():
                key = canonical_monomial(mono, self.p)
                c = clean.get(key, 0.0) + float(coef)
                if abs(c) > COEF_TOL:
                    clean[key] = c
                elif key in clean:
                    del clean[key]
        # canonical order: by size, then lexicographic
        self.terms = {k: clean[k] for k in sorted(clean, key=lambda m: (len(m), m))}

    # -- basic accessors ---------------------------------------------------

    def coefficient(self, mono: Iterable[int]) -> float:
        return self.terms.get(canonical_monomial(mono, self.p), 0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultilinearPolynomial):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __repr__(self) -> str:
        return f"MultilinearPolynomial(p={self.p}, terms={self.terms})"

    # -- operations --------------------------------------------------------

    def evaluate(self, x: Sequence[float]) -> float:
        """Sum of coef * prod_{i in I} x_i over terms, in canonical order."""
        if len(x) != self.p:
            raise ValueError(f"point has length {len(x)}, expected {self.p}")
        for v in x:
            if v not in (-1, 1):
                raise ValueError(f"coordinate {v} outside {{-1,+1}}")
        total = 0.0
        for mono, coef in self.terms.items():
            prod = 1.0
            for i in mono:
                prod *= x[i - 1]
            total += coef * prod
        return total

    def partial_derivative(self, index_set: Iterable[int]) -> "MultilinearPolynomial":
        """Derivative with respect to the variables in index_set.

        The term for J (disjoint from I) carries the coefficient of J u I.
        """
        iset = canonical_monomial(index_set, self.p)
        if not iset:
            return self
        sset = set(iset)
        out: Dict[Monomial, float] = {}
        for mono, coef in self.terms.items():
            mset = set(mono)
            if sset <= mset:
                rest = tuple(sorted(mset - sset))
                out[rest] = coef
        return MultilinearPolynomial(self.p, out)

    def l1_norm(self) -> float:
        return sum(abs(c) for c in self.terms.values())

    def maximal_monomials(self) -> set:
        """Stored index sets not strictly contained in another stored set."""
        monos = list(self.terms)
        out = set()
        for m in monos:
            ms = set(m)
            if not any(ms < set(o) for o in monos):
                out.add(m)
        return out

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "terms": [{"vars": list(m), "coef": c} for m, c in self.terms.items()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MultilinearPolynomial":
        return cls(obj["p"], {tuple(t["vars"]): t["coef"] for t in obj["terms"]})
