"""Filters and implicative filters: predicates, closure, enumeration.

A subset M of the carrier is a *filter* when

  F1  1 is a member;
  F2  members are upward closed under the relation;
  F3  r in M and r->p in M imply p in M (modus ponens).

It is an *implicative filter* when

  I1  1 is a member;
  I2  members are upward closed under the relation;
  I3  r->(p->k) in M and r->p in M imply r->k in M.

Subsets are bitmasks with element 0 at the least significant bit, which
fixes the deterministic ascending enumeration order.  Power-set scans
refuse carriers larger than the enumeration limit (default 20, hard cap
25, override with the QRW_ENUM_LIMIT environment variable).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Literal, Optional

from .errors import EnumerationLimitError, SizeMismatchError
from .model import Element, FiniteStructure

FilterKind = Literal["filter", "implicative"]
CLAUSE_IDS = ("F1", "F2", "F3", "I1", "I2", "I3")

DEFAULT_ENUM_LIMIT = 20
HARD_ENUM_CAP = 25
ENUM_LIMIT_ENV = "QRW_ENUM_LIMIT"


def enumeration_limit(override: Optional[int] = None) -> int:
    """Effective carrier-size cap for power-set scans."""
    if override is not None:
        limit = override
    else:
        raw = os.environ.get(ENUM_LIMIT_ENV)
        limit = int(raw) if raw else DEFAULT_ENUM_LIMIT
    return min(limit, HARD_ENUM_CAP)


def check_enumeration_limit(n: int, override: Optional[int] = None) -> None:
    limit = enumeration_limit(override)
    if n > limit:
        raise EnumerationLimitError(
            f"carrier size {n} exceeds the subset-enumeration limit {limit} "
            f"(hard cap {HARD_ENUM_CAP}; set {ENUM_LIMIT_ENV} to raise the default)")


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Subset:
    """Characteristic vector over a carrier of ``n`` elements, stored as a
    bitmask with element 0 at the least significant bit."""

    n: int
    mask: int

    def __post_init__(self):
        if self.n < 0 or not (0 <= self.mask < (1 << self.n)):
            raise ValueError(f"mask {self.mask:#x} out of range for carrier size {self.n}")

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "Subset":
        mask = 0
        for i in indices:
            if not (0 <= i < n):
                raise SizeMismatchError(f"element {i} out of range for carrier size {n}")
            mask |= 1 << i
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls(n, (1 << n) - 1)

    @classmethod
    def empty(cls, n: int) -> "Subset":
        return cls(n, 0)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(_iter_bits(self.mask))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.mask >> i) & 1 for i in range(self.n))

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.n and bool((self.mask >> x) & 1)

    def __iter__(self) -> Iterator[int]:
        return _iter_bits(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def issubset(self, other: "Subset") -> bool:
        self._same_carrier(other)
        return self.mask & ~other.mask == 0

    def __or__(self, other: "Subset") -> "Subset":
        self._same_carrier(other)
        return Subset(self.n, self.mask | other.mask)

    def __and__(self, other: "Subset") -> "Subset":
        self._same_carrier(other)
        return Subset(self.n, self.mask & other.mask)

    def _same_carrier(self, other: "Subset") -> None:
        if self.n != other.n:
            raise SizeMismatchError(f"subsets over carriers of size {self.n} and {other.n}")

    def __repr__(self) -> str:
        return f"Subset({{{', '.join(map(str, self.indices))}}} of {self.n})"


@dataclass(frozen=True)
class FilterVerdict:
    kind_requested: FilterKind
    holds: bool
    failed_clause: Optional[str]
    witness: Optional[tuple[int, ...]]


def _require_match(s: FiniteStructure, M: Subset) -> None:
    if M.n != s.n:
        raise SizeMismatchError(
            f"subset over carrier of size {M.n} evaluated against structure of size {s.n}")


# Mask-level clause scans.  Each returns None when the clause holds on the
# mask, else the lexicographically first witness tuple.  They are shared by
# the verdict builders, the enumerators and the claim checkers.

def _scan_membership(s: FiniteStructure, mask: int):
    return None if (mask >> s.one) & 1 else ()

def _scan_upward(s: FiniteStructure, mask: int):
    up = s.order.row_masks
    for r in _iter_bits(mask):
        missing = up[r] & ~mask
        if missing:
            return (r, (missing & -missing).bit_length() - 1)
    return None

def _scan_modus_ponens(s: FiniteStructure, mask: int):
    imp = s.imp_rows
    for r in _iter_bits(mask):
        row = imp[r]
        for p in range(s.n):
            if (mask >> row[p]) & 1 and not (mask >> p) & 1:
                return (r, p)
    return None

def _scan_nested_imp(s: FiniteStructure, mask: int):
    imp = s.imp_rows
    n = s.n
    for r in range(n):
        row = imp[r]
        for p in range(n):
            if not (mask >> row[p]) & 1:
                continue
            prow = imp[p]
            for k in range(n):
                if (mask >> row[prow[k]]) & 1 and not (mask >> row[k]) & 1:
                    return (r, p, k)
    return None


def _filter_mask_ok(s: FiniteStructure, mask: int) -> bool:
    return (_scan_membership(s, mask) is None
            and _scan_upward(s, mask) is None
            and _scan_modus_ponens(s, mask) is None)

def _implicative_mask_ok(s: FiniteStructure, mask: int) -> bool:
    return (_scan_membership(s, mask) is None
            and _scan_upward(s, mask) is None
            and _scan_nested_imp(s, mask) is None)


def is_filter(s: FiniteStructure, M: Subset) -> FilterVerdict:
    """Decide clauses F1-F3, reporting the first failing clause's witness."""
    _require_match(s, M)
    for clause, scan in (("F1", _scan_membership), ("F2", _scan_upward),
                         ("F3", _scan_modus_ponens)):
        witness = scan(s, M.mask)
        if witness is not None:
            return FilterVerdict("filter", False, clause, witness)
    return FilterVerdict("filter", True, None, None)


def is_implicative_filter(s: FiniteStructure, M: Subset) -> FilterVerdict:
    """Decide clauses I1-I3, reporting the first failing clause's witness."""
    _require_match(s, M)
    for clause, scan in (("I1", _scan_membership), ("I2", _scan_upward),
                         ("I3", _scan_nested_imp)):
        witness = scan(s, M.mask)
        if witness is not None:
            return FilterVerdict("implicative", False, clause, witness)
    return FilterVerdict("implicative", True, None, None)


def evaluate_clause_at(s: FiniteStructure, M: Subset, clause_id: str,
                       witness: tuple[int, ...]) -> bool:
    """Replay one filter clause at a witness, written pointwise so failing
    verdicts can be cross-checked independently of the scans above."""
    _require_match(s, M)
    imp = s.imp_rows
    member = lambda x: (M.mask >> x) & 1 == 1
    if clause_id in ("F1", "I1"):
        return member(s.one)
    if clause_id in ("F2", "I2"):
        r, p = witness
        return (not (member(r) and s.order.leq(r, p))) or member(p)
    if clause_id == "F3":
        r, p = witness
        return (not (member(r) and member(imp[r][p]))) or member(p)
    if clause_id == "I3":
        r, p, k = witness
        return (not (member(imp[r][imp[p][k]]) and member(imp[r][p]))) or member(imp[r][k])
    raise ValueError(f"unknown clause id {clause_id!r}")


def up_interval(s: FiniteStructure, psi: Element) -> Subset:
    """The up-interval of psi: every r with psi <= r."""
    if not (0 <= psi < s.n):
        raise SizeMismatchError(f"element {psi} out of range for carrier size {s.n}")
    return Subset(s.n, s.order.row_masks[psi])


def generated_filter(s: FiniteStructure, S: Subset) -> Subset:
    """Smallest superset of S (plus 1) closed under F2 and F3, as a
    monotone fixpoint; stabilizes within n full passes."""
    _require_match(s, S)
    up = s.order.row_masks
    imp = s.imp_rows
    n = s.n
    mask = S.mask | (1 << s.one)
    while True:
        new = mask
        for r in _iter_bits(mask):
            new |= up[r]
            row = imp[r]
            for p in range(n):
                if (mask >> row[p]) & 1:
                    new |= 1 << p
        if new == mask:
            return Subset(n, mask)
        mask = new


def _enumerate_range(s, kind, lo, hi):
    ok = _filter_mask_ok if kind == "filter" else _implicative_mask_ok
    one_bit = 1 << s.one
    found = []
    for mask in range(lo, hi):
        if mask & one_bit and ok(s, mask):
            found.append(mask)
    return found


def enumerate_filters(s: FiniteStructure, kind: FilterKind = "filter",
                      limit: Optional[int] = None, workers: int = 1) -> list[Subset]:
    """All subsets satisfying the requested predicate, ascending by bitmask.

    Subsets lacking the unit are pruned; the result equals a direct
    predicate scan over the full power set.  ``workers`` splits the mask
    range; the merged output is re-sorted so partitioning never shows.
    """
    if kind not in ("filter", "implicative"):
        raise ValueError(f"unknown filter kind {kind!r}")
    check_enumeration_limit(s.n, limit)
    total = 1 << s.n
    if workers <= 1:
        masks = _enumerate_range(s, kind, 0, total)
    else:
        bounds = [total * w // workers for w in range(workers + 1)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = pool.map(lambda b: _enumerate_range(s, kind, b[0], b[1]),
                              zip(bounds, bounds[1:]))
        masks = sorted(m for chunk in chunks for m in chunk)
    return [Subset(s.n, m) for m in masks]
