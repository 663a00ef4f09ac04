"""Small-model generation: ground-truth chains, canonical forms,
exhaustive and randomized search, counterexample hunting.

Exhaustive search backtracks over implication-table cells (the unit row is
forced first, then in strict mode the reflexive diagonal and the top
column), pruning any partial assignment whose fully determined axiom
instances already fail.  The relation is enumerated over the cells not
forced by the profile with a transitivity prune, and the product table is
derived from residuation (the unique element whose up-set matches the
residuation constraint, branching on ties).  Every candidate is
re-validated against the requested axiom set before emission, so pruning
can only cost time, never soundness.

Models are emitted in ascending canonical-form order, one representative
per isomorphism class under permutations that fix the unit.  The unit of a
generated model always sits at index n-1; where the unit lives is a free
gauge once isomorphism is factored out, and fixing it keeps canonical
forms comparable.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import StructureError
from .filters import (
    Subset,
    _filter_mask_ok,
    _implicative_mask_ok,
    check_enumeration_limit,
)
from .model import (
    AXIOM_IDS,
    MUL_AXIOMS,
    FiniteStructure,
    QuasiOrder,
    permute,
    validate,
)

EXHAUSTIVE_ORDER_CAP = 6

HUNT_IDS = (
    "filter-not-implicative",
    "prop-2.1.9-disagreement",
    "non-antisymmetric-valid-model",
)


def gen_lukasiewicz(n: int) -> FiniteStructure:
    """The n-element chain on {0, 1/(n-1), .., 1} with x->y = min(1, 1-x+y)
    and x*y = max(0, x+y-1); element i stands for i/(n-1)."""
    if n < 2:
        raise StructureError(f"chain size {n} must be at least 2")
    top = n - 1
    imp = [[min(top, top - x + y) for y in range(n)] for x in range(n)]
    mul = [[max(0, x + y - top) for y in range(n)] for x in range(n)]
    rel = [[x <= y for y in range(n)] for x in range(n)]
    return FiniteStructure(n=n, imp=np.array(imp), one=top,
                           order=QuasiOrder(np.array(rel)), mul=np.array(mul))


@dataclass(frozen=True, order=True)
class CanonicalForm:
    """Total-order key: the lexicographically least serialization of
    (imp, mul, order) over all carrier permutations fixing the unit."""

    bytes: bytes


def _serialize(s: FiniteStructure) -> bytes:
    parts = bytearray([s.n, s.one])
    parts.extend(int(v) for v in s.imp.reshape(-1))
    if s.mul is None:
        parts.append(0)
    else:
        parts.append(1)
        parts.extend(int(v) for v in s.mul.reshape(-1))
    parts.extend(int(v) for v in s.order.rel.reshape(-1))
    return bytes(parts)


def _unit_fixing_perms(n: int, one: int) -> Iterator[tuple[int, ...]]:
    rest = [i for i in range(n) if i != one]
    for images in itertools.permutations(rest):
        perm = [0] * n
        perm[one] = one
        for src, dst in zip(rest, images):
            perm[src] = dst
        yield tuple(perm)


def _canonical_key_perm(s: FiniteStructure) -> tuple[bytes, tuple[int, ...]]:
    best = None
    best_perm = None
    for perm in _unit_fixing_perms(s.n, s.one):
        key = _serialize(permute(s, perm))
        if best is None or key < best:
            best, best_perm = key, perm
    return best, best_perm


def canonical_form(s: FiniteStructure) -> CanonicalForm:
    """Isomorphism-invariant key; equal keys mean the structures differ
    only by a unit-fixing relabeling (the negation table is not part of
    the key)."""
    key, _ = _canonical_key_perm(s)
    return CanonicalForm(key)


def canonicalize(s: FiniteStructure) -> FiniteStructure:
    """The representative of s whose serialization is the canonical key."""
    _, perm = _canonical_key_perm(s)
    return permute(s, perm)


@dataclass(frozen=True)
class SearchConfig:
    order: int
    axioms: frozenset[str] = frozenset(AXIOM_IDS)
    strict_link: bool = False
    mode: str = "exhaustive"
    seed: int = 0
    budget: Optional[int] = None
    hunt: Optional[str] = None

    def __post_init__(self):
        if self.mode not in ("exhaustive", "random"):
            raise ValueError(f"unknown mode {self.mode!r}")
        unknown = set(self.axioms) - set(AXIOM_IDS)
        if unknown:
            raise ValueError(f"unknown axiom ids {sorted(unknown)}")
        if self.order < 1:
            raise ValueError(f"order {self.order} must be at least 1")
        if self.mode == "exhaustive" and self.order > EXHAUSTIVE_ORDER_CAP:
            raise ValueError(
                f"exhaustive search is capped at order {EXHAUSTIVE_ORDER_CAP}; "
                f"use random mode for order {self.order}")
        if self.hunt is not None and self.hunt not in HUNT_IDS:
            raise ValueError(f"unknown predicate id {self.hunt!r}; known: {', '.join(HUNT_IDS)}")
        object.__setattr__(self, "axioms", frozenset(self.axioms))


@dataclass(frozen=True)
class ModelStream:
    """Deterministic search result: models in ascending canonical-form
    order plus the examination counters."""

    models: tuple[FiniteStructure, ...]
    examined: int
    budget_exhausted: bool

    @property
    def emitted(self) -> int:
        return len(self.models)

    def __iter__(self) -> Iterator[FiniteStructure]:
        return iter(self.models)

    def __len__(self) -> int:
        return len(self.models)


# --- exhaustive enumeration ------------------------------------------------

def _w2_partial_ok(t, n, one) -> bool:
    for x in range(n):
        for y in range(n):
            c1 = t[x * n + y]
            if c1 < 0:
                continue
            for z in range(n):
                c2 = t[y * n + z]
                c3 = t[x * n + z]
                if c2 < 0 or c3 < 0:
                    continue
                c4 = t[c2 * n + c3]
                if c4 < 0:
                    continue
                v = t[c1 * n + c4]
                if v >= 0 and v != one:
                    return False
    return True


def _w3_partial_ok(t, n) -> bool:
    for x in range(n):
        for y in range(x + 1, n):
            a = t[x * n + y]
            b = t[y * n + x]
            if a < 0 or b < 0:
                continue
            lhs = t[a * n + y]
            rhs = t[b * n + x]
            if lhs >= 0 and rhs >= 0 and lhs != rhs:
                return False
    return True


def _imp_trans_partial_ok(t, n, one) -> bool:
    for x in range(n):
        for y in range(n):
            if t[x * n + y] != one:
                continue
            for z in range(n):
                if t[y * n + z] == one and 0 <= t[x * n + z] != one:
                    return False
    return True


def _enumerate_imp_tables(n, one, axioms, strict, first_cell_values=None):
    t = [-1] * (n * n)
    if "W1" in axioms:
        for y in range(n):
            t[one * n + y] = y
    if strict and "LINK" in axioms:
        if "QO-REFL" in axioms:
            for x in range(n):
                if t[x * n + x] < 0:
                    t[x * n + x] = one
        if "TOP" in axioms:
            for x in range(n):
                if t[x * n + one] < 0:
                    t[x * n + one] = one

    check_w2 = "W2" in axioms
    check_w3 = "W3" in axioms
    check_trans = strict and "LINK" in axioms and "QO-TRANS" in axioms

    def partial_ok():
        if check_w3 and not _w3_partial_ok(t, n):
            return False
        if check_w2 and not _w2_partial_ok(t, n, one):
            return False
        if check_trans and not _imp_trans_partial_ok(t, n, one):
            return False
        return True

    if not partial_ok():
        return
    free = [i for i in range(n * n) if t[i] < 0]
    if not free:
        # fully forced table: owned by the partition holding value 0
        if first_cell_values is None or 0 in first_cell_values:
            yield np.array(t, dtype=np.int64).reshape(n, n)
        return

    def backtrack(depth):
        if depth == len(free):
            yield np.array(t, dtype=np.int64).reshape(n, n)
            return
        cell = free[depth]
        values = range(n)
        if depth == 0 and first_cell_values is not None:
            values = first_cell_values
        for v in values:
            t[cell] = v
            if partial_ok():
                yield from backtrack(depth + 1)
        t[cell] = -1

    yield from backtrack(0)


def _enumerate_orders(imp, n, one, axioms, strict):
    if strict and "LINK" in axioms:
        yield imp == one
        return
    required = np.zeros((n, n), dtype=bool)
    if "LINK" in axioms:
        required |= imp == one
    if "QO-REFL" in axioms:
        required |= np.eye(n, dtype=bool)
    if "TOP" in axioms:
        required[:, one] = True
    free = [(i, j) for i in range(n) for j in range(n) if not required[i, j]]
    state = np.where(required, 1, -1).astype(np.int8)  # 1 true, 0 false, -1 unknown
    check_trans = "QO-TRANS" in axioms

    def trans_ok():
        for i in range(n):
            for j in range(n):
                if state[i, j] != 1:
                    continue
                for k in range(n):
                    if state[j, k] == 1 and state[i, k] == 0:
                        return False
        return True

    def backtrack(depth):
        if depth == len(free):
            yield state == 1
            return
        i, j = free[depth]
        for v in (0, 1):
            state[i, j] = v
            if not check_trans or trans_ok():
                yield from backtrack(depth + 1)
        state[i, j] = -1

    yield from backtrack(0)


def _assoc_partial_ok(m, n) -> bool:
    for x in range(n):
        for y in range(n):
            xy = m[x * n + y]
            for z in range(n):
                yz = m[y * n + z]
                if xy >= 0 and yz >= 0:
                    left = m[xy * n + z]
                    right = m[x * n + yz]
                    if left >= 0 and right >= 0 and left != right:
                        return False
    return True


def _enumerate_muls(imp, rel, n, one, axioms):
    if not (axioms & MUL_AXIOMS):
        yield None
        return
    if "RES" in axioms:
        row_masks = []
        for i in range(n):
            mask = 0
            for j in range(n):
                if rel[i, j]:
                    mask |= 1 << j
            row_masks.append(mask)
        cell_cands = []
        for x in range(n):
            for y in range(n):
                target = 0
                for z in range(n):
                    if rel[x, imp[y, z]]:
                        target |= 1 << z
                cands = [c for c in range(n) if row_masks[c] == target]
                if not cands:
                    return
                cell_cands.append(cands)
        for combo in itertools.product(*cell_cands):
            yield np.array(combo, dtype=np.int64).reshape(n, n)
        return
    # no residuation requested: backtrack over cells under the monoid laws
    m = [-1] * (n * n)
    if "MON-UNIT" in axioms:
        for x in range(n):
            m[x * n + one] = x
            m[one * n + x] = x
    comm = "MON-COMM" in axioms
    check_assoc = "MON-ASSOC" in axioms
    free = [i for i in range(n * n) if m[i] < 0]
    if comm:
        free = [i for i in free if i // n <= i % n]

    def backtrack(depth):
        if depth == len(free):
            yield np.array(m, dtype=np.int64).reshape(n, n)
            return
        cell = free[depth]
        x, y = divmod(cell, n)
        for v in range(n):
            m[cell] = v
            if comm:
                m[y * n + x] = v
            if not check_assoc or _assoc_partial_ok(m, n):
                yield from backtrack(depth + 1)
        m[cell] = -1
        if comm:
            m[y * n + x] = -1

    yield from backtrack(0)


def _passes_requested(s, axioms, strict) -> bool:
    report = validate(s, strict_link=strict)
    return all(d.holds for d in report.diagnostics
               if d.axiom_id in axioms and report.applicability[d.axiom_id])


def _exhaustive_partition(cfg: SearchConfig, first_cell_values):
    n, one = cfg.order, cfg.order - 1
    found = {}
    examined = 0
    budget = cfg.budget
    exhausted = False
    for imp in _enumerate_imp_tables(n, one, cfg.axioms, cfg.strict_link,
                                     first_cell_values):
        for rel in _enumerate_orders(imp, n, one, cfg.axioms, cfg.strict_link):
            for mul in _enumerate_muls(imp, rel, n, one, cfg.axioms):
                if budget is not None and examined >= budget:
                    exhausted = True
                    return found, examined, exhausted
                examined += 1
                s = FiniteStructure(n=n, imp=imp, one=one,
                                    order=QuasiOrder(rel), mul=mul)
                if not _passes_requested(s, cfg.axioms, cfg.strict_link):
                    continue
                key, perm = _canonical_key_perm(s)
                if key not in found:
                    found[key] = permute(s, perm)
    return found, examined, exhausted


def _random_candidates(cfg: SearchConfig):
    n, one = cfg.order, cfg.order - 1
    rng = random.Random(cfg.seed)
    budget = cfg.budget if cfg.budget is not None else 1000
    found = {}
    examined = 0
    need_mul = bool(cfg.axioms & MUL_AXIOMS)
    for _ in range(budget):
        examined += 1
        rel = np.eye(n, dtype=bool)
        rel[:, one] = True
        for i in range(n):
            for j in range(n):
                if not rel[i, j] and rng.random() < 0.3:
                    rel[i, j] = True
        for k in range(n):   # transitive closure, Warshall
            rel |= rel[:, k:k + 1] & rel[k:k + 1, :]
        mul = None
        if need_mul:
            mul = np.zeros((n, n), dtype=np.int64)
            for x in range(n):
                for y in range(x, n):
                    if one in (x, y):
                        v = x if y == one else y
                    else:
                        v = rng.randrange(n)
                    mul[x, y] = mul[y, x] = v
        # derive implication as the residual: imp[a][b] is the greatest w
        # with w*a <= b; reject the candidate when no unique greatest exists
        imp = np.zeros((n, n), dtype=np.int64)
        ok = True
        for a in range(n):
            for b in range(n):
                if mul is not None:
                    sat = [w for w in range(n) if rel[mul[w, a], b]]
                else:
                    sat = [w for w in range(n) if rel[w, b]]
                greatest = [w for w in sat if all(rel[u, w] for u in sat)]
                if not greatest or len(greatest) > 1:
                    ok = False
                    break
                imp[a, b] = greatest[0]
            if not ok:
                break
        if not ok:
            continue
        s = FiniteStructure(n=n, imp=imp, one=one, order=QuasiOrder(rel), mul=mul)
        if not _passes_requested(s, cfg.axioms, cfg.strict_link):
            continue
        key, perm = _canonical_key_perm(s)
        if key not in found:
            found[key] = permute(s, perm)
    return found, examined, True


def enumerate_models(cfg: SearchConfig, workers: int = 1) -> ModelStream:
    """Generate models of the configured order and axiom profile.

    Exhaustive mode visits every isomorphism class exactly once (unit-fixing
    permutations); random mode draws budget-many seeded candidates.  The
    result is identical for any worker count.
    """
    if cfg.mode == "random":
        found, examined, exhausted = _random_candidates(cfg)
    elif workers <= 1 or cfg.budget is not None:
        # a budget caps candidates in examination order, which only has an
        # exact meaning for the sequential scan
        found, examined, exhausted = _exhaustive_partition(cfg, None)
    else:
        n = cfg.order
        slices = [list(range(n))[w::workers] for w in range(workers)]
        slices = [vals for vals in slices if vals]
        with ThreadPoolExecutor(max_workers=len(slices)) as pool:
            results = list(pool.map(
                lambda vals: _exhaustive_partition(cfg, vals), slices))
        found = {}
        examined = 0
        exhausted = False
        for part_found, part_examined, part_exhausted in results:
            examined += part_examined
            exhausted |= part_exhausted
            for key, s in part_found.items():
                found.setdefault(key, s)
    models = tuple(found[key] for key in sorted(found))
    return ModelStream(models=models, examined=examined, budget_exhausted=exhausted)


# --- counterexample hunting -------------------------------------------------

def _hunt_filter_not_implicative(s: FiniteStructure):
    check_enumeration_limit(s.n)
    out = []
    for mask in range(1 << s.n):
        if _filter_mask_ok(s, mask) and not _implicative_mask_ok(s, mask):
            out.append(Subset(s.n, mask))
    return out


def _hunt_2_1_9_disagreement(s: FiniteStructure):
    from .propositions import check_2_1_9
    check_enumeration_limit(s.n)
    out = []
    for mask in range(1 << s.n):
        if not check_2_1_9(s, Subset(s.n, mask)).holds:
            out.append(Subset(s.n, mask))
    return out


def _hunt_non_antisymmetric(s: FiniteStructure):
    rel = s.order.rel
    for x in range(s.n):
        for y in range(x + 1, s.n):
            if rel[x, y] and rel[y, x]:
                return [(x, y)]
    return []


_HUNTERS = {
    "filter-not-implicative": _hunt_filter_not_implicative,
    "prop-2.1.9-disagreement": _hunt_2_1_9_disagreement,
    "non-antisymmetric-valid-model": _hunt_non_antisymmetric,
}


def hunt_structure(s: FiniteStructure, predicate: str) -> list:
    """All witnesses of the hunted phenomenon on one structure, in
    deterministic (ascending bitmask, then lexicographic) order."""
    try:
        hunter = _HUNTERS[predicate]
    except KeyError:
        raise ValueError(
            f"unknown predicate id {predicate!r}; known: {', '.join(HUNT_IDS)}") from None
    return hunter(s)


def hunt(cfg: SearchConfig,
         models: Optional[Sequence[FiniteStructure]] = None,
         workers: int = 1) -> list[tuple[FiniteStructure, object]]:
    """Every (model, witness) pair where the hunted phenomenon occurs.

    Models default to the configured search stream; pass ``models`` to hunt
    over explicit structures instead.  Output order and content are
    independent of the worker count.
    """
    if cfg.hunt is None:
        raise ValueError("SearchConfig.hunt is not set")
    if models is None:
        models = enumerate_models(cfg, workers=workers).models
    results = []
    for s in models:
        for witness in hunt_structure(s, cfg.hunt):
            results.append((s, witness))
    return results
