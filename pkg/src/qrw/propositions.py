"""Machine checkers for the catalog of filter claims, ids 2.1.2 - 2.1.10.

Each checker evaluates one numbered claim on a concrete structure (and
subset arguments where the claim takes them) and returns a
:class:`PropVerdict`.  Checkers never assume their hypotheses: hypotheses
and conclusion are evaluated separately, vacuous truth is reported
explicitly in the detail sentence, and per-condition booleans are surfaced
in ``parts``.  Quantifier scans report the lexicographically first
violating tuple; subset sweeps report the first offender in ascending
bitmask order.

The claims, in the normalized reading this package checks:

2.1.2   every implicative filter is a filter.
2.1.3   for a subset M:  r->(p->(p->k)) in M and r->p in M imply r->k in M.
2.1.4   for a subset M:  r->(r->p) in M implies r->p in M.
2.1.5   M1 contained in M2, M1 implicative, M2 a filter => M2 implicative.
2.1.7   {1} is an implicative filter iff every up-interval is one.
2.1.8   reading A: membership is upward closed;  reading B: members are
        closed under the product.  (The source condition is ambiguous;
        callers must pick a reading.)
2.1.9   four equivalent characterizations of implicative filters; the
        checker reports whether all four agree on the given subset.
2.1.10  non-empty M closed under product division (i), modus ponens (ii)
        and contraction (iii) is an implicative filter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

from .errors import SizeMismatchError
from .filters import (
    Subset,
    _filter_mask_ok,
    _implicative_mask_ok,
    _iter_bits,
    _scan_nested_imp,
    check_enumeration_limit,
    is_filter,
    is_implicative_filter,
    up_interval,
)
from .model import FiniteStructure

PROP_IDS = ("2.1.2", "2.1.3", "2.1.4", "2.1.5", "2.1.7", "2.1.8", "2.1.9", "2.1.10")

Reading = Literal["A", "B"]


@dataclass(frozen=True)
class PropWitness:
    """Concrete instantiation of a failed claim: the subsets involved and
    the element tuple violating the quantified clause."""

    subsets: tuple[Subset, ...] = ()
    elements: tuple[int, ...] = ()


@dataclass(frozen=True)
class PropVerdict:
    prop_id: str
    holds: bool
    witness: Optional[PropWitness]
    detail: str
    parts: Optional[dict[str, Optional[bool]]] = None


def _fmt(s: FiniteStructure, elements) -> str:
    return "(" + ", ".join(s.label(e) for e in elements) + ")"


def check_2_1_2(s: FiniteStructure, limit: Optional[int] = None) -> PropVerdict:
    """Every subset passing the implicative predicate also passes the
    filter predicate, by sweep over the whole power set."""
    check_enumeration_limit(s.n, limit)
    for mask in range(1 << s.n):
        if _implicative_mask_ok(s, mask) and not _filter_mask_ok(s, mask):
            M = Subset(s.n, mask)
            return PropVerdict(
                "2.1.2", False, PropWitness(subsets=(M,)),
                f"subset {{{', '.join(map(str, M.indices))}}} is an implicative filter but not a filter")
    return PropVerdict("2.1.2", True, None,
                       f"all {1 << s.n} subsets: implicative filter implies filter")


def check_2_1_3(s: FiniteStructure, M: Subset) -> PropVerdict:
    """r->(p->(p->k)) in M and r->p in M imply r->k in M, for all r, p, k.

    The claim assumes M is a filter; the precondition is evaluated and
    reported in ``parts`` but the verdict is the clause alone.
    """
    _match(s, M)
    imp = s.imp_rows
    n, mask = s.n, M.mask
    clause_witness = None
    for r in range(n):
        row = imp[r]
        for p in range(n):
            if not (mask >> row[p]) & 1:
                continue
            prow = imp[p]
            for k in range(n):
                if (mask >> row[prow[prow[k]]]) & 1 and not (mask >> row[k]) & 1:
                    clause_witness = (r, p, k)
                    break
            if clause_witness:
                break
        if clause_witness:
            break
    precondition = _filter_mask_ok(s, mask)
    parts = {"precondition_filter": precondition, "clause": clause_witness is None}
    if clause_witness is None:
        note = "" if precondition else " (note: M is not a filter)"
        return PropVerdict("2.1.3", True, None, "closure clause holds" + note, parts)
    return PropVerdict(
        "2.1.3", False, PropWitness(subsets=(M,), elements=clause_witness),
        f"clause fails at (r, p, k) = {_fmt(s, clause_witness)}", parts)


def check_2_1_4(s: FiniteStructure, M: Subset) -> PropVerdict:
    """r->(r->p) in M implies r->p in M, for all r, p."""
    _match(s, M)
    imp = s.imp_rows
    mask = M.mask
    for r in range(s.n):
        row = imp[r]
        for p in range(s.n):
            if (mask >> row[row[p]]) & 1 and not (mask >> row[p]) & 1:
                return PropVerdict(
                    "2.1.4", False, PropWitness(subsets=(M,), elements=(r, p)),
                    f"contraction fails at (r, p) = {_fmt(s, (r, p))}")
    return PropVerdict("2.1.4", True, None, "contraction clause holds")


def check_2_1_5(s: FiniteStructure, M1: Subset, M2: Subset) -> PropVerdict:
    """If M1 is implicative and its superset M2 is a filter, M2 is
    implicative.  Reported not-applicable when M1 is not contained in M2."""
    _match(s, M1)
    _match(s, M2)
    if not M1.issubset(M2):
        return PropVerdict("2.1.5", True, None,
                           "not applicable: the first subset is not contained in the second",
                           {"contained": False, "m1_implicative": None,
                            "m2_filter": None, "m2_implicative": None})
    m1_impl = _implicative_mask_ok(s, M1.mask)
    m2_filter = _filter_mask_ok(s, M2.mask)
    m2_impl = _implicative_mask_ok(s, M2.mask)
    parts = {"contained": True, "m1_implicative": m1_impl,
             "m2_filter": m2_filter, "m2_implicative": m2_impl}
    if not (m1_impl and m2_filter):
        missing = "the smaller subset is not implicative" if not m1_impl \
            else "the larger subset is not a filter"
        return PropVerdict("2.1.5", True, None, f"vacuously true: {missing}", parts)
    if m2_impl:
        return PropVerdict("2.1.5", True, None,
                           "hypotheses hold and the larger subset is implicative", parts)
    witness = _scan_nested_imp(s, M2.mask)
    return PropVerdict(
        "2.1.5", False, PropWitness(subsets=(M1, M2), elements=witness),
        f"hypotheses hold but the larger subset fails I3 at {_fmt(s, witness)}", parts)


def check_2_1_7(s: FiniteStructure) -> PropVerdict:
    """{1} is an implicative filter iff every up-interval Y(psi) is one."""
    singleton = Subset(s.n, 1 << s.one)
    left = is_implicative_filter(s, singleton).holds
    right = True
    right_witness = None
    for psi in range(s.n):
        interval = up_interval(s, psi)
        if not _implicative_mask_ok(s, interval.mask):
            right = False
            right_witness = (psi, interval)
            break
    parts = {"singleton_implicative": left, "all_up_intervals_implicative": right}
    if left == right:
        state = "both sides hold" if left else "both sides fail"
        return PropVerdict("2.1.7", True, None, f"biconditional holds: {state}", parts)
    if left and not right:
        psi, interval = right_witness
        return PropVerdict(
            "2.1.7", False, PropWitness(subsets=(interval,), elements=(psi,)),
            f"{{1}} is implicative but the up-interval of {s.label(psi)} is not", parts)
    witness = _scan_nested_imp(s, singleton.mask)
    return PropVerdict(
        "2.1.7", False, PropWitness(subsets=(singleton,), elements=witness or ()),
        "every up-interval is implicative but {1} is not", parts)


def check_2_1_8(s: FiniteStructure, M: Subset, reading: Reading) -> PropVerdict:
    """Two readings of an ambiguous closure condition.

    Reading A: r in M and r <= p imply p in M (upward closure).
    Reading B: r in M and p in M imply r*p in M (product closure).
    """
    _match(s, M)
    if reading == "A":
        up = s.order.row_masks
        for r in _iter_bits(M.mask):
            missing = up[r] & ~M.mask
            if missing:
                p = (missing & -missing).bit_length() - 1
                return PropVerdict(
                    "2.1.8", False, PropWitness(subsets=(M,), elements=(r, p)),
                    f"reading A fails: {s.label(r)} is a member, "
                    f"{s.label(r)} <= {s.label(p)}, but {s.label(p)} is not")
        return PropVerdict("2.1.8", True, None, "reading A holds: membership is upward closed")
    if reading == "B":
        if s.mul is None:
            return PropVerdict("2.1.8", True, None,
                               "not applicable: reading B needs a product table",
                               {"applicable": False})
        mul = s.mul_rows
        for r in _iter_bits(M.mask):
            row = mul[r]
            for p in _iter_bits(M.mask):
                if not (M.mask >> row[p]) & 1:
                    return PropVerdict(
                        "2.1.8", False, PropWitness(subsets=(M,), elements=(r, p)),
                        f"reading B fails: {s.label(r)}*{s.label(p)} = "
                        f"{s.label(row[p])} is not a member")
        return PropVerdict("2.1.8", True, None, "reading B holds: members are closed under *")
    raise ValueError(f"unknown reading {reading!r}, expected 'A' or 'B'")


def _scan_contraction(s: FiniteStructure, mask: int):
    imp = s.imp_rows
    for t in range(s.n):
        row = imp[t]
        for k in range(s.n):
            if (mask >> row[row[k]]) & 1 and not (mask >> row[k]) & 1:
                return (t, k)
    return None

def _scan_distribution(s: FiniteStructure, mask: int):
    imp = s.imp_rows
    n = s.n
    for t in range(n):
        row = imp[t]
        for c in range(n):
            crow = imp[c]
            tc_row = imp[row[c]]
            for k in range(n):
                if (mask >> row[crow[k]]) & 1 and not (mask >> tc_row[row[k]]) & 1:
                    return (t, c, k)
    return None

def _scan_aux_member(s: FiniteStructure, mask: int):
    imp = s.imp_rows
    n = s.n
    for c in _iter_bits(mask):
        crow = imp[c]
        for t in range(n):
            row = imp[t]
            for k in range(n):
                if (mask >> crow[row[row[k]]]) & 1 and not (mask >> row[k]) & 1:
                    return (t, c, k)
    return None


_CONDITION_LABELS_219 = ("i", "ii", "iii", "iv")


def check_2_1_9(s: FiniteStructure, S: Subset) -> PropVerdict:
    """Four characterizations evaluated side by side; holds iff they agree.

    (i)   S is an implicative filter;
    (ii)  S is a filter and t->(t->k) in S implies t->k in S;
    (iii) S is a filter and t->(c->k) in S implies (t->c)->(t->k) in S;
    (iv)  1 in S, and c->(t->(t->k)) in S with c in S imply t->k in S.
    """
    _match(s, S)
    mask = S.mask
    filter_verdict = is_filter(s, S)
    is_f = filter_verdict.holds
    filter_wit = filter_verdict.witness or ()
    witnesses: dict[str, Optional[tuple[int, ...]]] = {}

    impl_verdict = is_implicative_filter(s, S)
    cond_i = impl_verdict.holds
    witnesses["i"] = None if cond_i else (impl_verdict.witness or ())

    w = _scan_contraction(s, mask)
    cond_ii = is_f and w is None
    witnesses["ii"] = None if cond_ii else (filter_wit if not is_f else w)

    w = _scan_distribution(s, mask)
    cond_iii = is_f and w is None
    witnesses["iii"] = None if cond_iii else (filter_wit if not is_f else w)

    has_one = bool((mask >> s.one) & 1)
    w = _scan_aux_member(s, mask)
    cond_iv = has_one and w is None
    witnesses["iv"] = None if cond_iv else (() if not has_one else w)

    values = (cond_i, cond_ii, cond_iii, cond_iv)
    parts = dict(zip(_CONDITION_LABELS_219, values))
    summary = ", ".join(f"({label}) {'T' if v else 'F'}"
                        for label, v in zip(_CONDITION_LABELS_219, values))
    if len(set(values)) == 1:
        return PropVerdict("2.1.9", True, None, f"all four conditions agree: {summary}", parts)
    first_true = values.index(True)
    first_false = values.index(False)
    a, b = sorted((first_true, first_false))
    la, lb = _CONDITION_LABELS_219[a], _CONDITION_LABELS_219[b]
    false_label = _CONDITION_LABELS_219[first_false]
    return PropVerdict(
        "2.1.9", False,
        PropWitness(subsets=(S,), elements=witnesses[false_label] or ()),
        f"conditions disagree: {summary}; first disagreeing pair ({la}) vs ({lb})",
        parts)


def check_2_1_10(s: FiniteStructure, M: Subset) -> PropVerdict:
    """Sufficiency: a non-empty M satisfying (i) t in M and t*c in M imply
    c in M, (ii) t in M and t->c in M imply c in M, and (iii) t->(t->c) in
    M implies t->c in M, is an implicative filter.

    Clause (i) needs the product table; without one it is reported not
    applicable and the implication is checked from the remaining clauses.
    """
    _match(s, M)
    mask = M.mask
    imp = s.imp_rows
    n = s.n

    nonempty = mask != 0

    h_i: Optional[bool]
    wit_i = None
    if s.mul is None:
        h_i = None
    else:
        h_i = True
        mul = s.mul_rows
        for t in _iter_bits(mask):
            row = mul[t]
            for c in range(n):
                if (mask >> row[c]) & 1 and not (mask >> c) & 1:
                    h_i, wit_i = False, (t, c)
                    break
            if not h_i:
                break

    h_ii, wit_ii = True, None
    for t in _iter_bits(mask):
        row = imp[t]
        for c in range(n):
            if (mask >> row[c]) & 1 and not (mask >> c) & 1:
                h_ii, wit_ii = False, (t, c)
                break
        if not h_ii:
            break

    wit_iii = _scan_contraction(s, mask)
    h_iii = wit_iii is None

    conclusion = _implicative_mask_ok(s, mask)
    parts = {"nonempty": nonempty, "i": h_i, "ii": h_ii, "iii": h_iii,
             "conclusion": conclusion}
    hypotheses = nonempty and h_ii and h_iii and (h_i is not False)
    if not hypotheses:
        if not nonempty:
            reason = "M is empty"
        elif h_i is False:
            reason = f"clause (i) fails at {_fmt(s, wit_i)}"
        elif not h_ii:
            reason = f"clause (ii) fails at {_fmt(s, wit_ii)}"
        else:
            reason = f"clause (iii) fails at {_fmt(s, wit_iii)}"
        return PropVerdict("2.1.10", True, None, f"vacuously true: {reason}", parts)
    if conclusion:
        note = " (clause (i) not applicable: no product table)" if h_i is None else ""
        return PropVerdict("2.1.10", True, None,
                           "hypotheses hold and M is an implicative filter" + note, parts)
    witness = _scan_nested_imp(s, mask) or ()
    return PropVerdict(
        "2.1.10", False, PropWitness(subsets=(M,), elements=witness),
        "hypotheses hold but M is not an implicative filter", parts)


def _match(s: FiniteStructure, M: Subset) -> None:
    if M.n != s.n:
        raise SizeMismatchError(
            f"subset over carrier of size {M.n} evaluated against structure of size {s.n}")
