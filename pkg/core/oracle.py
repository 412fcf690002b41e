"""Combinatorial ground truth: overpartitions, their M2-rank and rank tables."""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator, Optional

import msgspec

from core.errors import OutOfRange, RankforgeError
from core.products import ProductSpec, expand_product
from core.series import ZLaurentPoly

logger = logging.getLogger(__name__)

CONVENTIONS = ("a", "b")
ODD_SIGNS = ("plus", "minus")


class Part(msgspec.Struct, frozen=True, array_like=True):
    size: int
    overlined: bool = False

    def __str__(self):
        return f"{self.size}\u0305" if self.overlined else str(self.size)


class Overpartition(msgspec.Struct, frozen=True):
    parts: tuple[Part, ...] = ()

    @property
    def weight(self) -> int:
        return sum(p.size for p in self.parts)

    @property
    def largest(self) -> int:
        return self.parts[0].size if self.parts else 0

    def __str__(self):
        return "+".join(str(p) for p in self.parts) or "()"


def _overpartitions(n: int, cap: int) -> Iterator[tuple]:
    if n == 0:
        yield ()
        return
    for size in range(min(n, cap), 0, -1):
        for overlined in (0, 1):
            plain = 0
            while (plain + overlined) * size <= n:
                if plain + overlined:
                    head = (Part(size, True),) * overlined + (Part(size),) * plain
                    for rest in _overpartitions(n - (plain + overlined) * size, size - 1):
                        yield head + rest
                plain += 1


def enumerate_overpartitions(n: int) -> list:
    """All overpartitions of n, largest part first, each exactly once."""
    if n < 0:
        raise OutOfRange(f"cannot enumerate overpartitions of {n}")
    return [Overpartition(parts) for parts in _overpartitions(n, n)]


def m2_rank(op: Overpartition, convention: str = "a", odd_sign: str = "plus") -> int:
    """ceil(l/2) - n(parts) +- n(odd plain parts) - chi.

    chi is 1 when the largest part is odd and counts as non-overlined. Under convention
    "a" the largest part counts as overlined as soon as its overlined copy exists, under
    convention "b" it counts as non-overlined as soon as a plain copy exists.
    """
    if not op.parts:
        return 0
    largest = op.largest
    odd_plain = sum(1 for p in op.parts if p.size % 2 and not p.overlined)
    sign = 1 if odd_sign == "plus" else -1
    chi = 0
    if largest % 2:
        tops = [p.overlined for p in op.parts if p.size == largest]
        if convention == "a":
            chi = 0 if any(tops) else 1
        else:
            chi = 1 if not all(tops) else 0
    return (largest + 1) // 2 - len(op.parts) + sign * odd_plain - chi


def overpartition_count(n: int) -> int:
    if n < 0:
        return 0
    return int(expand_product(ProductSpec.parse("N1,1 / J1"), n + 1).coefficient(n))


def gen_fn_M2(n: int) -> list:
    """Coefficients of q^0..q^(n-1) of the two-variable M2-rank generating function.

    The summands for n and -n coincide after normalizing to positive q powers, so the
    bilateral sum is 1 plus twice the n >= 1 part.
    """
    inner = [dict() for _ in range(n)]

    def add(e, z, c):
        if e < n:
            inner[e][z] = inner[e].get(z, 0) + c

    add(0, 0, 1)
    k = 1
    while k * k + 2 * k < n:
        base = k * k + 2 * k
        sign = -1 if k % 2 else 1
        i = 0
        while base + 2 * k * i < n:
            j = 0
            while base + 2 * k * (i + j) < n:
                e, z = base + 2 * k * (i + j), i - j
                # 2 * (1 - z)(1 - 1/z) = 2 * (2 - z - 1/z)
                add(e, z, 4 * sign)
                add(e, z + 1, -2 * sign)
                add(e, z - 1, -2 * sign)
                j += 1
            i += 1
        k += 1
    pbar = expand_product(ProductSpec.parse("N1,1 / J1"), n).numerators if n > 0 else ()
    out = []
    for e in range(n):
        total = ZLaurentPoly()
        for a in range(e + 1):
            if inner[a] and pbar[e - a]:
                total = total + ZLaurentPoly(inner[a]) * pbar[e - a]
        out.append(total)
    return out


class RankTable(msgspec.Struct):
    """rows[n] maps an M2-rank m to the number of overpartitions of n with that rank."""

    rows: list[dict[int, int]]
    convention: str = "a"
    odd_sign: str = "plus"

    @property
    def max_n(self) -> int:
        return len(self.rows) - 1

    def _row(self, n: int) -> dict:
        if not 0 <= n <= self.max_n:
            raise OutOfRange(f"weight {n} outside the table (0..{self.max_n})")
        return self.rows[n]

    def count(self, m: int, n: int) -> int:
        return self._row(n).get(m, 0)

    def total(self, n: int) -> int:
        return sum(self._row(n).values())

    def residue(self, s: int, modulus: int, n: int) -> int:
        if modulus < 1 or not 0 <= s < modulus:
            raise OutOfRange(f"residue {s} mod {modulus}")
        return sum(c for m, c in self._row(n).items() if m % modulus == s)

    def cells(self):
        """(n, m, count) in ascending order."""
        for n, row in enumerate(self.rows):
            for m in sorted(row):
                yield n, m, row[m]

    def residue_rows(self, modulus: int, max_n: Optional[int] = None):
        """(n, s, count) for every residue s, ascending."""
        last = self.max_n if max_n is None else max_n
        for n in range(last + 1):
            for s in range(modulus):
                yield n, s, self.residue(s, modulus, n)

    def as_dict(self) -> dict:
        return {
            "convention": self.convention,
            "odd_sign": self.odd_sign,
            "max_n": self.max_n,
            "rows": [{str(m): c for m, c in sorted(row.items())} for row in self.rows],
        }

    def check_laws(self):
        """Raise RankforgeError unless the row sums, symmetry, support and the
        mod 3 / mod 5 halving relations hold on every row."""
        counts = expand_product(ProductSpec.parse("N1,1 / J1"), self.max_n + 1).numerators
        for n, row in enumerate(self.rows):
            if sum(row.values()) != counts[n]:
                raise RankforgeError(f"row {n} does not sum to the overpartition count")
            for m, c in row.items():
                if abs(m) > n:
                    raise RankforgeError(f"rank {m} out of range at weight {n}")
                if row.get(-m, 0) != c:
                    raise RankforgeError(f"rank {m} not symmetric at weight {n}")
            for half in (3, 5):
                for s in range(half):
                    whole = self.residue(s, half, n)
                    split = self.residue(s, 2 * half, n) + self.residue(s + half, 2 * half, n)
                    if whole != split:
                        raise RankforgeError(f"residue {s} mod {half} does not split at weight {n}")


def _row_by_enumeration(n: int, convention: str, odd_sign: str) -> dict:
    row: dict[int, int] = {}
    for op in enumerate_overpartitions(n):
        r = m2_rank(op, convention, odd_sign)
        row[r] = row.get(r, 0) + 1
    return row


def rank_counts(max_n: int, convention: str = "a", odd_sign: str = "plus", workers: int = 1) -> RankTable:
    _check_flags(convention, odd_sign)
    if max_n < 0:
        raise OutOfRange(f"table size {max_n}")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(lambda n: _row_by_enumeration(n, convention, odd_sign), range(max_n + 1)))
    else:
        rows = [_row_by_enumeration(n, convention, odd_sign) for n in range(max_n + 1)]
    return RankTable(rows, convention, odd_sign)


def rank_counts_fast(max_n: int, convention: str = "a", odd_sign: str = "plus") -> RankTable:
    """Same table as rank_counts, built by conditioning on the largest part.

    below[w] holds the rank contributions of all overpartitions of w into parts
    smaller than the current largest size L. A plain part p adds -1 + [p odd]
    (with the odd sign), an overlined part adds -1.
    """
    _check_flags(convention, odd_sign)
    if max_n < 0:
        raise OutOfRange(f"table size {max_n}")
    sign = 1 if odd_sign == "plus" else -1
    below = [dict() for _ in range(max_n + 1)]
    below[0][0] = 1
    rows = [dict() for _ in range(max_n + 1)]
    rows[0][0] = 1
    for size in range(1, max_n + 1):
        odd = size % 2 == 1
        plain_step = -1 + (sign if odd else 0)
        for overlined in (0, 1):
            plain = 0
            while (plain + overlined) * size <= max_n:
                if plain + overlined:
                    used = (plain + overlined) * size
                    if convention == "a":
                        chi = 1 if odd and not overlined else 0
                    else:
                        chi = 1 if odd and plain else 0
                    offset = (size + 1) // 2 + plain * plain_step - overlined - chi
                    for w in range(max_n - used + 1):
                        row = rows[w + used]
                        for r, c in below[w].items():
                            row[r + offset] = row.get(r + offset, 0) + c
                plain += 1
        # admit size as a smaller part: 1/(1 - z^step q^size), then (1 + z^-1 q^size)
        for w in range(size, max_n + 1):
            target = below[w]
            for r, c in below[w - size].items():
                target[r + plain_step] = target.get(r + plain_step, 0) + c
        for w in range(max_n, size - 1, -1):
            target = below[w]
            for r, c in below[w - size].items():
                target[r - 1] = target.get(r - 1, 0) + c
    rows = [{m: c for m, c in row.items() if c} for row in rows]
    return RankTable(rows, convention, odd_sign)


def _check_flags(convention: str, odd_sign: str):
    if convention not in CONVENTIONS:
        raise RankforgeError(f"unknown chi convention {convention!r}")
    if odd_sign not in ODD_SIGNS:
        raise RankforgeError(f"unknown odd sign {odd_sign!r}")


class CalibrationTrial(msgspec.Struct):
    convention: str
    odd_sign: str
    passed: bool
    first_mismatch: Optional[str] = None


class Calibration(msgspec.Struct):
    convention: str
    odd_sign: str
    max_n: int
    trials: list[CalibrationTrial]


def calibrate(max_n: int = 25) -> Calibration:
    """Find the unique (chi convention, odd sign) pair whose enumerated ranks
    reproduce the generating function for every weight up to max_n."""
    logger.info("🔍 calibrating the M2-rank against its generating function up to n=%d", max_n)
    expected = gen_fn_M2(max_n + 1)
    by_weight = [enumerate_overpartitions(n) for n in range(max_n + 1)]
    trials = []
    for convention in CONVENTIONS:
        for odd_sign in ODD_SIGNS:
            mismatch = None
            for n, ops in enumerate(by_weight):
                row: dict[int, int] = {}
                for op in ops:
                    r = m2_rank(op, convention, odd_sign)
                    row[r] = row.get(r, 0) + 1
                if ZLaurentPoly(row) != expected[n]:
                    mismatch = f"weight {n}: enumerated {sorted(row.items())} vs generating function {expected[n].items()}"
                    break
            trials.append(CalibrationTrial(convention, odd_sign, mismatch is None, mismatch))
    passing = [t for t in trials if t.passed]
    if len(passing) != 1:
        raise RankforgeError(f"{len(passing)} rank conventions match the generating function, expected exactly one")
    chosen = passing[0]
    logger.info("✅ rank convention %s with %s odd sign", chosen.convention, chosen.odd_sign)
    return Calibration(chosen.convention, chosen.odd_sign, max_n, trials)


_table_lock = threading.Lock()
_tables: dict = {}


def shared_table(max_n: int, convention: str = "a", odd_sign: str = "plus") -> RankTable:
    """Process-wide rank table, built once by the first caller."""
    key = (convention, odd_sign)
    with _table_lock:
        table = _tables.get(key)
        if table is None or table.max_n < max_n:
            logger.info("🧮 tabulating M2-ranks up to n=%d", max_n)
            table = rank_counts_fast(max_n, convention, odd_sign)
            _tables[key] = table
        return table
