"""Binary symplectic Pauli rows, stabilizer tableaux and the height function.

A row ``(x, z, phase)`` denotes the operator ``i**phase * prod_q X_q**x_q Z_q**z_q``
where ``x`` and ``z`` are Python integers used as bit sets (bit ``q`` is qubit
``q``, counted from 0). Stored rows are Hermitian, so ``phase`` and the number
of Y positions have the same parity.

Sites are numbered from 1 in every public function of this module (the usual
convention in the stabilizer literature, and in the text formats); methods of
:class:`StabilizerTableau` whose names start with ``apply_`` or that take a
``row`` index work with 0-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .gf2 import bits, lowest_bit, rank

__all__ = [
    "TableauError",
    "PauliRow",
    "StabilizerTableau",
    "HeightProfile",
    "conjugate",
    "multiply_row",
    "to_echelon",
    "is_echelon",
    "left_end",
    "height",
    "permute_qubits",
    "parse_stabilizers",
    "format_stabilizers",
]

Gate = tuple


class TableauError(ValueError):
    """Invalid Pauli row, stabilizer set or gate."""


_CHARS = "IXZY"  # index = x + 2 z


@dataclass(frozen=True)
class PauliRow:
    """One Hermitian Pauli operator on ``n`` qubits."""

    x: int
    z: int
    phase: int
    n: int

    def __post_init__(self):
        if (self.phase - (self.x & self.z).bit_count()) % 2:
            raise TableauError("non-Hermitian Pauli row (odd real phase)")
        if (self.x | self.z) >> self.n:
            raise TableauError("row has support outside its qubit range")

    @classmethod
    def from_label(cls, label: str) -> "PauliRow":
        """Parse ``"+XZZI"``, ``"-YIZ"`` or an unsigned ``"XZ"``."""
        text = label.strip()
        negative = False
        if text[:1] in ("+", "-", "−"):
            negative = text[0] != "+"
            text = text[1:]
        x = z = 0
        for q, ch in enumerate(text):
            if ch not in _CHARS:
                raise TableauError(f"bad Pauli character {ch!r} in {label!r}")
            k = _CHARS.index(ch)
            x |= (k & 1) << q
            z |= (k >> 1) << q
        ny = (x & z).bit_count()
        return cls(x, z, (ny + 2 * negative) % 4, len(text))

    @classmethod
    def identity(cls, n: int) -> "PauliRow":
        return cls(0, 0, 0, n)

    @classmethod
    def single(cls, pauli: str, site: int, n: int) -> "PauliRow":
        """``pauli`` on 1-based ``site``, identity elsewhere."""
        label = ["I"] * n
        label[site - 1] = pauli
        return cls.from_label("".join(label))

    @property
    def sign(self) -> int:
        return 1 if (self.phase - (self.x & self.z).bit_count()) % 4 == 0 else -1

    def pauli_at(self, site: int) -> str:
        q = site - 1
        return _CHARS[((self.x >> q) & 1) + 2 * ((self.z >> q) & 1)]

    def is_identity(self) -> bool:
        return not (self.x | self.z)

    def support(self) -> list[int]:
        return [q + 1 for q in bits(self.x | self.z)]

    def commutes(self, other: "PauliRow") -> bool:
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    def __mul__(self, other: "PauliRow") -> "PauliRow":
        if self.n != other.n:
            raise TableauError("qubit count mismatch")
        phase = (self.phase + other.phase + 2 * (self.z & other.x).bit_count()) % 4
        return PauliRow(self.x ^ other.x, self.z ^ other.z, phase, self.n)

    def __neg__(self) -> "PauliRow":
        return PauliRow(self.x, self.z, (self.phase + 2) % 4, self.n)

    def extend(self, n: int) -> "PauliRow":
        """Same operator padded with identities up to ``n`` qubits."""
        return PauliRow(self.x, self.z, self.phase, n)

    def __str__(self) -> str:
        body = "".join(
            _CHARS[((self.x >> q) & 1) + 2 * ((self.z >> q) & 1)] for q in range(self.n)
        )
        return ("+" if self.sign > 0 else "-") + body

    def __repr__(self) -> str:
        return f"PauliRow({str(self)!r})"


def left_end(row: PauliRow) -> int:
    """1-based index of the left-most site where ``row`` acts nontrivially."""
    if row.is_identity():
        raise TableauError("identity row has no left end")
    return lowest_bit(row.x | row.z) + 1


@dataclass(frozen=True)
class HeightProfile:
    """Height function ``h(0..n)``; ``h_max`` is taken over photonic sites."""

    values: tuple[int, ...]
    n_photons: int

    @property
    def h_max(self) -> int:
        return max(self.values[: self.n_photons + 1])

    def __getitem__(self, x: int) -> int:
        return self.values[x]

    def __len__(self) -> int:
        return len(self.values)


class StabilizerTableau:
    """``n`` independent commuting generators over photons followed by emitters.

    Rows are kept in three parallel lists so that the solver can mutate them
    in place without allocating a row object per update.
    """

    def __init__(self, rows: Sequence[PauliRow], n_photons: int | None = None,
                 n_emitters: int = 0, validate: bool = True):
        rows = list(rows)
        n = rows[0].n if rows else 0
        if any(r.n != n for r in rows):
            raise TableauError("rows of different length")
        if n_photons is None:
            n_photons = n - n_emitters
        if n_photons + n_emitters != n:
            raise TableauError(f"{n} qubits but {n_photons} photons + {n_emitters} emitters")
        self.n_photons = n_photons
        self.n_emitters = n_emitters
        self._x = [r.x for r in rows]
        self._z = [r.z for r in rows]
        self._ph = [r.phase for r in rows]
        if validate:
            self.validate()

    @classmethod
    def _raw(cls, xs, zs, phs, n_photons, n_emitters) -> "StabilizerTableau":
        t = cls.__new__(cls)
        t.n_photons, t.n_emitters = n_photons, n_emitters
        t._x, t._z, t._ph = list(xs), list(zs), list(phs)
        return t

    @classmethod
    def zero_state(cls, n: int, n_photons: int | None = None) -> "StabilizerTableau":
        """Stabilizers ``Z_1, ..., Z_n`` of ``|0...0>``."""
        n_photons = n if n_photons is None else n_photons
        return cls._raw([0] * n, [1 << q for q in range(n)], [0] * n, n_photons, n - n_photons)

    @property
    def n(self) -> int:
        return self.n_photons + self.n_emitters

    def __len__(self) -> int:
        return len(self._x)

    def row(self, k: int) -> PauliRow:
        return PauliRow(self._x[k], self._z[k], self._ph[k] % 4, self.n)

    @property
    def rows(self) -> list[PauliRow]:
        return [self.row(k) for k in range(len(self._x))]

    def copy(self) -> "StabilizerTableau":
        return StabilizerTableau._raw(self._x, self._z, self._ph, self.n_photons, self.n_emitters)

    def with_emitters(self, n_emitters: int) -> "StabilizerTableau":
        """Append ``n_emitters`` qubits in ``|0>`` after the existing ones."""
        n = self.n
        t = StabilizerTableau._raw(self._x, self._z, self._ph, self.n_photons,
                                   self.n_emitters + n_emitters)
        for k in range(n_emitters):
            t._x.append(0)
            t._z.append(1 << (n + k))
            t._ph.append(0)
        return t

    def validate(self) -> None:
        """Raise :class:`TableauError` unless rows are ``n`` commuting independent Paulis."""
        n = self.n
        if len(self._x) != n:
            raise TableauError(f"{len(self._x)} generators for {n} qubits")
        for a in range(n):
            for b in range(a + 1, n):
                if ((self._x[a] & self._z[b]).bit_count()
                        + (self._z[a] & self._x[b]).bit_count()) % 2:
                    raise TableauError(f"generators {a + 1} and {b + 1} anticommute")
        if rank(x | (z << n) for x, z in zip(self._x, self._z)) != n:
            raise TableauError("generators are not independent")

    # -- Clifford conjugation, 0-based qubits, in place -------------------------

    def apply_h(self, q: int) -> None:
        m = 1 << q
        xs, zs, ph = self._x, self._z, self._ph
        for k in range(len(xs)):
            bx = xs[k] & m
            bz = zs[k] & m
            if bx:
                if bz:
                    ph[k] += 2
                else:
                    xs[k] ^= m
                    zs[k] ^= m
            elif bz:
                xs[k] ^= m
                zs[k] ^= m

    def apply_p(self, q: int) -> None:
        m = 1 << q
        xs, zs, ph = self._x, self._z, self._ph
        for k in range(len(xs)):
            if xs[k] & m:
                zs[k] ^= m
                ph[k] += 1

    def apply_pdag(self, q: int) -> None:
        m = 1 << q
        xs, zs, ph = self._x, self._z, self._ph
        for k in range(len(xs)):
            if xs[k] & m:
                zs[k] ^= m
                ph[k] += 3

    def apply_x(self, q: int) -> None:
        m = 1 << q
        zs, ph = self._z, self._ph
        for k in range(len(zs)):
            if zs[k] & m:
                ph[k] += 2

    def apply_z(self, q: int) -> None:
        m = 1 << q
        xs, ph = self._x, self._ph
        for k in range(len(xs)):
            if xs[k] & m:
                ph[k] += 2

    def apply_cnot(self, c: int, t: int) -> None:
        # X_c -> X_c X_t and Z_t -> Z_c Z_t; in the X^x Z^z form no phase appears
        if c == t:
            raise TableauError("CNOT control equals target")
        mc, mt = 1 << c, 1 << t
        xs, zs = self._x, self._z
        for k in range(len(xs)):
            if xs[k] & mc:
                xs[k] ^= mt
            if zs[k] & mt:
                zs[k] ^= mc

    def apply(self, gate: Gate) -> None:
        """Apply ``(name, q)`` or ``("CNOT", c, t)`` with 0-based qubits."""
        name = gate[0].upper()
        for q in gate[1:]:
            if not 0 <= q < self.n:
                raise TableauError(f"qubit {q + 1} out of range 1..{self.n}")
        if name == "CNOT":
            if len(gate) != 3:
                raise TableauError("CNOT takes control and target")
            self.apply_cnot(gate[1], gate[2])
            return
        if len(gate) != 2:
            raise TableauError(f"{name} takes one qubit")
        fn = _SINGLE.get(name)
        if fn is None:
            raise TableauError(f"unsupported gate {name}")
        fn(self, gate[1])

    # -- row operations -------------------------------------------------------

    def multiply_row(self, target: int, source: int) -> None:
        """``rows[target] := rows[source] * rows[target]`` (0-based indices)."""
        if target == source:
            raise TableauError("cannot multiply a generator by itself")
        xs, zs = self._x, self._z
        self._ph[target] = (self._ph[source] + self._ph[target]
                            + 2 * (zs[source] & xs[target]).bit_count()) % 4
        xs[target] ^= xs[source]
        zs[target] ^= zs[source]

    def left_end_of(self, k: int) -> int:
        """0-based left end of row ``k``."""
        return lowest_bit(self._x[k] | self._z[k])

    def reduce_rows(self, rows: Iterable[int]) -> list[int]:
        """Echelon-reduce the listed rows among themselves, in place.

        Rows not listed are left alone; the caller guarantees that they are
        already in echelon form and lead strictly left of every listed row.
        Returns the listed row indices in echelon order: sorted by left end,
        and at a site with two leading rows the X/Y-leading row comes first
        and the Z-leading row second.
        """
        xs, zs = self._x, self._z
        rest = sorted(rows)
        left = {}
        for r in rest:
            v = xs[r] | zs[r]
            if not v:
                raise TableauError("identity generator (dependent rows)")
            left[r] = (v & -v).bit_length() - 1
        out = []
        while rest:
            s = min(left[r] for r in rest)
            m = 1 << s
            lead = [r for r in rest if left[r] == s]
            rest = [r for r in rest if left[r] != s]
            demoted = []
            zlead = lead
            xlead = [r for r in lead if xs[r] & m]
            if xlead:
                p = xlead[0]
                out.append(p)
                for r in xlead[1:]:
                    self.multiply_row(r, p)
                zlead = []
                for r in lead:
                    if r == p:
                        continue
                    if zs[r] & m:
                        zlead.append(r)
                    else:
                        demoted.append(r)
            if zlead:
                p = zlead[0]
                out.append(p)
                for r in zlead[1:]:
                    self.multiply_row(r, p)
                    demoted.append(r)
            for r in demoted:
                v = xs[r] | zs[r]
                if not v:
                    raise TableauError("generators are not independent")
                left[r] = (v & -v).bit_length() - 1
            if demoted:
                # pivots are always the lowest-index candidate
                rest = sorted(rest + demoted)
        return out

    def is_photon_decoupled(self, site: int) -> bool:
        """Whether 1-based ``site`` carries no entanglement with the rest."""
        q = site - 1
        seen = 0
        for x, z in zip(self._x, self._z):
            p = ((x >> q) & 1) | (((z >> q) & 1) << 1)
            if p:
                if seen and p != seen:
                    return False
                seen = p
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerTableau):
            return NotImplemented
        return (self.n_photons == other.n_photons and self.n_emitters == other.n_emitters
                and self._x == other._x and self._z == other._z
                and [p % 4 for p in self._ph] == [p % 4 for p in other._ph])

    def __str__(self) -> str:
        return format_stabilizers(self)

    def __repr__(self) -> str:
        return f"StabilizerTableau({[str(r) for r in self.rows]!r}, n_emitters={self.n_emitters})"


_SINGLE = {
    "H": StabilizerTableau.apply_h,
    "P": StabilizerTableau.apply_p,
    "S": StabilizerTableau.apply_p,
    "PDAG": StabilizerTableau.apply_pdag,
    "X": StabilizerTableau.apply_x,
    "Z": StabilizerTableau.apply_z,
}


def conjugate(tableau: StabilizerTableau, gate: Gate) -> StabilizerTableau:
    """Return ``U g U^dagger`` for every generator; qubits in ``gate`` are 1-based.

    ``gate`` is ``("H", q)``, ``("P", q)``, ``("PDAG", q)``, ``("X", q)``,
    ``("Z", q)`` or ``("CNOT", control, target)``.
    """
    out = tableau.copy()
    out.apply((gate[0], *(q - 1 for q in gate[1:])))
    return out


def multiply_row(tableau: StabilizerTableau, target: int, source: int) -> StabilizerTableau:
    """Copy of ``tableau`` with generator ``target`` replaced by ``source * target``.

    Generator indices are 1-based.
    """
    n = len(tableau)
    if not (1 <= target <= n and 1 <= source <= n):
        raise TableauError("generator index out of range")
    out = tableau.copy()
    out.multiply_row(target - 1, source - 1)
    return out


def to_echelon(tableau: StabilizerTableau) -> StabilizerTableau:
    """Equivalent generator set in echelon gauge, rows sorted by left end."""
    t = tableau.copy()
    order = t.reduce_rows(range(len(t)))
    return StabilizerTableau._raw([t._x[k] for k in order], [t._z[k] for k in order],
                                  [t._ph[k] % 4 for k in order], t.n_photons, t.n_emitters)


def is_echelon(tableau: StabilizerTableau) -> bool:
    """Whether rows are sorted by left end with at most an (X|Y, Z) pair per site."""
    prev = -1
    lead_kind = None
    count = 0
    for k in range(len(tableau)):
        s = tableau.left_end_of(k)
        kind = ((tableau._x[k] >> s) & 1) + 2 * ((tableau._z[k] >> s) & 1)
        if s < prev:
            return False
        if s == prev:
            count += 1
            # second row at a site must lead with Z, first with X or Y
            if count > 2 or kind != 2 or lead_kind == 2:
                return False
        else:
            count = 1
            lead_kind = kind
        prev = s
    return True


def _heights(lefts: Iterable[int], n: int) -> list[int]:
    # h(x) = n - x - #{rows with 1-based left end > x};  0-based left end L counts when L >= x
    hist = [0] * (n + 1)
    for left in lefts:
        hist[left] += 1
    values = []
    beyond = sum(hist)
    for x in range(n + 1):
        values.append(n - x - beyond)
        beyond -= hist[x] if x < n else 0
    return values


def height(tableau: StabilizerTableau) -> HeightProfile:
    """Height function of the state; reduces to echelon gauge internally."""
    t = tableau.copy()
    order = t.reduce_rows(range(len(t)))
    values = _heights((t.left_end_of(k) for k in order), t.n)
    return HeightProfile(tuple(values), tableau.n_photons)


def permute_qubits(tableau: StabilizerTableau, ordering: Sequence[int]) -> StabilizerTableau:
    """Relabel qubits so that new site ``k`` is old site ``ordering[k-1]`` (1-based)."""
    n = tableau.n
    if sorted(ordering) != list(range(1, n + 1)):
        raise TableauError("ordering is not a permutation of the qubits")

    def move(v: int) -> int:
        out = 0
        for k, q in enumerate(ordering):
            out |= ((v >> (q - 1)) & 1) << k
        return out

    return StabilizerTableau._raw([move(x) for x in tableau._x], [move(z) for z in tableau._z],
                                  list(tableau._ph), tableau.n_photons, tableau.n_emitters)


def parse_stabilizers(text: str, n_emitters: int = 0) -> StabilizerTableau:
    """Parse one generator per line (``+XZZI`` style); ``#`` starts a comment.

    Raises :class:`TableauError` naming the offending line(s) for malformed
    labels, anticommuting pairs or dependent generators.
    """
    rows: list[PauliRow] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            row = PauliRow.from_label(line)
        except TableauError as exc:
            raise TableauError(f"line {lineno}: {exc}") from None
        if rows and row.n != rows[0].n:
            raise TableauError(f"line {lineno}: expected {rows[0].n} qubits, got {row.n}")
        if row.is_identity():
            raise TableauError(f"line {lineno}: identity is not a valid generator")
        for prev, prev_line in zip(rows, lines):
            if not prev.commutes(row):
                raise TableauError(f"lines {prev_line} and {lineno} anticommute")
        rows.append(row)
        lines.append(lineno)
    if not rows:
        raise TableauError("no generators")
    n = rows[0].n
    basis: list[int] = []
    for row, lineno in zip(rows, lines):
        vec = row.x | (row.z << n)
        if rank([*basis, vec]) == len(basis):
            raise TableauError(f"line {lineno} is a product of earlier generators")
        basis.append(vec)
    if len(rows) != n:
        raise TableauError(f"{len(rows)} generators given for {n} qubits")
    return StabilizerTableau(rows, n_photons=n - n_emitters, n_emitters=n_emitters,
                             validate=False)


def format_stabilizers(tableau: StabilizerTableau) -> str:
    return "\n".join(str(r) for r in tableau.rows) + "\n"
