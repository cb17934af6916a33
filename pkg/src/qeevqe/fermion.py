"""Electron integrals, active-space reduction and the excitation-operator form.

Conventions
-----------
Spin-orbital ``2i`` is the alpha and ``2i + 1`` the beta component of
spatial orbital ``i``. Two-electron integrals are stored in physicist order
for the operator ``a+_p a+_q a_r a_s``::

    H = sum_pq h1[p, q] a+_p a_q + 1/2 sum_pqrs h2[p, q, r, s] a+_p a+_q a_r a_s

so that ``h2[p, q, r, s] = (ps|qr)`` in chemist notation, nonzero only when
``p, s`` share a spin and ``q, r`` share a spin.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import ParseError, ValidationError

SYMMETRY_TOL = 1e-10
# MP2 natural occupancies may overshoot [0, 2] slightly (2.000007 in published tables)
OCCUPANCY_SLACK = 1e-4


@dataclass(frozen=True, eq=False)
class IntegralTable:
    h1: np.ndarray
    h2: np.ndarray
    core_energy: float = 0.0
    n_electrons: int = 0
    ms2: int = 0

    def __post_init__(self):
        h1 = np.asarray(self.h1, dtype=float)
        h2 = np.asarray(self.h2, dtype=float)
        n = h1.shape[0]
        if h1.shape != (n, n) or h2.shape != (n,) * 4:
            raise ValidationError(f"inconsistent integral shapes {h1.shape} / {h2.shape}")
        if n % 2:
            raise ValidationError(f"odd number of spin-orbitals ({n})")
        if self.n_electrons < 0 or self.n_electrons > n:
            raise ValidationError(f"{self.n_electrons} electrons in {n} spin-orbitals")
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)
        object.__setattr__(self, "core_energy", float(self.core_energy))

    @property
    def n_spin_orbitals(self) -> int:
        return self.h1.shape[0]

    @property
    def n_orbitals(self) -> int:
        return self.n_spin_orbitals // 2

    @property
    def n_alpha(self) -> int:
        return (self.n_electrons + self.ms2) // 2

    @property
    def n_beta(self) -> int:
        return (self.n_electrons - self.ms2) // 2

    def check_symmetry(self, tol: float = SYMMETRY_TOL) -> None:
        if not np.allclose(self.h1, self.h1.T, atol=tol, rtol=0):
            raise ValidationError("h1 is not symmetric")
        if not np.allclose(self.h2, self.h2.transpose(3, 2, 1, 0), atol=tol, rtol=0):
            raise ValidationError("h2 lacks the h[p,q,r,s] == h[s,r,q,p] symmetry")

    def with_electrons(self, n_electrons: int, ms2: int = 0) -> IntegralTable:
        return replace(self, n_electrons=n_electrons, ms2=ms2)


def spin_expand(h1_spatial, eri_chemist, core_energy=0.0, n_electrons=0, ms2=0) -> IntegralTable:
    """Spatial integrals (chemist ``(ij|kl)``) to a spin-orbital table."""
    h1s = np.asarray(h1_spatial, dtype=float)
    eri = np.asarray(eri_chemist, dtype=float)
    norb = h1s.shape[0]
    n = 2 * norb
    h1 = np.zeros((n, n))
    h1[0::2, 0::2] = h1s
    h1[1::2, 1::2] = h1s
    # h2[(i,s), (k,t), (l,t), (j,s)] = (ij|kl)
    g = eri.transpose(0, 2, 3, 1)
    h2 = np.zeros((n,) * 4)
    for s in (0, 1):
        for t in (0, 1):
            h2[s::2, t::2, t::2, s::2] = g
    return IntegralTable(h1, h2, core_energy, n_electrons, ms2)


def spatial_integrals(table: IntegralTable) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`spin_expand`, reading the alpha blocks."""
    h1s = table.h1[0::2, 0::2].copy()
    # (ij|kl) = h2[2i, 2k, 2l, 2j]
    g = table.h2[0::2, 0::2, 0::2, 0::2]
    eri = g.transpose(0, 3, 1, 2).copy()
    return h1s, eri


# FCIDUMP --------------------------------------------------------------------

_HEADER_KEY = re.compile(r"([A-Za-z0-9_]+)\s*=\s*([^=]*?)(?=,?\s*[A-Za-z0-9_]+\s*=|\s*$)")


def _parse_header(text: str, source=None) -> dict:
    body = text.strip()
    if not body.upper().startswith("&FCI"):
        raise ParseError("FCIDUMP header must start with &FCI", line=1, source=source)
    body = body[4:]
    fields = {}
    for key, value in _HEADER_KEY.findall(body):
        fields[key.upper()] = value.strip().rstrip(",").strip()
    for required in ("NORB", "NELEC"):
        if required not in fields:
            raise ParseError(f"FCIDUMP header lacks {required}", line=1, source=source)
    return fields


def parse_fcidump(text: str, source=None) -> IntegralTable:
    """Read an FCIDUMP string into a spin-orbital :class:`IntegralTable`.

    Entries ``v i j k l`` are chemist-notation spatial integrals with 1-based
    indices and are expanded over their eightfold permutational symmetry;
    ``v i j 0 0`` is a one-electron integral, ``v 0 0 0 0`` the core energy.
    ``v i 0 0 0`` (orbital energies) lines are ignored.
    """
    lines = text.splitlines()
    header_lines = []
    end = None
    for idx, line in enumerate(lines):
        stripped = line.strip()
        upper = stripped.upper()
        if upper.startswith("&END") or upper == "/" or upper.endswith("&END") or upper.endswith("/"):
            header_lines.append(re.sub(r"(&END|/)\s*$", "", stripped, flags=re.IGNORECASE))
            end = idx
            break
        header_lines.append(stripped)
    if end is None:
        raise ParseError("FCIDUMP header is not terminated by &END or /", line=len(lines) or 1, source=source)
    fields = _parse_header(" ".join(header_lines), source)
    try:
        norb = int(fields["NORB"])
        nelec = int(fields["NELEC"])
        ms2 = int(fields.get("MS2", "0") or 0)
    except ValueError:
        raise ParseError("non-integer NORB/NELEC/MS2", line=1, source=source) from None
    if norb < 0 or nelec < 0:
        raise ValidationError("NORB and NELEC must be nonnegative")
    if nelec > 2 * norb:
        raise ValidationError(f"NELEC={nelec} exceeds 2*NORB={2 * norb}")

    h1 = np.zeros((norb, norb))
    eri = np.zeros((norb,) * 4)
    core = 0.0
    for lineno in range(end + 1, len(lines)):
        raw = lines[lineno].strip()
        if not raw:
            continue
        parts = raw.split()
        if len(parts) != 5:
            raise ParseError(f"expected 'value i j k l', got {raw!r}", line=lineno + 1, source=source)
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise ParseError(f"malformed integral line {raw!r}", line=lineno + 1, source=source) from None
        if min(i, j, k, l) < 0 or max(i, j, k, l) > norb:
            raise ValidationError(
                f"{source + ':' if source else ''}{lineno + 1}: index out of range 0..{norb} in {raw!r}"
            )
        if i == j == k == l == 0:
            core = value
        elif k == 0 and l == 0:
            if j == 0:
                continue
            h1[i - 1, j - 1] = h1[j - 1, i - 1] = value
        elif i == 0 or j == 0 or k == 0 or l == 0:
            raise ValidationError(
                f"{source + ':' if source else ''}{lineno + 1}: zero index inside a two-electron entry {raw!r}"
            )
        else:
            a, b, c, d = i - 1, j - 1, k - 1, l - 1
            for p, q, r, s in (
                (a, b, c, d), (b, a, c, d), (a, b, d, c), (b, a, d, c),
                (c, d, a, b), (d, c, a, b), (c, d, b, a), (d, c, b, a),
            ):
                eri[p, q, r, s] = value
    return spin_expand(h1, eri, core, nelec, ms2)


def read_fcidump(path) -> IntegralTable:
    path = Path(path)
    return parse_fcidump(path.read_text(), source=str(path))


def write_fcidump(table: IntegralTable, tol: float = 0.0) -> str:
    """Serialize a spin-restricted table; values use ``repr`` (17 digits)."""
    h1s, eri = spatial_integrals(table)
    norb = h1s.shape[0]
    out = [
        f"&FCI NORB={norb},NELEC={table.n_electrons},MS2={table.ms2},",
        "  ORBSYM=" + ",".join("1" for _ in range(norb)) + ",",
        "  ISYM=1,",
        "&END",
    ]
    for i in range(norb):
        for j in range(i + 1):
            for k in range(norb):
                for l in range(k + 1):
                    if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                        continue
                    v = eri[i, j, k, l]
                    if abs(v) > tol:
                        out.append(f"{float(v)!r} {i + 1} {j + 1} {k + 1} {l + 1}")
    for i in range(norb):
        for j in range(i + 1):
            v = h1s[i, j]
            if abs(v) > tol:
                out.append(f"{float(v)!r} {i + 1} {j + 1} 0 0")
    out.append(f"{float(table.core_energy)!r} 0 0 0 0")
    return "\n".join(out) + "\n"


# active spaces -----------------------------------------------------------------

@dataclass(frozen=True)
class ActiveSpaceSpec:
    frozen: tuple[int, ...]
    removed: tuple[int, ...]
    active: tuple[int, ...]

    def __post_init__(self):
        for name in ("frozen", "removed", "active"):
            object.__setattr__(self, name, tuple(sorted(int(i) for i in getattr(self, name))))

    @classmethod
    def from_active(cls, n_orbitals: int, active: Sequence[int], n_electrons: int) -> ActiveSpaceSpec:
        """Freeze the aufbau-occupied orbitals below the active window, drop the rest."""
        if n_electrons % 2:
            raise ValidationError("closed-shell reference needs an even electron count")
        active = sorted(set(active))
        n_occ = n_electrons // 2
        rest = [i for i in range(n_orbitals) if i not in active]
        frozen = [i for i in rest if i < n_occ]
        removed = [i for i in rest if i >= n_occ]
        spec = cls(tuple(frozen), tuple(removed), tuple(active))
        spec.validate(n_orbitals, n_electrons)
        return spec

    def validate(self, n_orbitals: int, n_electrons: int) -> None:
        everything = self.frozen + self.removed + self.active
        if sorted(everything) != list(range(n_orbitals)):
            raise ValidationError(
                f"frozen/removed/active must partition range({n_orbitals}); got {self}"
            )
        if self.active_electrons(n_electrons) < 0:
            raise ValidationError("negative active electron count")
        if self.active_electrons(n_electrons) > 2 * len(self.active):
            raise ValidationError("more active electrons than active spin-orbitals")

    def active_electrons(self, n_electrons: int) -> int:
        return n_electrons - 2 * len(self.frozen)

    @property
    def label(self) -> str:
        a = self.active
        if a and list(a) == list(range(a[0], a[-1] + 1)):
            return f"{a[0]}-{a[-1]}"
        return ",".join(str(i) for i in a)


def parse_orbital_range(text: str) -> tuple[int, ...]:
    """``"14-19"`` or ``"1,3,5-7"`` to a sorted tuple of orbital indices."""
    out = set()
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            if "-" in chunk:
                lo, hi = chunk.split("-", 1)
                out.update(range(int(lo), int(hi) + 1))
            else:
                out.add(int(chunk))
        except ValueError:
            raise ValidationError(f"bad orbital range {text!r}") from None
    return tuple(sorted(out))


def _spin_indices(orbitals):
    return [2 * i + s for i in orbitals for s in (0, 1)]


def freeze_reduce(table: IntegralTable, spec: ActiveSpaceSpec) -> IntegralTable:
    """Fold doubly occupied frozen orbitals into a mean field and drop removed ones."""
    spec.validate(table.n_orbitals, table.n_electrons)
    F = _spin_indices(spec.frozen)
    A = _spin_indices(spec.active)
    h1, h2 = table.h1, table.h2

    core = table.core_energy
    if F:
        hF = h2[np.ix_(F, F, F, F)]
        direct = np.einsum("fggf->", hF)
        exchange = np.einsum("fgfg->", hF)
        core += np.trace(h1[np.ix_(F, F)]) + 0.5 * (direct - exchange)

    h1a = h1[np.ix_(A, A)].copy()
    if F:
        # one frozen creator/annihilator pair contracted out of the two-body term
        j1 = np.einsum("affb->ab", h2[np.ix_(A, F, F, A)])
        j2 = np.einsum("fabf->ab", h2[np.ix_(F, A, A, F)])
        k1 = np.einsum("afbf->ab", h2[np.ix_(A, F, A, F)])
        k2 = np.einsum("fafb->ab", h2[np.ix_(F, A, F, A)])
        h1a += 0.5 * (j1 + j2 - k1 - k2)
    h2a = h2[np.ix_(A, A, A, A)].copy()
    return IntegralTable(h1a, h2a, core, spec.active_electrons(table.n_electrons), table.ms2)


# excitation-operator form ---------------------------------------------------------

@dataclass(eq=False)
class ExcitationPolynomial:
    """``constant + sum linear[p,q] E_pq + sum quadratic[p,r,q,s] E_pr E_qs``.

    The Kronecker term that arises when normal ordering is already folded into
    ``linear``.
    """

    n_spin_orbitals: int
    linear: dict[tuple[int, int], float] = field(default_factory=dict)
    quadratic: dict[tuple[int, int, int, int], float] = field(default_factory=dict)
    constant: float = 0.0

    def linear_array(self) -> np.ndarray:
        out = np.zeros((self.n_spin_orbitals,) * 2)
        for (p, q), c in self.linear.items():
            out[p, q] = c
        return out

    def quadratic_array(self) -> np.ndarray:
        """Dense array indexed ``[p, r, q, s]`` for the product ``E_pr E_qs``."""
        out = np.zeros((self.n_spin_orbitals,) * 4)
        for key, c in self.quadratic.items():
            out[key] = c
        return out


def to_excitation_form(table: IntegralTable, tol: float = 0.0) -> ExcitationPolynomial:
    """Rewrite the two-body term via ``a+p a+q ar as = d_qr E_ps - E_pr E_qs``."""
    n = table.n_spin_orbitals
    lin = table.h1 + 0.5 * np.einsum("pqqs->ps", table.h2)
    linear = {(int(p), int(q)): float(lin[p, q]) for p, q in zip(*np.nonzero(np.abs(lin) > tol))}
    quadratic = {}
    for p, q, r, s in zip(*np.nonzero(np.abs(table.h2) > tol)):
        key = (int(p), int(r), int(q), int(s))
        quadratic[key] = quadratic.get(key, 0.0) - 0.5 * float(table.h2[p, q, r, s])
    return ExcitationPolynomial(n, linear, quadratic, table.core_energy)


# occupancies and selection ------------------------------------------------------

@dataclass(frozen=True)
class OrbitalOccupancy:
    index: int
    eigenvalue: float
    occupancy: float


def read_occupancy_csv(source) -> list[OrbitalOccupancy]:
    """CSV with header ``index,eigenvalue,occupancy``; accepts a path or text."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).exists()):
        text = Path(source).read_text()
        name = str(source)
    else:
        text = source
        name = None
    reader = csv.DictReader(io.StringIO(text))
    missing = {"index", "eigenvalue", "occupancy"} - set(reader.fieldnames or [])
    if missing:
        raise ParseError(f"occupancy CSV lacks columns {sorted(missing)}", line=1, source=name)
    out = []
    for lineno, row in enumerate(reader, start=2):
        try:
            entry = OrbitalOccupancy(int(row["index"]), float(row["eigenvalue"]), float(row["occupancy"]))
        except (TypeError, ValueError):
            raise ParseError(f"malformed occupancy row {row}", line=lineno, source=name) from None
        if not -OCCUPANCY_SLACK <= entry.occupancy <= 2 + OCCUPANCY_SLACK:
            raise ValidationError(f"occupancy {entry.occupancy} outside [0, 2] at line {lineno}")
        out.append(entry)
    return sorted(out, key=lambda e: e.index)


def write_occupancy_csv(entries: Sequence[OrbitalOccupancy]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "eigenvalue", "occupancy"])
    for e in entries:
        w.writerow([e.index, repr(e.eigenvalue), repr(e.occupancy)])
    return buf.getvalue()


def _sector_qubits(n_mo, n_occ):
    dim = math.comb(n_mo, n_occ) ** 2
    return max(0, math.ceil(math.log2(dim))) if dim > 1 else 0


def select_active_by_occupancy(
    occ: Sequence[OrbitalOccupancy],
    n_electrons: int,
    max_active_mos: int,
    *,
    n_active_electrons: int | None = None,
    max_qee_qubits: int | None = None,
) -> ActiveSpaceSpec:
    """Pick the active orbitals whose natural occupancy is most fractional.

    Orbitals are scored by ``min(occ, 2 - occ)``. The lowest ``n_electrons/2``
    orbitals (by index) form the occupied side; the rest are virtual. For
    every split of ``max_active_mos`` into ``k`` occupied and
    ``max_active_mos - k`` virtual orbitals, the best-scoring ones of each
    side are taken and the split with the largest total score wins. A fixed
    ``n_active_electrons`` pins ``k``; ``max_qee_qubits`` discards splits
    whose S_z = 0 sector would need more encoded qubits. Ties favour
    orbitals nearest the Fermi level.
    """
    if max_active_mos < 1:
        raise ValidationError("max_active_mos must be at least 1")
    if n_electrons % 2:
        raise ValidationError(f"odd electron count {n_electrons} for a closed-shell reference")
    if n_active_electrons is not None and n_active_electrons % 2:
        raise ValidationError(f"odd active electron count {n_active_electrons}")
    entries = sorted(occ, key=lambda e: e.index)
    n_orb = len(entries)
    if [e.index for e in entries] != list(range(n_orb)):
        raise ValidationError("occupancy indices must be 0..n-1")
    n_occ = n_electrons // 2
    if n_occ > n_orb:
        raise ValidationError(f"{n_electrons} electrons do not fit in {n_orb} orbitals")
    m = min(max_active_mos, n_orb)

    def score(e):
        return min(e.occupancy, 2.0 - e.occupancy)

    # ties: highest occupied first, lowest virtual first
    occ_side = sorted(entries[:n_occ], key=lambda e: (-score(e), -e.index))
    vir_side = sorted(entries[n_occ:], key=lambda e: (-score(e), e.index))

    best = None
    for k in range(0, m + 1):
        if k > len(occ_side) or m - k > len(vir_side):
            continue
        if n_active_electrons is not None and 2 * k != n_active_electrons:
            continue
        if max_qee_qubits is not None and _sector_qubits(m, k) > max_qee_qubits:
            continue
        chosen = occ_side[:k] + vir_side[: m - k]
        total = math.fsum(score(e) for e in chosen)
        # prefer higher score, then the split closer to half filling
        key = (-round(total, 12), abs(2 * k - m), k)
        if best is None or key < best[0]:
            best = (key, chosen)
    if best is None:
        raise ValidationError("no admissible active space for the given constraints")
    active = sorted(e.index for e in best[1])
    return ActiveSpaceSpec.from_active(n_orb, active, n_electrons)


def rank_candidate_sets(
    candidates: Sequence[tuple[ActiveSpaceSpec | str, Mapping[str, float]]],
    reference: Mapping[str, float],
) -> list[tuple[ActiveSpaceSpec | str, float]]:
    """Order candidate active sets by max-norm deviation from the reference.

    Each candidate carries relative energies (kcal/mol) per tautomer label,
    anchored to a common tautomer. Ties go to the smaller active set.
    """
    labels = set(reference)
    scored = []
    for pos, (spec, energies) in enumerate(candidates):
        if set(energies) != labels:
            raise ValidationError(
                f"candidate {getattr(spec, 'label', spec)} covers {sorted(energies)}, reference covers {sorted(labels)}"
            )
        dev = max(abs(energies[t] - reference[t]) for t in labels) if labels else 0.0
        size = len(spec.active) if isinstance(spec, ActiveSpaceSpec) else len(parse_orbital_range(str(spec)))
        scored.append((dev, size, pos, spec))
    scored.sort(key=lambda t: (t[0], t[1], t[2]))
    return [(spec, dev) for dev, _, _, spec in scored]


# synthetic integrals ---------------------------------------------------------------

def random_table(
    n_orbitals: int,
    n_electrons: int,
    seed: int | np.random.Generator | None = None,
    *,
    coupling: float = 0.1,
    rank: int | None = None,
    core_energy: float = 0.0,
) -> IntegralTable:
    """Molecule-like random integrals with real-orbital symmetries.

    Orbital energies increase with index, so the aufbau determinant is a
    sensible reference. The two-electron tensor is a sum of squares
    ``(ij|kl) = sum_L B^L_ij B^L_kl`` and is therefore positive semidefinite.
    """
    rng = np.random.default_rng(seed)
    n = n_orbitals
    eps = np.sort(rng.uniform(-1.0, 1.0, n)) + np.linspace(-0.5, 0.5, n)
    off = rng.normal(scale=coupling, size=(n, n))
    h1 = np.diag(eps) + (off + off.T) / 2
    rank = rank or max(2, n)
    B = rng.normal(scale=0.3, size=(rank, n, n))
    B = (B + B.transpose(0, 2, 1)) / 2
    eri = np.einsum("Lij,Lkl->ijkl", B, B)
    return spin_expand(h1, eri, core_energy, n_electrons)
