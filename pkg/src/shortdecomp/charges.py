"""Nonnegative finitely additive set functions (charges) on finite rings of
sets, and their short-type decomposition with respect to another charge.

Subsets of the universe ``{0, ..., N-1}`` are bitmasks. A finite ring is
determined by its atoms (minimal nonempty members); step functions are
complex vectors indexed by atoms, and a charge nu induces the diagonal form
``t_nu(phi, psi) = sum_a phi_a conj(psi_a) nu(a)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, InternalInconsistency, NotACharge, NotARing, RingMismatch
from .forms import PsdForm, as_form, quadratic, short_form
from .linalg import DEFAULT_TOL, Tolerance, null_basis

log = logging.getLogger(__name__)

MAX_UNIVERSE = 24
ADDITIVITY_RTOL = 1e-12
INDUCED_ADDITIVITY_RTOL = 1e-9
FORM_AGREEMENT_ATOL = 1e-10
ZERO_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class SetRing:
    """A ring of subsets of ``{0, ..., universe_size - 1}``, stored extensionally."""

    universe_size: int
    members: tuple

    def __post_init__(self):
        n = self.universe_size
        if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_UNIVERSE:
            raise NotARing(f"universe size must be an integer in 1..{MAX_UNIVERSE}, got {n!r}")
        try:
            masks = sorted({int(m) for m in self.members})
        except (TypeError, ValueError) as exc:
            raise NotARing(f"members must be integer bitmasks: {exc}") from None
        if any(m < 0 or m >= 1 << n for m in masks):
            raise NotARing(f"member bitmask outside the universe of size {n}")
        if not masks or masks[0] != 0:
            raise NotARing("ring does not contain the empty set")
        arr = np.array(masks, dtype=np.int64)
        for a in arr:
            for label, derived in (("union", a | arr), ("difference", a & ~arr)):
                pos = np.searchsorted(arr, derived)
                pos = np.minimum(pos, arr.size - 1)
                missing = arr[pos] != derived
                if missing.any():
                    b = int(arr[np.flatnonzero(missing)[0]])
                    raise NotARing(f"ring not closed under {label}: {int(a):#x} and {b:#x}")
        object.__setattr__(self, "universe_size", int(n))
        object.__setattr__(self, "members", tuple(masks))

    @classmethod
    def power_set(cls, n: int) -> "SetRing":
        return cls(n, tuple(range(1 << n)))

    @classmethod
    def generated_by_atoms(cls, n: int, atoms) -> "SetRing":
        """All unions of the given pairwise disjoint nonempty sets."""
        atoms = [int(a) for a in atoms]
        members = {0}
        for a in atoms:
            members |= {m | a for m in members}
        return cls(n, tuple(members))

    def __contains__(self, mask) -> bool:
        i = np.searchsorted(self.members, int(mask))
        return i < len(self.members) and self.members[i] == int(mask)

    def index(self, mask: int) -> int:
        i = int(np.searchsorted(self.members, int(mask)))
        if i >= len(self.members) or self.members[i] != int(mask):
            raise KeyError(f"{mask:#x} is not a member")
        return i

    def __eq__(self, other):
        return (isinstance(other, SetRing) and self.universe_size == other.universe_size
                and self.members == other.members)

    def __hash__(self):
        return hash((self.universe_size, self.members))

    def __repr__(self):
        return f"SetRing(universe_size={self.universe_size}, members={len(self.members)})"


@dataclass(frozen=True, eq=False)
class StepFunctionSpace:
    """Step functions of a ring, coordinatized by its atoms."""

    ring: SetRing
    atoms: tuple

    @property
    def dim(self) -> int:
        return len(self.atoms)

    def indicator(self, mask: int) -> np.ndarray:
        """Atom coordinates of the characteristic function of a member."""
        if mask not in self.ring:
            raise KeyError(f"{mask:#x} is not a member")
        return np.array([1.0 if a & mask else 0.0 for a in self.atoms], dtype=complex)

    def incidence(self) -> np.ndarray:
        """members x atoms 0/1 matrix."""
        m = np.array(self.ring.members, dtype=np.int64)[:, None]
        return ((m & np.array(self.atoms, dtype=np.int64)[None, :]) != 0).astype(float)


def atoms(ring: SetRing) -> StepFunctionSpace:
    """Minimal nonempty members, ordered by bitmask value.

    Two points lie in the same atom iff every member contains both or neither,
    so atoms are the classes of that relation on the union of all members.
    """
    union = 0
    for m in ring.members:
        union |= m
    classes: dict[tuple, int] = {}
    for p in range(ring.universe_size):
        if union >> p & 1:
            sig = tuple(m >> p & 1 for m in ring.members)
            classes[sig] = classes.get(sig, 0) | 1 << p
    found = tuple(sorted(classes.values()))
    for a in found:
        if a not in ring:
            raise NotARing(f"point class {a:#x} is not a member")
    space = StepFunctionSpace(ring, found)
    for m in ring.members:
        parts = [a for a in found if a & m]
        if any(a & ~m for a in parts) or sum(parts) != m:
            raise NotARing(f"member {m:#x} is not a disjoint union of atoms")
    return space


@dataclass(frozen=True, eq=False)
class Charge:
    """Nonnegative additive set function, one value per ring member."""

    ring: SetRing
    values: tuple

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size != len(self.ring.members):
            raise NotACharge(f"{v.size} values for {len(self.ring.members)} members")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise NotACharge("charge values must be finite and nonnegative")
        total = float(v.sum())
        if v[0] > ADDITIVITY_RTOL * (1.0 + total):
            raise NotACharge(f"value of the empty set is {v[0]:.3e}, expected 0")
        gap = _additivity_gap(self.ring, v)
        if gap > ADDITIVITY_RTOL * (1.0 + total):
            raise NotACharge(f"charge is not additive (worst defect {gap:.3e})")
        object.__setattr__(self, "values", tuple(float(x) for x in v))

    @classmethod
    def from_atoms(cls, ring: SetRing, atom_values) -> "Charge":
        space = atoms(ring)
        av = np.array(atom_values, dtype=float).reshape(-1)
        if av.size != space.dim:
            raise DimensionMismatch(f"{av.size} atom values for {space.dim} atoms")
        return cls(ring, tuple(space.incidence() @ av))

    def value(self, mask: int) -> float:
        return self.values[self.ring.index(mask)]

    def atom_values(self) -> np.ndarray:
        return np.array([self.value(a) for a in atoms(self.ring).atoms])


def _additivity_gap(ring: SetRing, v: np.ndarray) -> float:
    arr = np.array(ring.members, dtype=np.int64)
    worst = 0.0
    for i, a in enumerate(arr):
        disjoint = (arr & a) == 0
        idx = np.searchsorted(arr, arr[disjoint] | a)
        worst = max(worst, float(np.max(np.abs(v[idx] - v[i] - v[disjoint]))))
    return worst


def induced_form(nu: Charge) -> PsdForm:
    """``t_nu`` on atom coordinates: ``diag(nu(atom))``."""
    return PsdForm(np.diag(nu.atom_values()).astype(complex))


def is_induced_additive(t, ring: SetRing, trials: int = 100, rng=None,
                        tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether ``R -> t[chi_R]`` is additive, tested two ways: directly over
    disjoint member pairs, and through ``t[zeta] = t[|zeta|]`` at ``trials``
    random complex step functions. Returns the conjunction.

    For a real Gram matrix both tests detect exactly the nonzero off-diagonal
    entries and a disagreement raises InternalInconsistency. A complex Gram
    with purely imaginary off-diagonal entries is additive on indicators yet
    fails the modulus test; this is reported as ``False`` without raising.
    """
    space = atoms(ring)
    t = as_form(t, tol)
    if t.dim != space.dim:
        raise DimensionMismatch(f"form of dim {t.dim} for {space.dim} atoms")
    rng = np.random.default_rng(rng)
    scale = 1.0 + float(np.sum(np.abs(t.gram)))
    theta = np.array([quadratic(t, row) for row in space.incidence()])
    additive = _additivity_gap(ring, theta) <= INDUCED_ADDITIVITY_RTOL * scale
    by_modulus = True
    for _ in range(trials):
        z = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
        tz = quadratic(t, z)
        if abs(tz - quadratic(t, np.abs(z))) > INDUCED_ADDITIVITY_RTOL * (1.0 + tz):
            by_modulus = False
            break
    if trials > 0 and additive != by_modulus:
        real_gram = np.max(np.abs(t.gram.imag), initial=0.0) <= tol.rank_rtol * scale
        if real_gram:
            raise InternalInconsistency(
                f"additivity on indicators ({additive}) and the modulus test "
                f"({by_modulus}) disagree for a real form")
        log.debug("complex form additive on indicators but not modulus-invariant")
    return bool(additive and by_modulus)


class ChargeDecomposition(NamedTuple):
    ll: Charge
    perp: Charge
    form_gap: float


def _same_ring(nu: Charge, mu: Charge):
    if nu.ring != mu.ring:
        raise RingMismatch("charges live on different rings")


def _zero_threshold(values: np.ndarray, tol: Tolerance) -> float:
    return max(tol.rank_rtol * float(np.max(values, initial=0.0)), ZERO_FLOOR)


def charge_decompose(nu: Charge, mu: Charge, tol: Tolerance = DEFAULT_TOL) -> ChargeDecomposition:
    """``nu = nu_ll + nu_perp`` with ``nu_ll << mu`` maximal and ``nu_perp``
    singular to mu.

    Atom-wise, ``nu_ll`` keeps nu on atoms where mu exceeds
    ``max(rank_rtol * max mu(atom), 1e-14)``. The same values are recomputed
    through the short of ``t_nu`` to ``ker t_mu`` (kernel taken with that
    same cut); ``form_gap`` is the largest difference over members and must
    stay within 1e-10 (scaled by the size of nu when that exceeds 1).
    """
    _same_ring(nu, mu)
    ring = nu.ring
    space = atoms(ring)
    nu_a, mu_a = nu.atom_values(), mu.atom_values()
    thr = _zero_threshold(mu_a, tol)
    ll_a = np.where(mu_a > thr, nu_a, 0.0)
    inc = space.incidence()
    ll = Charge(ring, tuple(inc @ ll_a))
    perp = Charge(ring, tuple(inc @ (nu_a - ll_a)))

    if space.dim == 0:
        return ChargeDecomposition(ll, perp, 0.0)
    kernel = null_basis(induced_form(mu).gram, tol, scale=thr / tol.rank_rtol)
    short = short_form(induced_form(nu), kernel, tol)
    by_form = np.array([quadratic(short, row) for row in inc])
    gap = float(np.max(np.abs(by_form - np.array(ll.values)), initial=0.0))
    if gap > FORM_AGREEMENT_ATOL * max(1.0, float(nu_a.sum())):
        raise InternalInconsistency(f"atom-wise and form-level decompositions differ by {gap:.3e}")
    return ChargeDecomposition(ll, perp, gap)


def is_charge_absolutely_continuous(theta: Charge, mu: Charge, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``mu(R) = 0 => theta(R) = 0`` over all members, with the same zero
    threshold as :func:`charge_decompose`."""
    _same_ring(theta, mu)
    m, th = np.array(mu.values), np.array(theta.values)
    return bool(np.all(th[m <= _zero_threshold(m, tol)] <= _zero_threshold(th, tol)))


def are_charges_singular(a: Charge, b: Charge, tol: Tolerance = DEFAULT_TOL) -> bool:
    """No atom carries mass under both charges (same zero threshold as
    :func:`charge_decompose`); for diagonal induced forms this is exactly
    ``t_a : t_b = 0``."""
    _same_ring(a, b)
    av, bv = a.atom_values(), b.atom_values()
    return not bool(np.any((av > _zero_threshold(av, tol)) & (bv > _zero_threshold(bv, tol))))


def random_ring(rng, max_universe: int = 8) -> SetRing:
    """Random ring: a random partition of a random subset of the universe
    into atoms, closed under unions."""
    n = int(rng.integers(1, max_universe + 1))
    labels = rng.integers(-1, n, size=n)  # -1: point outside every member
    blocks: dict[int, int] = {}
    for p, lab in enumerate(labels):
        if lab >= 0:
            blocks[int(lab)] = blocks.get(int(lab), 0) | 1 << p
    return SetRing.generated_by_atoms(n, blocks.values())


def random_charge(rng, ring: SetRing, zero_prob: float = 0.3) -> Charge:
    k = atoms(ring).dim
    vals = rng.uniform(0.0, 10.0, size=k) * (rng.uniform(size=k) >= zero_prob)
    return Charge.from_atoms(ring, vals)
