"""Letter distributions for i.i.d. words and their power sums.

A :class:`Theta` is an ordered probability vector ``p_1 >= p_2 >= ...``.
When every entry is a :class:`fractions.Fraction` the theta is in *exact*
mode and every downstream quantity stays rational; otherwise it is in
*float* mode.  Countable (geometric) alphabets are truncated and the
dropped mass is kept in ``tail_mass``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Sequence

EXACT = "exact"
FLOAT = "float"

FLOAT_TOL = 1e-12


class ThetaError(ValueError):
    """Raised for an invalid letter distribution."""


def to_number(x, exact: bool = True):
    """Parse ``x`` into a Fraction (exact) or float.

    Decimal strings such as ``"0.7"`` become ``Fraction(7, 10)``.
    """
    if isinstance(x, Fraction):
        return x if exact else float(x)
    if isinstance(x, str):
        x = x.strip()
        if exact:
            try:
                return Fraction(x)
            except ValueError as e:
                raise ThetaError(f"cannot parse probability {x!r}") from e
        return float(x)
    if isinstance(x, int):
        return Fraction(x) if exact else float(x)
    if isinstance(x, Real):
        return Fraction(x) if exact else float(x)
    raise ThetaError(f"unsupported probability type {type(x).__name__}")


@dataclass(frozen=True)
class Theta:
    probs: tuple
    source: str = "explicit"
    tail_mass: object = 0
    ratio: object = None  # geometric ratio, when source == "geometric"
    _moments: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def mode(self) -> str:
        return EXACT if all(isinstance(p, Fraction) for p in self.probs) else FLOAT

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    @property
    def size(self) -> int:
        return len(self.probs)

    @property
    def rho(self):
        return self.probs[0]

    @property
    def p1(self):
        return self.probs[0]

    @property
    def p2(self):
        return self.probs[1]

    @property
    def is_uniform(self) -> bool:
        return self.tail_mass == 0 and all(p == self.probs[0] for p in self.probs)

    def zero(self):
        return Fraction(0) if self.exact else 0.0

    def one(self):
        return Fraction(1) if self.exact else 1.0

    def moment(self, q: int):
        """Power sum ``m_q`` of the stored probabilities (``m_1 = 1 - tail_mass``)."""
        if q < 1 or int(q) != q:
            raise ValueError(f"moment order must be a positive integer, got {q}")
        q = int(q)
        cached = self._moments.get(q)
        if cached is None:
            cached = sum((p**q for p in self.probs), self.zero())
            self._moments[q] = cached
        return cached

    def full_moment(self, q: int):
        """``m_q`` of the untruncated law; closed form for geometric alphabets."""
        if self.source != "geometric" or self.tail_mass == 0:
            return self.moment(q)
        r = self.ratio
        return (1 - r) ** q / (1 - r**q)

    def finite(self) -> "Theta":
        """The truncated alphabet renormalized to a probability vector."""
        if self.tail_mass == 0:
            return self
        total = sum(self.probs, self.zero())
        return Theta(tuple(p / total for p in self.probs), source="explicit")

    def to_json(self) -> dict:
        def enc(v):
            return str(v) if isinstance(v, Fraction) else float(v)

        return {
            "probs": [enc(p) for p in self.probs],
            "tail_mass": enc(self.tail_mass),
            "mode": self.mode,
            "source": self.source,
        }

    def __str__(self) -> str:
        if self.source == "uniform":
            return f"uniform({self.size})"
        if self.source == "geometric":
            return f"geometric({self.ratio}, A={self.size})"
        return "(" + ",".join(str(p) for p in self.probs) + ")"


def _validate(probs: Sequence, tail_mass, exact: bool) -> None:
    if len(probs) < 2:
        raise ThetaError("need at least 2 symbols with positive probability")
    for p in probs:
        if not (0 < p < 1):
            raise ThetaError(f"probability {p} outside the open interval (0, 1)")
    total = sum(probs) + tail_mass
    if exact:
        if total != 1:
            raise ThetaError(f"probabilities sum to {total}, not 1")
    elif abs(total - 1) > FLOAT_TOL:
        raise ThetaError(f"probabilities sum to {total!r}, not 1")


def from_probs(probs: Sequence, exact: bool | None = None) -> Theta:
    """Theta from an explicit list; sorted non-increasing.

    ``exact=None`` keeps exactness when every entry is rational-parsable
    (Fractions, ints, decimal strings) and falls back to float otherwise.
    """
    if exact is None:
        exact = all(isinstance(p, (Fraction, int, str)) for p in probs)
    vals = [to_number(p, exact) for p in probs]
    vals.sort(reverse=True)
    _validate(vals, 0, exact)
    return Theta(tuple(vals), source="explicit", tail_mass=Fraction(0) if exact else 0.0)


def uniform(s: int, exact: bool = True) -> Theta:
    if s < 2:
        raise ThetaError("uniform alphabet needs s >= 2")
    p = Fraction(1, s) if exact else 1.0 / s
    return Theta((p,) * s, source="uniform", tail_mass=Fraction(0) if exact else 0.0)


def geometric(r, eps=Fraction(1, 10**12), exact: bool | None = None) -> Theta:
    """Truncated geometric law ``p_a = (1 - r) r**a``, ``a = 0, 1, ...``.

    Keeps the smallest number of letters ``A`` with ``r**A <= eps``; the
    dropped mass ``r**A`` is recorded as ``tail_mass``.
    """
    if exact is None:
        exact = isinstance(r, (Fraction, int, str))
    r = to_number(r, exact)
    eps = to_number(eps, exact)
    if not (0 < r < 1):
        raise ThetaError("geometric ratio must lie in (0, 1)")
    if not (0 < eps < 1):
        raise ThetaError("truncation tolerance must lie in (0, 1)")
    probs = []
    tail = r ** 0  # 1 in the right type
    while tail > eps or len(probs) < 2:
        probs.append((1 - r) * tail)
        tail = tail * r
    if not (0 < probs[0] < 1):
        raise ThetaError("geometric law puts all mass on one letter")
    # (1 - r) r^a is already non-increasing
    _validate(probs, tail, exact)
    return Theta(tuple(probs), source="geometric", tail_mass=tail, ratio=r)


def make_theta(spec) -> Theta:
    """Build a Theta from a spec.

    Accepted forms: a Theta (returned as is), a sequence of probabilities,
    ``("uniform", s)`` and ``("geometric", r, eps)``.
    """
    if isinstance(spec, Theta):
        return spec
    if isinstance(spec, tuple) and spec and spec[0] == "uniform":
        return uniform(int(spec[1]))
    if isinstance(spec, tuple) and spec and spec[0] == "geometric":
        return geometric(*spec[1:])
    if isinstance(spec, str):
        return from_probs(spec.split(","))
    return from_probs(list(spec))


def moment(theta: Theta, q: int):
    return theta.moment(q)


def check_moment_inequalities(theta: Theta) -> dict:
    """Standing inequalities between rho and the power sums.

    Square roots are squared away so exact thetas compare exactly.
    """
    m2, m3, m4 = theta.moment(2), theta.moment(3), theta.moment(4)
    rho = theta.rho
    return {
        "rho^2 < m2": rho**2 < m2,
        "m4^2 <= m3^2 m2": m4**2 <= m3**2 * m2,
        "m3^2 < m2^3": m3**2 < m2**3,
    }
