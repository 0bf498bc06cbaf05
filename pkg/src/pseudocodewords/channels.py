"""Binary-input memoryless channels: LLRs, sampling, symmetry witnesses.

AWGNC normalisation: N0 = 1, so sigma^2 = 1/2, E_b = Eb/N0 and E_c = R * E_b.
BEC outputs use ``ERASED`` (-1 in integer arrays) for the erasure symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import erfc

from .code_model import as_matrix, code_rate
from .pseudoweights import wp_bec, wp_bsc

ERASED = -1


@dataclass(frozen=True)
class AWGNC:
    ebn0: float  # linear
    rate: float
    n0: float = 1.0

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError("code rate must be in (0, 1]")
        if self.ebn0 <= 0:
            raise ValueError("Eb/N0 must be positive")

    @classmethod
    def from_db(cls, ebn0_db: float, rate: float) -> "AWGNC":
        return cls(10 ** (ebn0_db / 10), rate)

    @property
    def eb(self) -> float:
        return self.ebn0 * self.n0

    @property
    def ec(self) -> float:
        return self.rate * self.eb

    @property
    def sigma2(self) -> float:
        return self.n0 / 2

    def density(self, y, x: int):
        mean = math.sqrt(self.ec) * (1 - 2 * x)
        y = np.asarray(y, dtype=float)
        return np.exp(-((y - mean) ** 2) / (2 * self.sigma2)) / math.sqrt(2 * math.pi * self.sigma2)


@dataclass(frozen=True)
class BSC:
    eps: float

    def __post_init__(self):
        if not 0 <= self.eps <= 0.5:
            raise ValueError("crossover probability must be in [0, 1/2]")

    def prob(self, y: int, x: int) -> float:
        return 1 - self.eps if y == x else self.eps


@dataclass(frozen=True)
class BEC:
    eps: float

    def __post_init__(self):
        if not 0 <= self.eps <= 1:
            raise ValueError("erasure probability must be in [0, 1]")

    def prob(self, y: int, x: int) -> float:
        if y == ERASED:
            return self.eps
        return 1 - self.eps if y == x else 0.0


ChannelModel = AWGNC | BSC | BEC


def parse_channel(spec: str, H=None) -> ChannelModel:
    """Parse "awgnc:ebn0_db=4.2", "bsc:eps=0.05" or "bec:eps=0.3".

    The AWGNC rate defaults to the exact rate (n - rank H)/n of ``H``.
    """
    kind, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        params[key.strip()] = float(val)
    kind = kind.strip().lower()
    if kind == "awgnc":
        if "rate" in params:
            rate = params["rate"]
        elif H is not None:
            rate = code_rate(as_matrix(H))
        else:
            raise ValueError("AWGNC needs a code or an explicit rate")
        if "ebn0_db" in params:
            return AWGNC.from_db(params["ebn0_db"], rate)
        return AWGNC(params["ebn0"], rate)
    if kind == "bsc":
        return BSC(params["eps"])
    if kind == "bec":
        return BEC(params["eps"])
    raise ValueError(f"unknown channel {kind!r}")


@dataclass
class Flags:
    infinite: bool = False
    uninformative: bool = False


def llr(ch: ChannelModel, y, flags: Flags | None = None) -> np.ndarray:
    """Channel log-likelihood ratios log P(y|0)/P(y|1) as a float array.

    Infinite values are IEEE +-inf (exact extended reals, not sentinels).
    """
    if isinstance(ch, AWGNC):
        y = np.asarray(y, dtype=float)
        return 4 * math.sqrt(ch.rate * ch.eb) / ch.n0 * y
    y = np.asarray(y)
    if isinstance(ch, BSC):
        if not np.isin(y, (0, 1)).all():
            raise ValueError("BSC outputs must be 0 or 1")
        if ch.eps == 0:
            mag = math.inf
            if flags is not None:
                flags.infinite = True
        elif ch.eps == 0.5:
            mag = 0.0
            if flags is not None:
                flags.uninformative = True
        else:
            mag = math.log((1 - ch.eps) / ch.eps)
        return np.where(y == 0, mag, -mag).astype(float)
    if isinstance(ch, BEC):
        if not np.isin(y, (0, 1, ERASED)).all():
            raise ValueError("BEC outputs must be 0, 1 or ERASED")
        out = np.zeros(y.shape, dtype=float)
        out[y == 0] = math.inf
        out[y == 1] = -math.inf
        if flags is not None:
            flags.infinite = True
        return out
    raise TypeError(f"unknown channel {ch!r}")


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed) & (2**64 - 1)))


@dataclass
class Sampler:
    ch: ChannelModel
    seed: int
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.rng = make_rng(self.seed)

    def __call__(self, x) -> np.ndarray:
        return _sample(self.ch, x, self.rng)


def _sample(ch: ChannelModel, x, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    if isinstance(ch, AWGNC):
        xbar = math.sqrt(ch.ec) * (1 - 2 * x)
        return xbar + rng.normal(0.0, math.sqrt(ch.sigma2), size=x.shape)
    if isinstance(ch, BSC):
        flips = rng.random(x.shape) < ch.eps
        return (x ^ flips).astype(np.int64)
    if isinstance(ch, BEC):
        erase = rng.random(x.shape) < ch.eps
        return np.where(erase, ERASED, x).astype(np.int64)
    raise TypeError(f"unknown channel {ch!r}")


def sample(ch: ChannelModel, x, seed: int) -> np.ndarray:
    return _sample(ch, x, make_rng(seed))


def symmetry_map(ch: ChannelModel):
    if isinstance(ch, AWGNC):
        return lambda y: -np.asarray(y, dtype=float)
    if isinstance(ch, BSC):
        return lambda y: 1 - np.asarray(y)
    if isinstance(ch, BEC):
        return lambda y: np.where(np.asarray(y) == ERASED, ERASED, 1 - np.asarray(y))
    raise TypeError(f"unknown channel {ch!r}")


@dataclass(frozen=True)
class SymmetryWitness:
    sigma: object
    checked_points: int
    symmetric: bool
    max_error: float


def check_output_symmetric(ch, grid_points: int = 10_000, tol: float = 1e-12) -> SymmetryWitness:
    """Verify P(y|0) = P(sigma(y)|1) with the standard involution for ``ch``."""
    sigma = symmetry_map(ch)
    if isinstance(ch, AWGNC):
        span = math.sqrt(ch.ec) + 8 * math.sqrt(ch.sigma2)
        y = np.linspace(-span, span, grid_points)
        err = float(np.max(np.abs(ch.density(y, 0) - ch.density(sigma(y), 1))))
        return SymmetryWitness(sigma, grid_points, err <= tol, err)
    alphabet = [0, 1] if isinstance(ch, BSC) else [0, 1, ERASED]
    err = 0.0
    for y in alphabet:
        sy = int(sigma(np.array([y]))[0])
        err = max(err, abs(ch.prob(y, 0) - ch.prob(sy, 1)))
    return SymmetryWitness(sigma, len(alphabet), err <= tol, err)


def qfunc(x):
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2))


def pairwise_error_awgnc(weight: float, rate: float, ebn0: float) -> float:
    """Q(sqrt(2 R Eb/N0 w)); ``weight`` is a Hamming or AWGNC pseudo-weight."""
    if weight < 0:
        raise ValueError("weight must be nonnegative")
    if math.isinf(weight):
        return 0.0
    return float(qfunc(math.sqrt(2 * rate * ebn0 * float(weight))))


def bsc_flip_threshold(w: Sequence) -> int:
    return math.ceil(wp_bsc(w) / 2)


def bec_erasure_threshold(w: Sequence) -> int:
    return math.ceil(wp_bec(w))
