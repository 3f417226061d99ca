"""Random benchmark instances in the Tabakov-Vardi style.

All randomness comes from :class:`SplitMix64`, written out here so that a
given (parameters, seed) pair produces the same instance on any platform:

    state = (state + 0x9E3779B97F4A7C15) mod 2**64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    output z ^ (z >> 31)

Bounded integers use rejection sampling (no modulo bias).  Draw order for a
skeleton: extra initial states, accepting states, then transitions symbol by
symbol.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .core import EventDecl, SppInstance, Transition
from .paths import is_solvable

MASK64 = (1 << 64) - 1


class GenerationError(ValueError):
    pass


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def random(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53

    def sample(self, population: int, k: int) -> list[int]:
        """k distinct values from range(population), by partial Fisher-Yates
        over a sparse swap table."""
        if k > population:
            raise ValueError("sample larger than population")
        swapped: dict[int, int] = {}
        out = []
        for i in range(k):
            j = i + self.below(population - i)
            vi = swapped.get(i, i)
            vj = swapped.get(j, j)
            swapped[j] = vi
            out.append(vj)
        return out


def _fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class TvParams:
    states: int
    alphabet: int
    density: Fraction | float | str
    init_density: Fraction | float | str = Fraction(1, 1000)
    accept_density: Fraction | float | str = Fraction(1, 100)
    seed: int = 0
    density_mode: str = "per_symbol"  # or "total"

    def __post_init__(self):
        for name in ("density", "init_density", "accept_density"):
            object.__setattr__(self, name, _fraction(getattr(self, name)))
        if self.states < 1 or self.alphabet < 1:
            raise GenerationError("need at least one state and one symbol")
        if self.density < 0:
            raise GenerationError("density must be nonnegative")
        for name in ("init_density", "accept_density"):
            if not 0 <= getattr(self, name) <= 1:
                raise GenerationError(f"{name} must lie in [0, 1]")
        if self.density_mode not in ("per_symbol", "total"):
            raise GenerationError(f"unknown density mode {self.density_mode!r}")
        space = self.states * self.states
        if self.density_mode == "total":
            space *= self.alphabet
        if self.transition_count > space:
            raise GenerationError(
                f"density {self.density} needs {self.transition_count} distinct transitions, only {space} exist")

    @property
    def transition_count(self) -> int:
        """Per symbol in per_symbol mode, overall in total mode."""
        return math.ceil(self.density * self.states)

    @property
    def initial_count(self) -> int:
        return max(1, math.ceil(self.init_density * self.states))

    @property
    def accept_count(self) -> int:
        return min(math.ceil(self.accept_density * self.states), self.states - self.initial_count)

    def replace(self, **changes) -> "TvParams":
        fields = dict(states=self.states, alphabet=self.alphabet, density=self.density,
                      init_density=self.init_density, accept_density=self.accept_density,
                      seed=self.seed, density_mode=self.density_mode)
        fields.update(changes)
        return TvParams(**fields)


@dataclass(frozen=True)
class Skeleton:
    """An NFA with accepting states and no SPP attributes."""

    states: tuple[str, ...]
    events: tuple[str, ...]
    transitions: tuple[Transition, ...]
    initial: tuple[str, ...]
    accepting: tuple[str, ...]


def _names(prefix: str, n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"{prefix}{i:0{width}d}" for i in range(n)]


def _symbol_names(k: int) -> list[str]:
    if k <= 26:
        return [chr(ord("a") + i) for i in range(k)]
    return _names("e", k)


def generate_tabakov_vardi(p: TvParams) -> Skeleton:
    rng = SplitMix64(p.seed)
    q, k = p.states, p.alphabet
    states = _names("s", q)
    symbols = _symbol_names(k)
    # state 0 is always initial; the rest are drawn from 1..q-1
    initial = [0] + [1 + i for i in rng.sample(q - 1, p.initial_count - 1)]
    taken = set(initial)
    others = [i for i in range(q) if i not in taken]
    accepting = [others[i] for i in rng.sample(len(others), p.accept_count)]
    trans = []
    if p.density_mode == "per_symbol":
        for a in symbols:
            for idx in rng.sample(q * q, p.transition_count):
                trans.append(Transition(states[idx // q], a, states[idx % q]))
    else:
        for idx in rng.sample(q * k * q, p.transition_count):
            src, rest = divmod(idx, k * q)
            a, dst = divmod(rest, q)
            trans.append(Transition(states[src], symbols[a], states[dst]))
    return Skeleton(tuple(states), tuple(symbols), tuple(sorted(trans)),
                    tuple(sorted(states[i] for i in initial)),
                    tuple(sorted(states[i] for i in accepting)))


def skeleton_from_instance(inst: SppInstance) -> Skeleton:
    """Read an instance file as a plain automaton; secret states are accepting."""
    return Skeleton(inst.states, tuple(e.name for e in inst.events), inst.transitions,
                    inst.initial, inst.secrets)


def _secret_levels(skeleton: Skeleton, draw) -> dict[str, int]:
    initial = set(skeleton.initial)
    demoted = [q for q in skeleton.accepting if q in initial]
    if demoted:
        warnings.warn(f"accepting initial states demoted to non-secret: {', '.join(demoted)}",
                      stacklevel=3)
    return {q: draw() for q in skeleton.accepting if q not in initial}


def decorate_random_spp(skeleton: Skeleton, seed: int, lo: int = 1, hi: int = 10,
                        clearance_range=None, cost_range=None, level_range=None) -> SppInstance:
    """Make every event protectable with random clearance and cost, and every
    accepting state secret with a random level; each range defaults to [lo, hi]."""
    rng = SplitMix64(seed)
    g_lo, g_hi = clearance_range or (lo, hi)
    c_lo, c_hi = cost_range or (lo, hi)
    l_lo, l_hi = level_range or (lo, hi)
    if min(g_lo, c_lo) < 0 or l_lo < 1 or g_lo > g_hi or c_lo > c_hi or l_lo > l_hi:
        raise GenerationError("invalid attribute range")
    events = []
    for e in sorted(skeleton.events):
        g = rng.integer(g_lo, g_hi)
        c = rng.integer(c_lo, c_hi)
        events.append(EventDecl.protected(e, g, c))
    levels = _secret_levels(skeleton, lambda: rng.integer(l_lo, l_hi))
    return SppInstance(skeleton.states, tuple(events), skeleton.transitions, skeleton.initial, levels)


def from_accepting_automaton(skeleton: Skeleton) -> SppInstance:
    """Unit clearance and cost everywhere, level 1 on accepting states."""
    events = tuple(EventDecl.protected(e, 1, 1) for e in skeleton.events)
    levels = _secret_levels(skeleton, lambda: 1)
    return SppInstance(skeleton.states, events, skeleton.transitions, skeleton.initial, levels)


def sample_solvable(params: TvParams, lo: int = 1, hi: int = 10, max_retries: int = 100,
                    chi: bool = False, **ranges) -> tuple[SppInstance, int]:
    """Generate and decorate until the full policy is valid.

    Returns the instance and the number of retries it took (0 on first try).
    """
    if max_retries < 1:
        raise GenerationError("max_retries must be >= 1")
    seeds = SplitMix64(params.seed)
    for attempt in range(max_retries):
        skeleton = generate_tabakov_vardi(params.replace(seed=seeds.next_u64()))
        inst = decorate_random_spp(skeleton, seeds.next_u64(), lo, hi, **ranges)
        if is_solvable(inst, chi=chi):
            return inst, attempt
    raise GenerationError(f"no solvable instance after {max_retries} attempts")
