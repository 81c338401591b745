"""Sampling and transforming finite prefixes of outcome sequences.

A "world" here is a finite prefix of the infinite sequence of outcomes an
experiment would produce under i.i.d. repetition.  Since algorithmically
random sequences cannot be generated, a seeded counter-based generator
stands in for a typical sequence: almost every sequence under the product
measure passes every effective test, and a high-quality deterministic
stream is the computable surrogate.  Every sampled prefix records its
seed, generator id and length in a provenance field.

Sampling draws i.i.d. symbols by inverse CDF over the space's explicit
alphabet ordering.  Cumulative boundaries are half-open: a uniform draw
exactly equal to a boundary resolves to the *later* symbol.  One
consequence is exact, not statistical: a symbol of weight zero can never
be produced.

Generation is blocked.  Block ``i`` of a run with seed ``s`` uses a
Philox stream with key ``s`` and counter offset ``i << 128``, so blocks
can be generated concurrently in any order and the concatenation is
byte-identical to the single-threaded result.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .spaces import FiniteProbabilitySpace, _decode_symbol, _encode_symbol

__all__ = [
    "GENERATOR_ID",
    "BLOCK_LEN",
    "WorldPrefix",
    "sample_world",
    "condition_seq",
    "project_seq",
    "zip_seqs",
    "empirical",
    "EmpiricalStats",
    "lln_report",
    "LlnReport",
    "LlnRow",
]

#: Identifier of the sampling scheme, recorded in provenance.
GENERATOR_ID = "philox4x64/ctr128-block8192/invcdf"

#: Symbols generated per counter block.
BLOCK_LEN = 8192

_MAX_SEED = 2**64


class WorldPrefix:
    """A finite prefix of an outcome sequence over an explicit alphabet.

    Stores symbols as indices into the alphabet; the symbol view is
    materialized on demand.  Instances are immutable.
    """

    __slots__ = ("_alphabet", "_indices", "_provenance")

    def __init__(self, alphabet: Iterable, indices, provenance: dict | None = None):
        alpha = tuple(alphabet)
        if not alpha:
            raise ValueError("alphabet must be non-empty")
        if len(set(alpha)) != len(alpha):
            raise ValueError("alphabet must be duplicate-free")
        idx = np.array(indices, dtype=np.int64).reshape(-1)
        if idx.size and (idx.min() < 0 or idx.max() >= len(alpha)):
            raise ValueError("world indices out of range for the alphabet")
        idx.setflags(write=False)
        self._alphabet = alpha
        self._indices = idx
        self._provenance = dict(provenance) if provenance else {"kind": "literal"}

    @classmethod
    def from_symbols(
        cls, alphabet: Iterable, symbols: Iterable, provenance: dict | None = None
    ) -> "WorldPrefix":
        alpha = tuple(alphabet)
        lookup = {a: i for i, a in enumerate(alpha)}
        try:
            idx = [lookup[s] for s in symbols]
        except KeyError as err:
            raise ValueError(f"symbol {err.args[0]!r} is not in the alphabet") from None
        return cls(alpha, idx, provenance)

    @property
    def alphabet(self) -> tuple:
        return self._alphabet

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    @property
    def provenance(self) -> dict:
        return dict(self._provenance)

    def __len__(self) -> int:
        return int(self._indices.size)

    def __getitem__(self, i: int):
        return self._alphabet[int(self._indices[i])]

    def symbols(self) -> list:
        """The prefix as a list of symbols."""
        return [self._alphabet[i] for i in self._indices]

    def __eq__(self, other) -> bool:
        if not isinstance(other, WorldPrefix):
            return NotImplemented
        return self._alphabet == other._alphabet and np.array_equal(
            self._indices, other._indices
        )

    def __repr__(self) -> str:
        return (
            f"WorldPrefix(len={len(self)}, alphabet_size={len(self._alphabet)}, "
            f"provenance={self._provenance.get('kind')!r})"
        )

    def prefix(self, n: int) -> "WorldPrefix":
        """The first ``n`` symbols as a new prefix."""
        if not 0 <= n <= len(self):
            raise ValueError(f"prefix length {n} out of range 0..{len(self)}")
        prov = {"kind": "prefix", "length": n, "parent": self._provenance}
        return WorldPrefix(self._alphabet, self._indices[:n], prov)

    # -- export / import ------------------------------------------------

    def _tokens(self) -> list[str]:
        tokens = [_symbol_token(a) for a in self._alphabet]
        if len(set(tokens)) != len(tokens):
            raise ValueError(
                "alphabet symbols do not have distinct text tokens; use JSON export"
            )
        return tokens

    def to_text(self) -> str:
        """Compact newline-free text: one token per symbol, comma-separated."""
        tokens = self._tokens()
        return ",".join(tokens[i] for i in self._indices)

    @classmethod
    def from_text(cls, text: str, alphabet: Iterable) -> "WorldPrefix":
        """Parse :meth:`to_text` output against a known alphabet."""
        alpha = tuple(alphabet)
        lookup = {}
        for i, a in enumerate(alpha):
            token = _symbol_token(a)
            if token in lookup:
                raise ValueError(
                    "alphabet symbols do not have distinct text tokens; use JSON import"
                )
            lookup[token] = i
        text = text.strip()
        if not text:
            raise ValueError("world text is empty")
        try:
            idx = [lookup[tok] for tok in text.split(",")]
        except KeyError as err:
            raise ValueError(f"unknown symbol token {err.args[0]!r}") from None
        return cls(alpha, idx, {"kind": "imported", "format": "text"})

    def to_json(self) -> str:
        obj = {
            "alphabet": [_encode_symbol(a) for a in self._alphabet],
            "indices": [int(i) for i in self._indices],
            "provenance": self._provenance,
        }
        return json.dumps(obj)

    @classmethod
    def from_json(cls, source) -> "WorldPrefix":
        """Rebuild from :meth:`to_json` output (accepts ``symbols`` in place of ``indices``)."""
        obj = json.loads(source) if isinstance(source, str) else source
        if not isinstance(obj, dict) or "alphabet" not in obj:
            raise ValueError("world JSON must be an object with an 'alphabet' field")
        alphabet = [_decode_symbol(a) for a in obj["alphabet"]]
        provenance = obj.get("provenance") or {"kind": "imported", "format": "json"}
        try:
            if "indices" in obj:
                return cls(alphabet, obj["indices"], provenance)
            if "symbols" in obj:
                symbols = [_decode_symbol(s) for s in obj["symbols"]]
                return cls.from_symbols(alphabet, symbols, provenance)
        except TypeError as err:
            raise ValueError(f"malformed world JSON: {err}") from None
        raise ValueError("world JSON needs an 'indices' or 'symbols' field")


def _symbol_token(symbol) -> str:
    if isinstance(symbol, tuple):
        return "|".join(_symbol_token(part) for part in symbol)
    token = str(symbol)
    if "," in token or "|" in token or "\n" in token:
        raise ValueError(f"symbol {symbol!r} has no unambiguous text token")
    return token


def _cumulative_boundaries(fps: FiniteProbabilitySpace) -> np.ndarray:
    """Inverse-CDF boundaries; trailing boundaries from the last positive
    weight onward are pinned to 1.0 so a draw can never select past it."""
    weights = np.asarray(fps.weights, dtype=float)
    cum = np.cumsum(weights)
    positive = np.flatnonzero(weights > 0)
    cum[positive[-1] :] = 1.0
    return cum


def _sample_block(seed: int, block: int, count: int, cum: np.ndarray) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=seed, counter=block << 128))
    return np.searchsorted(cum, gen.random(count), side="right")


def sample_world(
    fps: FiniteProbabilitySpace, length: int, seed: int, threads: int = 1
) -> WorldPrefix:
    """Draw ``length`` i.i.d. symbols from ``fps``, deterministically in ``seed``.

    The result is identical for every ``threads`` value; threads only
    parallelize block generation.
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    if not 0 <= seed < _MAX_SEED:
        raise ValueError("seed must be a 64-bit unsigned integer")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    cum = _cumulative_boundaries(fps)
    n_blocks = -(-length // BLOCK_LEN)
    sizes = [min(BLOCK_LEN, length - b * BLOCK_LEN) for b in range(n_blocks)]
    if threads == 1 or n_blocks == 1:
        parts = [_sample_block(seed, b, sizes[b], cum) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(lambda b: _sample_block(seed, b, sizes[b], cum), range(n_blocks))
            )
    indices = np.concatenate(parts) if len(parts) > 1 else parts[0]
    provenance = {
        "kind": "sampled",
        "seed": int(seed),
        "generator": GENERATOR_ID,
        "length": int(length),
    }
    return WorldPrefix(fps.alphabet, indices, provenance)


def condition_seq(world: WorldPrefix, event: Iterable) -> WorldPrefix:
    """Order-preserving restriction of a prefix to the symbols of an event.

    The result lives on the event alphabet (in parent order) and may be
    empty.  Its length always equals the total count of event symbols in
    the input.
    """
    keep_ids = sorted({_alphabet_index(world, s) for s in event})
    if not keep_ids:
        raise ValueError("event must contain at least one symbol")
    sub_alpha = tuple(world.alphabet[i] for i in keep_ids)
    remap = np.full(len(world.alphabet), -1, dtype=np.int64)
    for new, old in enumerate(keep_ids):
        remap[old] = new
    mask = remap[world.indices] >= 0
    new_indices = remap[world.indices[mask]]
    prov = {
        "kind": "conditioned",
        "event_size": len(keep_ids),
        "parent": world.provenance,
    }
    return WorldPrefix(sub_alpha, new_indices, prov)


def project_seq(world: WorldPrefix, coords) -> WorldPrefix:
    """Coordinate-wise projection of a prefix over a tuple alphabet.

    ``coords`` is one coordinate index or a tuple of indices; a tuple
    keeps those coordinates (in the given order) as a tuple symbol.
    Length is preserved.  The projected alphabet lists values in order of
    first occurrence in the parent alphabet.
    """
    single = isinstance(coords, int)
    coord_list = [coords] if single else list(coords)
    if not coord_list:
        raise ValueError("coords must name at least one coordinate")
    projected = []
    for symbol in world.alphabet:
        if not isinstance(symbol, tuple):
            raise ValueError("project_seq requires an alphabet of tuples")
        for c in coord_list:
            if not 0 <= c < len(symbol):
                raise ValueError(f"coordinate {c} out of range for symbol {symbol!r}")
        projected.append(symbol[coord_list[0]] if single else tuple(symbol[c] for c in coord_list))
    new_alpha: dict = {}
    for p in projected:
        new_alpha.setdefault(p, len(new_alpha))
    remap = np.array([new_alpha[p] for p in projected], dtype=np.int64)
    prov = {"kind": "projected", "coords": coords, "parent": world.provenance}
    return WorldPrefix(tuple(new_alpha), remap[world.indices], prov)


def zip_seqs(worlds: Sequence[WorldPrefix]) -> WorldPrefix:
    """Elementwise tuples of equal-length prefixes.

    The result alphabet is the Cartesian product of the factor alphabets
    in lexicographic order, matching :func:`typicality_lab.spaces.product`.
    """
    if not worlds:
        raise ValueError("zip_seqs requires at least one world")
    length = len(worlds[0])
    for w in worlds[1:]:
        if len(w) != length:
            raise ValueError("zip_seqs requires equal-length worlds")
    alphabet = tuple(itertools.product(*(w.alphabet for w in worlds)))
    indices = np.zeros(length, dtype=np.int64)
    for w in worlds:
        indices = indices * len(w.alphabet) + w.indices
    prov = {"kind": "zipped", "parents": [w.provenance for w in worlds]}
    return WorldPrefix(alphabet, indices, prov)


def _alphabet_index(world: WorldPrefix, symbol) -> int:
    try:
        return world.alphabet.index(symbol)
    except ValueError:
        raise ValueError(f"symbol {symbol!r} is not in the alphabet") from None


@dataclass(frozen=True)
class EmpiricalStats:
    """Exact per-symbol occurrence counts of a prefix."""

    counts: dict
    total: int

    def frequency(self, symbol) -> float:
        if self.total == 0:
            return 0.0
        return self.counts.get(symbol, 0) / self.total


def empirical(world: WorldPrefix) -> EmpiricalStats:
    """Count occurrences of every alphabet symbol (zeros included)."""
    raw = np.bincount(world.indices, minlength=len(world.alphabet))
    counts = {a: int(n) for a, n in zip(world.alphabet, raw)}
    return EmpiricalStats(counts=counts, total=len(world))


@dataclass(frozen=True)
class LlnRow:
    symbol: object
    count: int
    frequency: float
    expected: float
    z: float


@dataclass(frozen=True)
class LlnReport:
    """Per-symbol comparison of empirical frequencies with a claimed space.

    ``z`` scores use the binomial standard deviation.  A zero-weight
    symbol scores 0 when absent and +inf when present (its occurrence is
    impossible, not merely unlikely); the mirrored convention applies to
    weight-one symbols.  Convergence statements about finite prefixes are
    only ever as strong as ``threshold`` allows; the report records it.
    """

    rows: tuple[LlnRow, ...]
    threshold: float
    length: int

    @property
    def flagged(self) -> tuple[LlnRow, ...]:
        return tuple(r for r in self.rows if abs(r.z) > self.threshold)

    @property
    def max_abs_z(self) -> float:
        return max(abs(r.z) for r in self.rows)


def lln_report(
    world: WorldPrefix, fps: FiniteProbabilitySpace, threshold: float = 4.0
) -> LlnReport:
    """Empirical frequency vs expected weight, with binomial z-scores."""
    if world.alphabet != fps.alphabet:
        raise ValueError("world and probability space alphabets differ")
    n = len(world)
    if n == 0:
        raise ValueError("cannot report on an empty world")
    raw = np.bincount(world.indices, minlength=len(world.alphabet))
    rows = []
    for symbol, count, p in zip(world.alphabet, raw, fps.weights):
        count = int(count)
        p = float(p)
        expected_count = n * p
        variance = n * p * (1.0 - p)
        if variance > 0.0:
            z = (count - expected_count) / variance**0.5
        elif count == expected_count:
            z = 0.0
        else:
            z = float("inf") if count > expected_count else float("-inf")
        rows.append(
            LlnRow(symbol=symbol, count=count, frequency=count / n, expected=p, z=z)
        )
    return LlnReport(rows=tuple(rows), threshold=threshold, length=n)
