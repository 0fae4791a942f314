"""Alphabets and integer encoding of variable-length token sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Tokens = tuple[str, ...]


@dataclass(frozen=True)
class Alphabet:
    """Finite ordered symbol set with an optional terminal marker.

    Sequences never contain the terminal symbol; termination is implicit,
    so the empty sequence (immediate termination) is valid.
    """

    symbols: tuple[str, ...]
    terminal: str | None = None

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("alphabet needs at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")
        if self.terminal is not None and self.terminal not in self.symbols:
            raise ValueError(f"terminal {self.terminal!r} is not an alphabet symbol")

    @property
    def sequence_symbols(self) -> tuple[str, ...]:
        """Symbols that may appear inside a sequence (terminal excluded)."""
        return tuple(s for s in self.symbols if s != self.terminal)

    def validate(self, tokens: Iterable[str]) -> None:
        """Raise ValueError if any token is the terminal or a foreign symbol."""
        allowed = set(self.sequence_symbols)
        for tok in tokens:
            if tok == self.terminal:
                raise ValueError(f"terminal symbol {tok!r} inside a sequence")
            if tok not in allowed:
                raise ValueError(f"token {tok!r} not in alphabet")


def encode_sequences(seqs: Sequence[Tokens],
                     alphabet: Alphabet | None = None,
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Pack token sequences into a padded integer matrix.

    Every row is the sequence's symbol codes followed by a shared pad code,
    so a row-wise mismatch count between two rows equals the terminal-padded
    Hamming distance between the underlying sequences.

    Args:
        seqs: sequences as tuples (or lists) of string tokens.
        alphabet: optional declared alphabet; inferred from the data when
            omitted. Symbol order fixes the code assignment.

    Returns:
        (codes, lengths): codes is (n, w) uint16 with pad code equal to the
        number of distinct non-terminal symbols; lengths is (n,) int64.
    """
    seqs = [tuple(s) for s in seqs]
    if alphabet is None:
        symbols = tuple(sorted({tok for s in seqs for tok in s}))
    else:
        symbols = alphabet.sequence_symbols
        for s in seqs:
            alphabet.validate(s)
    if len(symbols) >= np.iinfo(np.uint16).max:
        raise ValueError("alphabet too large to encode")
    code_of = {tok: i for i, tok in enumerate(symbols)}
    pad = len(symbols)
    lengths = np.array([len(s) for s in seqs], dtype=np.int64)
    width = int(lengths.max()) if len(seqs) else 0
    codes = np.full((len(seqs), width), pad, dtype=np.uint16)
    for i, s in enumerate(seqs):
        if s:
            try:
                codes[i, :len(s)] = [code_of[t] for t in s]
            except KeyError as exc:
                raise ValueError(f"token {exc.args[0]!r} not in alphabet") from exc
    return codes, lengths


def pad_to_width(codes: np.ndarray, width: int, pad: int) -> np.ndarray:
    """Right-pad an encoded matrix with the pad code up to `width` columns."""
    n, w = codes.shape
    if w == width:
        return codes
    if w > width:
        raise ValueError("cannot shrink encoded width")
    out = np.full((n, width), pad, dtype=codes.dtype)
    out[:, :w] = codes
    return out
