"""Kernels on token sequences, vectors, and sampled distributions.

Three families are provided, all addressed through `KernelSpec`:

* sequence kernels: exponentiated Hamming and its length-tilted variant;
* vector kernels: Gaussian on raw or mean-pooled embedding vectors;
* a distribution kernel: exponentiated negative squared MMD between sample
  sets, with the MMD estimated unbiasedly from the samples.

Gram assembly is vectorized over padded integer encodings of the sequences;
scalar entry points are kept for oracles and small inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence as TypingSequence

import numpy as np
import scipy.sparse
from scipy.spatial.distance import cdist

from .records import Item, tokens_of
from .sequences import Tokens, encode_sequences

SEQUENCE_KINDS = ("exp-hamming", "tilted-exp-hamming")
VECTOR_KINDS = ("gaussian", "mean-gaussian")
DISTRIBUTION_KINDS = ("dist-expmmd",)
HAMMING_MODES = ("padded", "length-penalty")

_KIND_ALIASES = {
    "gaussian-on-vectors": "gaussian",
    "mean-embedding-gaussian": "mean-gaussian",
    "distribution-exp-mmd": "dist-expmmd",
}
_MODE_ALIASES = {"terminal-padded": "padded", "penalty": "length-penalty"}

# Soft cap on temporary buffers allocated by chunked Gram assembly.
_CHUNK_BYTES = 1 << 26
# One-hot bit width beyond which packed popcount distances stop paying off.
_MAX_PACKED_BITS = 1024


@dataclass(frozen=True)
class KernelSpec:
    """Parsed kernel description.

    Attributes:
        kind: one of `SEQUENCE_KINDS`, `VECTOR_KINDS`, or `DISTRIBUTION_KINDS`.
        lam: decay of the Hamming exponent (sequence kinds only, > 0).
        sigma: Gaussian bandwidth, a positive float or the string "median"
            for the median heuristic (vector and distribution kinds only).
        mode: unequal-length Hamming convention, "padded" or "length-penalty".
        inner: sequence kernel used inside the MMD (distribution kind only).
    """

    kind: str
    lam: float | None = None
    sigma: float | str | None = None
    mode: str = "padded"
    inner: "KernelSpec | None" = None

    def __post_init__(self):
        kind = _KIND_ALIASES.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        mode = _MODE_ALIASES.get(self.mode, self.mode)
        object.__setattr__(self, "mode", mode)
        if mode not in HAMMING_MODES:
            raise ValueError(f"unknown hamming mode {self.mode!r}")
        if kind in SEQUENCE_KINDS:
            lam = 1.0 if self.lam is None else float(self.lam)
            object.__setattr__(self, "lam", lam)
            if not lam > 0:
                raise ValueError("lambda must be positive")
            if self.sigma is not None or self.inner is not None:
                raise ValueError(f"{kind} takes no sigma or inner kernel")
        elif kind in VECTOR_KINDS or kind in DISTRIBUTION_KINDS:
            sigma = "median" if self.sigma is None else self.sigma
            if isinstance(sigma, str):
                if sigma != "median":
                    raise ValueError(f"sigma must be a number or 'median', got {sigma!r}")
            else:
                sigma = float(sigma)
                if not sigma > 0:
                    raise ValueError("sigma must be positive")
            object.__setattr__(self, "sigma", sigma)
            if self.lam is not None:
                raise ValueError(f"{kind} takes no lambda")
            if kind in DISTRIBUTION_KINDS:
                inner = self.inner
                if inner is None:
                    inner = KernelSpec("exp-hamming", lam=1.0)
                    object.__setattr__(self, "inner", inner)
                if inner.kind not in SEQUENCE_KINDS:
                    raise ValueError("dist-expmmd needs a sequence-valued inner kernel")
            elif self.inner is not None:
                raise ValueError(f"{kind} takes no inner kernel")
        else:
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    @property
    def sigma_resolved(self) -> float:
        """Numeric bandwidth; raises if the median heuristic is unresolved."""
        if not isinstance(self.sigma, float):
            raise ValueError("sigma is unresolved; call resolve_spec first")
        return self.sigma

    def to_string(self) -> str:
        """Compact CLI form, e.g. 'exp-hamming:lambda=1.0:mode=padded'."""
        if self.kind in SEQUENCE_KINDS:
            return f"{self.kind}:lambda={self.lam!r}:mode={self.mode}"
        sigma = self.sigma if isinstance(self.sigma, str) else repr(self.sigma)
        if self.kind in DISTRIBUTION_KINDS:
            return f"{self.kind}:sigma={sigma}:inner={self.inner.to_string()}"
        return f"{self.kind}:sigma={sigma}"

    @staticmethod
    def parse(text: str) -> "KernelSpec":
        """Parse the compact CLI form (inverse of `to_string`)."""
        parts = str(text).strip().split(":")
        if not parts or not parts[0]:
            raise ValueError("empty kernel spec")
        kwargs: dict = {}
        kind = parts[0].strip()
        i = 1
        while i < len(parts):
            seg = parts[i]
            if "=" not in seg:
                raise ValueError(f"bad kernel spec segment {seg!r} in {text!r}")
            key, value = seg.split("=", 1)
            key = key.strip()
            if key == "inner":
                inner_text = ":".join([value] + parts[i + 1:])
                kwargs["inner"] = KernelSpec.parse(inner_text)
                break
            if key == "lambda":
                kwargs["lam"] = _parse_float(value, "lambda")
            elif key == "sigma":
                kwargs["sigma"] = value.strip() if value.strip() == "median" \
                    else _parse_float(value, "sigma")
            elif key == "mode":
                kwargs["mode"] = value.strip()
            else:
                raise ValueError(f"unknown kernel spec key {key!r} in {text!r}")
            i += 1
        return KernelSpec(kind, **kwargs)


def _parse_float(value: str, name: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {value!r}") from None


# ---------------------------------------------------------------------------
# Scalar kernels


# Sentinel standing in for the terminal token in the padded comparison.
_PAD = object()


def hamming_distance(y: Tokens, y2: Tokens, mode: str = "padded",
                     alphabet=None) -> int:
    """Hamming distance between variable-length sequences.

    "padded" conceptually extends both sequences with terminal tokens and
    counts differing positions up to the longer length; "length-penalty"
    counts mismatches over the common prefix plus the length difference.
    The two coincide on terminal-free sequences, which is what every record
    holds; both are kept because they are specified independently.
    """
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in HAMMING_MODES:
        raise ValueError(f"unknown hamming mode {mode!r}")
    y, y2 = tuple(y), tuple(y2)
    if alphabet is not None:
        alphabet.validate(y)
        alphabet.validate(y2)
    n1, n2 = len(y), len(y2)
    if mode == "padded":
        d = 0
        for i in range(max(n1, n2)):
            a = y[i] if i < n1 else _PAD
            b = y2[i] if i < n2 else _PAD
            d += a != b
        return d
    return sum(a != b for a, b in zip(y, y2)) + max(n1, n2) - min(n1, n2)


def exp_hamming(y: Tokens, y2: Tokens, lam: float = 1.0,
                mode: str = "padded") -> float:
    """Exponentiated Hamming kernel e^(-lam * d_H); 1 iff the inputs are equal."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return float(np.exp(-lam * hamming_distance(y, y2, mode)))


def tilted_exp_hamming(y: Tokens, y2: Tokens, lam: float = 1.0,
                       mode: str = "padded") -> float:
    """Exponentiated Hamming divided by both lengths; undefined on empty input."""
    y, y2 = tuple(y), tuple(y2)
    if len(y) == 0 or len(y2) == 0:
        raise ValueError("tilted-exp-hamming is invalid for empty sequences")
    return exp_hamming(y, y2, lam, mode) / (len(y) * len(y2))


def gaussian(u, v, sigma: float = 1.0) -> float:
    """Gaussian kernel e^(-||u - v||^2 / (2 sigma^2)) on equal-length vectors."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    sq = float(np.sum((u - v) ** 2))
    return float(np.exp(-sq / (2.0 * sigma * sigma)))


def mean_pool(per_position) -> np.ndarray:
    """Column-wise mean of an (L, d) per-position embedding matrix."""
    arr = np.asarray(per_position, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValueError("mean_pool needs a nonempty 2-d matrix")
    return arr.mean(axis=0)


# ---------------------------------------------------------------------------
# Encoded sequence Grams


def hamming_gram(codes_a: np.ndarray, codes_b: np.ndarray) -> np.ndarray:
    """Pairwise padded Hamming distances between encoded rows, chunked."""
    n, w = codes_a.shape
    m, w2 = codes_b.shape
    if w != w2:
        raise ValueError("encoded widths differ; encode jointly")
    out = np.empty((n, m), dtype=np.int64)
    if w == 0:
        out.fill(0)
        return out
    rows_per = max(1, _CHUNK_BYTES // max(1, m * w))
    for start in range(0, n, rows_per):
        stop = min(n, start + rows_per)
        out[start:stop] = (codes_a[start:stop, None, :]
                           != codes_b[None, :, :]).sum(axis=2, dtype=np.int64)
    return out


def sequence_gram(spec: KernelSpec, codes_a, lengths_a, codes_b, lengths_b
                  ) -> np.ndarray:
    """Gram matrix of a sequence kernel over jointly encoded inputs."""
    if spec.kind not in SEQUENCE_KINDS:
        raise ValueError(f"not a sequence kernel: {spec.kind}")
    dists = hamming_gram(codes_a, codes_b)
    lut = np.exp(-spec.lam * np.arange(codes_a.shape[1] + 1, dtype=np.float64))
    values = lut[dists]
    if spec.kind == "tilted-exp-hamming":
        if np.any(lengths_a == 0) or np.any(lengths_b == 0):
            raise ValueError("tilted-exp-hamming is invalid for empty sequences")
        values = values / np.outer(lengths_a, lengths_b)
    return values


def gaussian_gram(vectors_a: np.ndarray, vectors_b: np.ndarray,
                  sigma: float) -> np.ndarray:
    """Gaussian Gram matrix between rows of two (n, d) arrays."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if vectors_a.shape[1] != vectors_b.shape[1]:
        raise ValueError("embedding dimension mismatch")
    sq = cdist(vectors_a, vectors_b, "sqeuclidean")
    return np.exp(-sq / (2.0 * sigma * sigma))


# ---------------------------------------------------------------------------
# Item extraction and the median heuristic


def _sequences_of(items) -> list[Tokens]:
    return [tokens_of(it) for it in items]


def _vector_of(item, kind: str) -> np.ndarray:
    if isinstance(item, Item):
        if kind == "mean-gaussian":
            if item.per_position is None:
                raise ValueError("mean-gaussian needs a per_position matrix")
            return mean_pool(item.per_position)
        if item.embedding is not None:
            return item.embedding
        if item.scalar is not None:
            return np.array([item.scalar], dtype=np.float64)
        raise ValueError("item has no vector representation")
    arr = np.atleast_1d(np.asarray(item, dtype=np.float64))
    if kind == "mean-gaussian" and arr.ndim == 2:
        return mean_pool(arr)
    if arr.ndim != 1:
        raise ValueError("expected a vector or scalar input")
    return arr


def _vectors_of(items, kind: str) -> np.ndarray:
    vectors = [_vector_of(it, kind) for it in items]
    dims = {v.shape[0] for v in vectors}
    if len(dims) > 1:
        raise ValueError(f"inconsistent embedding dimensions: {sorted(dims)}")
    return np.stack(vectors)


def median_pairwise_distance(vectors: np.ndarray) -> float:
    """Median Euclidean distance over unordered pairs; 1.0 when degenerate.

    The 1.0 fallback covers both a zero median (all points identical) and
    fewer than two points.
    """
    n = len(vectors)
    if n < 2:
        return 1.0
    dists = cdist(vectors, vectors, "euclidean")
    iu = np.triu_indices(n, 1)
    med = float(np.median(dists[iu]))
    return med if med > 0 else 1.0


def resolve_spec(spec: KernelSpec, items_a, items_b=None) -> KernelSpec:
    """Replace a 'median' bandwidth with its value over the given items.

    Sequence kernels resolve to themselves. The distribution kernel is
    resolved by `distribution_gram`, which needs the MMD matrix first.
    """
    if spec.kind in VECTOR_KINDS and spec.sigma == "median":
        items = list(items_a) + (list(items_b) if items_b is not None else [])
        sigma = median_pairwise_distance(_vectors_of(items, spec.kind))
        return replace(spec, sigma=sigma)
    return spec


def gram(spec: KernelSpec, items_a, items_b=None) -> np.ndarray:
    """Gram matrix of the kernel over records (or raw sequences/vectors).

    Args:
        spec: kernel description; a 'median' bandwidth is resolved over the
            union of both item lists.
        items_a: list of Items, token tuples, or vectors, as fits the kind.
            For the distribution kind, a list of sample sets (self-Gram only).
        items_b: optional second list; omitted means the symmetric self-Gram.

    Returns:
        (len(items_a), len(items_b)) float64 matrix.
    """
    if spec.kind in DISTRIBUTION_KINDS:
        if items_b is not None and items_b is not items_a:
            raise ValueError("dist-expmmd supports self-Gram only")
        values, _, _ = distribution_gram(spec, items_a)
        return values
    spec = resolve_spec(spec, items_a, items_b)
    if spec.kind in SEQUENCE_KINDS:
        seqs_a = _sequences_of(items_a)
        seqs_b = seqs_a if items_b is None else _sequences_of(items_b)
        codes, lengths = encode_sequences(seqs_a + (seqs_b if items_b is not None else []))
        if items_b is None:
            return sequence_gram(spec, codes, lengths, codes, lengths)
        na = len(seqs_a)
        return sequence_gram(spec, codes[:na], lengths[:na], codes[na:], lengths[na:])
    vec_a = _vectors_of(items_a, spec.kind)
    vec_b = vec_a if items_b is None else _vectors_of(items_b, spec.kind)
    if vec_a.shape[1] != vec_b.shape[1]:
        raise ValueError("embedding dimension mismatch")
    return gaussian_gram(vec_a, vec_b, spec.sigma_resolved)


def scalar_kernel(spec: KernelSpec):
    """Scalar two-argument callable for the kernel (oracle-friendly)."""
    if spec.kind == "exp-hamming":
        return lambda a, b: exp_hamming(tokens_of(a), tokens_of(b), spec.lam, spec.mode)
    if spec.kind == "tilted-exp-hamming":
        return lambda a, b: tilted_exp_hamming(tokens_of(a), tokens_of(b), spec.lam, spec.mode)
    if spec.kind in VECTOR_KINDS:
        sigma = spec.sigma_resolved
        return lambda a, b: gaussian(_vector_of(a, spec.kind), _vector_of(b, spec.kind), sigma)
    raise ValueError(f"no scalar form for kernel kind {spec.kind}")


# ---------------------------------------------------------------------------
# Unbiased MMD between sample sets, and the distribution kernel built on it


def mmd_sq_unbiased(sample_a, sample_b, ky: KernelSpec) -> float:
    """Unbiased estimate of the squared MMD between two samples.

    Both within-sample terms average the kernel over ordered pairs i != j;
    the cross term averages over all pairs. The estimate may be negative.

    Args:
        sample_a, sample_b: lists (length >= 2) of Items, token tuples, or
            vectors compatible with `ky`.
        ky: the kernel on individual outputs.

    Raises:
        ValueError: fewer than 2 samples on either side.
    """
    na, nb = len(sample_a), len(sample_b)
    if na < 2 or nb < 2:
        raise ValueError("mmd_sq_unbiased needs at least 2 samples per side")
    items = list(sample_a) + list(sample_b)
    spec = resolve_spec(ky, items)
    if spec.kind in SEQUENCE_KINDS:
        # Samples repeat sequences heavily, so the Gram is built over the
        # distinct rows only and weighted by multiplicity.
        codes, lengths = encode_sequences(_sequences_of(items))
        vocab, first, inverse = np.unique(codes, axis=0, return_index=True,
                                          return_inverse=True)
        values = sequence_gram(spec, vocab, lengths[first],
                               vocab, lengths[first])
        count_a = np.bincount(inverse[:na], minlength=len(vocab)
                              ).astype(np.float64)
        count_b = np.bincount(inverse[na:], minlength=len(vocab)
                              ).astype(np.float64)
        diag = np.diagonal(values)
        term_a = (count_a @ values @ count_a - count_a @ diag) / (na * (na - 1))
        term_b = (count_b @ values @ count_b - count_b @ diag) / (nb * (nb - 1))
        cross = count_a @ values @ count_b / (na * nb)
        return float(term_a + term_b - 2.0 * cross)
    full = gram(spec, items)
    kaa = full[:na, :na]
    kbb = full[na:, na:]
    kab = full[:na, na:]
    term_a = (kaa.sum() - np.trace(kaa)) / (na * (na - 1))
    term_b = (kbb.sum() - np.trace(kbb)) / (nb * (nb - 1))
    return float(term_a + term_b - 2.0 * kab.sum() / (na * nb))


def _pack_onehot_bits(codes: np.ndarray, n_symbols: int) -> np.ndarray:
    """One-hot encode rows and pack into uint64 words for XOR popcounting."""
    v, w = codes.shape
    onehot = (codes[:, :, None] == np.arange(n_symbols, dtype=codes.dtype)
              ).reshape(v, w * n_symbols)
    packed8 = np.packbits(onehot, axis=1)
    extra = (-packed8.shape[1]) % 8
    if extra:
        packed8 = np.pad(packed8, ((0, 0), (0, extra)))
    return np.ascontiguousarray(packed8).view(np.uint64)


def _vocab_distances(vocab: np.ndarray, rows: slice, packed: np.ndarray | None
                     ) -> np.ndarray:
    """Hamming distances between a row chunk of the vocabulary and all of it."""
    if packed is not None:
        xor = packed[rows][:, None, :] ^ packed[None, :, :]
        return np.bitwise_count(xor).sum(axis=2, dtype=np.int64) >> 1
    return (vocab[rows][:, None, :] != vocab[None, :, :]).sum(axis=2, dtype=np.int64)


def mmd_sq_matrix_encoded(codes: np.ndarray, lengths: np.ndarray,
                          r_counts: np.ndarray, ky: KernelSpec,
                          with_diag: bool = True) -> np.ndarray:
    """Pairwise unbiased MMD^2 between consecutive blocks of encoded samples.

    The flat `codes` rows are grouped into records by `r_counts` (record i
    owns the next r_counts[i] rows). Work is routed through the deduplicated
    vocabulary of distinct rows: with counts matrix C and vocabulary Gram K,
    every cross sum is an entry of C K C^T, which keeps the cost near
    O(|vocab|^2) instead of O((sum R_i)^2).

    The diagonal holds the split-half estimate of each record against itself
    (first half vs second half), or 0.0 when a half has fewer than 2 samples
    or `with_diag` is false; no statistic reads it.
    """
    if ky.kind not in SEQUENCE_KINDS:
        raise ValueError("mmd matrix needs a sequence kernel")
    r_counts = np.asarray(r_counts, dtype=np.int64)
    n_rec = len(r_counts)
    if np.any(r_counts < 2):
        raise ValueError("every record needs at least 2 model samples")
    if r_counts.sum() != len(codes):
        raise ValueError("r_counts do not match the number of sample rows")
    tilted = ky.kind == "tilted-exp-hamming"
    if tilted and np.any(lengths == 0):
        raise ValueError("tilted-exp-hamming is invalid for empty sequences")

    rec_ids = np.repeat(np.arange(n_rec), r_counts)
    total, w = codes.shape

    # Vocabulary of distinct sample rows.
    flat = np.ascontiguousarray(codes)
    if w == 0:
        vocab = flat[:1].copy() if total else flat.copy()
        inv = np.zeros(total, dtype=np.int64)
        vocab_idx = np.zeros(min(total, 1), dtype=np.int64)
    else:
        void = flat.view(np.dtype((np.void, flat.dtype.itemsize * w))).ravel()
        _, vocab_idx, inv = np.unique(void, return_index=True, return_inverse=True)
        vocab = flat[vocab_idx]
    vocab_len = lengths[vocab_idx] if len(vocab) else np.zeros(0, dtype=np.int64)
    v = len(vocab)

    counts = scipy.sparse.coo_matrix(
        (np.ones(total, dtype=np.float64), (rec_ids, inv)),
        shape=(n_rec, v)).tocsc()

    n_symbols = int(codes.max(initial=0)) + 1
    packed = None
    if 0 < w * n_symbols <= _MAX_PACKED_BITS:
        packed = _pack_onehot_bits(vocab, n_symbols)

    lut = np.exp(-ky.lam * np.arange(w + 1, dtype=np.float64))
    inv_len = 1.0 / vocab_len if tilted else None

    words = packed.shape[1] if packed is not None else w
    rows_per = max(1, _CHUNK_BYTES // max(1, v * max(words * 8, w)))
    sandwich = np.zeros((n_rec, v), dtype=np.float64)
    for start in range(0, v, rows_per):
        rows = slice(start, min(v, start + rows_per))
        kernel_chunk = lut[_vocab_distances(vocab, rows, packed)]
        if tilted:
            kernel_chunk *= np.outer(inv_len[rows], inv_len)
        sandwich += counts[:, rows] @ kernel_chunk

    cross = np.asarray(counts @ sandwich.T)

    if tilted:
        self_sums = np.bincount(rec_ids, weights=1.0 / lengths ** 2,
                                minlength=n_rec)
    else:
        self_sums = r_counts.astype(np.float64)
    within = (np.diag(cross) - self_sums) / (r_counts * (r_counts - 1.0))

    mmd = within[:, None] + within[None, :] - 2.0 * cross / np.outer(r_counts, r_counts)

    starts = np.concatenate(([0], np.cumsum(r_counts)))
    np.fill_diagonal(mmd, 0.0)
    if with_diag:
        for i in range(n_rec):
            half = int(r_counts[i]) // 2
            if half < 2 or int(r_counts[i]) - half < 2:
                continue
            lo, hi = starts[i], starts[i + 1]
            first = slice(lo, lo + half)
            second = slice(lo + half, hi)
            kff = sequence_gram(ky, codes[first], lengths[first], codes[first], lengths[first])
            kss = sequence_gram(ky, codes[second], lengths[second], codes[second], lengths[second])
            kfs = sequence_gram(ky, codes[first], lengths[first], codes[second], lengths[second])
            nf, ns = half, int(r_counts[i]) - half
            mmd[i, i] = ((kff.sum() - np.trace(kff)) / (nf * (nf - 1))
                         + (kss.sum() - np.trace(kss)) / (ns * (ns - 1))
                         - 2.0 * kfs.sum() / (nf * ns))
    return mmd


def mmd_sq_matrix(sample_sets, ky: KernelSpec, with_diag: bool = True
                  ) -> np.ndarray:
    """Pairwise unbiased MMD^2 between token sample sets (list-level API)."""
    seq_sets = [[tokens_of(s) for s in one] for one in sample_sets]
    r_counts = np.array([len(one) for one in seq_sets], dtype=np.int64)
    flat = [s for one in seq_sets for s in one]
    codes, lengths = encode_sequences(flat)
    return mmd_sq_matrix_encoded(codes, lengths, r_counts, ky, with_diag)


def distribution_gram(spec: KernelSpec, sample_sets,
                      mmd: np.ndarray | None = None
                      ) -> tuple[np.ndarray, KernelSpec, np.ndarray]:
    """Self-Gram of the exponentiated-MMD kernel over sample sets.

    Entries are e^(-MMD^2 / (2 sigma^2)) and may exceed 1 because the
    unbiased MMD^2 estimate can be negative; the matrix is not forced PSD.
    A 'median' sigma resolves to the median of sqrt(max(MMD^2, 0)) over
    off-diagonal pairs (fallback 1.0 when that median is 0).

    Returns:
        (values, resolved spec, the MMD^2 matrix).
    """
    if spec.kind not in DISTRIBUTION_KINDS:
        raise ValueError(f"not a distribution kernel: {spec.kind}")
    if mmd is None:
        mmd = mmd_sq_matrix(sample_sets, spec.inner, with_diag=True)
    sigma = spec.sigma
    if sigma == "median":
        n = len(mmd)
        if n < 2:
            sigma = 1.0
        else:
            iu = np.triu_indices(n, 1)
            med = float(np.median(np.sqrt(np.clip(mmd[iu], 0.0, None))))
            sigma = med if med > 0 else 1.0
        spec = replace(spec, sigma=sigma)
    values = np.exp(-mmd / (2.0 * spec.sigma_resolved ** 2))
    return values, spec, mmd
