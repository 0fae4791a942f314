"""Reliability (calibration) testing against the model's own samples.

Instead of comparing model outputs to data outputs conditioned on inputs,
each record carries extra samples drawn from the model at the same input,
and those sample sets play the role of the conditioning side: records are
compared through a kernel on the sampled distributions,

    khat(i, j) = exp(-MMD^2(samples_i, samples_j) / (2 sigma_p^2)),

with the MMD estimated unbiasedly from the samples. The h matrix then uses
khat in place of the input kernel, so a model is flagged when outputs and
model outputs disagree in a way that correlates with the model's own
predictive distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimator import HMatrix, acmmd_sq, h_matrix_from_grams
from .kernels import (DISTRIBUTION_KINDS, SEQUENCE_KINDS, KernelSpec,
                      distribution_gram, gram, mmd_sq_matrix_encoded,
                      resolve_spec, sequence_gram)
from .records import tokens_of
from .sequences import encode_sequences
from .testing import TestReport, test_from_h


@dataclass(frozen=True)
class KhatMatrix:
    """Distribution-kernel Gram over the records' sample sets.

    Attributes:
        values: (N, N) matrix exp(-MMD^2 / (2 sigma^2)). The diagonal uses
            each record's split-half MMD against itself (0 when a half would
            have fewer than 2 samples); no statistic reads it.
        spec: resolved distribution-kernel description (numeric sigma).
        mmd_sq: the underlying (N, N) unbiased MMD^2 estimates.
    """

    values: np.ndarray
    spec: KernelSpec
    mmd_sq: np.ndarray

    @property
    def sigma(self) -> float:
        return self.spec.sigma_resolved


def default_inner_samples(n: int) -> int:
    """Default per-record model-sample count: max(16, ceil(sqrt(n)))."""
    if n < 1:
        raise ValueError("need at least 1 record")
    return max(16, math.isqrt(n - 1) + 1)


def khat_matrix(records, kp: KernelSpec) -> KhatMatrix:
    """Distribution-kernel Gram over reliability records' sample sets."""
    if kp.kind not in DISTRIBUTION_KINDS:
        raise ValueError("reliability needs a distribution kernel")
    sets = [r.model_samples for r in records]
    values, resolved, mmd = distribution_gram(kp, sets)
    return KhatMatrix(values=values, spec=resolved, mmd_sq=mmd)


def rel_h_matrix(records, kp: KernelSpec, ky: KernelSpec) -> HMatrix:
    """h matrix for reliability records, deduplicating sequence work.

    The khat Gram and all ky blocks reuse one joint encoding; the khat
    diagonal is skipped entirely because no statistic reads it.
    """
    records = list(records)
    n = len(records)
    if n < 2:
        raise ValueError("need at least 2 records")
    if kp.kind not in DISTRIBUTION_KINDS:
        raise ValueError("reliability needs a distribution kernel")
    ky = resolve_spec(ky, [r.y_model for r in records] + [r.y for r in records])

    if ky.kind in SEQUENCE_KINDS and kp.inner.kind in SEQUENCE_KINDS:
        seqs = [tokens_of(r.y_model) for r in records] \
            + [tokens_of(r.y) for r in records] \
            + [tokens_of(s) for r in records for s in r.model_samples]
        codes, lengths = encode_sequences(seqs)
        r_counts = np.array([len(r.model_samples) for r in records], dtype=np.int64)
        mmd = mmd_sq_matrix_encoded(codes[2 * n:], lengths[2 * n:], r_counts,
                                    kp.inner, with_diag=False)
        khat_values, kp_resolved, _ = distribution_gram(kp, None, mmd=mmd)
        pair = sequence_gram(ky, codes[:2 * n], lengths[:2 * n],
                             codes[:2 * n], lengths[:2 * n])
        kmm = pair[:n, :n]
        kyy = pair[n:, n:]
        kmy = pair[:n, n:]
    else:
        khat = khat_matrix(records, kp)
        khat_values, kp_resolved = khat.values, khat.spec
        joint = gram(ky, [r.y_model for r in records] + [r.y for r in records])
        kmm = joint[:n, :n]
        kyy = joint[n:, n:]
        kmy = joint[:n, n:]
    return h_matrix_from_grams(khat_values, kmm, kyy, kmy, kp_resolved, ky)


def acmmd_rel_sq(records, ky: KernelSpec, kp: KernelSpec | None = None,
                 sigma: float | str = "median") -> float:
    """Unbiased squared reliability discrepancy over the records.

    Args:
        records: ReliabilityRecords (>= 2 model samples each).
        ky: kernel on individual outputs.
        kp: full distribution-kernel spec; overrides `sigma` when given.
        sigma: bandwidth for the default distribution kernel built from
            `ky` as the inner kernel ('median' for the heuristic over the
            estimated inter-record MMDs).
    """
    if kp is None:
        kp = KernelSpec("dist-expmmd", sigma=sigma, inner=ky)
    return acmmd_sq(rel_h_matrix(records, kp, ky))


def inner_samples_summary(records) -> int | str:
    """Model-sample count per record: one int, or 'min..max' when mixed."""
    counts = [len(r.model_samples) for r in records]
    if len(set(counts)) == 1:
        return int(counts[0])
    return f"{min(counts)}..{max(counts)}"


def acmmd_rel_test(records, ky: KernelSpec, kp: KernelSpec | None = None,
                   sigma: float | str = "median", alpha: float = 0.05,
                   b_count: int = 100, seed=0) -> TestReport:
    """Reliability test: wild bootstrap on the khat-weighted h matrix.

    Args:
        records: ReliabilityRecords.
        ky: kernel on individual outputs.
        kp: distribution kernel on sample sets; defaults to exponentiated
            negative MMD^2 with `ky` inside and bandwidth `sigma`.
        sigma: bandwidth used when `kp` is not given.
        alpha, b_count, seed: as in `acmmd_test`.
    """
    if kp is None:
        kp = KernelSpec("dist-expmmd", sigma=sigma, inner=ky)
    h = rel_h_matrix(records, kp, ky)
    extra = {
        "sigma_p": h.kx.sigma_resolved,
        "inner_samples": inner_samples_summary(records),
    }
    return test_from_h(h, alpha, b_count, seed, extra=extra)
