"""Rank-metric decoding pipelines for the transformed finite-field channel.

All three decoders consume the additive-channel word y_bar = X_F + Z_F E_F
produced by the channel transformation:

  BMD     one bounded-distance decoding attempt, no erasures.

  GMD     declares ell = 0..d-1 row erasures on the least reliable rows
          (largest equalizer row norms).  Errors confined to the declared
          rows factor as [Z_F]_E [E'']_E with the left factor known, so
          each trial is an error-and-erasure decoding with rho = ell.
          Every successful trial contributes a candidate; the candidate
          with the smallest Frobenius distance ||H X - Y||_F wins.

  MT-GMD  for dimension-1 codes additionally runs one trial per row i,
          erasing all other rows (rho = m-1); a single clean row then
          suffices.  Candidates pool with GMD's, same metric selection.

Decoding failure is an ordinary outcome (counted as a frame error by the
simulator), never an exception.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import MatrixFq
from .gabidulin import ErasureInfo
from .lra import TransformedReception
from .spacetime import SpaceTimeCode


class UnsupportedDimension(Exception):
    pass


@dataclass(frozen=True)
class DecodeOutcome:
    ok: bool
    message: tuple | None
    candidate_count: int
    chosen_trial: str | None


FAILURE = DecodeOutcome(False, None, 0, None)


def _received_vector(tr: TransformedReception, code: SpaceTimeCode):
    field = code.gabidulin.field
    a = tr.y_bar.a
    return [field.from_coeffs(tuple(int(v) for v in a[:, j])) for j in range(a.shape[1])]


def _metric(code: SpaceTimeCode, msg, h, y) -> float:
    return float(np.linalg.norm(h @ code.encode_complex(msg) - y))


def _require_context(tr: TransformedReception, h, y):
    h = tr.h if h is None else h
    y = tr.y if y is None else y
    if h is None or y is None:
        raise ValueError("metric selection needs the channel matrix and received word")
    return h, y


def bmd_decode(tr: TransformedReception, code: SpaceTimeCode) -> DecodeOutcome:
    """Bounded-distance decoding of y_bar: corrects rank errors up to
    floor((d-1)/2), fails beyond."""
    res = code.gabidulin.decode_error_erasure(_received_vector(tr, code))
    if not res.ok:
        return FAILURE
    return DecodeOutcome(True, res.message, 1, "no-erasures")


def gmd_candidates(tr: TransformedReception, code: SpaceTimeCode):
    """Distinct successful candidates from the erasure ladder ell = 0..d-1,
    in trial order (first trial that produced each message is recorded)."""
    y = _received_vector(tr, code)
    gab = code.gabidulin
    q = gab.field.q
    out = []
    seen = set()
    for ell in range(gab.d):
        if ell == 0:
            erasures = ErasureInfo()
        else:
            rows = [i for i in tr.reliability_order[:ell]]
            a_r = MatrixFq(q, tr.z_f.a[:, sorted(rows)])
            erasures = ErasureInfo(row_factor=a_r)
        res = gab.decode_error_erasure(y, erasures)
        if res.ok and res.message not in seen:
            seen.add(res.message)
            out.append((res.message, "no-erasures" if ell == 0 else f"erasures={ell}"))
    return out


def mt_gmd_candidates(tr: TransformedReception, code: SpaceTimeCode):
    """GMD candidates plus one trial per row with every other row erased
    (defined for k = 1 with as many rows as time steps)."""
    gab = code.gabidulin
    if gab.k != 1:
        raise UnsupportedDimension("multi-trial decoding is defined for k = 1")
    m = gab.field.m
    if m != gab.n:
        raise UnsupportedDimension("multi-trial decoding needs m = n")
    y = _received_vector(tr, code)
    q = gab.field.q
    out = list(gmd_candidates(tr, code))
    seen = {msg for msg, _ in out}
    for i in range(m):
        cols = [j for j in range(m) if j != i]
        a_r = MatrixFq(q, tr.z_f.a[:, cols])
        res = gab.decode_error_erasure(y, ErasureInfo(row_factor=a_r))
        if res.ok and res.message not in seen:
            seen.add(res.message)
            out.append((res.message, f"row={i}"))
    return out


def _select(candidates, code, h, y) -> DecodeOutcome:
    if not candidates:
        return FAILURE
    best = None
    best_metric = None
    for msg, trial in candidates:
        metric = _metric(code, msg, h, y)
        if best_metric is None or metric < best_metric:
            best, best_metric = (msg, trial), metric
    return DecodeOutcome(True, best[0], len(candidates), best[1])


def gmd_decode(tr: TransformedReception, code: SpaceTimeCode,
               h: np.ndarray | None = None, y: np.ndarray | None = None) -> DecodeOutcome:
    h, y = _require_context(tr, h, y)
    return _select(gmd_candidates(tr, code), code, h, y)


def mt_gmd_decode(tr: TransformedReception, code: SpaceTimeCode,
                  h: np.ndarray | None = None, y: np.ndarray | None = None) -> DecodeOutcome:
    h, y = _require_context(tr, h, y)
    return _select(mt_gmd_candidates(tr, code), code, h, y)
