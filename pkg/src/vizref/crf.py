"""Linear-chain CRF for detecting referring expressions, written from scratch.

Model
-----
Tags are B-REF, I-REF, O (indices 0, 1, 2; index order is also the decoding
tie-break order). The score of a tag sequence y for an utterance x is

    score(x, y) = sum_t  W_e[features(x, t), y_t]  +  sum_{t>=1} W_t[y_{t-1}, y_t]

and P(y | x) = exp(score) / Z(x), where Z sums over IOB2-valid sequences
only: transitions into I-REF from O or from the sequence start are
structurally forbidden in both training and decoding, so decoded output is
IOB2-valid for any weights.

Training
--------
Minimizes the negative conditional log-likelihood plus an elastic-net
penalty c1*||w||_1 + c2*||w||_2^2 (both coefficients default 0.10). The
non-smooth L1 term is handled by variable splitting (w = u - v with
u, v >= 0), which turns the problem into a smooth bound-constrained one
solved exactly by L-BFGS-B: projected-gradient tolerance 1e-5, at most 200
iterations. Initialization is the zero vector, so training is fully
deterministic given corpus order.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.optimize
import scipy.sparse
from sklearn.base import BaseEstimator

from .errors import EmptyTrainingSetError, ModelFormatError, NumericalTrainingError
from .features import TEMPLATE_VERSION, extract_features
from .text import Token
from .validation import check_iob2, check_nonempty_sequence, check_parallel

TAGS = ("B-REF", "I-REF", "O")
N_TAGS = 3
_B, _I, _O = 0, 1, 2

#: allowed[i, j]: may tag j follow tag i?  O -> I-REF is the one forbidden move.
ALLOWED_TRANSITIONS = np.ones((N_TAGS, N_TAGS), dtype=bool)
ALLOWED_TRANSITIONS[_O, _I] = False
_ALLOWED_FLAT = np.flatnonzero(ALLOWED_TRANSITIONS.ravel())

#: I-REF may not start a sequence.
START_ALLOWED = np.array([True, False, True])

#: finite stand-in for -inf; keeps logsumexp arithmetic NaN-free.
_NEG = -1e30

MAX_DECODE_LEN = 20


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    out = m.squeeze(axis) + np.log(np.sum(np.exp(a - m), axis=axis))
    return out


def _start_bias() -> np.ndarray:
    return np.where(START_ALLOWED, 0.0, _NEG)


def _masked_transitions(w_t: np.ndarray) -> np.ndarray:
    return np.where(ALLOWED_TRANSITIONS, w_t, _NEG)


class _Batch:
    """Padded training arrays for the whole corpus.

    phi is a sparse (total-positions x n-features) indicator matrix; pad_index
    maps (utterance, time) to a flat position row (0 for padding, masked out).
    """

    def __init__(self, sequences: list[list[list[int]]], tag_rows: list[list[int]], n_features: int):
        self.n = len(sequences)
        self.lengths = np.array([len(s) for s in sequences])
        self.t_max = int(self.lengths.max())
        self.n_features = n_features
        total = int(self.lengths.sum())

        rows, cols = [], []
        flat = 0
        self.pad_index = np.zeros((self.n, self.t_max), dtype=np.int64)
        self.pad_mask = np.zeros((self.n, self.t_max), dtype=bool)
        gold_flat = []
        self.gold_pad = np.zeros((self.n, self.t_max), dtype=np.int64)
        for u, (seq, tags) in enumerate(zip(sequences, tag_rows)):
            for t, feats in enumerate(seq):
                for f in feats:
                    rows.append(flat)
                    cols.append(f)
                self.pad_index[u, t] = flat
                self.pad_mask[u, t] = True
                gold_flat.append(tags[t])
                self.gold_pad[u, t] = tags[t]
                flat += 1
        self.phi = scipy.sparse.csr_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(total, n_features))
        self.gold_flat = np.array(gold_flat, dtype=np.int64)

        # observed sufficient statistics (constant across iterations)
        onehot = np.zeros((total, N_TAGS))
        onehot[np.arange(total), self.gold_flat] = 1.0
        self.observed_emission = self.phi.T @ onehot
        self.observed_transition = np.zeros((N_TAGS, N_TAGS))
        for u in range(self.n):
            tags = self.gold_pad[u, : self.lengths[u]]
            for a, b in zip(tags[:-1], tags[1:]):
                self.observed_transition[a, b] += 1.0


def _neg_log_likelihood_and_grad(w_e: np.ndarray, w_t: np.ndarray, batch: _Batch):
    """NLL of the constrained CRF and its gradient, via forward-backward."""
    n, t_max = batch.n, batch.t_max
    lengths = batch.lengths
    w_trans = _masked_transitions(w_t)

    e_flat = batch.phi @ w_e                      # (P, 3)
    e_pad = e_flat[batch.pad_index]               # (N, T, 3); pad rows unused
    last = lengths - 1

    alpha = np.empty((n, t_max, N_TAGS))
    alpha[:, 0] = e_pad[:, 0] + _start_bias()
    for t in range(1, t_max):
        prev = alpha[:, t - 1][:, :, None] + w_trans[None, :, :]
        alpha[:, t] = _logsumexp(prev, axis=1) + e_pad[:, t]

    log_z = _logsumexp(alpha[np.arange(n), last], axis=-1)

    beta = np.zeros((n, t_max, N_TAGS))
    for t in range(t_max - 2, -1, -1):
        nxt = w_trans[None, :, :] + (e_pad[:, t + 1] + beta[:, t + 1])[:, None, :]
        cand = _logsumexp(nxt, axis=2)
        # beta is defined only up to each utterance's last position
        beta[:, t] = np.where((t < last)[:, None], cand, 0.0)

    log_marg = alpha + beta - log_z[:, None, None]
    marginals = np.where(batch.pad_mask[:, :, None], np.exp(log_marg), 0.0)
    marg_flat = marginals[batch.pad_mask]         # (P, 3) in flat-position order

    expected_transition = np.zeros((N_TAGS, N_TAGS))
    for t in range(1, t_max):
        active = (t <= last)
        if not np.any(active):
            break
        xi = (alpha[:, t - 1][:, :, None] + w_trans[None, :, :]
              + (e_pad[:, t] + beta[:, t])[:, None, :] - log_z[:, None, None])
        expected_transition += np.exp(xi[active]).sum(axis=0)

    gold_emission = float((batch.observed_emission * w_e).sum())
    gold_transition = float((batch.observed_transition * w_t).sum())
    nll = float(log_z.sum()) - (gold_emission + gold_transition)

    grad_e = batch.phi.T @ marg_flat - batch.observed_emission
    grad_t = np.where(ALLOWED_TRANSITIONS, expected_transition - batch.observed_transition, 0.0)
    return nll, grad_e, grad_t


def viterbi_decode(emissions: np.ndarray, w_t: np.ndarray) -> list[int]:
    """Highest-scoring IOB2-valid tag sequence for an emission matrix (L, 3).

    Ties resolve to the lexicographically smallest optimal sequence under
    tag order B-REF < I-REF < O. A backward DP computes the best achievable
    suffix score per state, then a greedy forward pass picks, at each
    position, the smallest tag that still attains the global optimum; the
    equality checks reuse the exact floats produced by the DP, so the
    tie-break is robust.
    """
    length = emissions.shape[0]
    w_trans = _masked_transitions(w_t)
    delta = np.empty((length, N_TAGS))
    psi = np.zeros((length, N_TAGS))
    delta[length - 1] = emissions[length - 1]
    for t in range(length - 2, -1, -1):
        cont = w_trans + delta[t + 1][None, :]
        psi[t] = cont.max(axis=1)
        delta[t] = emissions[t] + psi[t]

    start_scores = delta[0] + _start_bias()
    path = [int(np.argmax(start_scores))]
    for t in range(length - 1):
        cont = w_trans[path[-1]] + delta[t + 1]
        path.append(int(np.argmax(cont == psi[t][path[-1]])))
    return path


class CrfTagger(BaseEstimator):
    """Sequence tagger marking referring-expression spans with IOB2 tags.

    Parameters
    ----------
    c1, c2 : float
        L1 / L2 regularization coefficients (default 0.10 each).
    max_iterations : int
        L-BFGS-B iteration cap.
    tol : float
        Projected-gradient convergence tolerance.

    Fitted attributes: ``feature_index_`` (feature id -> column),
    ``emission_weights_`` (F, 3), ``transition_weights_`` (3, 3; forbidden
    entries fixed at 0 and never used), ``loss_curve_`` (objective at each
    accepted iteration), ``n_iter_``.
    """

    def __init__(self, c1: float = 0.10, c2: float = 0.10, max_iterations: int = 200,
                 tol: float = 1e-5):
        self.c1 = c1
        self.c2 = c2
        self.max_iterations = max_iterations
        self.tol = tol

    # -- training ---------------------------------------------------------

    def fit(self, X: Sequence[Sequence[Token]], y: Sequence[Sequence[str]]) -> "CrfTagger":
        check_parallel("X", X, "y", y)
        check_nonempty_sequence("X", X)
        kept: list[tuple[Sequence[Token], Sequence[str]]] = []
        for tokens, tags in zip(X, y):
            check_parallel("tokens", tokens, "tags", tags)
            check_iob2(tags)
            if any(t != "O" for t in tags):
                kept.append((tokens, tags))
        if not kept:
            raise EmptyTrainingSetError(
                "every training utterance carries only O tags; nothing to learn")

        feature_index: dict[str, int] = {}
        sequences, tag_rows = [], []
        for tokens, tags in kept:
            seq = []
            for t in range(len(tokens)):
                ids = []
                for feat in extract_features(tokens, t):
                    if feat not in feature_index:
                        feature_index[feat] = len(feature_index)
                    ids.append(feature_index[feat])
                seq.append(ids)
            sequences.append(seq)
            tag_rows.append([TAGS.index(t) for t in tags])

        n_features = len(feature_index)
        batch = _Batch(sequences, tag_rows, n_features)
        n_emission = n_features * N_TAGS
        n_params = n_emission + len(_ALLOWED_FLAT)

        def unpack(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            w_e = w[:n_emission].reshape(n_features, N_TAGS)
            w_t = np.zeros((N_TAGS, N_TAGS))
            w_t.ravel()[_ALLOWED_FLAT] = w[n_emission:]
            return w_e, w_t

        eval_count = [0]

        def objective(theta: np.ndarray):
            eval_count[0] += 1
            u, v = theta[:n_params], theta[n_params:]
            w = u - v
            w_e, w_t = unpack(w)
            nll, grad_e, grad_t = _neg_log_likelihood_and_grad(w_e, w_t, batch)
            value = nll + self.c1 * float(np.sum(theta)) + self.c2 * float(np.dot(w, w))
            if not np.isfinite(value):
                raise NumericalTrainingError("training objective is not finite", eval_count[0])
            grad_w = np.concatenate([grad_e.ravel(), grad_t.ravel()[_ALLOWED_FLAT]])
            reg = 2.0 * self.c2 * w
            grad = np.concatenate([grad_w + self.c1 + reg, -grad_w + self.c1 - reg])
            return value, grad

        loss_curve: list[float] = []

        def record(theta: np.ndarray):
            loss_curve.append(float(objective(theta)[0]))

        theta0 = np.zeros(2 * n_params)
        loss_curve.append(float(objective(theta0)[0]))
        result = scipy.optimize.minimize(
            objective, theta0, method="L-BFGS-B", jac=True,
            bounds=[(0.0, None)] * (2 * n_params),
            callback=record,
            options={"maxiter": self.max_iterations, "gtol": self.tol, "ftol": 1e-12},
        )

        w_final = result.x[:n_params] - result.x[n_params:]
        self.feature_index_ = feature_index
        self.emission_weights_, self.transition_weights_ = unpack(w_final)
        self.loss_curve_ = loss_curve
        self.n_iter_ = int(result.nit)
        self.template_version_ = TEMPLATE_VERSION
        return self

    # -- decoding ---------------------------------------------------------

    def _emissions(self, tokens: Sequence[Token]) -> np.ndarray:
        emissions = np.zeros((len(tokens), N_TAGS))
        for t in range(len(tokens)):
            for feat in extract_features(tokens, t):
                col = self.feature_index_.get(feat)
                if col is not None:
                    emissions[t] += self.emission_weights_[col]
        return emissions

    def decode(self, tokens: Sequence[Token]) -> list[str]:
        """Viterbi-optimal IOB2 tag sequence for one utterance (length 1..20)."""
        if len(tokens) == 0:
            raise ValueError("cannot decode an empty utterance")
        if len(tokens) > MAX_DECODE_LEN:
            raise ValueError(
                f"utterance has {len(tokens)} tokens; ingestion must truncate to {MAX_DECODE_LEN}")
        path = viterbi_decode(self._emissions(tokens), self.transition_weights_)
        return [TAGS[i] for i in path]

    def predict(self, X: Sequence[Sequence[Token]]) -> list[list[str]]:
        return [self.decode(tokens) for tokens in X]

    # -- persistence ------------------------------------------------------

    def save(self, path: str | Path) -> None:
        features = sorted(self.feature_index_, key=self.feature_index_.__getitem__)
        payload = {
            "format": "vizref-crf/1",
            "template_version": self.template_version_,
            "tags": list(TAGS),
            "c1": self.c1,
            "c2": self.c2,
            "max_iterations": self.max_iterations,
            "tol": self.tol,
            "features": features,
            "emission_weights": self.emission_weights_.tolist(),
            "transition_weights": self.transition_weights_.tolist(),
        }
        Path(path).write_text(json.dumps(payload), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "CrfTagger":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
        if payload.get("format") != "vizref-crf/1":
            raise ModelFormatError(f"unsupported model format {payload.get('format')!r}")
        if payload.get("template_version") != TEMPLATE_VERSION:
            raise ModelFormatError(
                f"model was trained with template {payload.get('template_version')!r}, "
                f"this build uses {TEMPLATE_VERSION!r}")
        if tuple(payload.get("tags", ())) != TAGS:
            raise ModelFormatError("model tag set does not match")
        model = cls(c1=payload["c1"], c2=payload["c2"],
                    max_iterations=payload["max_iterations"], tol=payload["tol"])
        model.feature_index_ = {f: i for i, f in enumerate(payload["features"])}
        model.emission_weights_ = np.array(payload["emission_weights"], dtype=np.float64)
        model.transition_weights_ = np.array(payload["transition_weights"], dtype=np.float64)
        model.loss_curve_ = []
        model.n_iter_ = 0
        model.template_version_ = payload["template_version"]
        return model
