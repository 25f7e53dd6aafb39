"""Independent brute-force oracles used to pin expected metric values.

Each function is a direct, unoptimized transcription of the published
formula, written separately from the library implementations so both sides
of every comparison are derived independently. Only the tokenizer and
stemmer are shared: they define the input representation, not the metric.
"""

from __future__ import annotations

import math

from chronusav.stemmer import stem


def iou_binned(a: tuple[float, float], b: tuple[float, float], bin_s: float = 0.001,
               span: float = 600.0) -> float:
    """IoU by counting 1 ms bins over [0, span] (numpy-free, per-pair)."""
    import numpy as np

    edges = np.arange(0.0, span, bin_s)
    centers = edges + bin_s / 2.0
    in_a = (centers >= a[0]) & (centers < a[1])
    in_b = (centers >= b[0]) & (centers < b[1])
    union = np.count_nonzero(in_a | in_b)
    if union == 0:
        return 1.0 if a == b else 0.0
    return np.count_nonzero(in_a & in_b) / union


def _grams(tokens, n):
    out = {}
    for i in range(0, len(tokens) - n + 1):
        g = tuple(tokens[i:i + n])
        out[g] = out.get(g, 0) + 1
    return out


def bleu4_oracle(pred, refs, eps=1e-9):
    if len(pred) == 0:
        return 0.0
    c = len(pred)
    # closest reference length, ties toward the shorter
    best = None
    for ref in refs:
        key = (abs(len(ref) - c), len(ref))
        if best is None or key < best:
            best = key
    r = best[1]
    product = 1.0
    for n in (1, 2, 3, 4):
        pred_grams = _grams(pred, n)
        clipped = 0
        for g, count in pred_grams.items():
            max_in_refs = 0
            for ref in refs:
                in_ref = _grams(ref, n).get(g, 0)
                if in_ref > max_in_refs:
                    max_in_refs = in_ref
            clipped += min(count, max_in_refs)
        guesses = len(pred) - n + 1
        p = clipped / guesses if guesses > 0 else 0.0
        if p <= 0.0:
            p = eps
        product *= p
    bp = math.exp(min(0.0, 1.0 - r / c))
    return (product ** 0.25) * bp


def _lcs_recursive(a, b):
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def rec(i, j):
        if i == 0 or j == 0:
            return 0
        if a[i - 1] == b[j - 1]:
            return rec(i - 1, j - 1) + 1
        return max(rec(i - 1, j), rec(i, j - 1))

    return rec(len(a), len(b))


def rouge_l_oracle(pred, ref, beta=1.2):
    lcs = _lcs_recursive(tuple(pred), tuple(ref))
    if lcs == 0 or len(pred) == 0 or len(ref) == 0:
        return 0.0
    p = lcs / len(pred)
    r = lcs / len(ref)
    return (1 + beta * beta) * r * p / (r + beta * beta * p)


def meteor_oracle(pred, ref):
    """METEOR on alignment-unambiguous pairs (no token repeats per side).

    With unique tokens the maximal alignment is the plain set intersection
    (exact, then stems of the leftovers), so matches and chunks follow
    directly from positions without any greedy scanning.
    """
    assert len(set(pred)) == len(pred), "oracle needs unique pred tokens"
    assert len(set(ref)) == len(ref), "oracle needs unique ref tokens"
    pred_pos = {tok: i for i, tok in enumerate(pred)}
    ref_pos = {tok: j for j, tok in enumerate(ref)}
    pairs = [(pred_pos[t], ref_pos[t]) for t in set(pred) & set(ref)]
    matched_pred = {i for i, _ in pairs}
    matched_ref = {j for _, j in pairs}
    left_pred = {stem(t): pred_pos[t] for t in pred if pred_pos[t] not in matched_pred}
    left_ref = {stem(t): ref_pos[t] for t in ref if ref_pos[t] not in matched_ref}
    assert len(left_pred) == len(set(left_pred)), "oracle needs unique stems"
    for s, i in left_pred.items():
        if s in left_ref:
            pairs.append((i, left_ref[s]))
    m = len(pairs)
    if m == 0:
        return 0.0
    pairs.sort()
    chunks = 1
    for (i0, j0), (i1, j1) in zip(pairs, pairs[1:]):
        if i1 != i0 + 1 or j1 != j0 + 1:
            chunks += 1
    precision = m / len(pred)
    recall = m / len(ref)
    f_mean = 10 * precision * recall / (recall + 9 * precision)
    penalty = 0.5 * (chunks / m) ** 3
    return f_mean * (1 - penalty)


def cider_oracle(pred, refs, documents):
    """CIDEr with explicit per-n tf-idf vectors over an enumerated doc set."""
    n_docs = len(documents)
    score = 0.0
    for n in (1, 2, 3, 4):
        doc_freq = {}
        for doc in documents:
            for g in set(_grams(doc, n)):
                doc_freq[g] = doc_freq.get(g, 0) + 1

        def vec(tokens):
            return {
                g: count * math.log(n_docs / doc_freq.get(g, 1))
                for g, count in _grams(tokens, n).items()
            }

        v_pred = vec(pred)
        norm_pred = math.sqrt(sum(x * x for x in v_pred.values()))
        total = 0.0
        for ref in refs:
            v_ref = vec(ref)
            norm_ref = math.sqrt(sum(x * x for x in v_ref.values()))
            if norm_pred == 0 or norm_ref == 0:
                continue
            dot = 0.0
            for g in v_pred:
                dot += v_pred[g] * v_ref.get(g, 0.0)
            total += dot / (norm_pred * norm_ref)
        score += 10.0 * total / len(refs)
    return score / 4.0


def fleiss_kappa_oracle(table):
    """Textbook transcription: per-item agreement, category shares, kappa."""
    n_items = len(table)
    n_raters = sum(table[0])
    p_items = []
    for row in table:
        agree = sum(v * v for v in row) - n_raters
        p_items.append(agree / (n_raters * (n_raters - 1)))
    p_bar = sum(p_items) / n_items
    n_categories = len(table[0])
    shares = [
        sum(row[j] for row in table) / (n_items * n_raters)
        for j in range(n_categories)
    ]
    pe_bar = sum(s * s for s in shares)
    return (p_bar - pe_bar) / (1 - pe_bar)
