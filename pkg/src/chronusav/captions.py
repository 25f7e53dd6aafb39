"""Caption quality metrics over one shared canonical tokenizer.

The same tokenizer feeds both evaluation and reward scoring, so a caption
reward equals the corresponding evaluation metric exactly.

Implemented variants (constants surfaced in :class:`MetricConfig`):

* BLEU-4 - clipped modified n-gram precisions, geometric mean, brevity
  penalty, epsilon floor on zero precisions.
* ROUGE-L - LCS F-measure with beta = 1.2.
* METEOR - exact + stem unigram alignment (no synonym stage), harmonic
  mean weighted toward precision, fragmentation penalty 0.5 * (chunks/m)^3.
* CIDEr - mean over n = 1..4 of 10x tf-idf n-gram cosine against each
  reference, idf from a frozen document-frequency corpus.
"""

from __future__ import annotations

import math
import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyCorpus
from .stemmer import stem

TokenizedCaption = tuple[str, ...]

_PUNCT_TO_SPACE = str.maketrans({ch: " " for ch in string.punctuation})


def tokenize(text: str) -> TokenizedCaption:
    """Canonical tokenizer: lowercase, punctuation to spaces, whitespace split."""
    return tuple(text.lower().translate(_PUNCT_TO_SPACE).split())


@dataclass(frozen=True)
class MetricConfig:
    """Metric constants; defaults are the toolkit's documented settings."""

    rouge_beta: float = 1.2
    bleu_epsilon: float = 1e-9
    meteor_penalty_weight: float = 0.5
    meteor_penalty_power: float = 3.0


DEFAULT_METRIC_CONFIG = MetricConfig()


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(
    pred: Sequence[str],
    refs: Sequence[Sequence[str]],
    config: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> float:
    """Sentence BLEU-4 against one or more references.

    Reference length for the brevity penalty is the closest to the
    prediction length, ties resolved toward the shorter reference. Any zero
    n-gram precision is floored at ``config.bleu_epsilon`` so reward-style
    usage never collapses to exact-zero ties.
    """
    if not refs:
        raise ValueError("bleu4 requires at least one reference")
    if len(pred) == 0:
        return 0.0
    c = len(pred)
    r = min((abs(len(ref) - c), len(ref)) for ref in refs)[1]
    log_sum = 0.0
    for n in range(1, 5):
        guesses = max(0, c - n + 1)
        pred_counts = _ngram_counts(pred, n)
        max_ref_counts: Counter = Counter()
        for ref in refs:
            for gram, count in _ngram_counts(ref, n).items():
                if count > max_ref_counts[gram]:
                    max_ref_counts[gram] = count
        correct = sum(
            min(count, max_ref_counts.get(gram, 0))
            for gram, count in pred_counts.items()
        )
        precision = correct / guesses if guesses > 0 else 0.0
        log_sum += math.log(max(precision, config.bleu_epsilon))
    geo_mean = math.exp(log_sum / 4.0)
    brevity = math.exp(min(0.0, 1.0 - r / c))
    return geo_mean * brevity


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[len(b)]


def rouge_l(
    pred: Sequence[str],
    ref: Sequence[str],
    config: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> float:
    """ROUGE-L: LCS-based F-measure, recall-weighted by beta."""
    lcs = _lcs_length(pred, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(pred)
    recall = lcs / len(ref)
    beta_sq = config.rouge_beta**2
    return (1 + beta_sq) * recall * precision / (recall + beta_sq * precision)


def _align_unigrams(
    pred: Sequence[str], ref: Sequence[str]
) -> list[tuple[int, int]]:
    """Two-stage greedy alignment: exact matches first, then stem matches.

    Each stage scans the prediction left to right and takes the first
    still-unmatched reference position that matches.
    """
    matches: list[tuple[int, int]] = []
    pred_used = [False] * len(pred)
    ref_used = [False] * len(ref)
    for key in (lambda tok: tok, stem):
        ref_keys = [key(tok) for tok in ref]
        for i, tok in enumerate(pred):
            if pred_used[i]:
                continue
            needle = key(tok)
            for j, ref_key in enumerate(ref_keys):
                if not ref_used[j] and ref_key == needle:
                    matches.append((i, j))
                    pred_used[i] = True
                    ref_used[j] = True
                    break
    return matches


def _count_chunks(matches: list[tuple[int, int]]) -> int:
    ordered = sorted(matches)
    chunks = 0
    prev: tuple[int, int] | None = None
    for i, j in ordered:
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def meteor(
    pred: Sequence[str],
    ref: Sequence[str],
    config: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> float:
    """METEOR with exact and stem matching stages.

    F_mean = 10PR / (R + 9P); penalty = weight * (chunks / matches)^power;
    score = F_mean * (1 - penalty). Zero when nothing aligns.
    """
    matches = _align_unigrams(pred, ref)
    m = len(matches)
    if m == 0:
        return 0.0
    precision = m / len(pred)
    recall = m / len(ref)
    f_mean = 10.0 * precision * recall / (recall + 9.0 * precision)
    chunks = _count_chunks(matches)
    penalty = config.meteor_penalty_weight * (chunks / m) ** config.meteor_penalty_power
    return f_mean * (1.0 - penalty)


@dataclass(frozen=True)
class IdfCorpus:
    """Document frequencies for n-grams (n = 1..4) over a reference set."""

    doc_count: int
    df: dict = field(repr=False)

    def idf(self, gram: tuple) -> float:
        return math.log(self.doc_count / self.df.get(gram, 1))


def build_idf_corpus(refs: Sequence[Sequence[str]]) -> IdfCorpus:
    """Count, per n-gram, the number of reference documents containing it."""
    if not refs:
        raise EmptyCorpus("cannot build an idf corpus from zero references")
    df: Counter = Counter()
    for ref in refs:
        seen = set()
        for n in range(1, 5):
            seen.update(_ngram_counts(ref, n).keys())
        df.update(seen)
    return IdfCorpus(doc_count=len(refs), df=dict(df))


def _tfidf_vector(tokens: Sequence[str], n: int, corpus: IdfCorpus) -> dict:
    return {
        gram: count * corpus.idf(gram)
        for gram, count in _ngram_counts(tokens, n).items()
    }


def cider(
    pred: Sequence[str],
    refs: Sequence[Sequence[str]],
    corpus: IdfCorpus,
    config: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> float:
    """Consensus score: mean over n of 10x tf-idf cosine, averaged over refs.

    A zero tf-idf vector on either side contributes 0 for that n (this also
    covers the all-idf-zero single-document corpus).
    """
    if corpus.doc_count < 1:
        raise EmptyCorpus("idf corpus has no documents")
    if not refs:
        raise ValueError("cider requires at least one reference")
    if len(pred) == 0:
        return 0.0
    total = 0.0
    for n in range(1, 5):
        pred_vec = _tfidf_vector(pred, n, corpus)
        pred_norm = math.sqrt(sum(v * v for v in pred_vec.values()))
        sim_sum = 0.0
        for ref in refs:
            ref_vec = _tfidf_vector(ref, n, corpus)
            ref_norm = math.sqrt(sum(v * v for v in ref_vec.values()))
            if pred_norm == 0.0 or ref_norm == 0.0:
                continue
            dot = sum(value * ref_vec.get(gram, 0.0) for gram, value in pred_vec.items())
            sim_sum += dot / (pred_norm * ref_norm)
        total += 10.0 * sim_sum / len(refs)
    return total / 4.0
