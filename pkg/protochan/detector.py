from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import stats

from .misc import EmptyTrace, NotEnoughProtocols, WindowLargerThanTrace, InvalidParameter, verbose_display
from .codec import ProtocolAlphabet
from .data import PacketRecord, trace_to_frame


__all__ = ['ProtocolProfile', 'DetectionReport', 'baseline_profile', 'select_alphabet', 'chi_square',
           'windowed_scores', 'detect', 'synthetic_trace', 'calibrate_threshold',
           'DEFAULT_WINDOW', 'DEFAULT_STRIDE', 'DEFAULT_ALPHA']

DEFAULT_WINDOW = 64
DEFAULT_STRIDE = 16
DEFAULT_ALPHA = 1.0
MIN_WINDOW = 10


#######################################################################################################################
# Profiles

@dataclass(frozen=True)
class ProtocolProfile:
    """Per-protocol packet counts of benign traffic with pseudocount smoothing.

    The smoothed probability of a label over a vocabulary of K labels is (count + alpha) / (total + alpha * K).
    """
    counts: dict
    smoothing: float = DEFAULT_ALPHA

    @property
    def total(self):
        return int(sum(self.counts.values()))

    @property
    def labels(self):
        return sorted(self.counts)

    def vocabulary(self, labels=()):
        """Union of the profile labels and `labels`, sorted."""
        return sorted(set(self.counts) | set(labels))

    def probabilities(self, vocabulary=None):
        vocabulary = self.labels if vocabulary is None else list(vocabulary)
        denom = self.total + self.smoothing * len(vocabulary)
        return np.array([(self.counts.get(lab, 0) + self.smoothing) / denom for lab in vocabulary])

    def probability(self, label, vocabulary=None):
        vocabulary = self.vocabulary([label]) if vocabulary is None else list(vocabulary)
        return float(self.probabilities(vocabulary)[vocabulary.index(label)])

    def to_dict(self):
        labels = self.labels
        return {'counts': {lab: int(self.counts[lab]) for lab in labels}, 'total': self.total,
                'smoothing': self.smoothing,
                'probabilities': dict(zip(labels, [float(p) for p in self.probabilities(labels)]))}

    @classmethod
    def from_dict(cls, document):
        try:
            counts = {str(k): int(v) for k, v in document['counts'].items()}
            smoothing = float(document.get('smoothing', DEFAULT_ALPHA))
        except (KeyError, AttributeError, TypeError, ValueError):
            raise InvalidParameter("A profile document needs a 'counts' object of protocol -> integer count.")
        if smoothing <= 0:
            raise InvalidParameter(f"Smoothing must be > 0. Got {smoothing}.")
        if any(v < 0 for v in counts.values()):
            raise InvalidParameter("Profile counts must be non-negative.")
        return cls(counts=counts, smoothing=smoothing)


@dataclass(frozen=True)
class DetectionReport:
    window_size: int
    stride: int
    threshold: float
    scores: list
    p_values: list = field(default_factory=list)
    unusual_protocols: list = field(default_factory=list)
    vocabulary: list = field(default_factory=list)

    @property
    def flagged_windows(self):
        return [start for start, score in self.scores if score > self.threshold]

    @property
    def verdict(self):
        return bool(self.flagged_windows) or bool(self.unusual_protocols)

    def to_dict(self):
        return {'window_size': self.window_size, 'stride': self.stride, 'threshold': self.threshold,
                'scores': [[int(start), float(score)] for start, score in self.scores],
                'p_values': [float(p) for p in self.p_values],
                'unusual_protocols': list(self.unusual_protocols), 'vocabulary': list(self.vocabulary),
                'flagged_windows': [int(s) for s in self.flagged_windows], 'verdict': self.verdict}


#######################################################################################################################

def baseline_profile(trace, alpha=DEFAULT_ALPHA):
    """Count protocols of a benign trace to define the usual protocols of the network.

    :Parameters:
        * **trace** (:obj:`list`): :obj:`PacketRecord` of benign traffic.
        * **alpha** (:obj:`float`): Pseudocount used for smoothing (defaults 1.0).

    :Example:
        >>> protochan.baseline_profile(trace).counts
        ... {'ICMP': 2, 'ARP': 1}

    :Returns:
        * :obj:`ProtocolProfile`: Protocol counts.
    """
    if not alpha > 0:
        raise InvalidParameter(f"The pseudocount alpha must be > 0. Got {alpha}.")
    if len(trace) == 0:
        raise EmptyTrace('Cannot build a baseline profile from an empty trace.')

    counts = trace_to_frame(trace)['protocol'].value_counts()
    return ProtocolProfile(counts={str(k): int(v) for k, v in counts.items()}, smoothing=float(alpha))


def select_alphabet(profile, k):
    """Pick the `k` most frequent protocols of a profile as channel alphabet.
    Ties are broken lexicographically. This is a plain frequency ranking, not an adaptive selection.

    :Example:
        >>> protochan.select_alphabet(protochan.ProtocolProfile({'TCP': 70, 'UDP': 20, 'ICMP': 10}), 2).labels
        ... ('TCP', 'UDP')

    :Returns:
        * :obj:`ProtocolAlphabet`: Selected alphabet in descending frequency.
    """
    present = {lab: n for lab, n in profile.counts.items() if n > 0}
    if k < 2 or len(present) < k:
        raise NotEnoughProtocols(len(present), k)
    ranked = sorted(present.items(), key=lambda item: (-item[1], item[0]))
    return ProtocolAlphabet(tuple(lab for lab, _ in ranked[:k]))


#######################################################################################################################
# Scores

def chi_square(observed, expected):
    """Chi-square goodness-of-fit statistic sum((o - e)^2 / e) on aligned count vectors."""
    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(expected, dtype=float)
    if observed.shape != expected.shape:
        raise InvalidParameter(f"Observed and expected counts must be aligned. Got {observed.shape} and {expected.shape}.")
    if np.any(expected <= 0):
        raise InvalidParameter("Expected counts must be > 0.")
    return float(np.sum((observed - expected) ** 2 / expected))


def _window_counts(protocols, vocabulary, window_size, stride):
    # Rows are windows, columns follow `vocabulary`.
    onehot = pd.get_dummies(pd.Categorical(protocols, categories=vocabulary)).to_numpy(dtype=float)
    cumulative = np.vstack([np.zeros((1, len(vocabulary))), np.cumsum(onehot, axis=0)])
    starts = np.arange(0, len(protocols) - window_size + 1, stride)
    return starts, cumulative[starts + window_size] - cumulative[starts]


def _check_windows(trace, window_size, stride):
    if isinstance(window_size, bool) or int(window_size) != window_size or window_size < MIN_WINDOW:
        raise InvalidParameter(f"window_size must be an integer >= {MIN_WINDOW}. Got {window_size}.")
    if isinstance(stride, bool) or int(stride) != stride or stride < 1:
        raise InvalidParameter(f"stride must be an integer >= 1. Got {stride}.")
    if len(trace) == 0:
        raise EmptyTrace()
    if window_size > len(trace):
        raise WindowLargerThanTrace(int(window_size), len(trace))
    return int(window_size), int(stride)


def windowed_scores(trace, profile, window_size=DEFAULT_WINDOW, stride=DEFAULT_STRIDE):
    """Chi-square score of each sliding window against the smoothed baseline.
    The vocabulary is the union of the profile labels and the protocols of the trace. The `covert`
    field is never read.

    :Parameters:
        * **trace** (:obj:`list`): :obj:`PacketRecord` to analyse.
        * **profile** (:obj:`ProtocolProfile`): Baseline profile.
        * **window_size** (:obj:`int`): Packets per window, at least 10 (defaults 64).
        * **stride** (:obj:`int`): Packets between two window starts (defaults 16).

    :Example:
        >>> protochan.windowed_scores(trace, profile, 64, 16)[:2]
        ... [(0, 0.52), (16, 1.37)]

    :Returns:
        * :obj:`list`: (window start seq, chi-square statistic) in window order.
    """
    window_size, stride = _check_windows(trace, window_size, stride)
    protocols = [p.protocol for p in trace]
    vocabulary = profile.vocabulary(protocols)
    expected = window_size * profile.probabilities(vocabulary)

    starts, counts = _window_counts(protocols, vocabulary, window_size, stride)
    scores = ((counts - expected) ** 2 / expected).sum(axis=1)
    return [(trace[s].seq, float(score)) for s, score in zip(starts, scores)]


def detect(trace, profile, window_size=DEFAULT_WINDOW, stride=DEFAULT_STRIDE, threshold=None, verbose=False):
    """Flag a protocol channel in a trace.
    The verdict is positive when a window scores above the threshold or when the trace uses a protocol
    the baseline never saw.

    :Parameters:
        * **trace** (:obj:`list`): :obj:`PacketRecord` to analyse.
        * **profile** (:obj:`ProtocolProfile`): Baseline profile.
        * **window_size** (:obj:`int`): Packets per window (defaults 64).
        * **stride** (:obj:`int`): Packets between two window starts (defaults 16).
        * **threshold** (:obj:`float`): Score threshold, > 0. Use :py:meth:`calibrate_threshold` to derive one.
        * **verbose** (:obj:`bool`): Display the verdict (defaults False).

    :Example:
        >>> report = protochan.detect(trace, profile, threshold=12.5)
        >>> report.verdict, report.unusual_protocols
        ... (True, ['GRE'])

    :Returns:
        * :obj:`DetectionReport`: Scores, unusual protocols and verdict.
    """
    if threshold is None or not threshold > 0:
        raise InvalidParameter(f"threshold must be > 0. Got {threshold}.")

    scores = windowed_scores(trace, profile, window_size, stride)
    protocols = {p.protocol for p in trace}
    vocabulary = profile.vocabulary(protocols)
    unusual = sorted(lab for lab in protocols if profile.counts.get(lab, 0) == 0)
    dof = max(len(vocabulary) - 1, 1)
    p_values = [float(stats.chi2.sf(score, dof)) for _, score in scores]

    report = DetectionReport(window_size=int(window_size), stride=int(stride), threshold=float(threshold),
                             scores=scores, p_values=p_values, unusual_protocols=unusual, vocabulary=vocabulary)
    verbose_display(f'{len(report.flagged_windows)}/{len(scores)} windows above {threshold:.3f}, '
                    f'unusual protocols: {unusual}, verdict: {report.verdict}', verbose)
    return report


#######################################################################################################################
# Benign traffic and threshold calibration

def synthetic_trace(weights, n, seed=0, src='10.0.0.3', dst='10.0.0.2', interval=1.0):
    """Draw `n` benign packets from a protocol distribution with a seeded PCG64 generator.

    :Example:
        >>> trace = protochan.synthetic_trace({'TCP': 0.7, 'UDP': 0.2, 'ICMP': 0.1}, 10000, seed=1)

    :Returns:
        * :obj:`list`: Non-covert :obj:`PacketRecord`.
    """
    labels = list(weights)
    w = np.array([weights[lab] for lab in labels], dtype=float)
    if len(labels) == 0 or np.any(w < 0) or not w.sum() > 0:
        raise InvalidParameter("weights need non-negative values with a positive sum.")
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.choice(len(labels), size=n, p=w / w.sum())
    return [PacketRecord(seq=i, time=i * float(interval), protocol=labels[d], more_fragments=False,
                         src=src, dst=dst, covert=False) for i, d in enumerate(draws)]


def calibrate_threshold(profile, trace_length, window_size=DEFAULT_WINDOW, stride=DEFAULT_STRIDE,
                        percentile=99, runs=200, seed=0, verbose=False):
    """Empirical detection threshold for benign traffic following `profile`.
    Simulates `runs` benign traces of `trace_length` packets, keeps the highest window score of each trace
    and returns the `percentile`-th percentile of these maxima. A benign trace of the same length then
    exceeds the threshold with probability close to 1 - percentile / 100.

    :Parameters:
        * **profile** (:obj:`ProtocolProfile`): Baseline profile.
        * **trace_length** (:obj:`int`): Length of the traces to be analysed.
        * **window_size** (:obj:`int`): Packets per window (defaults 64).
        * **stride** (:obj:`int`): Packets between two window starts (defaults 16).
        * **percentile** (:obj:`float`): Percentile of the benign maxima (defaults 99).
        * **runs** (:obj:`int`): Number of simulated benign traces (defaults 200).
        * **seed** (:obj:`int`): Seed of the first simulated trace, run i uses seed + i (defaults 0).
        * **verbose** (:obj:`bool`): Display a progress bar (defaults False).

    :Returns:
        * :obj:`float`: Threshold.
    """
    if not 0 < percentile <= 100:
        raise InvalidParameter(f"percentile must be in (0, 100]. Got {percentile}.")
    if runs < 1:
        raise InvalidParameter(f"runs must be >= 1. Got {runs}.")
    weights = dict(zip(profile.labels, profile.probabilities(profile.labels)))

    maxima = []
    for i in verbose_display(range(runs), verbose):
        benign = synthetic_trace(weights, trace_length, seed=seed + i)
        maxima.append(max(score for _, score in windowed_scores(benign, profile, window_size, stride)))
    return float(np.percentile(maxima, percentile))
