"""Synthetic labelled corpora with a tunable class skew and separability.

Every class draws words from a shared Zipf-weighted pool.  With
probability ``separability`` a token instead comes from a small block of
words owned by that class, so 0 gives indistinguishable classes and 1
gives disjoint vocabularies.  ``spread`` lets class words leak across
the rating scale: signal word j sits at position j / class_vocab, and class
c picks it with weight exp(-(position - c)^2 / (2 spread^2)) on top of the
Zipf weight.  With spread 0 each class uses only its own block; larger
values make adjacent ratings share evidence the way real reviews do.
``leak`` mixes that distribution with the Zipf weights over all signal
words, so every class word also turns up, more rarely, in every class.
"""

from dataclasses import dataclass, replace

import numpy as np

from .textprep import RawDocument
from .vectorize import largest_remainder

_DECOR = ("!!!", "...", ":)", ":(", "http://example.com", "5", "10/10")

_CONSONANTS = "bcdfghjklmnprstvwxyz"
_VOWELS = "aeiou"
_SYLLABLES = [c + v for c in _CONSONANTS for v in _VOWELS]


def _word(i):
    # two consonant-vowel syllables: no digits, no letter runs, no emoticon shapes
    hi, lo = divmod(int(i), len(_SYLLABLES))
    return _SYLLABLES[hi % len(_SYLLABLES)] + _SYLLABLES[lo]


@dataclass(frozen=True)
class SyntheticProfile:
    name: str
    counts: tuple
    vocab_size: int = 1500
    class_vocab: int = 60
    mean_length: float = 25.0
    zipf: float = 1.1
    separability: float = 0.3
    spread: float = 0.0
    leak: float = 0.0
    decoration: float = 0.02
    remove_leq: int = 4
    seed: int = 0

    def __post_init__(self):
        if not self.counts or any(int(c) <= 0 for c in self.counts):
            raise ValueError("class counts must be positive")
        if not 0.0 <= self.separability <= 1.0:
            raise ValueError("separability must lie in [0, 1]")
        if not 0.0 <= self.leak <= 1.0:
            raise ValueError("leak must lie in [0, 1]")
        if self.spread < 0:
            raise ValueError("spread must be >= 0")
        if self.mean_length <= 0 or self.vocab_size < 1 or self.class_vocab < 1:
            raise ValueError("lengths and vocabulary sizes must be positive")
        if self.vocab_size + len(self.counts) * self.class_vocab > len(_SYLLABLES) ** 2:
            raise ValueError("vocabulary too large for the word generator")
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    @property
    def total(self):
        return sum(self.counts)


PROFILES = {
    "epicurious": SyntheticProfile("epicurious", (108, 787, 5648, 3546)),
    "planned_parenthood": SyntheticProfile("planned_parenthood", (188, 100, 25, 23, 50), remove_leq=2),
}


def get_profile(name, **overrides):
    if name not in PROFILES:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}")
    return replace(PROFILES[name], **overrides) if overrides else PROFILES[name]


def scaled(profile, total):
    """Same class proportions at about ``total`` documents, every class >= 1."""
    quotas = [c * total / profile.total for c in profile.counts]
    counts = [max(1, c) for c in largest_remainder(quotas, total)]
    return replace(profile, counts=tuple(counts))


def _signal_weights(profile):
    """Per-class distribution over the m * class_vocab signal words."""
    m, k = len(profile.counts), profile.class_vocab
    rank_w = 1.0 / np.power(np.arange(1, k + 1), profile.zipf)
    j = np.arange(m * k)
    zipf = rank_w[j % k]
    if profile.spread == 0:
        P = np.where((j // k)[None, :] == np.arange(m)[:, None], zipf[None, :], 0.0)
    else:
        pos = (j % k + 0.5) / k + j // k
        centre = np.arange(m)[:, None] + 0.5
        P = zipf[None, :] * np.exp(-((pos[None, :] - centre) ** 2) / (2 * profile.spread ** 2))
    P = P / P.sum(axis=1, keepdims=True)
    return (1.0 - profile.leak) * P + profile.leak * (zipf / zipf.sum())[None, :]


def generate_synthetic(profile):
    """Documents in class order, deterministic given the profile."""
    rng = np.random.default_rng(profile.seed)
    m = len(profile.counts)
    shared = np.arange(profile.vocab_size)
    weights = 1.0 / np.power(np.arange(1, profile.vocab_size + 1), profile.zipf)
    weights /= weights.sum()
    signal_p = _signal_weights(profile)
    base = profile.vocab_size
    docs = []
    for c in range(m):
        for _ in range(profile.counts[c]):
            n = 3 + rng.poisson(profile.mean_length)
            from_own = rng.random(n) < profile.separability
            signal = base + rng.choice(signal_p.shape[1], size=n, p=signal_p[c])
            toks = np.where(from_own, signal, rng.choice(shared, size=n, p=weights))
            words = [_word(t) for t in toks.tolist()]
            if profile.decoration > 0:
                for pos in np.flatnonzero(rng.random(n) < profile.decoration).tolist():
                    words[pos] += " " + _DECOR[rng.integers(len(_DECOR))]
            docs.append(RawDocument(" ".join(words), c + 1))
    return docs
