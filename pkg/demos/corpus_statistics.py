"""Descriptive statistics of a labeled corpus against a seed lexicon.

Uses small inline data to show the report layout: class distributions,
labels-per-lemma histogram, emotion-words-per-text histogram, and the
top-frequency emotion words.
"""

import json

from emolex import EmotionSet, SeedLexicon, corpus_lexicon_stats

SEED_ENTRIES = {
    "love": [0, 0, 0, 1, 0, 0],
    "hate": [1, 1, 0, 0, 0, 0],
    "storm": [1, 1, 1, 0, 1, 1],
    "gloom": [0, 0, 0, 0, 1, 0],
    "shock": [0, 0, 1, 0, 1, 1],
}

CORPUS = [
    ("joy", "love conquers all they say".split()),
    ("anger", "hate hate and more storm".split()),
    ("sadness", "gloom settles over the town".split()),
    ("fear", "a shock ran through everyone".split()),
    ("joy", "nothing emotional in this one".split()),
]


def main():
    emotions = EmotionSet()
    seed = SeedLexicon(SEED_ENTRIES, emotions)
    stats = corpus_lexicon_stats(CORPUS, seed)
    print(json.dumps(stats, indent=2))


if __name__ == "__main__":
    main()
