"""Random query trees over the fixture vocabulary, shared by property tests."""

import random

from hypothesis import strategies as st

from crossmedia.query import And, Not, Or, Phrase, Term, UnsupportedQuery, normalize, to_dnf

WORDS = ["fire", "flood", "storm", "berlin", "hamburg", "drill", "help", "police", "rain",
         "house", "road", "power", "warning", "siegen", "feuer", "hochwasser", "station", "river"]
PHRASES = ["house fire", "fire drill", "flood warning", "storm damage", "power outage",
           "the road", "heavy rain", "fire station", "in berlin", "we need help"]


def _literal(rng: random.Random):
    lit = Phrase(rng.choice(PHRASES)) if rng.random() < 0.2 else Term(rng.choice(WORDS))
    return Not(lit) if rng.random() < 0.25 else lit


def random_tree(rng: random.Random, n_literals: int):
    if n_literals == 1:
        return _literal(rng)
    left = rng.randint(1, n_literals - 1)
    kind = And if rng.random() < 0.5 else Or
    node = kind((random_tree(rng, left), random_tree(rng, n_literals - left)))
    return Not(node) if rng.random() < 0.15 else node


def random_query(rng: random.Random, max_literals: int = 6):
    """A normalized tree with a supported DNF (at least one positive per branch)."""
    while True:
        node = normalize(random_tree(rng, rng.randint(1, max_literals)))
        try:
            to_dnf(node)
        except UnsupportedQuery:
            continue
        return node


@st.composite
def query_trees(draw, max_literals: int = 6):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_query(random.Random(seed), max_literals)


@st.composite
def any_trees(draw, max_literals: int = 6):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    return normalize(random_tree(rng, rng.randint(1, max_literals)))


texts = st.lists(st.sampled_from(WORDS + ["the", "a", "Fire!", "#fire", "firefighter", "HOUSE"]),
                 max_size=12).map(" ".join)
