import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from typeforge.terms import EPS, mk, var

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SIG = {"g": 1, "h": 1, "p": 2}


def ground_terms(max_depth: int = 3):
    def extend(children):
        return st.one_of(
            st.builds(lambda a: mk("g", [a]), children),
            st.builds(lambda a: mk("h", [a]), children),
            st.builds(lambda a, b: mk("p", [a, b]), children, children),
        )

    return st.recursive(st.just(EPS), extend, max_leaves=2 ** max_depth)


@st.composite
def linear_patterns(draw, max_depth: int = 2, prefix: str = "x"):
    """Patterns with pairwise distinct variables."""
    counter = iter(range(1, 100))

    def build(depth):
        choice = draw(st.integers(0, 4 if depth < max_depth else 1))
        if choice == 0:
            return var(f"{prefix}{next(counter)}")
        if choice == 1:
            return EPS
        if choice == 2:
            return mk("g", [build(depth + 1)])
        if choice == 3:
            return mk("h", [build(depth + 1)])
        return mk("p", [build(depth + 1), build(depth + 1)])

    return build(0)
