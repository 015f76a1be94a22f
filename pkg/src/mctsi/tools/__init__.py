from .suite import Suite, SuiteResult
from .suites import EdgeSuite, GlobalSuite, Lemma1Suite, LocalSuite, SandwichSuite

SUITE_NAMES = ("edge", "local", "global", "lemma1", "sandwich")


# Factory function to get the verification suite by name
def get_suite(name: str) -> Suite:
    """
    Factory function to create and return the named verification suite.

    Args:
        name (str): One of "edge", "local", "global", "lemma1" or "sandwich"

    Returns:
        Suite: The suite object
    """
    name = name.lower()
    if name == "edge":
        return EdgeSuite()
    elif name == "local":
        return LocalSuite()
    elif name == "global":
        return GlobalSuite()
    elif name == "lemma1":
        return Lemma1Suite()
    elif name == "sandwich":
        return SandwichSuite()
    else:
        raise ValueError(f"Unknown verification suite: {name}")
