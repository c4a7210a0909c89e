import pytest

from app.exceptions import UnknownInstanceError
from app.registry import (
    REGISTRY,
    best_known_registry,
    default_history_length,
    find_instance,
    get_instance,
    instance_info,
    published_deviation,
)
from app.schemas import ProblemKind, StrategyKind


@pytest.mark.parametrize("name, best_known", [
    ("Pr1002", 259045),
    ("Lipa80b", 7763962),
    ("Esc128", 64),
    ("U1817", 57201),
])
def test_best_known_values(name, best_known):
    assert best_known_registry(name) == best_known


def test_lookup_ignores_case_and_extension():
    assert find_instance("pr1002.tsp").name == "Pr1002"
    assert find_instance("TAI80A.dat").kind is ProblemKind.QAP


def test_registry_covers_both_tables():
    kinds = [entry.kind for entry in REGISTRY.values()]
    assert kinds.count(ProblemKind.TSP) == 23
    assert kinds.count(ProblemKind.QAP) == 24


def test_published_cutoffs():
    assert get_instance("U1817").cutoff_seconds == 290
    assert get_instance("Pr1002").cutoff_seconds == 120
    assert get_instance("Lipa80b").cutoff_seconds == 26


def test_unknown_name_is_absent_or_an_error():
    assert best_known_registry("att48") is None
    with pytest.raises(UnknownInstanceError, match="att48"):
        get_instance("att48")


def test_default_history_lengths():
    assert default_history_length(StrategyKind.DLAS, ProblemKind.TSP) == 5
    assert default_history_length(StrategyKind.DLAS, ProblemKind.QAP) == 10
    assert default_history_length(StrategyKind.LAHC, ProblemKind.TSP) == 50000
    assert default_history_length(StrategyKind.SCHC, ProblemKind.QAP) == 50000


def test_published_deviations_per_strategy():
    entry = get_instance("Lipa80b")
    assert published_deviation(entry, StrategyKind.LAHC) == 39769
    assert published_deviation(entry, StrategyKind.SCHC) == 190699
    assert published_deviation(entry, StrategyKind.DLAS) == 0
    assert published_deviation(entry, StrategyKind.HC) is None


def test_instance_info_carries_published_deviations():
    info = instance_info(get_instance("Pr1002"))
    assert info.published_deviation == {"lahc": 6265, "schc": 6552, "dlas": 4795}
