import csv
import pathlib

import numpy as np
import pytest

from dorkit.core import BlankCard, CriterionHierarchy, PerformanceTable, PreferenceStructure

DATA = pathlib.Path(__file__).parent / "data"

REGIONS = [
    "Piedmont", "Aosta Valley", "Liguria", "Lombardy", "Trentino-South Tyrol",
    "Veneto", "Friuli-Venezia Giulia", "Emilia-Romagna", "Tuscany", "Umbria",
    "Marche", "Lazio", "Abruzzo", "Molise", "Campania", "Apulia", "Basilicata",
    "Calabria", "Sicily", "Sardinia",
]


# -- four-region didactic problem ------------------------------------------

@pytest.fixture(scope="session")
def four_regions():
    hierarchy = CriterionHierarchy.flat(["g1", "g2", "g3"])
    table = PerformanceTable(
        ["R1", "R2", "R3", "R4"],
        ["g1", "g2", "g3"],
        [[90, 100, 80], [100, 70, 40], [30, 50, 60], [20, 40, 40]],
        hierarchy,
    )
    prefs = PreferenceStructure(
        "0",
        [["R4"], ["R3"], ["R2"], ["R1"]],
        [BlankCard.exact(5), BlankCard.exact(2), BlankCard.exact(5), BlankCard.exact(2)],
    )
    return hierarchy, table, prefs


# -- two-criterion toy with a zero-value blank card ------------------------

@pytest.fixture(scope="session")
def ga_toy():
    hierarchy = CriterionHierarchy.flat(["g1", "g2"])
    table = PerformanceTable(
        ["a", "b", "c"], ["g1", "g2"],
        [[0.3, 0.7], [0.4, 0.6], [0.8, 1.0]], hierarchy,
    )
    prefs = PreferenceStructure(
        "0", [["b"], ["a"]], [BlankCard.exact(69), BlankCard.exact(29)],
    )
    return hierarchy, table, prefs


# -- twenty Italian regions on a three-macro hierarchy ---------------------

@pytest.fixture(scope="session")
def grins_hierarchy():
    nodes = [("0", None, None)]
    for macro in ("g1", "g2", "g3"):
        nodes.append((macro, "0", None))
        for i in (1, 2, 3):
            nodes.append((f"{macro}{i}", macro, "increasing"))
    from dorkit.core import build_hierarchy

    return build_hierarchy(nodes)


@pytest.fixture(scope="session")
def grins_table(grins_hierarchy):
    text = (DATA / "grins_normalized.csv").read_text()
    return PerformanceTable.from_csv(text, grins_hierarchy)


@pytest.fixture(scope="session")
def smart_prefs():
    """Reference ranking on the smart-specialization macro-criterion."""
    return PreferenceStructure(
        "g3",
        [["Molise"], ["Liguria"], ["Marche"], ["Friuli-Venezia Giulia"], ["Veneto"]],
        [BlankCard.exact(36), BlankCard.exact(5), BlankCard.exact(5),
         BlankCard.exact(6), BlankCard.exact(8)],
    )


def _imprecise(node, rows):
    levels = [[r] for r, _ in rows]
    cards = [c for _, c in rows]
    return PreferenceStructure(node, levels, cards)


@pytest.fixture(scope="session")
def imprecise_mchp_prefs():
    """Interval and half-open card information on the root and all three
    macro-criteria (worst level first)."""
    B, C, D = BlankCard.between, BlankCard.at_least, BlankCard.at_most
    return {
        "0": _imprecise("0", [
            ("Molise", B(40, 50)), ("Liguria", D(5)), ("Marche", B(1, 6)),
            ("Friuli-Venezia Giulia", C(7)), ("Veneto", B(1, 7)),
        ]),
        "g1": _imprecise("g1", [
            ("Liguria", B(9, 16)), ("Molise", D(5)), ("Marche", B(1, 3)),
            ("Friuli-Venezia Giulia", D(4)), ("Veneto", B(1, 6)),
        ]),
        "g2": _imprecise("g2", [
            ("Molise", B(10, 20)), ("Liguria", B(1, 6)), ("Marche", D(5)),
            ("Veneto", B(2, 7)), ("Friuli-Venezia Giulia", B(1, 5)),
        ]),
        "g3": _imprecise("g3", [
            ("Molise", B(10, 18)), ("Liguria", D(7)), ("Marche", B(2, 5)),
            ("Friuli-Venezia Giulia", C(3)), ("Veneto", B(1, 6)),
        ]),
    }


def load_matrix_csv(name):
    with open(DATA / name) as fh:
        rows = list(csv.reader(fh))
    header = rows[0][1:]
    ids = [r[0] for r in rows[1:]]
    M = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    return ids, header, M


@pytest.fixture(scope="session")
def ror_tables():
    ids, _, P = load_matrix_csv("ror_possible_g3.csv")
    _, _, N = load_matrix_csv("ror_necessary_g3.csv")
    return ids, P.astype(bool), N.astype(bool)


@pytest.fixture(scope="session")
def rai_table():
    ids, _, R = load_matrix_csv("rai_g3.csv")
    return ids, R
