import os

import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
SAMPLE_CSV = os.path.join(HERE, os.pardir, "data", "sample.csv")


@pytest.fixture(scope="session")
def sample_csv_path():
    return os.path.abspath(SAMPLE_CSV)


@pytest.fixture()
def four_row_labeled():
    """The hand-checked 4-row fixture: one numeric column whose best
    split is `punt_sociales >= 55` with gain exactly 0.5."""
    from helpers import labeled_from

    return labeled_from(
        ["punt_sociales"],
        [[60.0], [55.0], [40.0], [30.0]],
        "ssuu",
    )
