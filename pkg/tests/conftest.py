import pathlib

import pytest

from hnet.ingest import assign_types, parse_csv

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def titanic_table():
    return assign_types(parse_csv(DATA / "titanic.csv"))


@pytest.fixture(scope="session")
def titanic_path():
    return DATA / "titanic.csv"
