"""Shared fixtures: packaged data files and the calibrated defaults."""

from importlib.resources import files

import pytest

from padbench.prediction import Scenario, load_scenario_file
from padbench.usersim import Params, load_params


def data_file(name: str) -> str:
    return str(files("padbench").joinpath("data").joinpath(name))


def trace_file(name: str) -> str:
    return str(files("padbench").joinpath("data").joinpath("traces").joinpath(name))


@pytest.fixture(scope="session")
def default_params() -> Params:
    return load_params(data_file("default_params.json"))


@pytest.fixture(scope="session")
def email_scenario() -> Scenario:
    return load_scenario_file(data_file("email_mockup.json"))
