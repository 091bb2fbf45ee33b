import random

import pytest

import reference


@pytest.fixture
def pair_A():
    return reference.PAIR_A


@pytest.fixture
def pair_B():
    return reference.PAIR_B


@pytest.fixture
def B3():
    return reference.B3


@pytest.fixture
def rng():
    return random.Random(20240229)


@pytest.fixture
def write_matrix(tmp_path):
    """Write a matrix file in the text format and return its path"""
    from utils import format_matrix

    def write(name, matrix):
        path = tmp_path / name
        path.write_text(format_matrix(matrix), encoding='utf-8')
        return str(path)

    return write
