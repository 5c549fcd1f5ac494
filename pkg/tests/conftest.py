import numpy as np
import pytest

from amucd import DictionaryElement, KernelCombination, SpaceModel, TaylorPolynomial

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def hardy():
    return SpaceModel.hardy()


@pytest.fixture
def pw():
    return SpaceModel.paley_wiener(1.0)


def random_disc_point(rng, r_max=0.85):
    return r_max * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())


def random_elements(rng, n, point=random_disc_point, max_order=2, repeat_prob=0.35):
    """Random element list obeying the multiplicity rule."""
    elements, centers = [], []
    while len(elements) < n:
        if centers and rng.random() < repeat_prob:
            c = centers[rng.integers(len(centers))]
        else:
            c = point(rng)
            centers.append(c)
        m = sum(1 for e in elements if e.center == c)
        if m <= max_order:
            elements.append(DictionaryElement(c, m))
    return elements


def random_taylor(rng, space, max_degree=6):
    deg = int(rng.integers(0, max_degree + 1))
    return TaylorPolynomial(space, rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))


def random_kernels(rng, space, n_terms=3, point=random_disc_point, max_order=0):
    terms = []
    for _ in range(n_terms):
        e = DictionaryElement(point(rng), int(rng.integers(0, max_order + 1)))
        terms.append((e, complex(rng.normal(), rng.normal())))
    return KernelCombination(space, tuple(terms))
