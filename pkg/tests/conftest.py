from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import pytest

from exoseries.exotic import ExoticSeries
from exoseries.laurent import LaurentSeries
from exoseries.scalars import ExactComplex

CORPUS = Path(__file__).resolve().parents[1] / "src" / "exoseries" / "corpus"

ONE = ExactComplex(1)
I = ExactComplex(0, 1)


def ec(re, im=0) -> ExactComplex:
    return ExactComplex(Fraction(re), Fraction(im))


def random_scalar(rng: random.Random, span: int = 6) -> ExactComplex:
    return ExactComplex(
        Fraction(rng.randint(-span, span), rng.randint(1, 4)),
        Fraction(rng.randint(-span, span), rng.randint(1, 4)))


def random_laurent(rng: random.Random, lo_min: int = -3, hi_max: int = 6,
                   trunc: int | None = None) -> LaurentSeries:
    lo = rng.randint(lo_min, 0)
    hi = rng.randint(lo, hi_max)
    terms = {e: random_scalar(rng) for e in range(lo, hi + 1)
             if rng.random() < 0.8}
    return LaurentSeries.from_dict(terms, trunc_order=trunc)


def random_exotic(rng: random.Random, eta=Fraction(1), max_grade: int = 4,
                  trunc_k: int | None = None) -> ExoticSeries:
    grades = {}
    for k in range(0, max_grade + 1):
        if rng.random() < 0.75:
            grades[k] = random_laurent(rng, -2, 3)
    return ExoticSeries(grades, eta, trunc_k)


def riccati_phi(k_max: int = 32, trunc_k: int | None = 32) -> ExoticSeries:
    grades = {k: LaurentSeries.monomial(ONE, -k) for k in range(k_max + 1)}
    return ExoticSeries(grades, Fraction(1), trunc_k)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
