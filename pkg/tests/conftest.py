from __future__ import annotations

import pytest

from bvfrob import corpus
from bvfrob.degeneration import TransferCalculus
from bvfrob.frobenius import build_frobenius
from bvfrob.qme import solve_qme
from bvfrob.retract import build_retract

POSITIVE = list(corpus.POSITIVE)
NEGATIVE = list(corpus.NEGATIVE)
ALL = list(corpus.names())

# instances whose pipeline completes through the Frobenius stage
COMPLETED = POSITIVE


@pytest.fixture(scope="session")
def loaded():
    return {name: corpus.load(name) for name in ALL}


@pytest.fixture(scope="session")
def retract_of(loaded):
    cache: dict = {}

    def get(name: str):
        if name not in cache:
            A, ip, _ = loaded[name]
            cache[name] = build_retract(A, ip)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def transfer_of(loaded, retract_of):
    cache: dict = {}

    def get(name: str):
        if name not in cache:
            A, _, _ = loaded[name]
            cache[name] = TransferCalculus(A, retract_of(name)[0])
        return cache[name]

    return get


@pytest.fixture(scope="session")
def qme_of(loaded, retract_of, transfer_of):
    cache: dict = {}

    def get(name: str, tau_order: int = 4, hbar_order: int = 6):
        key = (name, tau_order, hbar_order)
        if key not in cache:
            A, _, _ = loaded[name]
            R, _ = retract_of(name)
            cache[key] = solve_qme(A, R, tau_order, transfer_of(name),
                                   hbar_order=hbar_order)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def frobenius_of(loaded, retract_of, transfer_of, qme_of):
    cache: dict = {}

    def get(name: str):
        if name not in cache:
            A, _, _ = loaded[name]
            R, _ = retract_of(name)
            cache[name] = build_frobenius(A, R, qme_of(name),
                                          transfer_of(name))
        return cache[name]

    return get
