"""Shared fixtures: parameter draws used across the test suite."""

import cmath
import math

import numpy as np
import pytest

from sixvertex.lattice import ModelParams


def unimodular_eta(n_sites, seed, period=None):
    """Random unimodular inhomogeneities with unit product, in site order."""
    rng = np.random.default_rng(seed)
    if period is None:
        phases = rng.uniform(-0.4, 0.4, size=n_sites)
    else:
        cell = rng.uniform(-0.4, 0.4, size=period)
        phases = np.tile(cell, n_sites // period)
    eta = np.exp(1j * np.pi * phases)
    eta /= cmath.exp(cmath.log(complex(np.prod(eta))) / n_sites)
    return tuple(eta)


def generic_params(n_sites=4, seed=11, gamma=None, k=0.113, period=None):
    """A generic inhomogeneous parameter set away from degenerations."""
    gamma = math.pi / 5 if gamma is None else gamma
    eta_sites = unimodular_eta(n_sites, seed, period=period)
    return ModelParams.from_angles(n_sites, gamma, k, eta_sites=eta_sites,
                                   r=period)


@pytest.fixture
def params4():
    return generic_params(4, seed=11)


@pytest.fixture
def homog6():
    return ModelParams.from_angles(6, math.pi / 5, 0.07)
