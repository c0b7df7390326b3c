"""Eigensystems and matrix helpers on the closed-form transition matrices."""

import math

import numpy as np
import pytest

from multiport.device import grover_coin, symmetric_unitary, triport_unitary
from multiport.errors import SpecError
from multiport.matrices import Matrix, eigensystem_small


def _pairs_for(pairs, value, tol=1e-9):
    return [v for lam, v in pairs if abs(lam - value) < tol]


def test_triport_unitary_eigensystem():
    u = triport_unitary("float")
    pairs = eigensystem_small(u)
    plus = _pairs_for(pairs, 1j)
    minus = _pairs_for(pairs, -1j)
    assert len(plus) == 1 and len(minus) == 2
    uniform = np.ones(3) / math.sqrt(3)
    overlap = abs(np.vdot(uniform, np.array(plus[0].as_complex_list())))
    assert overlap == pytest.approx(1.0, abs=1e-12)
    # the -i eigenspace is orthonormal and orthogonal to the uniform vector
    v1, v2 = (np.array(v.as_complex_list()) for v in minus)
    assert abs(np.vdot(v1, v2)) < 1e-10
    assert np.vdot(uniform, v1) == pytest.approx(0, abs=1e-10)
    assert np.vdot(uniform, v2) == pytest.approx(0, abs=1e-10)


def test_identity_eigensystem():
    pairs = eigensystem_small(Matrix.identity(3))
    assert len(pairs) == 3
    assert all(abs(lam - 1) < 1e-12 for lam, _v in pairs)


def test_symmetric_family_at_zero_phase_eigenvalues():
    # V(0, 0) is the canonical matrix scaled by i: the uniform vector gets
    # eigenvalue -1 and the two difference vectors get +1.
    m = symmetric_unitary(0.0, 0.0)
    pairs = eigensystem_small(m)
    values = sorted(round(complex(lam).real, 9) for lam, _v in pairs)
    assert values == [-1.0, 1.0, 1.0]
    minus = _pairs_for(pairs, -1)
    uniform = np.ones(3) / math.sqrt(3)
    assert abs(np.vdot(uniform, np.array(minus[0].as_complex_list()))) == pytest.approx(
        1.0, abs=1e-12
    )
    align = triport_unitary("float").scaled(1j)
    assert m.max_abs_dev(align) < 1e-15


def test_dimension_cap():
    with pytest.raises(SpecError):
        eigensystem_small(Matrix.identity(9))


def test_unitarity_helpers():
    assert triport_unitary("float").is_unitary(1e-12)
    assert grover_coin(5).is_unitary(1e-12)
    bad = Matrix([[1, 0, 0], [0, 1, 0], [0, 0, 0.5]])
    assert not bad.is_unitary(1e-12)
    assert bad.unitarity_dev() == pytest.approx(0.75)


def test_matmul_and_dagger_exact():
    u = triport_unitary("exact")
    assert (u @ u.dagger()) == Matrix.identity(3, "exact")
