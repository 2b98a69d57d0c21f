import numpy as np
import pytest

from mphp.grouping import Grouping
from mphp.numerics import hermitian_part


def random_psd(rng, dim, dof=None, trace=None):
    """Random PSD matrix X X^H, optionally trace-normalized."""
    dof = dim if dof is None else dof
    x = (rng.standard_normal((dim, dof)) + 1j * rng.standard_normal((dim, dof))) / np.sqrt(2.0)
    out = hermitian_part(x @ x.conj().T)
    if trace is not None:
        out *= trace / np.real(np.trace(out))
    return out


def random_hermitian(rng, dim):
    x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return hermitian_part(x)


def make_grouping(correlations, assignments):
    """Build a Grouping directly from per-user correlations and group labels."""
    assignments = np.asarray(assignments, dtype=int)
    n_groups = int(assignments.max()) + 1
    members = [np.where(assignments == g)[0] for g in range(n_groups)]
    offsets = np.concatenate([[0], np.cumsum([len(m) for m in members])])
    rf_chains = [np.arange(offsets[g], offsets[g + 1]) for g in range(n_groups)]
    group_correlations = [
        sum(correlations[int(k)] for k in members[g]) / len(members[g]) for g in range(n_groups)
    ]
    return Grouping(
        assignments=assignments,
        members=members,
        rf_chains=rf_chains,
        group_correlations=group_correlations,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
