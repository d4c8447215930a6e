import itertools

import numpy as np
import pytest

from ampsup import geometry
from ampsup.lattice import majorant
from ampsup.order import default_order


@pytest.fixture(scope="session")
def order():
    return default_order()


def box_scan(order, n, z, cosh_cap):
    """Brute-force oracle: every integer vector in the bounding box of the ellipsoid.

    Candidates are filtered by the exact norm and by the distance computed
    from the Mobius action, not from the quadratic form.
    """
    form = majorant(order, z)
    radius = 2 * n * cosh_cap * (1 + 1e-9)
    half = np.floor(np.sqrt(radius * np.diag(np.linalg.inv(form.gram)))).astype(int)
    tables = order.tables
    found = []
    c3_range = range(-half[3], half[3] + 1)
    grids = np.stack(
        np.meshgrid(*(np.arange(-h, h + 1) for h in half[:3]), indexing="ij"), axis=-1
    ).reshape(-1, 3)
    for c3 in c3_range:
        cand = np.column_stack([grids, np.full(len(grids), c3)]).astype(np.int64)
        cand = cand[tables.norm(cand) == n]
        if not len(cand):
            continue
        mats = np.einsum("mi,iab->mab", cand.astype(float), order.real_basis)
        cd = geometry.cosh_dist(z, geometry.mobius(mats, z))
        found.append(cand[cd <= cosh_cap * (1 + 1e-9)])
    out = np.concatenate(found) if found else np.zeros((0, 4), dtype=np.int64)
    return sorted(map(tuple, out.tolist()))


@pytest.fixture(scope="session")
def naive_ball():
    return box_scan
