import numpy as np
import pytest

from hybridyield.data import CropRecord, Dataset

# Table-I-shaped counts: crop -> (train rows in 1999-2004, test rows in 2005-2006)
TABLE1_COUNTS = {
    "wheat": (449, 59),
    "barley": (42, 45),
    "potato": (132, 63),
    "sugar_beet": (108, 48),
}


def make_record(crop, year, rng):
    at5 = float(rng.uniform(25.0, 42.0))
    at6 = at5 - float(rng.uniform(3.0, 10.0))
    at7 = at6 - float(rng.uniform(3.0, 10.0))
    return CropRecord(
        crop=crop,
        year=year,
        at1=float(rng.uniform(5.0, 400.0)),
        at2=float(rng.uniform(200.0, 900.0)),
        at3=float(rng.uniform(0.0, 350.0)),
        at4=float(rng.uniform(1200.0, 2400.0)),
        at5=at5,
        at6=at6,
        at7=at7,
        yield_t_ha=float(rng.uniform(1.0, 40.0)),
    )


@pytest.fixture(scope="session")
def table1_dataset():
    """Synthetic dataset whose per-crop, per-period counts match Table I."""
    rng = np.random.default_rng(1234)
    records = []
    for crop, (n_train, n_test) in TABLE1_COUNTS.items():
        for i in range(n_train):
            records.append(make_record(crop, 1999 + i % 6, rng))
        for i in range(n_test):
            records.append(make_record(crop, 2005 + i % 2, rng))
    return Dataset(tuple(records))
