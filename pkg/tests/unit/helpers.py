"""Testing helpers"""

import numpy as np
import pyrecency.chain as pch
import pyrecency.oracle as por


def make_ensemble(values, t: int = 0, birth=None) -> pch.Ensemble:
    """Create a scalar ensemble from a list of values"""
    values = np.asarray(values, dtype=float)
    if birth is None:
        birth = np.zeros(len(values), dtype=np.int64)
    return pch.Ensemble(values.reshape(-1, 1), np.asarray(birth), t=t)


def labelled_history(banks: int, size: int) -> por.HistoryBank:
    """History whose bank j holds `size` copies of the value j"""
    return por.HistoryBank([np.full((size, 1), float(step)) for step in range(banks)])


def value_counts(samples) -> dict:
    """Map each distinct scalar value to the number of samples holding it"""
    values, counts = np.unique(np.asarray(samples)[:, 0], return_counts=True)
    return {float(value): int(count) for value, count in zip(values, counts)}
