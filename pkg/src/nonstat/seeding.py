"""Random-stream derivation.

Every stream is a Philox generator keyed by ``SeedSequence(master,
spawn_key=(index,))``: replication ``r`` of an experiment with master seed
``m`` sees the same numbers however replications are scheduled across
workers.
"""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def replication_rng(master_seed: int, replication: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(replication),))
    return np.random.Generator(np.random.Philox(ss))
