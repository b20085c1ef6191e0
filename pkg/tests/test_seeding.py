import numpy as np

from percolab.seeding import splitmix64, trial_seed


def test_known_splitmix_value():
    # reference output of the standard splitmix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_trial_seeds_injective():
    seeds = np.fromiter((trial_seed(42, i) for i in range(10**6)), dtype=np.uint64, count=10**6)
    assert np.unique(seeds).size == seeds.size


def test_masters_differ():
    assert trial_seed(1, 0) != trial_seed(2, 0)
    assert trial_seed(7, 3) == trial_seed(7, 3)
