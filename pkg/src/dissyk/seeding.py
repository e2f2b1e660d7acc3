"""Deterministic RNG substreams.

Every random draw in the package comes from a numpy Generator keyed by
``SeedSequence(entropy=(base_seed, *keys))``.  The keys are small documented
integers, so a (base seed, realization index, purpose) triple always maps to
the same bit stream and different purposes never share one.

Purpose tags:

==================  =====  ==========================================
tag                 value  used for
==================  =====  ==========================================
HAMILTONIAN_STREAM  1      SYK coupling table J_{i1..iq}
DISSIPATOR_STREAM   2      jump-operator couplings V^a_{i1..ip}
==================  =====  ==========================================
"""

from __future__ import annotations

import numpy as np

HAMILTONIAN_STREAM = 1
DISSIPATOR_STREAM = 2


def substream(base_seed, *keys: int) -> np.random.Generator:
    """Generator for the substream keyed by (base_seed, *keys).

    base_seed may itself be a tuple of ints, e.g. (sweep seed, realization
    index); it is flattened into the entropy sequence.
    """
    if isinstance(base_seed, (tuple, list)):
        entropy = tuple(int(x) for x in base_seed)
    else:
        entropy = (int(base_seed),)
    seq = np.random.SeedSequence(entropy=entropy + tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(seq))


def realization_streams(base_seed: int, realization: int):
    """(Hamiltonian rng, dissipator rng) for one disorder realization.

    The two streams are independent, so the Hamiltonian and dissipator
    disorder are separately reproducible.
    """
    rng_h = substream(base_seed, realization, HAMILTONIAN_STREAM)
    rng_v = substream(base_seed, realization, DISSIPATOR_STREAM)
    return rng_h, rng_v
