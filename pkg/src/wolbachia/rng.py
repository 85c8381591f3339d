"""Counter-based noise streams for reproducible path ensembles.

Each simulated path owns an independent stream identified by the pair
(master_seed, path_index), implemented as a Philox counter generator
keyed by exactly that pair.  Streams for different indices never
overlap, path i's stream never depends on how many other paths run or
in what order, and regenerating a stream replays the identical normal
sequence.  That makes ensembles reproducible under any parallel
schedule: results depend only on (master_seed, path_index).

The k-th standard normal pair of a stream is, by construction, the
(2k, 2k+1)-th draw of numpy's ziggurat sampler on that Philox stream,
whether pairs are drawn one at a time, in blocks, or consumed inside a
compiled kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class NoiseStream:
    """Gaussian stream for one path, keyed by (master_seed, path_index)."""

    master_seed: int
    path_index: int
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.master_seed < 0 or self.path_index < 0:
            raise ValueError("master_seed and path_index must be >= 0")
        self._gen = self.fresh_generator()

    def fresh_generator(self) -> np.random.Generator:
        """New generator rewound to the start of this stream."""
        return np.random.Generator(np.random.Philox(key=[self.master_seed, self.path_index]))

    def gaussian_pair(self) -> tuple[float, float]:
        """Next pair of independent standard normals."""
        z = self._gen.standard_normal(2)
        return float(z[0]), float(z[1])

    def gaussian_block(self, n_pairs: int) -> np.ndarray:
        """Next n_pairs pairs as an (n_pairs, 2) array, same draw order
        as repeated gaussian_pair calls."""
        if n_pairs < 0:
            raise ValueError("n_pairs must be >= 0")
        return self._gen.standard_normal((n_pairs, 2))

    def reset(self) -> None:
        """Rewind to the start of the stream."""
        self._gen = self.fresh_generator()


def path_generator(master_seed: int, path_index: int) -> np.random.Generator:
    """Rewound generator for one path; see NoiseStream."""
    return NoiseStream(master_seed, path_index).fresh_generator()
