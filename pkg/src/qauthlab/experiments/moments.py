"""Monte-Carlo check of fourth-order Haar moments against the closed form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qlinalg import haar_fourth_moment, haar_random_unitaries


@dataclass(frozen=True)
class MomentCheck:
    d: int
    pattern: tuple[int, ...]
    estimate: complex
    exact: float
    std_error: float

    @property
    def deviation_in_sigmas(self) -> float:
        if self.std_error == 0.0:
            return 0.0 if abs(self.estimate - self.exact) == 0.0 else np.inf
        return abs(self.estimate - self.exact) / self.std_error


def random_index_patterns(d: int, count: int, rng: np.random.Generator) -> list[tuple[int, ...]]:
    """Index patterns ``(a, b, i, j, a2, b2, i2, j2)``.

    Uniformly random patterns almost always have moment zero, so three in
    four patterns pair the conjugated indices with the plain ones through a
    random permutation of rows and of columns; the rest are uniform.
    """
    out = []
    for _ in range(count):
        a, b, i, j = (int(x) for x in rng.integers(0, d, size=4))
        if rng.random() < 0.25:
            a2, b2, i2, j2 = (int(x) for x in rng.integers(0, d, size=4))
        else:
            a2, i2 = (a, i) if rng.random() < 0.5 else (i, a)
            b2, j2 = (b, j) if rng.random() < 0.5 else (j, b)
        out.append((a, b, i, j, a2, b2, i2, j2))
    return out


def haar_moment_checks(
    d: int, patterns, samples: int, rng: np.random.Generator, chunk: int = 20000
) -> list[MomentCheck]:
    """Estimate each pattern's moment from one shared set of Haar samples.

    The standard error is ``sqrt(E|X - mean|^2 / n)`` of the complex sample.
    """
    patterns = [tuple(p) for p in patterns]
    sums = np.zeros(len(patterns), dtype=complex)
    sq = np.zeros(len(patterns))
    values_all = []
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        u = haar_random_unitaries(d, n, rng)
        cols = []
        for a, b, i, j, a2, b2, i2, j2 in patterns:
            cols.append(u[:, a, b] * u[:, i, j] * np.conj(u[:, a2, b2]) * np.conj(u[:, i2, j2]))
        values_all.append(np.stack(cols, axis=1))
        done += n
    values = np.concatenate(values_all, axis=0)
    mean = values.mean(axis=0)
    var = np.mean(np.abs(values - mean[None]) ** 2, axis=0)
    checks = []
    for p, m, v in zip(patterns, mean, var):
        checks.append(MomentCheck(d, p, complex(m), haar_fourth_moment(d, *p), float(np.sqrt(v / samples))))
    return checks
