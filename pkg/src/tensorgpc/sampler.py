"""Two-stage adaptive sample selection.

Exploration ranks the Voronoi cells of the current design by their volume in
the unit cube, estimated by Monte Carlo.  Exploitation then picks, among the
Monte Carlo points that fell into a chosen cell, the one where the surrogate
departs most from its first-order Taylor expansion at the cell center.
"""

import csv
import logging
import warnings
from dataclasses import dataclass

import numpy as np

from tensorgpc import _accel
from tensorgpc.errors import EmptyCellError
from tensorgpc.paramspace import STREAM_VORONOI, SampleSet, _open_uniform, make_rng

log = logging.getLogger(__name__)

MC_PER_POINT = 100
MC_CAP = 10**6
_CHUNK = 16384

SAMPLING_LOG_HEADER = ["round", "cell_rank", "cell_center_index", "est_volume", "chosen_gamma"]


def _mc_chunks(M, d, seed, counter):
    # fixed-size chunks from one generator, so the same points can be
    # regenerated later without keeping all of them in memory
    rng = make_rng(seed, STREAM_VORONOI, counter)
    for start in range(0, M, _CHUNK):
        yield start, _open_uniform(rng, min(_CHUNK, M - start), d)


@dataclass
class VoronoiEstimate:
    """Monte Carlo hit counts of the Voronoi cells of ``centers``.

    ``assignments[i]`` is the cell of the ``i``-th Monte Carlo point.  The
    points themselves are regenerated on demand from ``(seed, counter)``.
    """

    counts: np.ndarray
    assignments: np.ndarray
    M: int
    d: int
    seed: int
    counter: int = 0

    @property
    def volumes(self):
        return self.counts / self.M

    def points(self, indices=None):
        """Unit-cube Monte Carlo points, all of them or the given indices (sorted)."""
        if indices is None:
            return np.vstack([c for _, c in _mc_chunks(self.M, self.d, self.seed, self.counter)])
        indices = np.sort(np.asarray(indices, dtype=np.int64))
        out = np.empty((indices.size, self.d))
        pos = 0
        for start, chunk in _mc_chunks(self.M, self.d, self.seed, self.counter):
            stop = start + chunk.shape[0]
            hi = np.searchsorted(indices, stop)
            if hi > pos:
                out[pos:hi] = chunk[indices[pos:hi] - start]
                pos = hi
            if pos == indices.size:
                break
        return out

    def cell_members(self, cell):
        """Monte Carlo indices assigned to ``cell``, in generation order."""
        return np.flatnonzero(self.assignments == cell)


def default_mc_count(n_centers):
    M = MC_PER_POINT * n_centers
    if M > MC_CAP:
        warnings.warn(f"Monte Carlo count {M} capped at {MC_CAP}", RuntimeWarning, stacklevel=2)
        M = MC_CAP
    return M


def estimate_voronoi(centers_unit, M=None, seed=0, counter=0):
    """Assign ``M`` uniform unit-cube points to their nearest center.

    Distances are Euclidean in the unit cube; ties go to the lowest center
    index.  ``M`` defaults to 100 points per center (capped at 10^6).
    """
    centers = np.atleast_2d(np.asarray(centers_unit, dtype=float))
    n, d = centers.shape
    if n < 1:
        raise ValueError("estimate_voronoi needs at least one center")
    if M is None:
        M = default_mc_count(n)
    M = int(M)
    if M < 1:
        raise ValueError("M must be >= 1")
    assign = np.empty(M, dtype=np.int64)
    for start, chunk in _mc_chunks(M, d, seed, counter):
        assign[start:start + chunk.shape[0]] = _accel.nearest_center(chunk, centers)
    counts = np.bincount(assign, minlength=n)
    return VoronoiEstimate(counts=counts, assignments=assign, M=M, d=d, seed=int(seed),
                           counter=int(counter))


def nonlinearity(model, xi, a):
    """Distance of the surrogate at ``xi`` from its linearization at ``a``."""
    xi = np.asarray(xi, dtype=float)
    a = np.asarray(a, dtype=float)
    return abs(model.evaluate(xi) - model.evaluate(a) - float(model.gradient(a) @ (xi - a)))


def nonlinearity_batch(model, X, a):
    """:func:`nonlinearity` for every row of ``X`` against one center ``a``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    a = np.asarray(a, dtype=float)
    ya = model.evaluate(a)
    ga = model.gradient(a)
    return np.abs(model.predict(X) - ya - (X - a) @ ga)


@dataclass
class Selection:
    """New design points and one sampling-log row per point."""

    samples: SampleSet
    log_rows: list


def select_next(data, model, space, K, M=None, seed=0, round_index=0, counter=None):
    """Pick up to ``K`` new points, one from each of the largest cells.

    Cells are ranked by estimated volume (ties to the lower index).  Inside
    a cell, the Monte Carlo point with the largest :func:`nonlinearity` with
    respect to the cell center is chosen (ties to the earliest point).
    Empty cells are skipped in favor of the next-ranked ones.  The Monte
    Carlo points come from ``(seed, counter)``; ``counter`` defaults to
    ``round_index``, which is otherwise only written to the log rows.

    Raises
    ------
    EmptyCellError
        If fewer than ``K`` cells received any Monte Carlo points.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    est = estimate_voronoi(data.unit, M, seed, round_index if counter is None else counter)
    order = np.argsort(-est.counts, kind="stable")
    existing = {row.tobytes() for row in data.unit}

    chosen = []
    for rank_pos, cell in enumerate(order):
        if len(chosen) == K:
            break
        if est.counts[cell] == 0:
            log.debug("cell %d has no Monte Carlo hits; skipped", cell)
            continue
        members = est.cell_members(cell)
        cand_unit = est.points(members)
        keep = np.array([row.tobytes() not in existing for row in cand_unit])
        if not keep.any():
            continue
        cand_unit = cand_unit[keep]
        cand_phys = space.to_phys(cand_unit)
        gamma = nonlinearity_batch(model, cand_phys, data.phys[cell])
        best = int(np.argmax(gamma))
        chosen.append((rank_pos + 1, int(cell), float(est.volumes[cell]), float(gamma[best]),
                       cand_unit[best], cand_phys[best]))

    if len(chosen) < K:
        raise EmptyCellError(f"only {len(chosen)} of {K} requested cells have Monte Carlo points")
    unit = np.array([c[4] for c in chosen])
    phys = np.array([c[5] for c in chosen])
    rows = [(int(round_index), c[0], c[1], c[2], c[3]) for c in chosen]
    return Selection(SampleSet(unit, phys), rows)


def write_sampling_log(path, rows, append=False):
    """Write (or append) rows ``round,cell_rank,cell_center_index,est_volume,chosen_gamma``."""
    mode = "a" if append else "w"
    with open(path, mode, newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if not append or fh.tell() == 0:
            w.writerow(SAMPLING_LOG_HEADER)
        for r in rows:
            w.writerow([r[0], r[1], r[2], repr(float(r[3])), repr(float(r[4]))])
