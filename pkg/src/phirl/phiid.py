"""Causal-emergence engine: spectral bipartition, coarse-graining, the
16-atom integrated-information decomposition under double-MMI redundancy,
and sliding-window emergence trajectories.

For a 2-source / 2-target system the decomposition lattice is the product of
two copies of the partial order {1}{2} < {1}, {2} < {12}. With the minimum
mutual information (MMI) redundancy, the cumulative value of a lattice node
(a, b) is the minimum of I(X_i; Y_j) over the singleton/whole members of a
and b; atoms are recovered by Moebius inversion over the product order.
Source/target labels follow the r/x/y/s convention: r = {1}{2}, x = {1},
y = {2}, s = {12}, so atom "stx" reads "{12} -> {1}".
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussinfo import MIMatrix, gaussian_mi_blocks, lag1_mi_matrix
from .preprocess import preprocess
from .trajdata import EpisodeRecord, LatentTrajectory, median_exact

LATTICE_ORDER = ("r", "x", "y", "s")
BELOW = {"r": ("r",), "x": ("r", "x"), "y": ("r", "y"), "s": ("r", "x", "y", "s")}
# singleton/whole members over which the MMI minimum runs
MEMBERS = {"r": ("x", "y"), "x": ("x",), "y": ("y",), "s": ("s",)}
ATOM_NAMES = tuple(f"{a}t{b}" for a in LATTICE_ORDER for b in LATTICE_ORDER)

_SRC_IDX = {"x": (0,), "y": (1,), "s": (0, 1)}
_TGT_IDX = {"x": (2,), "y": (3,), "s": (2, 3)}

_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class Bipartition:
    """Two-part split of the unit set, with the algebraic connectivity of the
    MI-weighted graph it came from."""

    side_a: tuple
    side_b: tuple
    fiedler_value: float

    def __post_init__(self):
        a = tuple(sorted(int(i) for i in self.side_a))
        b = tuple(sorted(int(i) for i in self.side_b))
        if not a or not b:
            raise ValueError("both sides of a bipartition must be non-empty")
        if set(a) & set(b):
            raise ValueError("bipartition sides overlap")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)


@dataclass(frozen=True)
class PhiAtoms:
    """The 16 decomposition atoms plus the derived emergence quantities."""

    atoms: dict
    phi_r: float
    downward_causation: float
    causal_decoupling: float
    residual: float

    def __post_init__(self):
        if set(self.atoms) != set(ATOM_NAMES):
            raise ValueError("atoms must carry exactly the 16 lattice nodes")
        if self.phi_r < -1e-9:
            raise ValueError(f"phi_r = {self.phi_r} below -1e-9")
        if self.atoms["rtr"] < -1e-9:
            raise ValueError(f"double redundancy atom {self.atoms['rtr']} below -1e-9")
        if self.residual > 1e-9:
            raise ValueError(f"Moebius inversion residual {self.residual} above 1e-9")

    @property
    def total(self) -> float:
        return float(sum(self.atoms.values()))


@dataclass(frozen=True)
class EmergenceTrajectory:
    """Windowed emergence values over one episode."""

    values: tuple
    window: int
    stride: int
    median: float

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.median != median_exact(self.values):
            raise ValueError("median does not match values")


def fiedler_bipartition(mi) -> Bipartition:
    """Bisect the system with the Fiedler vector of the Laplacian of the
    symmetrised, zero-diagonal MI weight graph.

    Components >= 0 go to side_a, strictly negative to side_b; the
    eigenvector sign is fixed so its lowest-indexed nonzero component is
    positive. If a side comes out empty the split falls back to the
    component median.
    """
    w = mi.values if isinstance(mi, MIMatrix) else np.asarray(mi, dtype=np.float64)
    n = w.shape[0]
    if n < 2:
        raise ValueError("bipartition needs at least 2 units")
    w = 0.5 * (w + w.T)
    w = w - np.diag(np.diag(w))
    if np.all(w == 0.0):
        raise ValueError("all-zero weight matrix: no structure to bisect")
    lap = np.diag(w.sum(axis=1)) - w
    evals, evecs = np.linalg.eigh(lap)
    tol = 1e-12 * max(1.0, float(evals[-1]))
    positive = np.flatnonzero(evals > tol)
    if positive.size == 0:
        raise ValueError("weight graph has no positive Laplacian eigenvalue")
    idx = int(positive[0])
    v = evecs[:, idx].copy()
    nonzero = np.flatnonzero(np.abs(v) > _ZERO_TOL)
    if nonzero.size and v[nonzero[0]] < 0.0:
        v = -v
    side_a = [i for i in range(n) if v[i] > -_ZERO_TOL]
    side_b = [i for i in range(n) if v[i] <= -_ZERO_TOL]
    if not side_a or not side_b:
        order = np.lexsort((np.arange(n), v))
        side_b = sorted(order[: n // 2].tolist())
        side_a = sorted(order[n // 2 :].tolist())
    return Bipartition(tuple(side_a), tuple(side_b), float(evals[idx]))


def exhaustive_min_cut_bipartition(mi) -> Bipartition:
    """Exact minimum ratio-cut bipartition by exhaustive search; exponential
    in n, intended as a verification oracle for small systems."""
    w = mi.values if isinstance(mi, MIMatrix) else np.asarray(mi, dtype=np.float64)
    n = w.shape[0]
    if n < 2:
        raise ValueError("bipartition needs at least 2 units")
    if n > 16:
        raise ValueError("exhaustive search is limited to n <= 16")
    w = 0.5 * (w + w.T)
    w = w - np.diag(np.diag(w))
    best = None
    for mask in range(1, 2 ** (n - 1)):
        a = [i for i in range(n) if mask >> i & 1]
        b = [i for i in range(n) if not mask >> i & 1]
        cut = float(w[np.ix_(a, b)].sum())
        score = cut * (1.0 / len(a) + 1.0 / len(b))
        if best is None or score < best[0]:
            best = (score, a, b)
    _, a, b = best
    if 0 not in a:
        a, b = b, a
    return Bipartition(tuple(a), tuple(b), best[0])


def coarse_grain(traj: LatentTrajectory, part: Bipartition) -> LatentTrajectory:
    """Average units within each side: T x 2 trajectory, column 0 = side_a."""
    covered = set(part.side_a) | set(part.side_b)
    if covered != set(range(traj.n)):
        raise ValueError("bipartition does not cover the trajectory's units")
    v = traj.values
    out = np.column_stack(
        [v[:, list(part.side_a)].mean(axis=1), v[:, list(part.side_b)].mean(axis=1)]
    )
    return LatentTrajectory(out, episode_id=traj.episode_id)


def phiid_atoms_from_cov(cov: np.ndarray) -> PhiAtoms:
    """Decompose from the 4 x 4 covariance of (X1(t), X2(t), X1(t+1), X2(t+1))."""
    cov = np.asarray(cov, dtype=np.float64)
    if cov.shape != (4, 4):
        raise ValueError("expected the 4 x 4 covariance of (X1, X2, Y1, Y2)")
    mi = {}
    for a, src in _SRC_IDX.items():
        for b, tgt in _TGT_IDX.items():
            idx = list(src) + list(tgt)
            mi[(a, b)] = gaussian_mi_blocks(cov[np.ix_(idx, idx)], len(src))
    v = {}
    for a in LATTICE_ORDER:
        for b in LATTICE_ORDER:
            v[(a, b)] = min(
                mi[(i, j)] for i in MEMBERS[a] for j in MEMBERS[b]
            )
    atoms = {}
    for a in LATTICE_ORDER:
        for b in LATTICE_ORDER:
            downset = sum(
                atoms[f"{a2}t{b2}"]
                for a2 in BELOW[a]
                for b2 in BELOW[b]
                if (a2, b2) != (a, b)
            )
            atoms[f"{a}t{b}"] = v[(a, b)] - downset
    residual = 0.0
    for a in LATTICE_ORDER:
        for b in LATTICE_ORDER:
            downsum = sum(atoms[f"{a2}t{b2}"] for a2 in BELOW[a] for b2 in BELOW[b])
            residual = max(residual, abs(downsum - v[(a, b)]))
    downward = atoms["stx"] + atoms["sty"] + atoms["str"]
    decoupling = atoms["sts"]
    return PhiAtoms(
        atoms=atoms,
        phi_r=downward + decoupling,
        downward_causation=downward,
        causal_decoupling=decoupling,
        residual=residual,
    )


def phiid_atoms(pair_traj: LatentTrajectory) -> PhiAtoms:
    """Decompose a T x 2 trajectory from its estimated lag-1 covariance."""
    if pair_traj.n != 2:
        raise ValueError(f"decomposition expects a T x 2 trajectory, got n={pair_traj.n}")
    if pair_traj.T < 32:
        raise ValueError(
            f"decomposition needs T >= 32 for covariance stability, got T={pair_traj.T}"
        )
    v = pair_traj.values
    for j in range(2):
        if np.all(v[:, j] == v[0, j]):
            raise ValueError(f"column {j} is constant")
    z = np.column_stack([v[:-1, 0], v[:-1, 1], v[1:, 0], v[1:, 1]])
    cov = np.cov(z.T, ddof=1)
    return phiid_atoms_from_cov(cov)


def causal_emergence(traj: LatentTrajectory) -> float:
    """Emergence of a preprocessed trajectory: lag-1 MI graph, Fiedler
    bipartition, coarse-grain, decompose, phi_r."""
    mi = lag1_mi_matrix(traj)
    part = fiedler_bipartition(mi)
    pair = coarse_grain(traj, part)
    return phiid_atoms(pair).phi_r


def emergence_trajectory(
    ep: EpisodeRecord, window: int = 100, stride: int = 10
) -> EmergenceTrajectory:
    """Windowed emergence over one episode, preprocessed once up front."""
    if window < 32:
        raise ValueError(f"window must be >= 32, got {window}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    t = ep.latents.T
    if t < window:
        raise ValueError(
            f"episode {ep.latents.episode_id!r} has T={t} < window={window}; "
            "reduce the window"
        )
    traj = preprocess(ep.latents)
    values = []
    for start in range(0, t - window + 1, stride):
        chunk = LatentTrajectory(
            traj.values[start : start + window], episode_id=traj.episode_id
        )
        values.append(causal_emergence(chunk))
    return EmergenceTrajectory(
        tuple(values), window, stride, median_exact(values)
    )
