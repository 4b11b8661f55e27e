"""Pocket grid graph and its physicochemical colorings.

Every grid point gets precomputed protein-environment labels so the
Hamiltonian assembly never touches protein atoms again:

* Coulomb potential: sum of charge/distance over protein atoms, with the
  332.0636/dielectric prefactor applied per atom (kcal/(mol*e));
* a Lennard-Jones 8-4 energy vector, one entry per ligand atom type, using
  Lorentz-Berthelot mixing against each protein atom's type;
* hydrogen-bond acceptor potential: number of protein donors that could
  donate to an acceptor placed at the point (distance < 3.5 A and
  donor-H-acceptor angle strictly between 130 and 180 degrees);
* hydrogen-bond donor potential: number of protein acceptors reachable by
  a donor placed at the point. The donor's hydrogen is implicit, so the
  angle condition reduces to a distance window (see hbond_donor_count);
* hydrophobic contact count: hydrophobic protein atoms within 4.5 A.

Edge weights are the complete pairwise distance matrix. Summations run in
ascending protein-atom-id order so results are reproducible bit for bit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import GraphBuildError
from .model import COULOMB_CONSTANT, AtomTypeTable, ComplexInput, ProteinAtom

HBOND_DISTANCE_MAX = 3.5      # donor-acceptor heavy-atom distance gate, Angstrom
HBOND_ANGLE_MIN_DEG = 130.0   # donor-H-acceptor angle window (strict bounds)
HBOND_ANGLE_MAX_DEG = 180.0
VIRTUAL_H_BOND_LENGTH = 1.0   # implicit ligand donor-H bond length, Angstrom
HYDROPHOBIC_DISTANCE_MAX = 4.5
LJ_CONTRIBUTION_CAP = 1e4     # per-atom LJ clamp, keeps clash coefficients finite
MIN_POINT_SEPARATION = 1e-6


@dataclass(frozen=True)
class GridGraph:
    point_ids: list[int]
    positions: np.ndarray      # (n_points, 3)
    dist: np.ndarray           # (n_points, n_points) symmetric, zero diagonal
    coulomb: np.ndarray        # (n_points,)
    lj: np.ndarray             # (n_points, n_types)
    hb_acceptor: np.ndarray    # (n_points,) int
    hb_donor: np.ndarray       # (n_points,) int
    hydrophobic: np.ndarray    # (n_points,) int

    @property
    def n_points(self) -> int:
        return len(self.point_ids)


def _sorted_by_id(protein: list[ProteinAtom]) -> list[ProteinAtom]:
    return sorted(protein, key=lambda a: a.id)


def _distance_to(point: np.ndarray, atom: ProteinAtom) -> float:
    r = float(np.linalg.norm(np.asarray(point, dtype=float) - atom.position))
    if r < MIN_POINT_SEPARATION:
        raise GraphBuildError(
            f"grid point coincides with protein atom {atom.id} (r = {r:.2e} A)"
        )
    return r


def coulomb_potential(grid_point, protein: list[ProteinAtom], dielectric: float) -> float:
    """Electrostatic potential at a grid point, kcal/(mol*e).

    The prefactor is applied per atom before summing, so the potential of a
    protein split into disjoint parts is the sum of the parts' potentials.
    """
    prefactor = COULOMB_CONSTANT / dielectric
    total = 0.0
    for atom in _sorted_by_id(protein):
        total += prefactor * atom.charge / _distance_to(grid_point, atom)
    return total


def lj_vector(grid_point, protein: list[ProteinAtom], table: AtomTypeTable) -> np.ndarray:
    """Lennard-Jones 8-4 energy at a grid point for every ligand atom type.

    Cross parameters use Lorentz-Berthelot mixing: geometric mean for the
    well depth, arithmetic mean for the minimum position. Per-atom
    contributions are clamped to LJ_CONTRIBUTION_CAP before summation so a
    near-clash cannot blow up the coefficient range.
    """
    ordered = _sorted_by_id(protein)
    out = np.zeros(table.n_types, dtype=float)
    if not ordered:
        return out
    r = np.array([_distance_to(grid_point, atom) for atom in ordered])
    eps_k = table.epsilon[[a.type_index for a in ordered]]
    rmin_k = table.r_min[[a.type_index for a in ordered]]
    # (n_types, n_atoms) mixed parameters
    eps_mix = np.sqrt(np.outer(table.epsilon, eps_k))
    rmin_mix = (table.r_min[:, None] + rmin_k[None, :]) / 2.0
    ratio4 = (rmin_mix / r[None, :]) ** 4
    contrib = eps_mix * (ratio4 * ratio4 - 2.0 * ratio4)
    np.minimum(contrib, LJ_CONTRIBUTION_CAP, out=contrib)
    return contrib.sum(axis=1)


def _dha_angle_deg(donor: np.ndarray, hydrogen: np.ndarray, acceptor_point: np.ndarray) -> float:
    """Donor-H-acceptor angle at the hydrogen vertex, degrees."""
    to_donor = donor - hydrogen
    to_acceptor = np.asarray(acceptor_point, dtype=float) - hydrogen
    nd = np.linalg.norm(to_donor)
    na = np.linalg.norm(to_acceptor)
    if nd < 1e-12 or na < 1e-12:
        return float("nan")
    cos_phi = float(np.dot(to_donor, to_acceptor) / (nd * na))
    return math.degrees(math.acos(max(-1.0, min(1.0, cos_phi))))


def hbond_acceptor_count(grid_point, protein: list[ProteinAtom]) -> int:
    """How many protein donors could hydrogen-bond to an acceptor at this point."""
    count = 0
    for atom in _sorted_by_id(protein):
        if not atom.hbond_role.is_donor:
            continue
        if _distance_to(grid_point, atom) >= HBOND_DISTANCE_MAX:
            continue
        if not atom.donor_hydrogens:
            warnings.warn(
                f"donor protein atom {atom.id} has no explicit hydrogens; "
                "it cannot satisfy the angle condition",
                stacklevel=2,
            )
            continue
        for hydrogen in atom.donor_hydrogens:
            phi = _dha_angle_deg(atom.position, hydrogen, grid_point)
            if HBOND_ANGLE_MIN_DEG < phi < HBOND_ANGLE_MAX_DEG:
                count += 1
                break
    return count


def hbond_donor_count(grid_point, protein: list[ProteinAtom]) -> int:
    """How many protein acceptors a donor placed at this point could reach.

    The ligand model has no explicit hydrogens, so the hydrogen is free to
    sit anywhere at VIRTUAL_H_BOND_LENGTH from the point. Placing it on the
    segment toward the acceptor makes the angle approach 180 degrees, hence
    the angle condition is satisfiable exactly when the acceptor lies
    beyond that radius; only the distance window remains.
    """
    count = 0
    for atom in _sorted_by_id(protein):
        if not atom.hbond_role.is_acceptor:
            continue
        r = _distance_to(grid_point, atom)
        if VIRTUAL_H_BOND_LENGTH < r < HBOND_DISTANCE_MAX:
            count += 1
    return count


def hydrophobic_count(grid_point, protein: list[ProteinAtom]) -> int:
    """Hydrophobic protein atoms within HYDROPHOBIC_DISTANCE_MAX of the point."""
    count = 0
    for atom in _sorted_by_id(protein):
        if atom.hydrophobic and _distance_to(grid_point, atom) < HYDROPHOBIC_DISTANCE_MAX:
            count += 1
    return count


def build_grid_graph(complex_input: ComplexInput) -> GridGraph:
    """Assemble the complete pocket grid graph with all colorings."""
    points = complex_input.grid_points
    protein = complex_input.protein
    table = complex_input.type_table
    n = len(points)
    positions = np.array([p.position for p in points], dtype=float).reshape(n, 3)

    delta = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt((delta * delta).sum(axis=-1))
    off_diagonal = dist[~np.eye(n, dtype=bool)]
    if off_diagonal.size and off_diagonal.min() < MIN_POINT_SEPARATION:
        raise GraphBuildError("two grid points coincide")

    coulomb = np.array(
        [coulomb_potential(p.position, protein, complex_input.dielectric) for p in points]
    )
    lj = np.array([lj_vector(p.position, protein, table) for p in points]).reshape(
        n, table.n_types
    )
    hb_acceptor = np.array([hbond_acceptor_count(p.position, protein) for p in points], dtype=int)
    hb_donor = np.array([hbond_donor_count(p.position, protein) for p in points], dtype=int)
    hydrophobic = np.array([hydrophobic_count(p.position, protein) for p in points], dtype=int)

    return GridGraph(
        point_ids=[p.id for p in points],
        positions=positions,
        dist=dist,
        coulomb=coulomb,
        lj=lj,
        hb_acceptor=hb_acceptor,
        hb_donor=hb_donor,
        hydrophobic=hydrophobic,
    )
