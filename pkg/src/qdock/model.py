"""Domain data model and ingestion of complex documents.

A "complex" bundles everything the pipeline consumes: protein atoms with
precomputed charges/types/roles, the ligand (atoms + bonds) in its
experimental pose, the pocket grid points, and the per-type Lennard-Jones
parameter table. All chemistry perception happens upstream; this module
only validates and carries the data.

Units are fixed globally: Angstrom for lengths, elementary charges for q,
kcal/mol for energies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ComplexFormatError, InfeasibleComplexError

# Coulomb prefactor 1/(4*pi*eps0) in kcal*Angstrom/(mol*e^2); divide by the
# relative dielectric to get the working constant.
COULOMB_CONSTANT = 332.0636


class HBondRole(Enum):
    NONE = "none"
    DONOR = "donor"
    ACCEPTOR = "acceptor"
    DONOR_ACCEPTOR = "donor_acceptor"

    @property
    def is_donor(self) -> bool:
        return self in (HBondRole.DONOR, HBondRole.DONOR_ACCEPTOR)

    @property
    def is_acceptor(self) -> bool:
        return self in (HBondRole.ACCEPTOR, HBondRole.DONOR_ACCEPTOR)


@dataclass(frozen=True)
class ProteinAtom:
    id: int
    position: np.ndarray
    charge: float
    type_index: int
    hbond_role: HBondRole = HBondRole.NONE
    hydrophobic: bool = False
    donor_hydrogens: tuple[np.ndarray, ...] = ()


@dataclass(frozen=True)
class LigandAtom:
    id: int
    position: np.ndarray  # experimental pose
    charge: float
    type_index: int
    hbond_acceptor: int = 0
    hbond_donor: int = 0
    hydrophobic: int = 0


@dataclass(frozen=True)
class LigandBond:
    i: int
    j: int
    rotatable: bool = False
    dihedral_locked: bool = False


@dataclass(frozen=True)
class AtomTypeTable:
    epsilon: np.ndarray  # well depth per type, kcal/mol
    r_min: np.ndarray    # potential-minimum distance per type, Angstrom

    @property
    def n_types(self) -> int:
        return len(self.epsilon)


@dataclass(frozen=True)
class GridPointInput:
    id: int
    position: np.ndarray


@dataclass(frozen=True)
class ComplexInput:
    protein: list[ProteinAtom]
    ligand_atoms: list[LigandAtom]
    ligand_bonds: list[LigandBond]
    grid_points: list[GridPointInput]
    type_table: AtomTypeTable
    dielectric: float = 1.0
    name: str = ""

    def ligand_coordinates(self) -> np.ndarray:
        """Experimental ligand positions, one row per atom in input order."""
        return np.array([a.position for a in self.ligand_atoms], dtype=float)


def _as_vec3(value, where: str) -> np.ndarray:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ComplexFormatError(f"{where}: expected a 3-vector, got {value!r}")
    try:
        return np.array([float(c) for c in value], dtype=float)
    except (TypeError, ValueError):
        raise ComplexFormatError(f"{where}: non-numeric coordinate in {value!r}")


def _as_flag(value, where: str) -> int:
    if value not in (0, 1, False, True):
        raise ComplexFormatError(f"{where}: flag must be 0 or 1, got {value!r}")
    return int(value)


def _check_unique_ids(items, kind: str) -> None:
    seen = set()
    for item in items:
        if item.id in seen:
            raise ComplexFormatError(f"duplicate {kind} id {item.id}")
        seen.add(item.id)


def parse_complex(doc: dict, name: str = "") -> ComplexInput:
    """Build and validate a ComplexInput from an already-decoded JSON document."""
    if not isinstance(doc, dict):
        raise ComplexFormatError("top level must be a JSON object")
    for key in ("protein", "ligand", "grid_points", "type_table"):
        if key not in doc:
            raise ComplexFormatError(f"missing top-level key '{key}'")

    table_doc = doc["type_table"]
    epsilon = np.array(table_doc.get("epsilon", []), dtype=float)
    r_min = np.array(table_doc.get("r_min", []), dtype=float)
    if len(epsilon) == 0 or len(epsilon) != len(r_min):
        raise ComplexFormatError(
            "type_table: epsilon and r_min must be non-empty and equal length"
        )
    if "n_types" in table_doc and int(table_doc["n_types"]) != len(epsilon):
        raise ComplexFormatError("type_table: n_types does not match vector length")
    if not np.all(epsilon > 0):
        raise ComplexFormatError("type_table: all epsilon must be > 0")
    if not np.all(r_min > 0):
        raise ComplexFormatError("type_table: all r_min must be > 0")
    table = AtomTypeTable(epsilon=epsilon, r_min=r_min)

    dielectric = float(doc.get("dielectric", 1.0))
    if not dielectric > 0:
        raise ComplexFormatError(f"dielectric must be > 0, got {dielectric}")

    protein = []
    for k, entry in enumerate(doc["protein"]):
        where = f"protein[{k}]"
        role = HBondRole(entry.get("hbond_role", "none"))
        hydrogens = tuple(
            _as_vec3(h, f"{where}.donor_hydrogens") for h in entry.get("donor_hydrogens", [])
        )
        atom = ProteinAtom(
            id=int(entry["id"]),
            position=_as_vec3(entry["position"], where),
            charge=float(entry["charge"]),
            type_index=int(entry["type_index"]),
            hbond_role=role,
            hydrophobic=bool(entry.get("hydrophobic", False)),
            donor_hydrogens=hydrogens,
        )
        if not 0 <= atom.type_index < table.n_types:
            raise ComplexFormatError(
                f"{where}: type_index {atom.type_index} outside table of size {table.n_types}"
            )
        if role.is_donor and not hydrogens:
            raise ComplexFormatError(
                f"{where}: donor role requires at least one explicit hydrogen"
            )
        if not role.is_donor and hydrogens:
            raise ComplexFormatError(
                f"{where}: donor_hydrogens given but hbond_role is {role.value}"
            )
        protein.append(atom)
    _check_unique_ids(protein, "protein atom")

    ligand_doc = doc["ligand"]
    if "atoms" not in ligand_doc:
        raise ComplexFormatError("ligand: missing 'atoms'")
    ligand_atoms = []
    for k, entry in enumerate(ligand_doc["atoms"]):
        where = f"ligand.atoms[{k}]"
        atom = LigandAtom(
            id=int(entry["id"]),
            position=_as_vec3(entry["position"], where),
            charge=float(entry["charge"]),
            type_index=int(entry["type_index"]),
            hbond_acceptor=_as_flag(entry.get("hbond_acceptor", 0), f"{where}.hbond_acceptor"),
            hbond_donor=_as_flag(entry.get("hbond_donor", 0), f"{where}.hbond_donor"),
            hydrophobic=_as_flag(entry.get("hydrophobic", 0), f"{where}.hydrophobic"),
        )
        if not 0 <= atom.type_index < table.n_types:
            raise ComplexFormatError(
                f"{where}: type_index {atom.type_index} outside table of size {table.n_types}"
            )
        ligand_atoms.append(atom)
    if not ligand_atoms:
        raise ComplexFormatError("ligand must have at least one atom")
    _check_unique_ids(ligand_atoms, "ligand atom")
    atom_ids = {a.id for a in ligand_atoms}

    ligand_bonds = []
    for k, entry in enumerate(ligand_doc.get("bonds", [])):
        where = f"ligand.bonds[{k}]"
        pair = entry.get("atoms")
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ComplexFormatError(f"{where}: 'atoms' must be a pair of atom ids")
        i, j = int(pair[0]), int(pair[1])
        if i == j:
            raise ComplexFormatError(f"{where}: bond endpoints must be distinct")
        if i not in atom_ids or j not in atom_ids:
            raise ComplexFormatError(f"{where}: bond references unknown atom id")
        ligand_bonds.append(
            LigandBond(
                i=i,
                j=j,
                rotatable=bool(entry.get("rotatable", False)),
                dihedral_locked=bool(entry.get("dihedral_locked", False)),
            )
        )

    grid_points = []
    for k, entry in enumerate(doc["grid_points"]):
        grid_points.append(
            GridPointInput(id=int(entry["id"]), position=_as_vec3(entry["position"], f"grid_points[{k}]"))
        )
    _check_unique_ids(grid_points, "grid")
    for a in range(len(grid_points)):
        for b in range(a + 1, len(grid_points)):
            gap = np.linalg.norm(grid_points[a].position - grid_points[b].position)
            if gap < 1e-6:
                raise ComplexFormatError(
                    f"grid points {grid_points[a].id} and {grid_points[b].id} coincide"
                )

    if len(ligand_atoms) > len(grid_points):
        raise InfeasibleComplexError(
            f"infeasible: {len(ligand_atoms)} ligand atoms but only "
            f"{len(grid_points)} grid points"
        )

    return ComplexInput(
        protein=protein,
        ligand_atoms=ligand_atoms,
        ligand_bonds=ligand_bonds,
        grid_points=grid_points,
        type_table=table,
        dielectric=dielectric,
        name=name,
    )


def load_complex(path: str | Path) -> ComplexInput:
    """Load and validate a complex JSON document from disk."""
    path = Path(path)
    if not path.exists():
        raise ComplexFormatError(f"complex file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ComplexFormatError(
            f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        )
    return parse_complex(doc, name=path.stem)
