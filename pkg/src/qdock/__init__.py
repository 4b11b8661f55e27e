"""Molecular docking as a QUBO over ligand-atom/grid-point placements."""

from .anneal import (
    AnnealSchedule,
    Sample,
    SampleSet,
    brute_force,
    import_samples,
    incremental_delta,
    simulated_anneal,
)
from .dockeval import (
    DockingReport,
    InvalidAssignment,
    Pose,
    TunerResult,
    adjusted_rmsd,
    decode,
    dock,
    greedy_tune,
    nearest_grid_rmsd,
    report_from_samples,
    rmsd,
)
from .errors import (
    ComplexFormatError,
    GraphBuildError,
    InfeasibleComplexError,
    NoValidSolutionError,
    QdockError,
    QuboFormatError,
    SampleFormatError,
)
from .grid import GridGraph, build_grid_graph
from .ligand import EdgeKind, LigandEdge, LigandGraph, build_ligand_graph
from .model import (
    AtomTypeTable,
    ComplexInput,
    HBondRole,
    LigandAtom,
    LigandBond,
    ProteinAtom,
    load_complex,
    parse_complex,
)
from .qubo import (
    Assignment,
    EnergyBreakdown,
    Hyperparameters,
    QuboProblem,
    build_full,
    energy,
    one_hot_assignment,
)
from .qubofile import export_qubo, import_qubo

__all__ = [
    "AnnealSchedule",
    "Assignment",
    "AtomTypeTable",
    "ComplexFormatError",
    "ComplexInput",
    "DockingReport",
    "EdgeKind",
    "EnergyBreakdown",
    "GraphBuildError",
    "GridGraph",
    "HBondRole",
    "Hyperparameters",
    "InfeasibleComplexError",
    "InvalidAssignment",
    "LigandAtom",
    "LigandBond",
    "LigandEdge",
    "LigandGraph",
    "NoValidSolutionError",
    "Pose",
    "ProteinAtom",
    "QdockError",
    "QuboFormatError",
    "QuboProblem",
    "Sample",
    "SampleFormatError",
    "SampleSet",
    "TunerResult",
    "adjusted_rmsd",
    "brute_force",
    "build_full",
    "build_grid_graph",
    "build_ligand_graph",
    "decode",
    "dock",
    "energy",
    "export_qubo",
    "greedy_tune",
    "import_qubo",
    "import_samples",
    "incremental_delta",
    "load_complex",
    "nearest_grid_rmsd",
    "one_hot_assignment",
    "parse_complex",
    "report_from_samples",
    "rmsd",
    "simulated_anneal",
]

__version__ = "0.1.0"
