"""QUBO solvers: Metropolis simulated annealing and an exhaustive oracle.

Annealing runs n_reads independent restarts. Each read owns an RNG stream
seeded from (seed, read index) and consumes it in a fixed order — initial
bitstring, then per sweep one variable permutation and one block of
uniforms — so results are identical whether reads run serially, batched,
or split across threads. One sweep proposes a single-bit flip for every
variable in the read's permuted order with acceptance min(1, exp(-dE/T))
on a geometric temperature ladder.

Energies attached to returned samples are always recomputed from the
bitstring with per-term fsum, never taken from the incremental tracking,
so stored values match `qubo.energy` exactly.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import SampleFormatError
from .qubo import Assignment, QuboProblem, energy

BRUTE_FORCE_MAX_VARS = 24
TEMPERATURE_FLOOR = 1e-6


@dataclass(frozen=True)
class AnnealSchedule:
    """Annealing parameters; None temperatures are sized from the problem
    (t_initial = largest |coefficient|, t_final = 1e-3 x smallest nonzero
    |coefficient|, floored at 1e-6)."""

    n_reads: int = 100
    n_sweeps: int = 2000
    t_initial: float | None = None
    t_final: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_reads < 1 or self.n_sweeps < 1:
            raise ValueError("n_reads and n_sweeps must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.t_initial is not None and not self.t_initial > 0:
            raise ValueError("t_initial must be positive")
        if self.t_final is not None and not self.t_final > 0:
            raise ValueError("t_final must be positive")
        if (
            self.t_initial is not None
            and self.t_final is not None
            and self.t_initial < self.t_final
        ):
            raise ValueError("t_initial must be >= t_final")


@dataclass(frozen=True)
class Sample:
    assignment: Assignment
    energy: float
    term_energies: dict[str, float]
    read: int

    def to_dict(self) -> dict:
        return {
            "bits": self.assignment.to_string(),
            "energy": self.energy,
            "terms": dict(self.term_energies),
            "read": self.read,
        }


@dataclass
class SampleSet:
    """Samples sorted ascending by energy, ties kept in read order.

    wall_time is informational only and deliberately left out of
    serialization so that equal inputs produce byte-identical documents.
    """

    samples: list[Sample]
    metadata: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def best(self) -> Sample:
        if not self.samples:
            raise ValueError("empty sample set")
        return self.samples[0]

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def to_dict(self) -> dict:
        return {
            "metadata": dict(self.metadata),
            "samples": [s.to_dict() for s in self.samples],
        }


def resolve_temperatures(problem: QuboProblem, sched: AnnealSchedule) -> tuple[float, float]:
    magnitudes = [abs(v) for v in problem.coeffs.values() if v != 0.0]
    t_initial = sched.t_initial
    if t_initial is None:
        t_initial = max(magnitudes) if magnitudes else 1.0
    t_final = sched.t_final
    if t_final is None:
        t_final = max(1e-3 * min(magnitudes), TEMPERATURE_FLOOR) if magnitudes else TEMPERATURE_FLOOR
    t_final = min(t_final, t_initial)
    return float(t_initial), float(t_final)


def _temperature_ladder(t_initial: float, t_final: float, n_sweeps: int) -> np.ndarray:
    if n_sweeps == 1:
        return np.array([t_initial])
    exponents = np.arange(n_sweeps) / (n_sweeps - 1)
    return t_initial * (t_final / t_initial) ** exponents


def _dense_arrays(problem: QuboProblem) -> tuple[np.ndarray, np.ndarray]:
    """Linear vector h and symmetric zero-diagonal coupling matrix."""
    n = problem.n_vars
    h = np.zeros(n)
    q_sym = np.zeros((n, n))
    for (a, b), value in problem.coeffs.items():
        if a == b:
            h[a] += value
        else:
            q_sym[a, b] += value
            q_sym[b, a] += value
    return h, q_sym


def _anneal_reads(
    problem: QuboProblem,
    h: np.ndarray,
    q_sym: np.ndarray,
    read_ids: list[int],
    seed: int,
    n_sweeps: int,
    temps: np.ndarray,
) -> list[np.ndarray]:
    """Run a batch of reads lockstep; returns each read's best bitstring."""
    n = problem.n_vars
    n_batch = len(read_ids)
    rngs = [np.random.default_rng([seed, r]) for r in read_ids]
    state = np.empty((n_batch, n), dtype=np.float64)
    for k, rng in enumerate(rngs):
        state[k] = rng.integers(0, 2, size=n, dtype=np.uint8)

    coeff_items = list(problem.coeffs.items())
    running = np.array(
        [
            math.fsum(v for (a, b), v in coeff_items if state[k, a] and state[k, b])
            for k in range(n_batch)
        ]
    )
    best_energy = running.copy()
    best_state = state.astype(np.uint8)
    batch_rows = np.arange(n_batch)

    perms = np.empty((n_batch, n), dtype=np.intp)
    unifs = np.empty((n_batch, n), dtype=np.float64)
    for sweep in range(n_sweeps):
        temperature = temps[sweep]
        for k, rng in enumerate(rngs):
            perms[k] = rng.permutation(n)
            unifs[k] = rng.random(n)
        for step in range(n):
            var = perms[:, step]
            coupling = (q_sym[var] * state).sum(axis=1)
            delta = (1.0 - 2.0 * state[batch_rows, var]) * (h[var] + coupling)
            accept = unifs[:, step] < np.exp(np.minimum(0.0, -delta / temperature))
            if not accept.any():
                continue
            rows = batch_rows[accept]
            cols = var[accept]
            state[rows, cols] = 1.0 - state[rows, cols]
            running[rows] += delta[accept]
            improved = accept & (running < best_energy)
            if improved.any():
                best_energy[improved] = running[improved]
                best_state[improved] = state[improved].astype(np.uint8)
    return [best_state[k] for k in range(n_batch)]


def simulated_anneal(
    problem: QuboProblem, sched: AnnealSchedule, n_threads: int = 1
) -> SampleSet:
    """Seeded multi-read annealing; identical output for any n_threads."""
    started = time.perf_counter()
    t_initial, t_final = resolve_temperatures(problem, sched)
    temps = _temperature_ladder(t_initial, t_final, sched.n_sweeps)
    h, q_sym = _dense_arrays(problem)

    read_ids = list(range(sched.n_reads))
    n_threads = max(1, min(n_threads, sched.n_reads))
    if n_threads == 1:
        best_states = _anneal_reads(problem, h, q_sym, read_ids, sched.seed, sched.n_sweeps, temps)
    else:
        chunks = [read_ids[k::n_threads] for k in range(n_threads)]
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            futures = [
                pool.submit(
                    _anneal_reads, problem, h, q_sym, chunk, sched.seed, sched.n_sweeps, temps
                )
                for chunk in chunks
            ]
            by_read: dict[int, np.ndarray] = {}
            for chunk, future in zip(chunks, futures):
                for read, bits in zip(chunk, future.result()):
                    by_read[read] = bits
        best_states = [by_read[r] for r in read_ids]

    samples = []
    for read, bits in zip(read_ids, best_states):
        assignment = Assignment(bits)
        breakdown = energy(problem, assignment)
        samples.append(
            Sample(
                assignment=assignment,
                energy=breakdown.total,
                term_energies=breakdown.terms,
                read=read,
            )
        )
    samples.sort(key=lambda s: s.energy)
    return SampleSet(
        samples=samples,
        metadata={
            "solver": "sa",
            "seed": sched.seed,
            "n_reads": sched.n_reads,
            "n_sweeps": sched.n_sweeps,
            "t_initial": t_initial,
            "t_final": t_final,
        },
        wall_time=time.perf_counter() - started,
    )


def _enumerate_valid_assignments(problem: QuboProblem):
    """All constraint-satisfying bitstrings (one point per atom, injective).

    With n_mol * n_grid <= 24 the permutation count is at most a few
    hundred, so direct enumeration is cheap.
    """
    for placement in itertools.permutations(range(problem.n_grid), problem.n_mol):
        bits = np.zeros(problem.n_vars, dtype=np.uint8)
        for atom, point in enumerate(placement):
            bits[atom * problem.n_grid + point] = 1
        yield bits


def brute_force(problem: QuboProblem, keep: int = 32) -> SampleSet:
    """Exhaustive search over all 2^n assignments (n capped at 24).

    The scan scores every assignment with vectorized arithmetic, then
    re-evaluates exactly (fsum) every assignment whose scanned energy lies
    within a conservative error window of the scanned minimum, so the
    reported optimum is the true fsum optimum. All constraint-satisfying
    assignments are evaluated exactly as well, so the set always contains
    the best valid assignment. The returned listing is truncated to `keep`
    samples; the search itself is complete.
    """
    started = time.perf_counter()
    n = problem.n_vars
    if n > BRUTE_FORCE_MAX_VARS:
        raise ValueError(
            f"brute_force supports at most {BRUTE_FORCE_MAX_VARS} variables, problem has {n}"
        )

    def exact(bits: np.ndarray) -> tuple[float, dict]:
        breakdown = energy(problem, Assignment(bits))
        return breakdown.total, breakdown.terms

    candidates: dict[tuple, None] = {}
    if n == 0:
        candidates[()] = None
    else:
        h = np.zeros(n)
        q_upper = np.zeros((n, n))
        for (a, b), value in problem.coeffs.items():
            if a == b:
                h[a] += value
            else:
                q_upper[a, b] += value

        total_states = 1 << n
        scanned = np.empty(total_states)
        shifts = np.arange(n, dtype=np.uint32)
        chunk = 1 << min(n, 16)
        for start in range(0, total_states, chunk):
            idx = np.arange(start, min(start + chunk, total_states), dtype=np.uint32)
            bits_block = ((idx[:, None] >> shifts) & 1).astype(np.float64)
            quad = ((bits_block @ q_upper) * bits_block).sum(axis=1)
            scanned[start : start + len(idx)] = bits_block @ h + quad

        scale = math.fsum(abs(v) for v in problem.coeffs.values()) + abs(problem.offset)
        window = scanned.min() + 1e-9 * max(scale, 1.0)
        hits = np.flatnonzero(scanned <= window)
        if len(hits) > 65536:
            hits = hits[np.argsort(scanned[hits], kind="stable")[:65536]]
        for state_index in sorted(int(i) for i in hits):
            bits = ((state_index >> shifts) & 1).astype(np.uint8)
            candidates[tuple(bits)] = None

    for bits in _enumerate_valid_assignments(problem):
        candidates.setdefault(tuple(bits), None)

    scored = []
    for rank, bits_tuple in enumerate(candidates):
        bits = np.array(bits_tuple, dtype=np.uint8)
        total, terms = exact(bits)
        scored.append((total, rank, bits, terms))
    scored.sort(key=lambda item: (item[0], item[1]))

    samples = [
        Sample(assignment=Assignment(bits), energy=total, term_energies=terms, read=rank)
        for total, rank, bits, terms in scored[: max(keep, 1)]
    ]
    return SampleSet(
        samples=samples,
        metadata={"solver": "brute_force", "n_vars": n},
        wall_time=time.perf_counter() - started,
    )


def incremental_delta(problem: QuboProblem, assignment: Assignment, flip: int) -> float:
    """Energy change of flipping one bit, from its row/column alone."""
    if not 0 <= flip < problem.n_vars:
        raise ValueError(f"variable id {flip} out of range")
    bits = assignment.bits
    if len(bits) != problem.n_vars:
        raise ValueError(
            f"assignment has {len(bits)} bits, problem has {problem.n_vars} variables"
        )
    pieces = []
    for (a, b), value in problem.coeffs.items():
        if a == b:
            if a == flip:
                pieces.append(value)
        elif a == flip:
            if bits[b]:
                pieces.append(value)
        elif b == flip:
            if bits[a]:
                pieces.append(value)
    sign = 1.0 - 2.0 * float(bits[flip])
    return sign * math.fsum(pieces)


def import_samples(problem: QuboProblem, path) -> SampleSet:
    """Load externally produced bitstrings (JSON array) and score them."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except FileNotFoundError:
        raise SampleFormatError(f"samples file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SampleFormatError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(document, list):
        raise SampleFormatError(f"{path}: expected a JSON array of bitstrings")

    samples = []
    for position, entry in enumerate(document):
        if not isinstance(entry, str) or any(c not in "01" for c in entry):
            raise SampleFormatError(f"{path}: entry {position} is not a bitstring: {entry!r}")
        if len(entry) != problem.n_vars:
            raise SampleFormatError(
                f"{path}: entry {position} has {len(entry)} bits, problem has {problem.n_vars}"
            )
        assignment = Assignment.from_string(entry)
        breakdown = energy(problem, assignment)
        samples.append(
            Sample(
                assignment=assignment,
                energy=breakdown.total,
                term_energies=breakdown.terms,
                read=position,
            )
        )
    if not samples:
        raise SampleFormatError(f"{path}: no samples")
    samples.sort(key=lambda s: s.energy)
    return SampleSet(samples=samples, metadata={"solver": "external", "source": str(path)})
