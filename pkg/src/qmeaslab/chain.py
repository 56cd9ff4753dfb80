"""Spin-chain measurement dynamics: sequential conditional flips, pointer and
interference-term observables, strictness checks, and the ferromagnetic
extension.

A spin-1/2 system qubit S0 crosses a chain of N spin-1/2 atoms A1..AN.  Each
crossing applies the conditional pulse

    |u0><u0| (x) I  +  |d0><d0| (x) exp(-i theta sigma_x),

a complete flip with per-atom phase -i at the calibrated theta = pi/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hilbert import (DEFAULT_TOL, BranchDecomposition, HilbertLayout,
                      StateVector, StateError, basis_state, canonical_split)
from .pauli import (OperatorError, PauliString, PauliSum, apply_sum,
                    commutator, expectation)

SYSTEM_LABEL = "S0"


def atom_labels(n_atoms: int, prefix: str = "A") -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, n_atoms + 1))


def _as_labels(atoms: int | Sequence[str]) -> tuple[str, ...]:
    if isinstance(atoms, int):
        return atom_labels(atoms)
    return tuple(atoms)


@dataclass(frozen=True)
class ChainModel:
    """One chain: system qubit S0 plus atoms A1..AN and the incoming
    amplitudes (a1, a2) of the measured superposition."""

    n_atoms: int
    a1: complex
    a2: complex
    theta: float = math.pi / 2

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError(f"chain model requires n_atoms >= 1, got {self.n_atoms}")
        weight = abs(self.a1) ** 2 + abs(self.a2) ** 2
        if abs(weight - 1.0) > 1e-9:
            raise ValueError(f"amplitudes must satisfy |a1|^2+|a2|^2=1, got {weight}")

    @property
    def atoms(self) -> tuple[str, ...]:
        return atom_labels(self.n_atoms)

    @property
    def layout(self) -> HilbertLayout:
        return HilbertLayout.qubits((SYSTEM_LABEL,) + self.atoms)


def initial_state(model: ChainModel) -> StateVector:
    """(a1|u0> + a2|d0>) tensor |u...u>."""
    layout = model.layout
    amps = np.zeros(layout.dim, dtype=complex)
    zeros = [0] * model.n_atoms
    amps[layout.index_of([0] + zeros)] = model.a1
    amps[layout.index_of([1] + zeros)] = model.a2
    return StateVector(layout, amps).check_normalized()


def _pulse_coeffs(theta: float) -> tuple[float, float]:
    # the calibrated complete flip is exact, not cos(pi/2) ~ 6e-17
    if abs(theta - math.pi / 2) < 1e-15:
        return 0.0, 1.0
    return math.cos(theta), math.sin(theta)


def passage_step(state: StateVector, atom: str,
                 system: str = SYSTEM_LABEL,
                 theta: float = math.pi / 2) -> StateVector:
    """One conditional pulse on (system, atom); unitary for every theta.

    A passage visits each atom once; repeated application is legal and
    composes pulse angles.
    """
    layout = state.layout
    s_axis = layout.axis(system)
    a_axis = layout.axis(atom)
    if s_axis == a_axis:
        raise OperatorError("system and atom must be distinct qubits")
    arr = np.array(state.as_tensor(), dtype=complex, copy=True)
    sel_u = [slice(None)] * arr.ndim
    sel_d = [slice(None)] * arr.ndim
    sel_u[s_axis], sel_d[s_axis] = 1, 1
    sel_u[a_axis], sel_d[a_axis] = 0, 1
    block_u = arr[tuple(sel_u)].copy()
    block_d = arr[tuple(sel_d)].copy()
    c, s = _pulse_coeffs(theta)
    # exp(-i theta sigma_x) = cos(theta) I - i sin(theta) sigma_x on the atom
    arr[tuple(sel_u)] = c * block_u - 1j * s * block_d
    arr[tuple(sel_d)] = c * block_d - 1j * s * block_u
    return StateVector(layout, arr.reshape(layout.dim)).check_normalized(1e-9)


def full_passage(model: ChainModel) -> StateVector:
    """Stepwise crossing of the whole chain."""
    state = initial_state(model)
    for atom in model.atoms:
        state = passage_step(state, atom, theta=model.theta)
    return state


def closed_form_final(model: ChainModel) -> StateVector:
    """Final state built directly: a1|u0>|u..u> + a2 prod_i (-i sigma_x^i
    pulse) |d0>|..>; reduces to a2 (-i)^N |d0>|d..d> at theta = pi/2."""
    layout = model.layout
    c, s = _pulse_coeffs(model.theta)
    flipped = np.array([c, -1j * s], dtype=complex)
    branch2 = np.array([1.0], dtype=complex)
    for _ in range(model.n_atoms):
        branch2 = np.kron(branch2, flipped)
    amps = np.zeros(layout.dim, dtype=complex)
    half = layout.dim // 2
    amps[0] = model.a1
    amps[half:] = model.a2 * branch2
    return StateVector(layout, amps).check_normalized(1e-9)


def final_branches(model: ChainModel, tol: float = DEFAULT_TOL) -> BranchDecomposition:
    """Pointer-branch decomposition of the final state.

    Only defined for the calibrated complete flip, where the two branches
    are orthogonal basis products.
    """
    if abs(model.theta - math.pi / 2) > tol:
        raise StateError("pointer branches require the complete flip theta = pi/2")
    layout = model.layout
    n = model.n_atoms
    up = basis_state(layout, [0] + [0] * n)
    amp2 = model.a2 * (-1j) ** n
    down = basis_state(layout, [1] + [1] * n)
    branches = []
    if abs(model.a1) > tol:
        branches.append((model.a1, up))
    if abs(amp2) > tol:
        a2c, down_c = canonical_split(layout, amp2 * down.amplitudes, tol)
        branches.append((a2c, down_c))
    return BranchDecomposition(layout, tuple(branches)).validate(tol)


def pointer_operator(atoms: int | Sequence[str]) -> PauliSum:
    """Chain polarization (1/N) sum_i Z_i; acts on the atoms only."""
    labels = _as_labels(atoms)
    if not labels:
        raise ValueError("pointer operator needs at least one atom")
    w = 1.0 / len(labels)
    return PauliSum.from_terms((w, PauliString.single(l, "Z")) for l in labels)


def it_operator(atoms: int | Sequence[str], system: str = SYSTEM_LABEL) -> PauliSum:
    """Joint interference-term operator X_system prod_i Y_i."""
    labels = _as_labels(atoms)
    if not labels:
        raise ValueError("interference operator needs at least one atom")
    letters = {system: "X"}
    letters.update({l: "Y" for l in labels})
    return PauliSum.from_string(PauliString.from_map(letters))


@dataclass(frozen=True)
class StrictMeasurementReport:
    """Expectations of a system observable and its apparatus stand-in."""

    q_expect: float
    qo_expect: float

    @property
    def delta(self) -> float:
        return self.q_expect - self.qo_expect


def strict_check(q: PauliSum, q_o: PauliSum, state: StateVector,
                 system_labels: Sequence[str] = (SYSTEM_LABEL,),
                 tol: float = DEFAULT_TOL) -> StrictMeasurementReport:
    """Strictness report for a system observable q against an apparatus
    observable q_o; exact measurement means delta = 0."""
    sys_set = set(system_labels)
    apparatus = set(state.layout.labels) - sys_set
    if not set(q.support) <= sys_set:
        raise OperatorError(f"q must be supported on {sorted(sys_set)}, got {q.support}")
    if not set(q_o.support) <= apparatus:
        raise OperatorError(
            f"q_o must be supported on the apparatus {sorted(apparatus)}, got {q_o.support}")
    return StrictMeasurementReport(expectation(q, state, tol),
                                   expectation(q_o, state, tol))


def heisenberg_hamiltonian(atoms: int | Sequence[str], j: float = 1.0) -> PauliSum:
    """Nearest-neighbor exchange J sum_i (X_i X_i+1 + Y_i Y_i+1 + Z_i Z_i+1)
    over the chain; constant coupling since atom positions are frozen."""
    labels = _as_labels(atoms)
    if len(labels) < 2:
        raise ValueError(f"exchange chain needs N >= 2 atoms, got {len(labels)}")
    terms = []
    for a, b in zip(labels, labels[1:]):
        for letter in ("X", "Y", "Z"):
            terms.append((complex(j), PauliString.from_map({a: letter, b: letter})))
    return PauliSum.from_terms(terms)


def eigenstate_residual(h: PauliSum, state: StateVector,
                        tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """(||H psi - lambda psi||, lambda) with lambda = <psi|H|psi>."""
    lam = expectation(h, state, tol)
    resid = apply_sum(h, state) - lam * state.amplitudes
    return float(np.linalg.norm(resid)), lam


@dataclass(frozen=True)
class CommutatorAudit:
    """String-level [mu_z, B] against the reference sum
    (i/N) X_s0 sum_i X_i prod_{j!=i} Y_j, with the measured constant."""

    lhs: PauliSum
    reference: PauliSum
    constant: complex
    proportional: bool


def it_commutator_audit(n_atoms: int, tol: float = DEFAULT_TOL) -> CommutatorAudit:
    labels = atom_labels(n_atoms)
    lhs = commutator(pointer_operator(labels), it_operator(labels))
    ref_terms = []
    for i, flip in enumerate(labels):
        letters = {SYSTEM_LABEL: "X", flip: "X"}
        letters.update({l: "Y" for k, l in enumerate(labels) if k != i})
        ref_terms.append((1j / n_atoms, PauliString.from_map(letters)))
    reference = PauliSum.from_terms(ref_terms)
    ratios = []
    by_key = {s.letters: c for c, s in lhs.terms}
    proportional = len(lhs.terms) == len(reference.terms)
    for c_ref, s_ref in reference.terms:
        c_lhs = by_key.get(s_ref.letters)
        if c_lhs is None:
            proportional = False
            continue
        ratios.append(c_lhs / c_ref)
    constant = ratios[0] if ratios else 0.0
    if any(abs(r - constant) > tol for r in ratios):
        proportional = False
    return CommutatorAudit(lhs, reference, complex(constant), proportional)
