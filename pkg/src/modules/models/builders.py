"""
Clock Builders
Exponential, Rabi, cascade and thermal-machine ladder clocks
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from modules.core import ketbra, thermal_qubit_state
from modules.engine import ClockModel

logger = logging.getLogger(__name__)

RESONANCE_TOL = 1e-9


def _qubit_ops():
    sigma_plus = ketbra(2, 1, 0)
    return sigma_plus, sigma_plus.conj().T, ketbra(2, 1, 1)


def _require_positive(**values: float):
    for name, value in values.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def build_exponential_clock(gamma: float) -> ClockModel:
    """Unstable two-level system: |1> decays to |0> at rate gamma, every decay is a tick"""
    _require_positive(gamma=gamma)
    return ClockModel(
        hamiltonian=np.zeros((2, 2)),
        notick_lindblad_ops=(),
        tick_jumps=(math.sqrt(gamma) * ketbra(2, 0, 1),),
        initial_state=ketbra(2, 1, 1),
        name="exponential",
        metadata={"builder": "exponential", "params": {"gamma": gamma}},
    )


def build_rabi_clock(omega: float, gamma: float) -> ClockModel:
    """Qubit driven by H = (omega/2) sigma_x that ticks out of |1>, starting in |0>"""
    _require_positive(omega=omega, gamma=gamma)
    sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]])
    return ClockModel(
        hamiltonian=0.5 * omega * sigma_x,
        notick_lindblad_ops=(),
        tick_jumps=(math.sqrt(gamma) * ketbra(2, 0, 1),),
        initial_state=ketbra(2, 0, 0),
        name="rabi",
        metadata={"builder": "rabi", "params": {"omega": omega, "gamma": gamma}},
    )


def build_cascade_clock(gamma: float, m: int) -> ClockModel:
    """Chain |m> -> |m-1> -> ... -> |0> at rate gamma; only the last step ticks

    The tick time is Erlang(m, gamma), the classical averaging clock.
    """
    _require_positive(gamma=gamma)
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    m = int(m)
    dim = m + 1
    rate = math.sqrt(gamma)
    internal = tuple(rate * ketbra(dim, k - 1, k) for k in range(2, m + 1))
    return ClockModel(
        hamiltonian=np.zeros((dim, dim)),
        notick_lindblad_ops=internal,
        tick_jumps=(rate * ketbra(dim, 0, 1),),
        initial_state=ketbra(dim, m, m),
        name=f"cascade-{m}",
        metadata={"builder": "cascade", "params": {"gamma": gamma, "m": m}},
    )


def bose_einstein_occupation(beta: float, omega: float) -> float:
    """1 / (exp(beta omega) - 1); 0 at beta = inf

    Raises:
        ValueError: beta = 0 (infinite temperature, infinite occupation) or negative inputs
    """
    if beta < 0 or omega <= 0:
        raise ValueError(f"Need beta >= 0 and omega > 0, got beta={beta}, omega={omega}")
    if math.isinf(beta):
        return 0.0
    if beta == 0:
        raise ValueError("beta = 0 gives an infinite thermal occupation")
    return 1.0 / math.expm1(beta * omega)


@dataclass(frozen=True)
class LadderParams:
    """Two-qubit thermal machine driving a d-level ladder

    Splittings and rates in units of rate (hbar = k_B = 1); beta in 1/energy.
    """

    d: int = 3
    omega_c: float = 1.0
    omega_h: float = 3.0
    omega_l: float = 2.0
    g: float = 0.1
    gamma_c: float = 1.0
    gamma_h: float = 1.0
    beta_c: float = 10.0
    beta_h: float = 0.1
    gamma_tick: float = 0.1

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"Ladder dimension d must be an integer >= 2, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        _require_positive(
            omega_c=self.omega_c,
            omega_h=self.omega_h,
            omega_l=self.omega_l,
            g=self.g,
            gamma_c=self.gamma_c,
            gamma_h=self.gamma_h,
            gamma_tick=self.gamma_tick,
        )
        if self.beta_c < 0 or self.beta_h < 0:
            raise ValueError(f"Inverse temperatures must be non-negative (beta_c={self.beta_c}, beta_h={self.beta_h})")
        if not self.beta_h < self.beta_c:
            raise ValueError(f"Hot bath must be hotter: need beta_h < beta_c, got {self.beta_h} >= {self.beta_c}")

    @classmethod
    def default(cls) -> "LadderParams":
        return cls()

    @property
    def detuning(self) -> float:
        """|omega_c + omega_l - omega_h|, zero on resonance"""
        return abs(self.omega_c + self.omega_l - self.omega_h)

    @property
    def resonant(self) -> bool:
        return self.detuning <= RESONANCE_TOL

    def with_updates(self, **changes: Any) -> "LadderParams":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def build_ladder_clock(params: LadderParams) -> ClockModel:
    """Cold qubit (x) hot qubit (x) ladder, dimension 4d

    The machine exchanges |10><01|_CH against one ladder step up; the ladder ticks
    by decaying from its top level |d-1> to the ground state.
    """
    if not params.resonant:
        logger.warning(
            f"⚠️ Ladder is off resonance: |omega_c + omega_l - omega_h| = {params.detuning:.3g}; "
            f"the thermal machine will barely climb the ladder"
        )

    d = params.d
    qubit_eye = np.eye(2)
    ladder_eye = np.eye(d)
    sigma_plus, sigma_minus, excited = _qubit_ops()

    def cold(op):
        return np.kron(np.kron(op, qubit_eye), ladder_eye)

    def hot(op):
        return np.kron(np.kron(qubit_eye, op), ladder_eye)

    ladder_energy = np.diag(np.arange(d) * params.omega_l)
    h_free = params.omega_c * cold(excited) + params.omega_h * hot(excited)
    h_free = h_free + np.kron(np.eye(4), ladder_energy)

    # n runs to d-2: |n+1> must stay on the ladder
    exchange = np.kron(sigma_plus, sigma_minus)
    h_int = np.zeros((4 * d, 4 * d), dtype=np.complex128)
    for n in range(d - 1):
        raising = np.kron(exchange, ketbra(d, n + 1, n))
        h_int += raising + raising.conj().T
    hamiltonian = h_free + params.g * h_int

    n_c = bose_einstein_occupation(params.beta_c, params.omega_c)
    n_h = bose_einstein_occupation(params.beta_h, params.omega_h)
    notick = (
        math.sqrt(n_c * params.gamma_c) * cold(sigma_plus),
        math.sqrt((1.0 + n_c) * params.gamma_c) * cold(sigma_minus),
        math.sqrt(n_h * params.gamma_h) * hot(sigma_plus),
        math.sqrt((1.0 + n_h) * params.gamma_h) * hot(sigma_minus),
    )
    tick = math.sqrt(params.gamma_tick) * np.kron(np.eye(4), ketbra(d, 0, d - 1))

    initial = np.kron(np.kron(thermal_qubit_state(n_c), thermal_qubit_state(n_h)), ketbra(d, 0, 0))
    return ClockModel(
        hamiltonian=hamiltonian,
        notick_lindblad_ops=notick,
        tick_jumps=(tick,),
        initial_state=initial,
        name=f"ladder-d{d}",
        metadata={"builder": "ladder", "params": params.to_dict(), "occupations": {"n_c": n_c, "n_h": n_h}},
    )
