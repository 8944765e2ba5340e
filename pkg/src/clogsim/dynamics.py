"""Per-run simulation state machine.

Each cycle has two synchronous phases.  First every node draws a binary
signal from its current mental state through the clog production rule;
then every node replaces its mental state with a convex combination of the
old state and the mean signal of its neighbors (self excluded):

    m_i <- alpha * mean_{j in N_i} s_j + (1 - alpha) * m_i

Both phases read only pre-phase values, so iteration order cannot affect
results.  A run ends at consensus (every m_i within 1e-8 of the same
corner) or at a cycle cap, and the final population mean classifies the
outcome: survival, dominance, completion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decision import production_rule
from .network import Network

__all__ = [
    "CONSENSUS_EPS",
    "SURVIVAL_MIN",
    "DOMINANCE_MIN",
    "COMPLETION_MIN",
    "DEFAULT_ALPHA",
    "DEFAULT_MAX_ITERS",
    "CONSENSUS_ZERO",
    "CONSENSUS_ONE",
    "MAX_ITERATIONS",
    "SimState",
    "RunOutcome",
    "classify_outcome",
    "init_state",
    "step",
    "simulate_run",
    "run_to_completion",
]

CONSENSUS_EPS = 1e-8
SURVIVAL_MIN = 1e-4          # mbar above this: the innovation avoided extinction
DOMINANCE_MIN = 0.5          # mbar at/above this: it overtook the incumbent
COMPLETION_MIN = 1.0 - 1e-4  # mbar at/above this: the incumbent is extinct

DEFAULT_ALPHA = 0.1
DEFAULT_MAX_ITERS = 10_000

CONSENSUS_ZERO = "consensus_zero"
CONSENSUS_ONE = "consensus_one"
MAX_ITERATIONS = "max_iterations"


@dataclass
class SimState:
    """Mental states, last emitted signals, and the cycle counter.

    ``s`` is None until the first cycle has produced signals.
    """

    m: np.ndarray
    s: np.ndarray | None
    t: int


@dataclass(frozen=True)
class RunOutcome:
    mbar_final: float
    t_final: int
    terminated_by: str
    survival: bool
    dominance: bool
    completion: bool


def classify_outcome(mbar_final: float, t_final: int, terminated_by: str) -> RunOutcome:
    """Outcome flags from the final mean mental state (nested thresholds)."""
    return RunOutcome(
        mbar_final=float(mbar_final),
        t_final=int(t_final),
        terminated_by=terminated_by,
        survival=mbar_final > SURVIVAL_MIN,
        dominance=mbar_final >= DOMINANCE_MIN,
        completion=mbar_final >= COMPLETION_MIN,
    )


def _check_net(net: Network) -> None:
    if net.n == 0 or int(net.degrees.min()) < 1:
        raise ValueError("simulation requires every node to have at least one neighbor")


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")


def init_state(net: Network, innovator: int) -> SimState:
    """All-incumbent population except a single fully convinced innovator."""
    if not 0 <= innovator < net.n:
        raise ValueError(f"innovator {innovator!r} out of range for n={net.n}")
    m = np.zeros(net.n, dtype=np.float64)
    m[innovator] = 1.0
    return SimState(m=m, s=None, t=0)


def _cycle(m, rule, indptr, indices, inv_deg, alpha, rng):
    # Phase 1: produce.  Phase 2: average neighbor signals and update.
    s = rng.random(m.size) < rule(m)
    inp = np.add.reduceat(s[indices].astype(np.float64), indptr[:-1]) * inv_deg
    return alpha * inp + (1.0 - alpha) * m, s


def step(
    state: SimState,
    net: Network,
    phi_deg: float,
    beta,
    alpha: float,
    rng: np.random.Generator,
) -> SimState:
    """One synchronous production/update cycle; returns the next state.

    ``beta`` is a scalar or per-node array; ``phi_deg`` is shared by the
    population, as in all reported experiments.
    """
    _check_net(net)
    _check_alpha(alpha)
    if state.m.shape != (net.n,):
        raise ValueError("state size does not match network size")
    rule = production_rule(phi_deg, beta)
    inv_deg = 1.0 / net.degrees.astype(np.float64)
    m, s = _cycle(state.m, rule, net.indptr, net.indices, inv_deg, alpha, rng)
    return SimState(m=m, s=s.astype(np.uint8), t=state.t + 1)


def simulate_run(
    net: Network,
    innovator: int,
    phi_deg: float,
    beta,
    rng: np.random.Generator,
    *,
    alpha: float = DEFAULT_ALPHA,
    max_iters: int = DEFAULT_MAX_ITERS,
    mbar_trace: list | None = None,
) -> tuple[RunOutcome, SimState]:
    """Run from the standard initial state until consensus or the cap.

    If ``mbar_trace`` is a list, the population mean is appended each cycle
    (index = cycle, starting with the initial state at index 0).
    """
    _check_net(net)
    _check_alpha(alpha)
    if max_iters < 1:
        raise ValueError(f"max_iters must be at least 1, got {max_iters!r}")

    state = init_state(net, innovator)
    m = state.m
    rule = production_rule(phi_deg, beta)
    inv_deg = 1.0 / net.degrees.astype(np.float64)
    indptr, indices = net.indptr, net.indices

    if mbar_trace is not None:
        mbar_trace.append(float(m.mean()))

    s = None
    terminated_by = MAX_ITERATIONS
    t = 0
    for t in range(1, max_iters + 1):
        m, s = _cycle(m, rule, indptr, indices, inv_deg, alpha, rng)
        if mbar_trace is not None:
            mbar_trace.append(float(m.mean()))
        mx = float(m.max())
        if mx < CONSENSUS_EPS:
            terminated_by = CONSENSUS_ZERO
            break
        if mx > 1.0 - CONSENSUS_EPS and float(m.min()) > 1.0 - CONSENSUS_EPS:
            terminated_by = CONSENSUS_ONE
            break

    final = SimState(m=m, s=None if s is None else s.astype(np.uint8), t=t)
    return classify_outcome(float(m.mean()), t, terminated_by), final


def run_to_completion(
    net: Network,
    innovator: int,
    phi_deg: float,
    beta,
    rng: np.random.Generator,
    *,
    alpha: float = DEFAULT_ALPHA,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> RunOutcome:
    """Like :func:`simulate_run`, returning only the classified outcome."""
    outcome, _ = simulate_run(
        net, innovator, phi_deg, beta, rng, alpha=alpha, max_iters=max_iters
    )
    return outcome
