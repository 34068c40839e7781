"""
Lagrange differentiation matrices on arbitrary node sets

For nodes t_0 < t_1 < ... < t_N the matrix D maps the values of a function
at the nodes to the derivative of its Lagrange interpolant at the same
nodes. It is exact for polynomials of degree <= N.

The block solver only needs the interior N x N block (rows/columns 1..N)
and the coupling column d_j = D[j, 0] that carries the initial value into
the block system.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import (
    InvalidIntervalError,
    InvalidCountError,
    UnorderedNodesError,
    DuplicateNodeError,
    NotEquispacedError,
)

logger = logging.getLogger(__name__)

# Minimum admissible gap, relative to the largest |t|
_GAP_FACTOR = 1e3 * np.finfo(float).eps
# Relative tolerance for recognising uniform spacing
_EQUISPACED_RTOL = 1e-12


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class NodeSet:
    """
    Ordered collocation nodes of one block

    Attributes:
        nodes: Strictly increasing abscissae t_0 < ... < t_N (read-only array)
        h: Largest adjacent gap
        is_equispaced: True when every gap equals h
    """
    nodes: np.ndarray
    h: float
    is_equispaced: bool

    @property
    def count(self):
        return len(self.nodes)

    @property
    def degree(self):
        """N, the number of unknown nodes per block"""
        return len(self.nodes) - 1

    @classmethod
    def from_points(cls, points):
        """
        Validate an arbitrary set of points and build a NodeSet

        Args:
            points: Sequence of real abscissae, strictly increasing

        Returns:
            NodeSet: The validated node set; spacing is detected from the gaps

        Raises:
            InvalidCountError: fewer than two points
            DuplicateNodeError: two points closer than the cancellation limit
            UnorderedNodesError: points not increasing
        """
        nodes = np.asarray(points, dtype=float).ravel()
        if nodes.size < 2:
            raise InvalidCountError(f"a node set needs at least 2 points, got {nodes.size}")
        if not np.all(np.isfinite(nodes)):
            raise InvalidIntervalError("node set contains non-finite values")

        gaps = np.diff(nodes)
        min_gap = _GAP_FACTOR * np.max(np.abs(nodes))
        close = np.abs(gaps) <= min_gap
        if np.any(close):
            j = int(np.argmax(close))
            raise DuplicateNodeError(
                f"nodes t_{j}={nodes[j]!r} and t_{j + 1}={nodes[j + 1]!r} are numerically identical"
            )
        if np.any(gaps < 0):
            j = int(np.argmax(gaps < 0))
            raise UnorderedNodesError(f"nodes must be strictly increasing (t_{j} > t_{j + 1})")

        h = float(np.max(gaps))
        equispaced = bool(np.all(np.abs(gaps - h) <= _EQUISPACED_RTOL * h))
        return cls(nodes=_frozen(nodes), h=h, is_equispaced=equispaced)


@dataclass(frozen=True, eq=False)
class DiffMatrices:
    """
    Differentiation matrix of a block and its interior/coupling split

    Attributes:
        full: (N+1) x (N+1) differentiation matrix
        interior: N x N submatrix D (rows and columns 1..N of full)
        coupling: length-N vector d with d_j = full[j, 0]
        nodes: The generating NodeSet
    """
    full: np.ndarray
    interior: np.ndarray
    coupling: np.ndarray
    nodes: NodeSet

    @property
    def size(self):
        """N, the dimension of the interior block"""
        return self.interior.shape[0]


def equispaced_nodes(a, b, count):
    """
    Uniform nodes covering [a, b] with both endpoints included

    Args:
        a: Left endpoint
        b: Right endpoint, b > a
        count: Number of nodes, at least 2

    Returns:
        NodeSet: count nodes with spacing (b - a) / (count - 1)
    """
    if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
        raise InvalidIntervalError(f"invalid interval [{a}, {b}]: need a < b")
    if int(count) != count or count < 2:
        raise InvalidCountError(f"need at least 2 nodes, got {count}")

    # linspace pins both endpoints exactly, so adjacent blocks share t_N
    nodes = np.linspace(float(a), float(b), int(count))
    gaps = np.diff(nodes)
    if np.any(gaps <= _GAP_FACTOR * max(abs(a), abs(b))):
        raise DuplicateNodeError(f"interval [{a}, {b}] too narrow for {count} nodes")
    return NodeSet(nodes=_frozen(nodes), h=(float(b) - float(a)) / (count - 1), is_equispaced=True)


def _lagrange_matrix(t):
    """Differentiation matrix on raw abscissae; a single node yields [[0]]"""
    diff = t[:, None] - t[None, :]
    np.fill_diagonal(diff, 1.0)
    # P'(t_j) = prod_{l != j} (t_j - t_l)
    p_prime = np.prod(diff, axis=1)

    matrix = p_prime[:, None] / (diff * p_prime[None, :])

    inverse = 1.0 / diff
    np.fill_diagonal(inverse, 0.0)
    np.fill_diagonal(matrix, inverse.sum(axis=1))
    return matrix


def build(nodes):
    """
    Build the differentiation matrix of a node set

    Off-diagonal entries are P'(t_j) / ((t_j - t_k) P'(t_k)); diagonal entries
    are sum_{l != j} 1 / (t_j - t_l).

    Args:
        nodes: A validated NodeSet

    Returns:
        DiffMatrices: The full matrix with interior and coupling views copied out
    """
    t = np.asarray(nodes.nodes, dtype=float)
    if np.any(np.diff(t) <= 0):
        raise DuplicateNodeError("node gaps underflow to zero")

    full = _lagrange_matrix(t)
    if not np.all(np.isfinite(full)):
        raise DuplicateNodeError("differentiation matrix overflowed; nodes are too close")

    return DiffMatrices(
        full=_frozen(full),
        interior=_frozen(full[1:, 1:]),
        coupling=_frozen(full[1:, 0]),
        nodes=nodes,
    )


def scaled_interior(nodes):
    """
    The h-independent interior matrix h * D of an equispaced node set

    Args:
        nodes: An equispaced NodeSet

    Returns:
        numpy.ndarray: N x N matrix whose entries depend only on N
    """
    if not nodes.is_equispaced:
        raise NotEquispacedError("scaled_interior requires equispaced nodes")
    return nodes.h * build(nodes).interior


def shifted_spectrum(matrices):
    """
    Eigenvalues of (T - t_0 1_N) D, with T = diag(t_1, ..., t_N)

    For any increasing node set these are the integers 1..N, which is why D
    is invertible.

    Returns:
        numpy.ndarray: Complex eigenvalues sorted by real part
    """
    t = matrices.nodes.nodes
    shifted = (t[1:] - t[0])[:, None] * matrices.interior
    eigenvalues = scipy.linalg.eigvals(shifted)
    return eigenvalues[np.argsort(eigenvalues.real, kind='stable')]


def identity_residual(matrices):
    """
    Residual of D (T - t_0 1_N) = (T - t_0 1_N) D_N + 1_N

    D_N is the differentiation matrix on t_1..t_N alone (the first node
    removed; [0] when N = 1). The shift multiplies D from the right, so
    D (T - t_0 1_N) is similar to (T - t_0 1_N) D and shares its integer
    spectrum. Returns the left-hand side minus the right-hand side.
    """
    t = matrices.nodes.nodes
    shift = (t[1:] - t[0])[:, None]
    reduced = _lagrange_matrix(np.asarray(t[1:], dtype=float))
    n = matrices.size
    return matrices.interior * shift.T - shift * reduced - np.eye(n)


def differentiate(matrices, values):
    """Apply the full matrix to function values sampled at the nodes"""
    values = np.asarray(values, dtype=float)
    return matrices.full @ values


def max_coupling(matrices):
    """d_M = max_j |d_j|; equals 1 / (N h) for equispaced nodes"""
    return float(np.max(np.abs(matrices.coupling)))
