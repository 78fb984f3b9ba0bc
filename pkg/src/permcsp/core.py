"""Core types for Permutation CSP: instances, orderings, the evaluator.

An instance is a set of variables 1..num_vars together with a multiset of
ordered constraints.  A constraint (v1, v2, ..., vk) is satisfied by an
ordering pi exactly when pi(v1) < pi(v2) < ... < pi(vk).  Everything else
in the package is ultimately tested against :func:`evaluate`.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple


class PermCspError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(PermCspError, ValueError):
    """An argument violates a documented precondition."""


class SizeLimitError(PermCspError):
    """An instance exceeds a configured size guard."""


class UnsupportedArityError(PermCspError):
    """A solver was asked to handle an arity outside its dichotomy range."""


class InternalConsistencyError(PermCspError):
    """Two routes that must agree (closed form vs. evaluator) disagreed.

    Raising this signals an implementation bug, never bad user input.
    """


# A constraint is just an ordered tuple of distinct 1-based variable ids.
Constraint = Tuple[int, ...]


@dataclass(frozen=True)
class PermCspInstance:
    """A Permutation CSP instance.

    Variables are the integers 1..num_vars.  ``constraints`` is a tuple of
    constraints; duplicates are allowed and count multiply.  ``arity`` is
    the maximum constraint length.
    """

    num_vars: int
    constraints: Tuple[Constraint, ...]
    arity: int

    @classmethod
    def make(cls, num_vars: int, constraints: Iterable[Sequence[int]]) -> "PermCspInstance":
        """Build an instance, deriving the arity from the constraints."""
        cons = tuple(tuple(c) for c in constraints)
        arity = max((len(c) for c in cons), default=1)
        return cls(num_vars=num_vars, constraints=cons, arity=arity)


@dataclass(frozen=True)
class Ordering:
    """A bijection from variables to positions 1..num_vars.

    ``positions[v-1]`` is the position of variable v.
    """

    positions: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.positions)
        if sorted(self.positions) != list(range(1, n + 1)):
            raise InvalidInputError("positions must be a bijection onto 1..%d" % n)

    @classmethod
    def from_sequence(cls, seq: Sequence[int]) -> "Ordering":
        """Build an ordering from the variables listed in position order."""
        n = len(seq)
        positions = [0] * n
        for pos, v in enumerate(seq, start=1):
            if not 1 <= v <= n or positions[v - 1]:
                raise InvalidInputError("sequence is not a permutation of 1..%d" % n)
            positions[v - 1] = pos
        return cls(tuple(positions))

    def sequence(self) -> Tuple[int, ...]:
        """The variables in position order (inverse view of positions)."""
        seq = [0] * len(self.positions)
        for v, pos in enumerate(self.positions, start=1):
            seq[pos - 1] = v
        return tuple(seq)

    def position(self, v: int) -> int:
        return self.positions[v - 1]


def evaluate(instance: PermCspInstance, ordering: Ordering) -> int:
    """Number of constraints whose variables appear in strictly increasing
    position order.  Pure; does not modify its inputs."""
    if len(ordering.positions) != instance.num_vars:
        raise InvalidInputError(
            "ordering has %d positions, instance has %d variables"
            % (len(ordering.positions), instance.num_vars)
        )
    pos = ordering.positions
    count = 0
    for c in instance.constraints:
        prev = 0
        for v in c:
            p = pos[v - 1]
            if p <= prev:
                break
            prev = p
        else:
            count += 1
    return count


def validate_instance(instance: PermCspInstance, flag_duplicates: bool = False) -> list:
    """Report every invariant breach, each with its constraint index.

    Returns an empty list for a well-formed instance.  Duplicate
    constraints are legal (they count multiply); pass ``flag_duplicates``
    to get diagnostics for them anyway.
    """
    violations = []
    if instance.num_vars < 1:
        violations.append("num_vars must be positive, got %d" % instance.num_vars)
    for idx, c in enumerate(instance.constraints):
        if not 1 <= len(c) <= instance.arity:
            violations.append(
                "constraint %d has length %d, outside [1, arity=%d]"
                % (idx, len(c), instance.arity)
            )
        if len(set(c)) != len(c):
            violations.append("duplicate variable in constraint %d" % idx)
        for v in c:
            if not 1 <= v <= instance.num_vars:
                violations.append(
                    "index out of range in constraint %d: %d not in [1, %d]"
                    % (idx, v, instance.num_vars)
                )
    if flag_duplicates:
        seen = {}
        for idx, c in enumerate(instance.constraints):
            if c in seen:
                violations.append(
                    "note: constraint %d duplicates constraint %d" % (idx, seen[c])
                )
            else:
                seen[c] = idx
    return violations
