"""Parameter arrays, admissibility validation and specialization contexts.

A parameter array is (d; t_0..t_d; s_0..s_d; z_0..z_d): candidate eigenvalue
sequence, dual eigenvalue sequence and split sequence.  The validator checks
the three admissibility conditions:

  (i)   both eigenvalue lists are pairwise distinct;
  (ii)  z_0 = 1, z_d != 0 and sum_i eta_{d-i}(t_0) eta*_{d-i}(s_0) z_i != 0;
  (iii) the ratio families (t_{i-2}-t_{i+1})/(t_{i-1}-t_i) and the dual one
        agree with each other and are constant over 2 <= i <= d-1
        (vacuously true for d <= 2).

A specialization context carries concrete values for the eigenvalue lists and
the free weights y_1..y_d, together with the derived recurrence constant beta
(d >= 3 only) and the second-difference scalars

    eps_i = (t_{i+1}-t_{i+2})(s_{i+1}-s_{i+2}) - (t_i-t_{i+1})(s_i-s_{i+1})

for 0 <= i <= d-2.  Everything the bundled module tables mention is evaluated
at such a context.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple

from .fields import Field, FieldSpec, Sampler
from .poly import build_poly

# Stable condition identifiers used in validation failures.
COND_THETA_DISTINCT = "(i) theta distinct"
COND_THETA_STAR_DISTINCT = "(i) theta_star distinct"
COND_ZETA0 = "(ii) zeta_0=1"
COND_ZETAD = "(ii) zeta_d!=0"
COND_SUM = "(ii) sum!=0"
COND_BETA = "(iii) beta recurrence"

GUARD_BETA_PLUS_1 = "beta+1 vanishes"
GUARD_BETA = "beta vanishes"
GUARD_BETA_QUAD = "beta^2+beta-1 vanishes"


class MalformedArrayError(ValueError):
    """Structurally broken input (bad lengths), distinct from 'invalid'."""


class ContextError(ValueError):
    """A specialization context violates a named guard."""


@dataclass
class ParameterArray:
    d: int
    theta: list
    theta_star: list
    zeta: list

    def check_shape(self):
        n = self.d + 1
        if self.d < 0:
            raise MalformedArrayError("d must be nonnegative")
        for name, xs in (
            ("theta", self.theta),
            ("theta_star", self.theta_star),
            ("zeta", self.zeta),
        ):
            if len(xs) != n:
                raise MalformedArrayError(
                    f"{name} has {len(xs)} entries, expected {n}"
                )

    def to_json(self, field: Field) -> str:
        return json.dumps(
            {
                "d": self.d,
                "theta": [field.format(x) for x in self.theta],
                "theta_star": [field.format(x) for x in self.theta_star],
                "zeta": [field.format(x) for x in self.zeta],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str, field: Field) -> "ParameterArray":
        obj = json.loads(text)
        try:
            pa = cls(
                d=int(obj["d"]),
                theta=[field.parse(x) for x in obj["theta"]],
                theta_star=[field.parse(x) for x in obj["theta_star"]],
                zeta=[field.parse(x) for x in obj["zeta"]],
            )
        except KeyError as e:
            raise MalformedArrayError(f"missing key {e.args[0]!r}") from None
        pa.check_shape()
        return pa


@dataclass
class ValidationResult:
    passed: bool
    failures: List[Tuple[str, str]]
    vacuous: List[str] = dc_field(default_factory=list)

    def failure_ids(self) -> List[str]:
        return [cid for cid, _ in self.failures]

    def to_json(self) -> str:
        return json.dumps(
            {
                "passed": self.passed,
                "failures": [
                    {"condition": cid, "detail": det} for cid, det in self.failures
                ],
                "vacuous": self.vacuous,
            },
            sort_keys=True,
        )


@dataclass
class SpecializationContext:
    """Concrete evaluation point for a module table of diameter d."""

    d: int
    theta: list
    theta_star: list
    y: list  # y_1..y_d (length d)
    beta: Optional[object] = None  # present iff d >= 3
    epsilon: list = dc_field(default_factory=list)  # eps_0..eps_{d-2}, d >= 2


def _all_distinct(xs: Sequence) -> bool:
    return all(xs[i] != xs[j] for i in range(len(xs)) for j in range(i + 1, len(xs)))


def _ratio_family(field: Field, xs: Sequence) -> list:
    """[(x_{i-2}-x_{i+1})/(x_{i-1}-x_i) for 2 <= i <= d-1]; needs distinctness."""
    d = len(xs) - 1
    out = []
    for i in range(2, d):
        num = field.sub(xs[i - 2], xs[i + 1])
        den = field.sub(xs[i - 1], xs[i])
        out.append(field.div(num, den))
    return out


def admissibility_sum(field: Field, pa: ParameterArray):
    """sum_i eta_{d-i}(t_0) eta*_{d-i}(s_0) z_i — condition (ii) obstruction."""
    d = pa.d
    total = field.zero
    for i in range(d + 1):
        e = build_poly("eta", d - i, pa.theta, field)(pa.theta[0])
        es = build_poly("eta_star", d - i, pa.theta_star, field)(pa.theta_star[0])
        total = field.add(total, field.mul(field.mul(e, es), pa.zeta[i]))
    return total


def validate_parameter_array(pa: ParameterArray, field: Field) -> ValidationResult:
    """Check admissibility conditions (i)-(iii); never raises for invalid data."""
    pa.check_shape()
    failures: List[Tuple[str, str]] = []
    vacuous: List[str] = []
    d = pa.d

    theta_ok = _all_distinct(pa.theta)
    theta_star_ok = _all_distinct(pa.theta_star)
    if not theta_ok:
        failures.append((COND_THETA_DISTINCT, "theta values are not pairwise distinct"))
    if not theta_star_ok:
        failures.append(
            (COND_THETA_STAR_DISTINCT, "theta_star values are not pairwise distinct")
        )

    if pa.zeta[0] != field.one:
        failures.append((COND_ZETA0, f"zeta_0 = {field.format(pa.zeta[0])}, expected 1"))
    if field.is_zero(pa.zeta[d]):
        failures.append((COND_ZETAD, "zeta_d = 0"))
    if theta_ok and theta_star_ok:
        s = admissibility_sum(field, pa)
        if field.is_zero(s):
            failures.append((COND_SUM, "weighted zeta sum vanishes"))

    if d <= 2:
        vacuous.append(COND_BETA)
    elif theta_ok and theta_star_ok:
        ratios = _ratio_family(field, pa.theta) + _ratio_family(field, pa.theta_star)
        if any(r != ratios[0] for r in ratios[1:]):
            failures.append(
                (COND_BETA, "ratio families are not constant and equal")
            )

    return ValidationResult(passed=not failures, failures=failures, vacuous=vacuous)


def derive_context(
    theta: Sequence, theta_star: Sequence, y: Sequence, field: Field
) -> SpecializationContext:
    """Build a specialization context, deriving beta and eps and checking guards.

    Raises ContextError naming the violated guard: distinctness, the constant
    ratio requirement ("not beta-recurrent"), or a vanishing denominator guard
    (beta+1 for d >= 3, beta for d >= 4, beta^2+beta-1 for d = 5).
    """
    d = len(theta) - 1
    if len(theta_star) != d + 1:
        raise MalformedArrayError("theta and theta_star lengths differ")
    if len(y) != d:
        raise MalformedArrayError(f"y has {len(y)} entries, expected {d}")
    if not _all_distinct(list(theta)):
        raise ContextError("theta values are not pairwise distinct")
    if not _all_distinct(list(theta_star)):
        raise ContextError("theta_star values are not pairwise distinct")

    beta = None
    if d >= 3:
        ratios = _ratio_family(field, theta) + _ratio_family(field, theta_star)
        if any(r != ratios[0] for r in ratios[1:]):
            raise ContextError("not beta-recurrent")
        beta = field.sub(ratios[0], field.one)
        if field.is_zero(field.add(beta, field.one)):
            raise ContextError(GUARD_BETA_PLUS_1)
        if d >= 4 and field.is_zero(beta):
            raise ContextError(GUARD_BETA)
        if d == 5:
            quad = field.sub(field.add(field.mul(beta, beta), beta), field.one)
            if field.is_zero(quad):
                raise ContextError(GUARD_BETA_QUAD)

    epsilon = []
    for i in range(d - 1):
        lead = field.mul(
            field.sub(theta[i + 1], theta[i + 2]),
            field.sub(theta_star[i + 1], theta_star[i + 2]),
        )
        trail = field.mul(
            field.sub(theta[i], theta[i + 1]),
            field.sub(theta_star[i], theta_star[i + 1]),
        )
        epsilon.append(field.sub(lead, trail))

    return SpecializationContext(
        d=d,
        theta=list(theta),
        theta_star=list(theta_star),
        y=list(y),
        beta=beta,
        epsilon=epsilon,
    )


def _beta_recurrent_list(field: Field, sampler: Sampler, d: int, beta) -> Optional[list]:
    """Random list satisfying x_{i+1} = x_{i-2} + (beta+1)(x_i - x_{i-1});
    None if the extension hits a repeated value."""
    start = sampler.distinct(min(3, d + 1))
    xs = list(start)
    bp1 = field.add(beta, field.one)
    while len(xs) < d + 1:
        nxt = field.add(xs[-3], field.mul(bp1, field.sub(xs[-1], xs[-2])))
        if nxt in xs:
            return None
        xs.append(nxt)
    return xs


def random_admissible_context(
    d: int, spec: FieldSpec, max_attempts: int = 1000
) -> SpecializationContext:
    """Rejection-sample a context passing every guard; deterministic per seed.

    For d >= 3 a guarded beta is drawn first and both eigenvalue lists are
    extended by the three-term recurrence it induces.
    """
    sampler = Sampler(spec)
    field = sampler.field
    attempts = 0
    while attempts < max_attempts:
        attempts += 1
        if d <= 2:
            theta = sampler.distinct(d + 1)
            theta_star = sampler.distinct(d + 1)
        else:
            beta = sampler.scalar()
            if field.is_zero(field.add(beta, field.one)):
                continue
            if d >= 4 and field.is_zero(beta):
                continue
            if d == 5:
                quad = field.sub(field.add(field.mul(beta, beta), beta), field.one)
                if field.is_zero(quad):
                    continue
            theta = _beta_recurrent_list(field, sampler, d, beta)
            theta_star = _beta_recurrent_list(field, sampler, d, beta)
            if theta is None or theta_star is None:
                continue
        y = [sampler.scalar() for _ in range(d)]
        try:
            return derive_context(theta, theta_star, y, field)
        except ContextError:
            continue
    raise ContextError(
        f"no admissible context found after {max_attempts} attempts"
    )


def random_valid_parameter_array(
    d: int, spec: FieldSpec, max_attempts: int = 1000
) -> ParameterArray:
    """Rejection-sample a parameter array passing the full validator."""
    sampler = Sampler(spec)
    field = sampler.field
    attempts = 0
    while attempts < max_attempts:
        attempts += 1
        if d <= 2:
            theta = sampler.distinct(d + 1)
            theta_star = sampler.distinct(d + 1)
        else:
            beta = sampler.scalar()
            theta = _beta_recurrent_list(field, sampler, d, beta)
            theta_star = _beta_recurrent_list(field, sampler, d, beta)
            if theta is None or theta_star is None:
                continue
        zeta = [field.one] + [sampler.scalar() for _ in range(d)]
        if d >= 1 and field.is_zero(zeta[d]):
            continue
        pa = ParameterArray(d=d, theta=theta, theta_star=theta_star, zeta=zeta)
        if validate_parameter_array(pa, field).passed:
            return pa
    raise ContextError(
        f"no valid parameter array found after {max_attempts} attempts"
    )
