"""Mahler-type functional equations and their automaton compilers.

An equation couples a power series y over a commutative ring to its
images under a substitution operator Phi.  In base q, Phi(y)(x) =
y(x^q); in Zeckendorf numeration, Phi moves the coefficient at n to
position phi(n).  We store

    A_0(x) * y = A_1(x) * Phi(y) + ... + A_d(x) * Phi^d(y) + g(x)

as a sparse table alpha[(i, j)] holding the x^j coefficient of A_i,
plus f0 and an optional polynomial inhomogeneous part g.  The equation
is *isolating* when A_0 = 1.  Coefficients of an isolating equation
satisfy the well-founded recurrence

    f_n = sum of alpha[i, j] * f_k over i >= 1 and op^i(k) + j = n,
          plus g_n,

where op is multiplication by q resp. phi; n = 0 turns into the
compatibility constraint on f0.  solve_series implements the recurrence
directly and is the oracle every automaton built here is checked
against.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional, Sequence, Tuple

from .automata import defect_automaton, polynomial_automaton, shift_regular
from .numeration import (
    ZECKENDORF,
    Base,
    NumerationError,
    NumerationKind,
    Zeckendorf,
    as_digits,
    canonical,
    floor_phi,
    format_word,
    has_adjacent_ones,
    pad,
    phi,
    phi_preimage,
    value,
)
from .rings import Ring, RingError, RingValue, parse_ring
from .wfa import (
    AutomatonError,
    WeightedAutomaton,
    eval_sequence,
    normalize,
    sequence_prefix,
    trim,
    weight,
)


class EquationError(ValueError):
    """An equation violates a precondition of the requested operation."""


class EquationFileError(EquationError):
    """Malformed equation file; the message names the offending line."""


@dataclass(frozen=True)
class SeriesPrefix:
    """Truncated power series: coefficients f_0 .. f_N in one ring."""

    ring: Ring
    coeffs: Tuple[RingValue, ...]

    def __post_init__(self):
        coeffs = tuple(self.ring.element(c) for c in self.coeffs)
        if not coeffs:
            raise EquationError("a series prefix holds at least f_0")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def order(self) -> int:
        """The truncation order N."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def __eq__(self, other):
        if not isinstance(other, SeriesPrefix):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:8])
        tail = ", ..." if len(self.coeffs) > 8 else ""
        return f"<SeriesPrefix over {self.ring.spec} to order {self.order}: {head}{tail}>"


@dataclass(frozen=True, eq=False)
class MahlerEquation:
    """A_0(x) y = sum_{i=1}^{d} A_i(x) Phi^i(y) + g(x), sparse coefficients.

    alpha maps (i, j) to the x^j coefficient of A_i; zero entries are
    dropped on construction.  d and h are derived from the support (and
    checked against the declared values when given): d is the largest i
    with A_i nonzero, h the largest j appearing anywhere.  g_poly maps
    exponents to the coefficients of the polynomial inhomogeneous part;
    most equations leave it empty.
    """

    ring: Ring
    kind: NumerationKind
    alpha: Mapping
    f0: RingValue
    g_poly: Mapping = None
    d: int = None
    h: int = None

    def __post_init__(self):
        ring = self.ring
        if not isinstance(self.kind, (Base, Zeckendorf)):
            raise EquationError(f"unknown numeration kind: {self.kind!r}")
        clean = {}
        for key, val in dict(self.alpha).items():
            try:
                i, j = key
            except (TypeError, ValueError):
                raise EquationError(f"alpha key {key!r} is not an (i, j) pair") from None
            if not (isinstance(i, int) and isinstance(j, int)) or i < 0 or j < 0:
                raise EquationError(f"alpha index {key!r} out of range")
            v = ring.element(val)
            if v:
                clean[(i, j)] = v
        if not clean:
            raise EquationError("equation has no nonzero coefficient")
        gp = {}
        for j, val in dict(self.g_poly or {}).items():
            if not isinstance(j, int) or j < 0:
                raise EquationError(f"g exponent {j!r} out of range")
            v = ring.element(val)
            if v:
                gp[j] = v
        d = max(i for i, _ in clean)
        h = max(j for _, j in clean)
        if self.d is not None and self.d != d:
            raise EquationError(
                f"declared exponent d = {self.d} but the coefficients give d = {d}")
        if self.h is not None and self.h != h:
            raise EquationError(
                f"declared height h = {self.h} but the coefficients give h = {h}")
        object.__setattr__(self, "alpha", MappingProxyType(clean))
        object.__setattr__(self, "g_poly", MappingProxyType(gp))
        object.__setattr__(self, "f0", ring.element(self.f0))
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "h", h)

    def coefficient(self, i: int, j: int) -> RingValue:
        return self.alpha.get((i, j), self.ring.zero)

    def a(self, i: int) -> dict:
        """The polynomial A_i as a dict exponent -> coefficient."""
        return {j: v for (ii, j), v in self.alpha.items() if ii == i}

    def g(self, j: int) -> RingValue:
        return self.g_poly.get(j, self.ring.zero)

    @property
    def is_homogeneous(self) -> bool:
        return not self.g_poly

    def __repr__(self):
        kind = f"base {self.kind.q}" if isinstance(self.kind, Base) else "zeckendorf"
        extra = "" if self.is_homogeneous else ", inhomogeneous"
        return (f"<MahlerEquation {kind} over {self.ring.spec}, "
                f"d={self.d}, h={self.h}{extra}>")


def is_isolating(P: MahlerEquation) -> bool:
    """True when A_0 = 1 (the single coefficient alpha[0, 0] = 1)."""
    a00 = P.alpha.get((0, 0))
    if a00 is None or not a00.is_one():
        return False
    return all(i != 0 or j == 0 for (i, j) in P.alpha)


def _compat_sides(P: MahlerEquation, f0: RingValue, g0: RingValue):
    """Both sides of the n = 0 coefficient identity."""
    lhs = P.coefficient(0, 0) * f0
    rhs = g0
    for (i, j), a in P.alpha.items():
        if i >= 1 and j == 0:
            rhs = rhs + a * f0
    return lhs, rhs


def compatible_f0(P: MahlerEquation, f0=None, g0=None) -> bool:
    """n = 0 instance of the recurrence: alpha[0,0] f0 = sum_{i>=1} alpha[i,0] f0 + g0.

    For an isolating homogeneous equation this is f0 = (sum of the
    constant terms of A_1..A_d) * f0.  g0 defaults to the equation's own
    inhomogeneous part and may be overridden when g comes from an
    automaton.
    """
    ring = P.ring
    f0 = P.f0 if f0 is None else ring.element(f0)
    g0 = P.g(0) if g0 is None else ring.element(g0)
    lhs, rhs = _compat_sides(P, f0, g0)
    return lhs == rhs


def _incompatible(P: MahlerEquation, f0: RingValue, g0: RingValue) -> EquationError:
    lhs, rhs = _compat_sides(P, f0, g0)
    return EquationError(
        f"f0 = {f0} is not compatible: the n = 0 coefficient identity "
        f"needs {lhs} = {rhs}")


def _g_lookup(P: MahlerEquation, g, N: int):
    """Accessor for g_n; an explicit prefix overrides the polynomial part."""
    ring = P.ring
    if g is None:
        gp = P.g_poly
        zero = ring.zero
        return lambda n: gp.get(n, zero)
    if isinstance(g, SeriesPrefix):
        if g.ring != ring:
            raise EquationError("g series ring differs from the equation ring")
        seq = g.coeffs
    else:
        seq = tuple(ring.element(v) for v in g)
    if len(seq) <= N:
        raise EquationError(f"g prefix too short: need g_0..g_{N}, got {len(seq)} entries")
    return lambda n: seq[n]


def solve_series(P: MahlerEquation, N: int, f0=None, g=None) -> SeriesPrefix:
    """f_0..f_N by the coefficient recurrence; the oracle for every builder.

    Requires the isolating form.  Each f_n with n >= 1 collects
    alpha[i, j] * f_k over all i >= 1 and k with op^i(k) + j = n (all
    such k are < n, so the recurrence is well-founded), plus g_n.  An
    explicit g prefix overrides the equation's polynomial part.
    """
    if N < 0:
        raise EquationError(f"need N >= 0, got {N}")
    if not is_isolating(P):
        raise EquationError(
            "equation is not isolating (A_0 != 1); only isolating equations "
            "determine their coefficients by recurrence")
    ring = P.ring
    f0 = P.f0 if f0 is None else ring.element(f0)
    g_at = _g_lookup(P, g, N)
    if not compatible_f0(P, f0, g_at(0)):
        raise _incompatible(P, f0, g_at(0))
    out = [f0]
    if isinstance(P.kind, Base):
        q = P.kind.q
        items = [(j, a, q ** i) for (i, j), a in sorted(P.alpha.items()) if i >= 1]
        for n in range(1, N + 1):
            acc = g_at(n)
            for j, a, p in items:
                m = n - j
                if m < 0:
                    continue
                k, r = divmod(m, p)
                if r == 0:
                    acc = acc + a * out[k]
            out.append(acc)
    else:
        items = [(i, j, a) for (i, j), a in sorted(P.alpha.items()) if i >= 1]
        for n in range(1, N + 1):
            acc = g_at(n)
            for i, j, a in items:
                m = n - j
                if m < 0:
                    continue
                k = phi_preimage(m, i)
                if k is not None:
                    acc = acc + a * out[k]
            out.append(acc)
    return SeriesPrefix(ring, tuple(out))


def residual(P: MahlerEquation, s, g=None) -> SeriesPrefix:
    """Coefficients of A_0 s - sum_{i>=1} A_i Phi^i(s) - g, to the order of s.

    Identically zero exactly when s solves the equation up to its
    truncation order.  Works for non-isolating equations; needs no
    coefficients beyond the prefix because phi(k) >= k and q*k >= k.
    """
    ring = P.ring
    if isinstance(s, SeriesPrefix):
        if s.ring != ring:
            raise EquationError("series ring differs from the equation ring")
        seq = s.coeffs
    else:
        seq = tuple(ring.element(v) for v in s)
        if not seq:
            raise EquationError("empty series prefix")
    N = len(seq) - 1
    g_at = _g_lookup(P, g, N)
    items = sorted(P.alpha.items())
    is_base = isinstance(P.kind, Base)
    q = P.kind.q if is_base else None
    out = []
    for n in range(N + 1):
        acc = -g_at(n)
        for (i, j), a in items:
            m = n - j
            if m < 0:
                continue
            if i == 0:
                acc = acc + a * seq[m]
                continue
            if is_base:
                k, r = divmod(m, q ** i)
                if r:
                    continue
            else:
                k = phi_preimage(m, i)
                if k is None:
                    continue
            acc = acc - a * seq[k]
        out.append(acc)
    return SeriesPrefix(ring, tuple(out))


# ---------------------------------------------------------------------------
# equation files

def parse_equation(text: str) -> MahlerEquation:
    """Parse the line-oriented equation format.

    Directives: `ring <spec>`, `numeration base <q>` or `numeration
    zeckendorf`, `d <int>`, `h <int>`, `f0 <element>`, one `alpha <i>
    <j> <element>` per nonzero coefficient, optional `g <j> <element>`
    lines for a polynomial inhomogeneous part.  Blank lines and lines
    starting with `#` are skipped.  Declared d/h must match the
    coefficient support.
    """

    def fail(lineno, msg):
        raise EquationFileError(f"line {lineno}: {msg}")

    def intval(tok, lineno, what):
        try:
            return int(tok, 10)
        except ValueError:
            fail(lineno, f"{what} must be an integer, got {tok!r}")

    ring = None
    kind = None
    decl = {}
    f0_entry = None
    alpha_entries = {}
    g_entries = {}
    singles = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        key = toks[0]
        if key in ("ring", "numeration", "d", "h", "f0"):
            if key in singles:
                fail(lineno, f"duplicate {key} line")
            singles.add(key)
        if key == "ring":
            if len(toks) != 2:
                fail(lineno, "expected: ring <spec>")
            try:
                ring = parse_ring(toks[1])
            except RingError as e:
                fail(lineno, str(e))
        elif key == "numeration":
            if len(toks) == 2 and toks[1] == "zeckendorf":
                kind = ZECKENDORF
            elif len(toks) == 3 and toks[1] == "base":
                try:
                    kind = Base(intval(toks[2], lineno, "base"))
                except NumerationError as e:
                    fail(lineno, str(e))
            else:
                fail(lineno, "expected: numeration base <q>  or  numeration zeckendorf")
        elif key in ("d", "h"):
            if len(toks) != 2:
                fail(lineno, f"expected: {key} <int>")
            decl[key] = (lineno, intval(toks[1], lineno, key))
        elif key == "f0":
            if len(toks) != 2:
                fail(lineno, "expected: f0 <element>")
            f0_entry = (lineno, toks[1])
        elif key == "alpha":
            if len(toks) != 4:
                fail(lineno, "expected: alpha <i> <j> <element>")
            i = intval(toks[1], lineno, "alpha index i")
            j = intval(toks[2], lineno, "alpha index j")
            if i < 0 or j < 0:
                fail(lineno, f"alpha indices must be nonnegative, got ({i}, {j})")
            if (i, j) in alpha_entries:
                fail(lineno, f"duplicate alpha ({i}, {j})")
            alpha_entries[(i, j)] = (lineno, toks[3])
        elif key == "g":
            if len(toks) != 3:
                fail(lineno, "expected: g <j> <element>")
            j = intval(toks[1], lineno, "g exponent")
            if j < 0:
                fail(lineno, f"g exponent must be nonnegative, got {j}")
            if j in g_entries:
                fail(lineno, f"duplicate g {j}")
            g_entries[j] = (lineno, toks[2])
        else:
            fail(lineno, f"unknown directive {key!r}")
    if ring is None:
        raise EquationFileError("missing ring line")
    if kind is None:
        raise EquationFileError("missing numeration line")
    if f0_entry is None:
        raise EquationFileError("missing f0 line")
    if not alpha_entries:
        raise EquationFileError("missing alpha lines")

    def element(entry, what):
        lineno, tok = entry
        try:
            return ring.parse(tok)
        except RingError as e:
            fail(lineno, f"bad {what}: {e}")

    f0 = element(f0_entry, "f0")
    alpha = {key: element(entry, f"alpha {key[0]} {key[1]}")
             for key, entry in alpha_entries.items()}
    g_poly = {j: element(entry, f"g {j}") for j, entry in g_entries.items()}
    support = {key for key, val in alpha.items() if val}
    if not support:
        raise EquationFileError("all alpha coefficients are zero")
    true_d = max(i for i, _ in support)
    true_h = max(j for _, j in support)
    if "d" in decl and decl["d"][1] != true_d:
        fail(decl["d"][0], f"declared d = {decl['d'][1]} but the alpha lines give d = {true_d}")
    if "h" in decl and decl["h"][1] != true_h:
        fail(decl["h"][0], f"declared h = {decl['h'][1]} but the alpha lines give h = {true_h}")
    return MahlerEquation(ring=ring, kind=kind, alpha=alpha, f0=f0, g_poly=g_poly)


def format_equation(P: MahlerEquation) -> str:
    """Inverse of parse_equation, with coefficients in lexicographic order."""
    lines = [f"ring {P.ring.spec}"]
    if isinstance(P.kind, Base):
        lines.append(f"numeration base {P.kind.q}")
    else:
        lines.append("numeration zeckendorf")
    lines.append(f"d {P.d}")
    lines.append(f"h {P.h}")
    lines.append(f"f0 {P.f0}")
    for (i, j) in sorted(P.alpha):
        lines.append(f"alpha {i} {j} {P.alpha[(i, j)]}")
    for j in sorted(P.g_poly):
        lines.append(f"g {j} {P.g_poly[j]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# base-q compilation

def build_automaton_q(P: MahlerEquation, f0=None, *,
                      _extra_i: int = 0, _extra_j: int = 0) -> WeightedAutomaton:
    """Weighted automaton computing f_n on base-q expansions of n.

    Grid states s_{i,j} with 0 <= i <= d-1 and 0 <= j <= h~ where
    h~ = max(0, ceil(h/(q-1)) - 1); offsets above h~ cannot occur on a
    path with nonzero weight and are cut.  Reading digit b from s_{i,j}
    either descends one layer with weight 1, tracking the offset
    j -> qj + b, or closes the block of layers with weight
    alpha[i+1, qj+b-k] into s_{0,k}.  I = f0 on the whole j = 0 column,
    F = 1 on s_{0,0}; the result is trimmed.  Leading zeros do not
    change weights: compatibility of f0 makes the initial vector stable
    under reading 0.

    _extra_i/_extra_j widen the grid beyond the cutoffs; the extra
    states never occur on a nonzero-weight path, so the evaluated
    sequence must not change.  Exposed for that validation only.
    """
    if not isinstance(P.kind, Base):
        raise EquationError("build_automaton_q needs a base-q equation")
    if P.g_poly:
        raise EquationError(
            "inhomogeneous equations are supported only over Zeckendorf "
            "numeration (build_automaton_dumas)")
    if not is_isolating(P):
        raise EquationError("equation is not isolating (A_0 != 1)")
    ring = P.ring
    f0 = P.f0 if f0 is None else ring.element(f0)
    if not compatible_f0(P, f0, ring.zero):
        raise _incompatible(P, f0, ring.zero)
    q = P.kind.q
    d = max(P.d, 1) + _extra_i
    h = P.h
    ht = max(0, -(-h // (q - 1)) - 1) + _extra_j
    width = ht + 1

    def idx(i, j):
        return i * width + j

    one = ring.one
    zero = ring.zero
    trans = {}
    for i in range(d):
        for j in range(width):
            src = idx(i, j)
            for b in range(q):
                m = q * j + b
                if i + 1 <= d - 1 and m <= ht:
                    trans[(src, b, idx(i + 1, m))] = one
                for k in range(0, min(ht, m) + 1):
                    a = P.alpha.get((i + 1, m - k))
                    if a is not None:
                        trans[(src, b, idx(0, k))] = a
    n = d * width
    initial = [zero] * n
    for i in range(d):
        initial[idx(i, 0)] = f0
    final = [zero] * n
    final[idx(0, 0)] = one
    return trim(WeightedAutomaton(
        ring=ring,
        alphabet=tuple(range(q)),
        states=tuple(f"s{i}_{j}" for i in range(d) for j in range(width)),
        initial=tuple(initial),
        final=tuple(final),
        transitions=trans,
    ))


# ---------------------------------------------------------------------------
# Zeckendorf compilation

@dataclass(frozen=True)
class ZSpaceInfo:
    """Grid parameters of the Zeckendorf construction for one equation.

    grid_bound counts the full state grid d * (h~+1) * 5 * 2^g before
    any trimming; trim_bound is the 320*d*h^2 cap the trimmed automaton
    is expected to respect (meaningful for h >= 1).
    """

    h_tilde: int
    window: int
    grid_bound: int
    trim_bound: int


def z_state_space(P: MahlerEquation) -> ZSpaceInfo:
    """Offsets run 0..h~ with h~ = floor((h+2)*phi) - 1; windows have
    length g = |canonical(h~)|."""
    ht = floor_phi(P.h + 2) - 1
    g = len(canonical(ht).digits)
    d = max(P.d, 1)
    return ZSpaceInfo(
        h_tilde=ht,
        window=g,
        grid_bound=d * (ht + 1) * 5 * (2 ** g),
        trim_bound=320 * d * P.h * P.h,
    )


class _ZContext:
    """Shared tables for the Zeckendorf grid.

    A grid state is (i, j, q, u): layer i, offset j, defect-automaton
    state q, and the window u holding the last g input digits (the word
    is implicitly padded with g leading zeros).  delta_hat runs the
    defect automaton from q over the digitwise difference u - (j)_Z and
    reads off the linearity defect; the offset after consuming the next
    digit b is then phi(j) + delta_hat + b.
    """

    def __init__(self, P: MahlerEquation, extra_i: int = 0, extra_j: int = 0):
        self.P = P
        self.ring = P.ring
        self.d = max(P.d, 1) + extra_i
        self.h = P.h
        self.ht = floor_phi(P.h + 2) - 1 + extra_j
        self.g = len(canonical(self.ht).digits)
        dfa = defect_automaton()
        self.q_init = dfa.initial
        self.dtrans = dict(dfa.transitions)
        self.douts = dfa.outputs
        self.phi_tab = [phi(j) for j in range(self.ht + 1)]
        self.pad_tab = [pad(canonical(j), self.g).digits for j in range(self.ht + 1)]

    def delta_hat(self, j: int, qs: int, u: tuple) -> Optional[int]:
        """Defect output after running u - (j)_Z from qs; None when the
        run needs the missing defect edge (such states are unreachable
        while reading adjacent-ones-free input and get no transitions)."""
        s = qs
        pj = self.pad_tab[j]
        step = self.dtrans.get
        for t in range(self.g):
            s = step((s, u[t] - pj[t]))
            if s is None:
                return None
        return self.douts[s]

    def seeds(self) -> list:
        u0 = (0,) * self.g
        return [(i, 0, self.q_init, u0) for i in range(self.d)]

    def moves(self, state: tuple) -> list:
        """Out-transitions (b, target, weight) of one grid state.

        The guess b = 1 is cut when the window already ends in 1: no
        adjacent-ones-free word takes that edge, so cutting it keeps
        weights intact on the whole contract domain while keeping the
        explored grid small.
        """
        i, j, qs, u = state
        dh = self.delta_hat(j, qs, u)
        if dh is None:
            return []
        q2 = self.dtrans[(qs, u[0])]
        pj = self.phi_tab[j]
        one = self.ring.one
        alpha = self.P.alpha
        out = []
        for b in (0, 1):
            if b == 1 and u[-1] == 1:
                continue
            ell = pj + dh + b
            u2 = u[1:] + (b,)
            if i + 1 <= self.d - 1 and 0 <= ell <= self.ht:
                out.append((b, (i + 1, ell, q2, u2), one))
            if ell >= 0:
                for k in range(max(0, ell - self.h), min(self.ht, ell) + 1):
                    a = alpha.get((i + 1, ell - k))
                    if a is not None:
                        out.append((b, (0, k, q2, u2), a))
        return out

    def state_name(self, state: tuple) -> str:
        i, j, qs, u = state
        return f"s{i}_{j}_q{qs}_u{''.join(map(str, u))}"


def build_automaton_z(P: MahlerEquation, f0=None, *,
                      _extra_i: int = 0, _extra_j: int = 0) -> WeightedAutomaton:
    """Weighted automaton computing f_n on Zeckendorf expansions of n.

    Explores the grid of _ZContext lazily from the seeds s_{i,0,q0,0^g}
    (initial weight f0) and keeps F = 1 exactly on layer-0 states with
    offset 0.  The contract covers every adjacent-ones-free word, with
    leading zeros allowed; evaluate through weight_z to get the
    adjacent-ones check.  The result is trimmed.

    _extra_i/_extra_j widen the grid beyond the cutoffs without
    changing the evaluated sequence; exposed for validating exactly
    that.
    """
    if not isinstance(P.kind, Zeckendorf):
        raise EquationError("build_automaton_z needs a Zeckendorf equation")
    if P.g_poly:
        raise EquationError(
            "inhomogeneous equations need build_automaton_dumas")
    if not is_isolating(P):
        raise EquationError("equation is not isolating (A_0 != 1)")
    ring = P.ring
    f0 = P.f0 if f0 is None else ring.element(f0)
    if not compatible_f0(P, f0, ring.zero):
        raise _incompatible(P, f0, ring.zero)
    ctx = _ZContext(P, _extra_i, _extra_j)
    index = {}
    order = []
    todo = []

    def visit(s):
        i = index.get(s)
        if i is None:
            i = len(order)
            index[s] = i
            order.append(s)
            todo.append(s)
        return i

    for s in ctx.seeds():
        visit(s)
    trans = {}
    while todo:
        s = todo.pop()
        si = index[s]
        for b, t, w in ctx.moves(s):
            trans[(si, b, visit(t))] = w
    zero = ring.zero
    one = ring.one
    n = len(order)
    initial = [zero] * n
    for s in ctx.seeds():
        initial[index[s]] = f0
    final = [one if (s[0] == 0 and s[1] == 0) else zero for s in order]
    return trim(WeightedAutomaton(
        ring=ring,
        alphabet=(0, 1),
        states=tuple(ctx.state_name(s) for s in order),
        initial=tuple(initial),
        final=tuple(final),
        transitions=trans,
    ))


def weight_z(A: WeightedAutomaton, word) -> RingValue:
    """Zeckendorf-contract evaluation: rejects words with adjacent ones."""
    w = as_digits(word)
    if has_adjacent_ones(w):
        raise NumerationError(
            f"word {format_word(w)} has adjacent ones; Zeckendorf automata "
            "are specified on adjacent-ones-free words only")
    return weight(A, w)


def build_automaton_dumas(P: MahlerEquation, G: WeightedAutomaton = None,
                          f0=None) -> WeightedAutomaton:
    """Solution automaton for f = sum_i A_i Phi^i(f) + g with regular g.

    The homogeneous grid of build_automaton_z is extended, for each
    offset j <= h~, with a copy B_j of the automaton for x^j g
    (normalize(shift_regular(G, j))), run in lockstep with the defect
    state and digit window of the grid.  Transitions of B_j into its
    unique final state are rerouted to the grid state s_{0,j,q,u}
    whose (q, u) the lockstep tracking dictates, which injects g_{n-j}
    into the offset-j carrier exactly where the recurrence wants it.
    The empty-word mass of each B_j is dropped: canonical expansions are
    never empty, and the n = 0 identity is instead enforced up front as
    compatibility of f0 with g_0 (without it no automaton of this shape
    can compute the series, since the weight of "0" always equals the
    right-hand side of that identity).

    G defaults to the polynomial automaton of the equation's g lines.
    """
    if not isinstance(P.kind, Zeckendorf):
        raise EquationError("build_automaton_dumas needs a Zeckendorf equation")
    if not is_isolating(P):
        raise EquationError("equation is not isolating (A_0 != 1)")
    ring = P.ring
    if G is None:
        if P.g_poly:
            top = max(P.g_poly)
            coeffs = [P.g_poly.get(j, ring.zero) for j in range(top + 1)]
        else:
            coeffs = [ring.zero]
        G = polynomial_automaton(coeffs, ZECKENDORF, ring)
    else:
        if P.g_poly:
            raise EquationError(
                "pass the inhomogeneous part either as g lines or as an "
                "automaton, not both")
        if G.ring != ring:
            raise EquationError("g automaton ring differs from the equation ring")
        if not set(G.alphabet) <= {0, 1}:
            raise EquationError("g automaton must read the digits {0, 1}")
    g0 = eval_sequence(G, ZECKENDORF, 0)
    f0 = P.f0 if f0 is None else ring.element(f0)
    if not compatible_f0(P, f0, g0):
        raise _incompatible(P, f0, g0)
    ctx = _ZContext(P)
    zero = ring.zero
    one = ring.one

    main_index = {}
    main_order = []
    main_todo = []

    def main_visit(s):
        i = main_index.get(s)
        if i is None:
            i = len(main_order)
            main_index[s] = i
            main_order.append(s)
            main_todo.append(s)
        return i

    for s in ctx.seeds():
        main_visit(s)

    # B_j parts first: their reroutes decide which extra grid states the
    # main exploration must start from.
    u0 = (0,) * ctx.g
    parts = []
    for j in range(ctx.ht + 1):
        Bj = normalize(shift_regular(G, j))
        fins = [t for t, w in enumerate(Bj.final) if w]
        if len(fins) != 1:
            raise AutomatonError("normalize did not produce a single final state")
        fin = fins[0]
        out_by_state = {}
        for (src, b, dst), w in Bj.transitions.items():
            out_by_state.setdefault(src, []).append((b, dst, w))
        p_index = {}
        p_order = []
        p_todo = []

        def p_visit(ps):
            i = p_index.get(ps)
            if i is None:
                i = len(p_order)
                p_index[ps] = i
                p_order.append(ps)
                p_todo.append(ps)
            return i

        for sidx, w in enumerate(Bj.initial):
            if w and sidx != fin:
                p_visit((sidx, ctx.q_init, u0))
        internal = []
        jumps = []
        while p_todo:
            ps = p_todo.pop()
            pi = p_index[ps]
            bs, qs, u = ps
            q2 = ctx.dtrans[(qs, u[0])]
            for b, dst, w in out_by_state.get(bs, ()):
                if b == 1 and u[-1] == 1:
                    continue
                u2 = u[1:] + (b,)
                if dst == fin:
                    jumps.append((pi, b, main_visit((0, j, q2, u2)), w))
                else:
                    internal.append((pi, b, p_visit((dst, q2, u2)), w))
        init = {}
        for ps in p_order:
            w = Bj.initial[ps[0]]
            if w and ps[1] == ctx.q_init and ps[2] == u0:
                init[p_index[ps]] = init.get(p_index[ps], zero) + w
        parts.append((p_order, internal, jumps, init))

    trans = {}
    while main_todo:
        s = main_todo.pop()
        si = main_index[s]
        for b, t, w in ctx.moves(s):
            trans[(si, b, main_visit(t))] = w

    n_main = len(main_order)
    names = [ctx.state_name(s) for s in main_order]
    initial = [zero] * n_main
    for s in ctx.seeds():
        initial[main_index[s]] = f0
    final = [one if (s[0] == 0 and s[1] == 0) else zero for s in main_order]
    for j, (p_order, internal, jumps, init) in enumerate(parts):
        offset = len(names)
        names.extend(f"g{j}n{t}" for t in range(len(p_order)))
        initial.extend(init.get(t, zero) for t in range(len(p_order)))
        final.extend(zero for _ in p_order)
        for pi, b, pt, w in internal:
            trans[(offset + pi, b, offset + pt)] = w
        for pi, b, mt, w in jumps:
            trans[(offset + pi, b, mt)] = w
    return trim(WeightedAutomaton(
        ring=ring,
        alphabet=(0, 1),
        states=tuple(names),
        initial=tuple(initial),
        final=tuple(final),
        transitions=trans,
    ))


# ---------------------------------------------------------------------------
# reverse direction: from automaton to equation

def _kernel_basis(ring: Ring, rows: list, ncols: int) -> list:
    """Right-kernel basis of a matrix of ring payloads over a field.

    Gauss-Jordan with exact arithmetic; one basis vector per free
    column, emitted in ascending column order.
    """
    add, mul, neg, inv = ring._add, ring._mul, ring._neg, ring._inv
    zero = ring.zero.payload
    one = ring.one.payload
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        prow = None
        for rr in range(r, len(mat)):
            if mat[rr][c] != zero:
                prow = rr
                break
        if prow is None:
            continue
        mat[r], mat[prow] = mat[prow], mat[r]
        ipiv = inv(mat[r][c])
        mat[r] = [mul(ipiv, x) for x in mat[r]]
        row_r = mat[r]
        for rr in range(len(mat)):
            if rr != r and mat[rr][c] != zero:
                factor = mat[rr][c]
                mat[rr] = [add(x, neg(mul(factor, y)))
                           for x, y in zip(mat[rr], row_r)]
        pivots.append((r, c))
        r += 1
        if r == len(mat):
            break
    pivot_cols = {c for _, c in pivots}
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        v = [zero] * ncols
        v[free] = one
        for rr, c in pivots:
            v[c] = neg(mat[rr][free])
        basis.append(v)
    return basis


def find_relation(A: WeightedAutomaton, kind: NumerationKind, d_max: int,
                  h_max: int, N: int, N_check: int = None) -> Optional[MahlerEquation]:
    """Search for an equation annihilating the sequence of A.

    Sets up the homogeneous linear system "coefficient n of
    sum_{i<=d_max} C_i(x) Phi^i(s) is zero for n = 0..N" in the unknown
    coefficients of the C_i, solves it exactly over the (field) ring of
    A, and re-verifies each kernel basis vector against the longer
    prefix s_0..s_{N_check} (default 4N).  Returns the first candidate
    whose residual vanishes on the whole check prefix, normalized so the
    first nonzero stored coefficient in lexicographic (i, j) order is 1,
    or None.  The choice of basis vectors follows ascending free
    columns, so a zero sequence yields the single coefficient
    alpha[0, 0] = 1.
    """
    ring = A.ring
    if not ring.is_field:
        raise RingError(f"find_relation needs a field ring, got {ring.spec}")
    if d_max < 0 or h_max < 0:
        raise EquationError("d_max and h_max must be nonnegative")
    if N < 1:
        raise EquationError(f"need N >= 1, got {N}")
    N_check = 4 * N if N_check is None else N_check
    if N_check <= N:
        raise EquationError(f"N_check must exceed N, got {N_check} <= {N}")
    s = sequence_prefix(A, kind, N_check)
    sp = [v.payload for v in s]
    zero = ring.zero.payload
    cols = [(i, j) for i in range(d_max + 1) for j in range(h_max + 1)]
    is_base = isinstance(kind, Base)
    q = kind.q if is_base else None
    rows = []
    for n in range(N + 1):
        row = []
        for (i, j) in cols:
            m = n - j
            if m < 0:
                row.append(zero)
            elif i == 0:
                row.append(sp[m])
            elif is_base:
                k, r = divmod(m, q ** i)
                row.append(sp[k] if r == 0 else zero)
            else:
                k = phi_preimage(m, i)
                row.append(sp[k] if k is not None else zero)
        rows.append(row)
    sfull = SeriesPrefix(ring, tuple(s))
    for v in _kernel_basis(ring, rows, len(cols)):
        alpha = {}
        for (i, j), payload in zip(cols, v):
            if payload == zero:
                continue
            val = RingValue(ring, payload)
            alpha[(i, j)] = val if i == 0 else -val
        if not alpha:
            continue
        u = alpha[min(alpha)].inverse()
        alpha = {key: u * val for key, val in alpha.items()}
        cand = MahlerEquation(ring=ring, kind=kind, alpha=alpha, f0=s[0])
        if residual(cand, sfull).is_zero():
            return cand
    return None


# ---------------------------------------------------------------------------
# isolating normalization over prime fields

def _poly_from(ring: Ring, poly) -> dict:
    """Sparse coefficient dict from a list/tuple or exponent mapping."""
    items = poly.items() if isinstance(poly, Mapping) else enumerate(poly)
    out = {}
    for j, v in items:
        if not isinstance(j, int) or j < 0:
            raise EquationError(f"polynomial exponent {j!r} out of range")
        v = ring.element(v)
        if v:
            out[j] = v
    return out


def _poly_mul(a: dict, b: dict) -> dict:
    out = {}
    for ja, va in a.items():
        for jb, vb in b.items():
            j = ja + jb
            cur = out.get(j)
            p = va * vb
            out[j] = p if cur is None else cur + p
    return {j: v for j, v in out.items() if v}


def _poly_pow(ring: Ring, a: dict, e: int) -> dict:
    result = {0: ring.one}
    base = dict(a)
    while e:
        if e & 1:
            result = _poly_mul(result, base)
        base = _poly_mul(base, base)
        e >>= 1
    return result


def christol_isolate(ore: Sequence, q: int, ring: Ring):
    """Rewrite an annihilating operator into isolating form by substitution.

    ore lists the polynomials A_0..A_d of an operator
    sum_{i=0}^d A_i Phi^i annihilating f, over a prime field whose
    characteristic equals q.  Substituting f = A_0 * g and using
    A_0(x)^{q^i} = A_0(x^{q^i}) (Frobenius) turns the relation into
    A_0^2 * (g + sum_{i>=1} B_i Phi^i(g)) = 0 with
    B_i = A_i * A_0^{q^i - 2}, so g satisfies the isolating equation
    with stored coefficients alpha[i, j] = -(B_i)_j.  Returns that
    equation together with the dense coefficient tuple of the multiplier
    A_0; the caller recovers f as the Cauchy product of A_0 and g, with
    g_0 = f_0 / A_0(0).

    The stored f0 of the returned equation is a compatible default (1
    when the constant terms allow a free choice, else 0); pass the g_0
    you actually want to the automaton builder.
    """
    if not ring.is_field or ring.characteristic != q:
        raise RingError(
            f"christol_isolate needs a prime field of characteristic q = {q}, "
            f"got {ring.spec}")
    polys = [_poly_from(ring, p) for p in ore]
    while polys and not polys[-1]:
        polys.pop()
    d = len(polys) - 1
    if d < 1:
        raise EquationError("operator needs d >= 1 (some Phi term)")
    a0 = polys[0]
    if not a0:
        raise EquationError("A_0 = 0 cannot be normalized away")
    if 0 not in a0:
        raise EquationError("A_0(0) = 0: the multiplier has no series inverse")
    alpha = {(0, 0): ring.one}
    for i in range(1, d + 1):
        if not polys[i]:
            continue
        bi = _poly_mul(polys[i], _poly_pow(ring, a0, q ** i - 2))
        for j, v in bi.items():
            alpha[(i, j)] = -v
    sum0 = ring.zero
    for (i, j), v in alpha.items():
        if i >= 1 and j == 0:
            sum0 = sum0 + v
    f0 = ring.one if sum0.is_one() else ring.zero
    Q = MahlerEquation(ring=ring, kind=Base(q), alpha=alpha, f0=f0)
    a0_dense = tuple(a0.get(j, ring.zero) for j in range(max(a0) + 1))
    return Q, a0_dense


# ---------------------------------------------------------------------------
# growth of the non-regular example

@dataclass(frozen=True)
class GrowthReport:
    """Coefficients of (1-x) f = Phi(f), f_0 = 1, and growth thresholds.

    The coefficients satisfy f_n = f_{n-1} + f_{lambda(n)} when the
    expansion of n ends in 0, else f_n = f_{n-1}; equivalently f_n is
    the sum of all f_i with i <= lambda(n).  thresholds[k] is the least
    index with f_n > n^k (search restricted to n >= 1 so the k >= 1
    entries are not satisfied vacuously at n = 0; k = 0 reports the
    first n with f_n >= 1), or None when no index up to n_max works.
    """

    n_max: int
    k_max: int
    coefficients: tuple
    thresholds: Mapping

    def __post_init__(self):
        object.__setattr__(self, "thresholds", MappingProxyType(dict(self.thresholds)))

    @property
    def prefix(self) -> tuple:
        return self.coefficients[:6]


def growth_analysis(N: int, k_max: int) -> GrowthReport:
    """Coefficients f_0..f_N over plain integers plus growth thresholds.

    Both recurrence forms (the step form and the summation form) are
    computed and compared on every index; a mismatch raises, since they
    are provably equal.
    """
    if N < 1:
        raise EquationError(f"need N >= 1, got {N}")
    if k_max < 0:
        raise EquationError(f"need k_max >= 0, got {k_max}")
    f = [1]
    sums = [1]
    for n in range(1, N + 1):
        w = canonical(n).digits
        ln = value(w[:-1])
        step = f[n - 1] + (f[ln] if w[-1] == 0 else 0)
        if step != sums[ln]:
            raise EquationError(f"recurrence forms disagree at n = {n}")
        f.append(step)
        sums.append(sums[-1] + step)
    thresholds = {}
    for k in range(k_max + 1):
        found = None
        if k == 0:
            for n in range(N + 1):
                if f[n] >= 1:
                    found = n
                    break
        else:
            for n in range(1, N + 1):
                if f[n] > n ** k:
                    found = n
                    break
        thresholds[k] = found
    return GrowthReport(n_max=N, k_max=k_max, coefficients=tuple(f),
                        thresholds=thresholds)
