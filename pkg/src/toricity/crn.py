"""Reaction-network frontend.

Parsing of reaction network text, stoichiometric and kinetic matrices under
mass-action kinetics, conservation laws, removal of single-input
intermediates, multistationarity and concentration-robustness tests, and
linkage-class / deficiency structure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .exactalg import (
    IntegerMatrix,
    RationalMatrix,
    integer_kernel_basis,
    left_kernel_basis,
    same_row_lattice,
)
from .polyhedra import simplex_maximize
from .polyring import SignVerdict, SparsePolynomial, det_stacked, sign_classify
from .core import (
    AnalyzeOptions,
    EmptyLocusError,
    GroupMode,
    InvarianceResult,
    ToricityReport,
    Verdict,
    VerticalSystem,
    analyze,
    injectivity_test,
    invariance_group,
    matroid_partition,
    nondegeneracy_all_positive,
)


class NetworkParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ZeroDynamicsError(ValueError):
    """The stoichiometric matrix is zero: no dynamics to analyze."""


class InvalidChoiceError(ValueError):
    """The proposed intermediate set violates the reduction conditions."""


class SearchBudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple[str, ...]
    complexes: tuple[tuple[int, ...], ...]   # nonnegative vectors over species
    reactions: tuple[tuple[int, int, str], ...]  # (source idx, target idx, label)

    @property
    def n(self) -> int:
        return len(self.species)

    @property
    def num_reactions(self) -> int:
        return len(self.reactions)

    def complex_text(self, idx: int) -> str:
        vec = self.complexes[idx]
        parts = []
        for coeff, name in zip(vec, self.species):
            if coeff == 0:
                continue
            parts.append(name if coeff == 1 else f"{coeff}{name}")
        return " + ".join(parts) if parts else "0"

    def reaction_text(self, k: int) -> str:
        src, tgt, label = self.reactions[k]
        return f"{self.complex_text(src)} -> {self.complex_text(tgt)}  [{label}]"


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
                    r"|(?P<rev><=>)|(?P<fwd>->)|(?P<plus>\+)|(?P<colon>:))")


def _tokenize(stmt: str, line_no: int, offset: int):
    tokens = []
    pos = 0
    while pos < len(stmt):
        m = _TOKEN.match(stmt, pos)
        if m is None:
            if stmt[pos:].strip() == "":
                break
            col = offset + pos + 1
            raise NetworkParseError(f"unexpected character {stmt[pos:].strip()[0]!r}",
                                    line_no, col)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), offset + m.start(kind) + 1))
        pos = m.end()
    return tokens


def parse_network(text: str) -> ReactionNetwork:
    """Parse the one-statement-per-line / ';'-separated reaction grammar.

    A statement is a chain ``complex (->|<=>) complex [...]``; a complex is
    ``0`` or terms ``[coefficient] name`` joined by '+'.  '#' starts a
    comment.  Species are ordered by first appearance unless an initial
    ``species: A B C`` header fixes the order.  Reversible arrows expand to
    two reactions, forward first, with labels k1, k2, ... in parse order.
    """
    species: list[str] = []
    species_index: dict[str, int] = {}
    fixed_order = False
    complexes: list[dict[str, int]] = []
    complex_index: dict[tuple, int] = {}
    raw_reactions: list[tuple[int, int]] = []

    def intern_species(name, line_no, col):
        if name not in species_index:
            if fixed_order:
                raise NetworkParseError(f"species {name!r} not in the species header",
                                        line_no, col)
            species_index[name] = len(species)
            species.append(name)
        return species_index[name]

    def intern_complex(content: dict[str, int]):
        key = tuple(sorted(content.items()))
        if key not in complex_index:
            complex_index[key] = len(complexes)
            complexes.append(content)
        return complex_index[key]

    statements = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        col = 0
        for chunk in body.split(";"):
            if chunk.strip():
                statements.append((chunk, line_no, col))
            col += len(chunk) + 1

    first = True
    for stmt, line_no, offset in statements:
        tokens = _tokenize(stmt, line_no, offset)
        if not tokens:
            continue
        if first and len(tokens) >= 2 and tokens[0][0] == "name" \
                and tokens[0][1] == "species" and tokens[1][0] == "colon":
            for kind, value, col in tokens[2:]:
                if kind != "name":
                    raise NetworkParseError("species header takes names only", line_no, col)
                if value in species_index:
                    raise NetworkParseError(f"duplicate species {value!r}", line_no, col)
                species_index[value] = len(species)
                species.append(value)
            fixed_order = True
            first = False
            continue
        first = False

        # parse: complex (arrow complex)+
        idx = 0

        def parse_complex():
            nonlocal idx
            content: dict[str, int] = {}
            if idx < len(tokens) and tokens[idx][0] == "int" and tokens[idx][1] == "0" \
                    and (idx + 1 >= len(tokens) or tokens[idx + 1][0] in ("fwd", "rev")):
                idx += 1
                return content
            while True:
                coeff = 1
                if idx < len(tokens) and tokens[idx][0] == "int":
                    coeff = int(tokens[idx][1])
                    if coeff == 0:
                        raise NetworkParseError("zero coefficient", line_no, tokens[idx][2])
                    idx += 1
                if idx >= len(tokens) or tokens[idx][0] != "name":
                    where = tokens[idx][2] if idx < len(tokens) else offset + len(stmt)
                    raise NetworkParseError("expected a species name", line_no, where)
                name = tokens[idx][1]
                intern_species(name, line_no, tokens[idx][2])
                content[name] = content.get(name, 0) + coeff
                idx += 1
                if idx < len(tokens) and tokens[idx][0] == "plus":
                    idx += 1
                    continue
                return content

        left = intern_complex(parse_complex())
        arrows = 0
        while idx < len(tokens):
            kind, _, col = tokens[idx]
            if kind not in ("fwd", "rev"):
                raise NetworkParseError("expected '->' or '<=>'", line_no, col)
            idx += 1
            right = intern_complex(parse_complex())
            if right == left:
                raise NetworkParseError("reaction endpoints must differ", line_no, col)
            raw_reactions.append((left, right))
            if kind == "rev":
                raw_reactions.append((right, left))
            left = right
            arrows += 1
        if arrows == 0:
            raise NetworkParseError("statement has no reaction arrow", line_no,
                                    tokens[0][2])

    if not raw_reactions:
        raise NetworkParseError("no reactions found", 1, 1)
    vecs = tuple(tuple(c.get(name, 0) for name in species) for c in complexes)
    reactions = tuple((s, t, f"k{i+1}") for i, (s, t) in enumerate(raw_reactions))
    return ReactionNetwork(tuple(species), vecs, reactions)


# ---------------------------------------------------------------------------
# Matrices and the steady state system


def mass_action_matrices(net: ReactionNetwork) -> tuple[IntegerMatrix, IntegerMatrix]:
    """Stoichiometric matrix N (target - source) and reactant matrix M."""
    n = net.n
    ncols = net.num_reactions
    ncols_n = [[0] * ncols for _ in range(n)]
    ncols_m = [[0] * ncols for _ in range(n)]
    for j, (src, tgt, _) in enumerate(net.reactions):
        for i in range(n):
            ncols_m[i][j] = net.complexes[src][i]
            ncols_n[i][j] = net.complexes[tgt][i] - net.complexes[src][i]
    return (IntegerMatrix.with_width(ncols_n, ncols),
            IntegerMatrix.with_width(ncols_m, ncols))


def steady_state_system(net: ReactionNetwork) -> VerticalSystem:
    """Vertical system of the steady states: a row basis of N against the
    reactant exponents."""
    N, M = mass_action_matrices(net)
    C = N.to_rational().row_basis()
    if C.rows == 0:
        raise ZeroDynamicsError("stoichiometric matrix is zero")
    labels = tuple(lbl for _, _, lbl in net.reactions)
    return VerticalSystem(C, M, variables=net.species, parameters=labels)


def conservation_laws(N: IntegerMatrix) -> RationalMatrix:
    """Echelon basis of the left kernel of N (one row per conserved quantity)."""
    return left_kernel_basis(N.to_rational())


# ---------------------------------------------------------------------------
# Intermediates


@dataclass(frozen=True)
class IntermediateChoice:
    intermediates: tuple[int, ...]          # species indices
    non_intermediates: tuple[int, ...]
    input_complex: dict[int, int]           # species index -> complex index

    def __len__(self) -> int:
        return len(self.intermediates)


def _complex_digraph(net: ReactionNetwork):
    out: dict[int, set[int]] = {i: set() for i in range(len(net.complexes))}
    for src, tgt, _ in net.reactions:
        out[src].add(tgt)
    return out


def find_intermediates(net: ReactionNetwork) -> IntermediateChoice:
    """Maximal single-input intermediate choice, greedily by species index.

    A candidate species appears only as a singleton complex; it must sit on
    a reaction path entering from a unique outside complex and leaving to
    some outside complex, with all interior stops intermediates.
    """
    singleton_of: dict[int, int] = {}
    for ci, vec in enumerate(net.complexes):
        if sum(vec) == 1:
            singleton_of[vec.index(1)] = ci
    candidates = set()
    for i in range(net.n):
        appearances = [ci for ci, vec in enumerate(net.complexes) if vec[i] > 0]
        if appearances and all(sum(net.complexes[ci]) == 1 for ci in appearances):
            candidates.add(i)

    out_edges = _complex_digraph(net)
    in_edges: dict[int, set[int]] = {i: set() for i in range(len(net.complexes))}
    for a, bs in out_edges.items():
        for b in bs:
            in_edges[b].add(a)

    def evaluate(cands):
        inter_complexes = {singleton_of[i] for i in cands}
        inputs: dict[int, set[int]] = {}
        reaches_out: dict[int, bool] = {}
        for i in sorted(cands):
            ci = singleton_of[i]
            # walk backwards through intermediate complexes
            seen = {ci}
            stack = [ci]
            sources = set()
            while stack:
                node = stack.pop()
                for prev in in_edges[node]:
                    if prev in inter_complexes:
                        if prev not in seen:
                            seen.add(prev)
                            stack.append(prev)
                    else:
                        sources.add(prev)
            # walk forwards
            seen_f = {ci}
            stack = [ci]
            escapes = False
            while stack and not escapes:
                node = stack.pop()
                for nxt in out_edges[node]:
                    if nxt in inter_complexes:
                        if nxt not in seen_f:
                            seen_f.add(nxt)
                            stack.append(nxt)
                    else:
                        escapes = True
                        break
            inputs[i] = sources
            reaches_out[i] = escapes
        return inputs, reaches_out

    cands = set(candidates)
    while cands:
        inputs, reaches_out = evaluate(cands)
        bad = [i for i in sorted(cands) if len(inputs[i]) != 1 or not reaches_out[i]]
        if not bad:
            break
        cands.discard(bad[0])
    inputs, _ = evaluate(cands) if cands else ({}, {})
    inter = tuple(sorted(cands))
    non_inter = tuple(i for i in range(net.n) if i not in cands)
    input_map = {i: next(iter(inputs[i])) for i in inter}
    return IntermediateChoice(inter, non_inter, input_map)


@dataclass(frozen=True)
class ReductionResult:
    network: ReactionNetwork
    B: IntegerMatrix                      # inputs of the intermediates over X
    surjectivity: str                     # "yes" | "conjectural"
    x_indices: tuple[int, ...]            # original species indices kept
    y_indices: tuple[int, ...]            # original species indices removed


def reduce_network(net: ReactionNetwork, choice: IntermediateChoice) -> ReductionResult:
    """Remove the intermediates, adding one reaction per outside complex pair
    connected through them."""
    if not choice.intermediates:
        B = IntegerMatrix.with_width([[] for _ in range(net.n)], 0)
        return ReductionResult(net, B, "yes", tuple(range(net.n)), ())
    inter_species = set(choice.intermediates)
    for i in choice.intermediates:
        appearances = [ci for ci, vec in enumerate(net.complexes) if vec[i] > 0]
        if not appearances or any(sum(net.complexes[ci]) != 1 for ci in appearances):
            raise InvalidChoiceError(f"species {net.species[i]} is not a valid intermediate")
        if i not in choice.input_complex:
            raise InvalidChoiceError(f"species {net.species[i]} has no input complex")

    x_idx = tuple(choice.non_intermediates)
    inter_complexes = {ci for ci, vec in enumerate(net.complexes)
                       if sum(vec) == 1 and vec.index(1) in inter_species}
    out_edges = _complex_digraph(net)

    # pairs of outside complexes connected through a nonempty intermediate path
    added: set[tuple[int, int]] = set()
    for start in sorted(inter_complexes):
        entry_points = [c for c in range(len(net.complexes))
                        if c not in inter_complexes and start in out_edges[c]]
        if not entry_points:
            continue
        reach = {start}
        stack = [start]
        outs = set()
        while stack:
            node = stack.pop()
            for nxt in out_edges[node]:
                if nxt in inter_complexes:
                    if nxt not in reach:
                        reach.add(nxt)
                        stack.append(nxt)
                else:
                    outs.add(nxt)
        for c in entry_points:
            for c2 in outs:
                if c != c2:
                    added.add((c, c2))

    def restrict(ci):
        vec = net.complexes[ci]
        return {net.species[i]: vec[i] for i in x_idx if vec[i] > 0}

    species_names = tuple(net.species[i] for i in x_idx)
    complexes: list[dict[str, int]] = []
    cindex: dict[tuple, int] = {}

    def intern(content):
        key = tuple(sorted(content.items()))
        if key not in cindex:
            cindex[key] = len(complexes)
            complexes.append(content)
        return cindex[key]

    reactions: list[tuple[int, int]] = []
    for src, tgt, _ in net.reactions:
        if src in inter_complexes or tgt in inter_complexes:
            continue
        reactions.append((intern(restrict(src)), intern(restrict(tgt))))
    for c, c2 in sorted(added):
        reactions.append((intern(restrict(c)), intern(restrict(c2))))

    vecs = tuple(tuple(c.get(name, 0) for name in species_names) for c in complexes)
    labeled = tuple((s, t, f"k{i+1}") for i, (s, t) in enumerate(reactions))
    reduced = ReactionNetwork(species_names, vecs, labeled)

    b_cols = []
    for i in choice.intermediates:
        vec = net.complexes[choice.input_complex[i]]
        b_cols.append([vec[j] for j in x_idx])
    B = IntegerMatrix.with_width([[col[r] for col in b_cols] for r in range(len(x_idx))],
                                 len(choice.intermediates))
    surj = _surjectivity_flag(net, choice, inter_complexes, out_edges)
    return ReductionResult(reduced, B, surj, x_idx, tuple(choice.intermediates))


def _surjectivity_flag(net, choice, inter_complexes, out_edges) -> str:
    """'yes' when every intermediate group is an isolated chain
    c <-> Y1 <-> ... <-> Yl -> c', otherwise 'conjectural'."""
    in_edges: dict[int, set[int]] = {i: set() for i in range(len(net.complexes))}
    for a, bs in out_edges.items():
        for b in bs:
            in_edges[b].add(a)
    # undirected components among intermediate complexes
    remaining = set(inter_complexes)
    while remaining:
        seed = min(remaining)
        group = {seed}
        stack = [seed]
        while stack:
            node = stack.pop()
            for nxt in (out_edges[node] | in_edges[node]) & inter_complexes:
                if nxt not in group:
                    group.add(nxt)
                    stack.append(nxt)
        remaining -= group
        if not _group_is_chain(group, inter_complexes, out_edges, in_edges):
            return "conjectural"
    return "yes"


def _group_is_chain(group, inter_complexes, out_edges, in_edges) -> bool:
    # interior adjacency must be a path
    adj = {g: ((out_edges[g] | in_edges[g]) & group) for g in group}
    ends = [g for g in group if len(adj[g]) <= 1]
    if len(group) == 1:
        order = list(group)
    else:
        if len(ends) != 2 or any(len(adj[g]) > 2 for g in group):
            return False
        order = [min(ends)]
        prev = None
        while len(order) < len(group):
            nxt = [g for g in adj[order[-1]] if g != prev]
            if len(nxt) != 1:
                return False
            prev = order[-1]
            order.append(nxt[0])
    # orient so the head receives the outside input
    heads = [g for g in order if any(c not in inter_complexes for c in in_edges[g])]
    if len(heads) != 1:
        return False
    if heads[0] == order[-1]:
        order.reverse()
    if heads[0] != order[0]:
        return False
    head, tail = order[0], order[-1]
    outside_in = [c for c in in_edges[head] if c not in inter_complexes]
    if len(outside_in) != 1:
        return False
    c_in = outside_in[0]
    # forward arrows along the chain must exist
    for a, b in zip(order, order[1:]):
        if b not in out_edges[a]:
            return False
    # outside out-edges: only from the head back to the input, or from the tail
    for g in order:
        for tgt in out_edges[g]:
            if tgt in inter_complexes:
                continue
            if g == tail:
                continue
            if g == head and tgt == c_in:
                continue
            return False
    tail_outs = [t for t in out_edges[tail] if t not in inter_complexes and t != c_in]
    return len(tail_outs) >= 1


def lift_invariance(a_tilde: IntegerMatrix, b: IntegerMatrix) -> IntegerMatrix:
    """[A~ | A~ B]: invariance of the reduced system lifted to the full one."""
    if a_tilde.cols != b.rows:
        raise ValueError(f"shape mismatch: {a_tilde.shape} against {b.shape}")
    prod = [[sum(a_tilde.entry(i, k) * b.entry(k, j) for k in range(b.rows))
             for j in range(b.cols)] for i in range(a_tilde.rows)]
    return IntegerMatrix.with_width(
        [list(a_tilde.row(i)) + prod[i] for i in range(a_tilde.rows)],
        a_tilde.cols + b.cols,
    )


# ---------------------------------------------------------------------------
# Multistationarity and concentration robustness


@dataclass(frozen=True)
class MultistationarityResult:
    status: str                     # "multistationary" | "monostationary" | "inconclusive"
    sign: SignVerdict | None = None
    reason: str | None = None


def multistationarity_test(sys: VerticalSystem, inv: InvarianceResult,
                           laws: RationalMatrix, toric: bool = False) -> MultistationarityResult:
    """Square-determinant criterion on [B^T diag(al); L] with B a kernel
    basis of the invariance matrix.

    A sign-definite determinant rules the degeneracy direction out, which
    under toricity means no compatibility class holds two positive steady
    states; a zero or sign-mixed determinant yields multistationarity from
    invariance alone.
    """
    n = sys.n
    if laws.rows == 0:
        return MultistationarityResult("inconclusive", reason="no conservation laws")
    kernel_rows = integer_kernel_basis(inv.A.transpose())
    if kernel_rows.rows + laws.rows != n:
        return MultistationarityResult(
            "inconclusive",
            reason="matrix is not square (only the determinant criterion is implemented)")
    al = tuple(f"al{k+1}" for k in range(n))
    top = []
    for i in range(kernel_rows.rows):
        row = []
        for k in range(n):
            v = kernel_rows.entry(i, k)
            if v:
                e = [0] * n
                e[k] = 1
                row.append(SparsePolynomial(al, {tuple(e): v}))
            else:
                row.append(SparsePolynomial.zero(al))
        top.append(row)
    det = det_stacked(top, laws)
    sign = sign_classify(det)
    if sign in (SignVerdict.MIXED_SIGNS, SignVerdict.ZERO_POLYNOMIAL):
        return MultistationarityResult("multistationary", sign)
    if toric:
        return MultistationarityResult("monostationary", sign)
    return MultistationarityResult(
        "inconclusive", sign,
        reason="determinant sign-definite; monostationarity needs the toric verdict")


def acr_detect(inv: InvarianceResult, verdict: Verdict | None,
               names=None) -> dict[str, str]:
    """Per-species robustness flags from zero columns of the invariance matrix.

    A zero column pins the coordinate to finitely many values once the zero
    set is a finite union of cosets, and to a single value when it is one
    coset; a nonzero column rules robustness out under invariance.
    """
    n = inv.A.cols
    names = list(names) if names else [f"x{i+1}" for i in range(n)]
    flags = {}
    locally = verdict in (Verdict.LOCALLY_TORIC, Verdict.TORIC)
    for i in range(n):
        col_zero = all(inv.A.entry(r, i) == 0 for r in range(inv.A.rows))
        if not col_zero:
            flags[names[i]] = "no-acr"
        elif verdict == Verdict.TORIC:
            flags[names[i]] = "acr"
        elif locally:
            flags[names[i]] = "local-acr"
        else:
            flags[names[i]] = "unknown"
    return flags


# ---------------------------------------------------------------------------
# Network structure


@dataclass(frozen=True)
class NetworkStructure:
    complex_count: int
    linkage_classes: tuple[frozenset[int], ...]   # complex index sets
    reaction_classes: tuple[frozenset[int], ...]  # reaction index partition
    rank: int
    deficiency: int
    weakly_reversible: bool
    matroid_refines_linkage: bool | None
    deficiency_zero_toric: bool


def network_structure(net: ReactionNetwork) -> NetworkStructure:
    """Linkage classes, deficiency r - s - l, weak reversibility, and the
    zero-deficiency local-toricity certificate."""
    N, _ = mass_action_matrices(net)
    s = N.rank()
    out_edges = _complex_digraph(net)
    undirected: dict[int, set[int]] = {i: set() for i in range(len(net.complexes))}
    for a, bs in out_edges.items():
        for b in bs:
            undirected[a].add(b)
            undirected[b].add(a)
    seen: set[int] = set()
    classes = []
    for start in range(len(net.complexes)):
        if start in seen:
            continue
        group = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            for nxt in undirected[node]:
                if nxt not in group:
                    group.add(nxt)
                    stack.append(nxt)
        seen |= group
        classes.append(frozenset(group))
    classes_t = tuple(sorted(classes, key=min))
    class_of = {}
    for ci, group in enumerate(classes_t):
        for c in group:
            class_of[c] = ci
    reaction_classes = tuple(
        frozenset(j for j, (src, _, _) in enumerate(net.reactions) if class_of[src] == ci)
        for ci in range(len(classes_t))
    )
    weakly = all(_strongly_connected(group, out_edges) for group in classes_t)
    delta = len(net.complexes) - s - len(classes_t)
    refines = None
    if s > 0:
        part = matroid_partition(steady_state_system(net))
        refines = all(any(b <= rc for rc in reaction_classes) for b in part.blocks)
    return NetworkStructure(len(net.complexes), classes_t, reaction_classes, s, delta,
                            weakly, refines, delta == 0 and weakly)


def _strongly_connected(group, out_edges) -> bool:
    nodes = sorted(group)
    for start in nodes:
        reach = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            for nxt in out_edges[node]:
                if nxt in group and nxt not in reach:
                    reach.add(nxt)
                    stack.append(nxt)
        if reach != group:
            return False
    return True


# ---------------------------------------------------------------------------
# Siphons


_SIPHON_BUDGET = 1 << 20


def minimal_siphons(net: ReactionNetwork, budget: int = _SIPHON_BUDGET) -> list[frozenset[int]]:
    """Minimal species sets whose production always consumes a member."""
    n = net.n
    if n > 20:
        raise SearchBudgetExceededError(f"{n} species exceed the siphon search range")
    masks = []
    for src, tgt, _ in net.reactions:
        src_mask = sum(1 << i for i in range(n) if net.complexes[src][i] > 0)
        tgt_mask = sum(1 << i for i in range(n) if net.complexes[tgt][i] > 0)
        masks.append((src_mask, tgt_mask))
    found: list[int] = []
    examined = 0
    for size in range(1, n + 1):
        for combo in combinations(range(n), size):
            examined += 1
            if examined > budget:
                raise SearchBudgetExceededError("siphon enumeration budget exceeded")
            z = sum(1 << i for i in combo)
            if any((f & z) == f for f in found):
                continue
            if all((src & z) or not (tgt & z) for src, tgt in masks):
                found.append(z)
    return [frozenset(i for i in range(n) if z >> i & 1) for z in found]


def _siphon_supported_in_rowspace(mat: RationalMatrix, siphon: frozenset[int]) -> bool:
    """Is there a nonzero v >= 0 in the row space with support inside the siphon?"""
    d = mat.rows
    n = mat.cols
    if d == 0:
        return False
    inside = sorted(siphon)
    outside = [i for i in range(n) if i not in siphon]
    # variables: y+ (d), y- (d), u (|inside|)
    nvars = 2 * d + len(inside)
    rows = []
    rhs = []
    for i in outside:
        row = [mat.entry(k, i) for k in range(d)] + [-mat.entry(k, i) for k in range(d)] \
            + [0] * len(inside)
        rows.append(row)
        rhs.append(0)
    for pos, i in enumerate(inside):
        row = [mat.entry(k, i) for k in range(d)] + [-mat.entry(k, i) for k in range(d)] \
            + [0] * len(inside)
        row[2 * d + pos] = Fraction(-1)
        rows.append(row)
        rhs.append(0)
    rows.append([0] * (2 * d) + [1] * len(inside))
    rhs.append(1)
    status, _, _ = simplex_maximize(rows, rhs, [0] * nvars)
    return status == "optimal"


def siphon_boundary_check(net: ReactionNetwork, A: IntegerMatrix | None = None,
                          laws: RationalMatrix | None = None) -> str:
    """'yes' when every minimal siphon supports a nonnegative slice invariant.

    A nonnegative vector of the slice row space supported inside a siphon
    contradicts a boundary zero on any positively-offset slice, so 'yes'
    rules boundary zeros out; anything else is 'unknown'.
    """
    mat = A.to_rational() if A is not None and A.rows else laws
    if mat is None or mat.rows == 0:
        return "unknown"
    try:
        siphons = minimal_siphons(net)
    except SearchBudgetExceededError:
        return "unknown"
    for z in siphons:
        if not _siphon_supported_in_rowspace(mat, z):
            return "unknown"
    return "yes"


# ---------------------------------------------------------------------------
# Whole-network orchestration


@dataclass
class NetworkAnalysis:
    network: ReactionNetwork
    system: VerticalSystem
    laws: RationalMatrix
    structure: NetworkStructure
    boundary: str
    direct_A: IntegerMatrix
    report: ToricityReport
    verdict_source: str                       # "direct" | "reduced"
    reduction: ReductionResult | None = None
    reduced_report: ToricityReport | None = None
    lifted_A: IntegerMatrix | None = None     # in original species order
    acr: dict[str, str] | None = None
    multistationarity: MultistationarityResult | None = None

    @property
    def verdict(self) -> Verdict:
        return (self.reduced_report or self.report).verdict if self.verdict_source == "reduced" \
            else self.report.verdict


_TRANSFERABLE = (Verdict.TORIC, Verdict.GENERICALLY_TORIC, Verdict.LOCALLY_TORIC,
                 Verdict.GENERICALLY_LOCALLY_TORIC)


def analyze_network(net: ReactionNetwork, mode: GroupMode = GroupMode.POSITIVE,
                    seed: int = 0, reduce: bool = True,
                    options: AnalyzeOptions | None = None) -> NetworkAnalysis:
    """Steady-state toricity analysis of a mass-action network.

    The reduced network (single-input intermediates removed) is analyzed
    first when reduction is enabled; a positive verdict transfers to the
    full network with the lifted invariance matrix.  Otherwise the full
    system is analyzed directly.  Robustness and multistationarity are
    evaluated against the final verdict.
    """
    sys_ = steady_state_system(net)
    N, _ = mass_action_matrices(net)
    laws = conservation_laws(N)
    structure = network_structure(net)
    opts = options or AnalyzeOptions()

    direct_inv = None
    try:
        direct_inv = invariance_group(sys_, mode)
    except EmptyLocusError:
        pass
    boundary = opts.boundary
    if boundary != "yes":
        boundary = siphon_boundary_check(net, direct_inv.A if direct_inv else None, laws)

    reduction = None
    reduced_report = None
    lifted = None
    verdict_source = "direct"
    report = None

    if reduce and mode is GroupMode.POSITIVE:
        choice = find_intermediates(net)
        if len(choice):
            reduction = reduce_network(net, choice)
            try:
                red_sys = steady_state_system(reduction.network)
            except ZeroDynamicsError:
                # reduction stripped all dynamics; analyze the full network
                reduction = None
                red_sys = None
        if reduction is not None:
            red_n, _ = mass_action_matrices(reduction.network)
            red_boundary = siphon_boundary_check(reduction.network, None,
                                                 conservation_laws(red_n))
            red_opts = AnalyzeOptions(kappa=None, boundary=red_boundary,
                                      mixed_volume_max_dim=opts.mixed_volume_max_dim,
                                      newton_starts=opts.newton_starts)
            reduced_report = analyze(red_sys, mode, seed, red_opts)
            if reduced_report.invariance is not None:
                lifted_xy = lift_invariance(reduced_report.invariance.A, reduction.B)
                perm = list(reduction.x_indices) + list(reduction.y_indices)
                inverse = [perm.index(i) for i in range(net.n)]
                lifted = IntegerMatrix.with_width(
                    [[lifted_xy.entry(r, inverse[i]) for i in range(net.n)]
                     for r in range(lifted_xy.rows)], net.n)
            if reduced_report.verdict in _TRANSFERABLE:
                verdict_source = "reduced"

    if verdict_source == "reduced":
        # record direct-system facts without redoing the whole pipeline
        report = ToricityReport(mode=mode, seed=seed, n=sys_.n, m=sys_.m, s=sys_.s)
        report.verdict = reduced_report.verdict
        report.partition = None
        if direct_inv is not None:
            report.invariance = direct_inv
            report.d = direct_inv.d
            if direct_inv.d == sys_.n - sys_.s:
                try:
                    report.injectivity = injectivity_test(sys_, direct_inv)
                except ValueError:
                    report.injectivity = None
                if comb(sys_.n, sys_.s) <= opts.all_positive_enrichment_cap:
                    ap = nondegeneracy_all_positive(sys_)
                    if ap.status == "yes":
                        report.nondegenerate = "yes-for-all-positive"
        report.notes.append("verdict obtained on the reduced network and lifted")
    else:
        report = analyze(sys_, mode, seed,
                         AnalyzeOptions(kappa=opts.kappa, boundary=boundary,
                                        mixed_volume_max_dim=opts.mixed_volume_max_dim,
                                        newton_starts=opts.newton_starts))

    analysis = NetworkAnalysis(net, sys_, laws, structure, boundary,
                               direct_inv.A if direct_inv else IntegerMatrix.with_width([], sys_.n),
                               report, verdict_source, reduction, reduced_report, lifted)
    final_verdict = analysis.verdict

    acr_basis = direct_inv
    if acr_basis is None and lifted is not None:
        acr_basis = InvarianceResult(lifted, lifted.rows, mode)
    if acr_basis is not None:
        analysis.acr = acr_detect(acr_basis, final_verdict, net.species)
        analysis.multistationarity = multistationarity_test(
            sys_, acr_basis, laws, toric=final_verdict == Verdict.TORIC)
    if lifted is not None and direct_inv is not None:
        if not same_row_lattice(lifted, direct_inv.A):
            report.notes.append("lifted invariance lattice disagrees with the direct one")
    return analysis
