"""Typed argument-graph model for assurance cases.

A case is a connected DAG of typed nodes: claims, reasoning blocks,
evidence, defeaters, and references to externally assessed subcases.
Graphs are immutable after :func:`build_graph`; every operation here is a
pure function, so graphs can be shared freely across threads.  Mutation is
modeled as building a new graph.

Structural soundness is split in two tiers:

* hard build errors (duplicate ids, dangling references, cycles, and
  per-node field violations) raised by :func:`build_graph`;
* completeness findings (single top claim, connectivity, the leaf rule,
  block arity, missing justification) reported by
  :func:`structural_check` as data.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional, Union

from .measures import Elicitation, judgment_value

NODE_ID_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")


class CaseError(Exception):
    """Base class for hard graph-construction errors."""


class DuplicateId(CaseError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"duplicate node id: {node_id}")


class DanglingReference(CaseError):
    def __init__(self, node_id: str, referrer: str):
        self.node_id = node_id
        self.referrer = referrer
        super().__init__(f"node {referrer} references undeclared id {node_id}")


class CycleDetected(CaseError):
    def __init__(self, path: list[str]):
        self.path = list(path)
        super().__init__("cycle: " + " -> ".join(self.path))


class InvalidNode(CaseError):
    def __init__(self, node_id: str, reason: str):
        self.node_id = node_id
        self.reason = reason
        super().__init__(f"invalid node {node_id}: {reason}")


class EmptyCase(CaseError):
    def __init__(self):
        super().__init__("a case must contain at least one node")


class TargetNotFound(CaseError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"defeater target not resolvable: {node_id}")


class Assessment(str, Enum):
    """Three-valued logical verdict on a node."""

    TRUE = "TRUE"
    FALSE = "FALSE"
    UNSUPPORTED = "UNSUPPORTED"


class Role(str, Enum):
    ORDINARY = "ordinary"
    TOP = "top"
    ASSUMPTION = "assumption"
    RESIDUAL = "residual-doubt"


class BlockKind(str, Enum):
    DECOMPOSITION = "decomposition"
    SUBSTITUTION = "substitution"
    CONCRETION = "concretion"
    CALCULATION = "calculation"
    INCORPORATION = "evidence-incorporation"


class Mode(str, Enum):
    CONJUNCTIVE = "conjunctive"
    DISJUNCTIVE = "disjunctive"


class Exactness(str, Enum):
    EXPLORATORY = "exploratory"
    EXACT = "exact"


class DefeaterStatus(str, Enum):
    DOUBT = "doubt"
    INVESTIGATING = "investigating"
    SUSTAINED = "sustained"
    REFUTED = "refuted"
    ADDRESSED = "addressed"
    RESIDUAL = "residual"


@dataclass(frozen=True)
class Claim:
    """A natural-language statement; also covers assumptions and residual
    doubts, which are claims with special roles."""

    id: str
    text: str
    role: Role = Role.ORDINARY
    assumed_prob: Optional[float] = None  # assumptions only
    justification: Optional[str] = None
    likelihood: Optional[float] = None  # residual doubts only
    consequence: Optional[float] = None  # residual doubts only
    class_label: Optional[str] = None  # residual doubts only

    node_kind = "claim"


@dataclass(frozen=True)
class Block:
    """A reasoning step justifying a parent claim from subclaims.

    ``parent`` may also name a defeater: the blocks supporting a defeater
    form its investigation subcase.
    """

    id: str
    kind: BlockKind
    parent: str
    subclaims: tuple[str, ...]
    mode: Mode = Mode.CONJUNCTIVE
    sideclaim: Optional[str] = None
    justification: str = ""

    node_kind = "block"


@dataclass(frozen=True)
class Evidence:
    """An evidence assembly and its acceptance/elicitation state."""

    id: str
    description: str
    assembly_ref: str
    accepted: bool = False
    posterior_useful: Optional[float] = None
    elicitation: Optional[Elicitation] = None

    node_kind = "evidence"


@dataclass(frozen=True)
class Defeater:
    """An explicit challenge to another node.

    A defeater with no supporting blocks is a doubt.  ``exactness=exact``
    marks the claim as the precise negation of the targeted node; this is
    an explicit flag, never inferred from text.
    """

    id: str
    target: str
    claim_text: str = ""
    exactness: Exactness = Exactness.EXPLORATORY
    status: DefeaterStatus = DefeaterStatus.DOUBT
    narrative: str = ""

    node_kind = "defeater"


@dataclass(frozen=True)
class Subcase:
    """Reference to an externally developed and assessed subcase.

    Functions as a lemma: a leaf whose verdict is supplied from outside,
    defaulting to UNSUPPORTED when no assessment has been recorded.
    """

    id: str
    top_claim_text: str
    external_locator: Optional[str] = None
    assessed: Optional[Assessment] = None

    node_kind = "subcase"


Node = Union[Claim, Block, Evidence, Defeater, Subcase]


@dataclass(frozen=True)
class CaseGraph:
    """An immutable case graph with derived edge indices.

    ``top`` is None when the case does not have exactly one claim with
    role=top (structural_check reports this).
    """

    title: str
    nodes: Mapping[str, Node]
    top: Optional[str]
    supports: Mapping[str, tuple[str, ...]]  # claim/defeater id -> block ids
    subclaim_of: Mapping[str, tuple[str, ...]]  # node id -> block ids
    side_of: Mapping[str, tuple[str, ...]]  # node id -> block ids
    targeted_by: Mapping[str, tuple[str, ...]]  # node id -> defeater ids

    def node(self, node_id: str) -> Node:
        return self.nodes[node_id]

    def ids(self) -> list[str]:
        return sorted(self.nodes)

    def of_kind(self, node_kind: str) -> Iterator[Node]:
        for node_id in self.ids():
            n = self.nodes[node_id]
            if n.node_kind == node_kind:
                yield n

    def claims(self) -> Iterator[Claim]:
        return self.of_kind("claim")  # type: ignore[return-value]

    def blocks(self) -> Iterator[Block]:
        return self.of_kind("block")  # type: ignore[return-value]

    def evidence(self) -> Iterator[Evidence]:
        return self.of_kind("evidence")  # type: ignore[return-value]

    def defeaters(self) -> Iterator[Defeater]:
        return self.of_kind("defeater")  # type: ignore[return-value]

    def subcases(self) -> Iterator[Subcase]:
        return self.of_kind("subcase")  # type: ignore[return-value]

    def with_nodes(self, replacements: Mapping[str, Optional[Node]], title: Optional[str] = None) -> "CaseGraph":
        """Build a new graph with nodes replaced (None removes)."""
        decls = []
        for node_id in self.ids():
            if node_id in replacements:
                repl = replacements[node_id]
                if repl is not None:
                    decls.append(repl)
            else:
                decls.append(self.nodes[node_id])
        for node_id, repl in replacements.items():
            if node_id not in self.nodes and repl is not None:
                decls.append(repl)
        return build_graph(decls, title=self.title if title is None else title)


@dataclass(frozen=True)
class StructuralFinding:
    """A structural-completeness defect; findings are data, not errors.

    ``blocking`` marks invariant violations the parser refuses to accept
    (as opposed to authoring-in-progress states like an unsupported leaf).
    """

    code: str
    node: Optional[str]
    message: str
    blocking: bool = True


_ARITY = {
    BlockKind.DECOMPOSITION: (1, None),
    BlockKind.CALCULATION: (1, None),
    BlockKind.SUBSTITUTION: (1, 1),
    BlockKind.CONCRETION: (1, 1),
    BlockKind.INCORPORATION: (1, 1),
}


def _check_unit(name: str, value: Optional[float], node_id: str, required: bool = False) -> None:
    if value is None:
        if required:
            raise InvalidNode(node_id, f"{name} is required")
        return
    if not 0.0 <= float(value) <= 1.0:
        raise InvalidNode(node_id, f"{name} must lie in [0,1], got {value!r}")


def _validate_fields(n: Node) -> None:
    if not NODE_ID_PATTERN.match(n.id or ""):
        raise InvalidNode(n.id, "node id must match [A-Za-z_][A-Za-z0-9_.-]*")
    if isinstance(n, Claim):
        if n.role is Role.ASSUMPTION:
            _check_unit("assumed_prob", n.assumed_prob, n.id, required=True)
        elif n.assumed_prob is not None:
            raise InvalidNode(n.id, "assumed_prob is only meaningful on assumptions")
        if n.role is Role.RESIDUAL:
            _check_unit("likelihood", n.likelihood, n.id, required=True)
            _check_unit("consequence", n.consequence, n.id, required=True)
        elif n.likelihood is not None or n.consequence is not None or n.class_label is not None:
            raise InvalidNode(n.id, "risk fields are only meaningful on residual doubts")
    elif isinstance(n, Evidence):
        if not n.assembly_ref:
            raise InvalidNode(n.id, "evidence must reference a non-empty assembly")
        _check_unit("posterior", n.posterior_useful, n.id)
        if n.elicitation is not None:
            for name, judgment in n.elicitation.entries().items():
                _check_unit(f"elicitation {name}", judgment_value(judgment), n.id)
    elif isinstance(n, Block):
        if n.mode is Mode.DISJUNCTIVE and n.kind is not BlockKind.DECOMPOSITION:
            raise InvalidNode(n.id, "disjunctive mode is only allowed on decomposition blocks")


def _validate_references(n: Node, nodes: Mapping[str, Node]) -> None:
    def resolve(ref: str) -> Node:
        if ref not in nodes:
            raise DanglingReference(ref, n.id)
        return nodes[ref]

    if isinstance(n, Block):
        parent = resolve(n.parent)
        if not isinstance(parent, (Claim, Defeater)):
            raise InvalidNode(n.id, f"block parent {n.parent} must be a claim or defeater")
        for sub in n.subclaims:
            child = resolve(sub)
            if n.kind is BlockKind.INCORPORATION:
                if not isinstance(child, Evidence):
                    raise InvalidNode(n.id, f"incorporation subnode {sub} must be evidence")
            elif not isinstance(child, (Claim, Subcase)):
                raise InvalidNode(n.id, f"subclaim {sub} must be a claim or subcase reference")
        if n.sideclaim is not None:
            side = resolve(n.sideclaim)
            if not isinstance(side, (Claim, Subcase)):
                raise InvalidNode(n.id, f"side-claim {n.sideclaim} must be a claim or subcase reference")
    elif isinstance(n, Defeater):
        target = resolve(n.target)
        if n.exactness is Exactness.EXACT and not isinstance(target, (Claim, Defeater)):
            raise InvalidNode(n.id, "an exact defeater must target a claim or another defeater")


def _detect_cycle(nodes: Mapping[str, Node], depends_on: Mapping[str, tuple[str, ...]]) -> None:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node_id: WHITE for node_id in nodes}
    stack: list[str] = []

    def visit(node_id: str) -> None:
        color[node_id] = GRAY
        stack.append(node_id)
        for succ in depends_on.get(node_id, ()):
            if color[succ] == GRAY:
                path = stack[stack.index(succ):] + [succ]
                raise CycleDetected(path)
            if color[succ] == WHITE:
                visit(succ)
        stack.pop()
        color[node_id] = BLACK

    for node_id in sorted(nodes):
        if color[node_id] == WHITE:
            visit(node_id)


def build_graph(decls: Iterable[Node], title: str = "") -> CaseGraph:
    """Resolve declarations into an immutable CaseGraph.

    Declaration order is irrelevant: indices are sorted, so identical
    declarations in any order produce identical graphs.

    Raises DuplicateId, DanglingReference, CycleDetected, InvalidNode,
    or EmptyCase.
    """
    nodes: dict[str, Node] = {}
    for n in decls:
        if n.id in nodes:
            raise DuplicateId(n.id)
        nodes[n.id] = n
    if not nodes:
        raise EmptyCase()

    for n in nodes.values():
        _validate_fields(n)
    for n in nodes.values():
        _validate_references(n, nodes)

    supports: dict[str, list[str]] = {}
    subclaim_of: dict[str, list[str]] = {}
    side_of: dict[str, list[str]] = {}
    targeted_by: dict[str, list[str]] = {}
    exact_on: dict[str, str] = {}

    for node_id in sorted(nodes):
        n = nodes[node_id]
        if isinstance(n, Block):
            supports.setdefault(n.parent, []).append(n.id)
            for sub in n.subclaims:
                subclaim_of.setdefault(sub, []).append(n.id)
            if n.sideclaim is not None:
                side_of.setdefault(n.sideclaim, []).append(n.id)
        elif isinstance(n, Defeater):
            targeted_by.setdefault(n.target, []).append(n.id)
            if n.exactness is Exactness.EXACT:
                if n.target in exact_on:
                    raise InvalidNode(
                        n.id,
                        f"node {n.target} already has exact defeater {exact_on[n.target]}; "
                        "at most one exact defeater per node",
                    )
                exact_on[n.target] = n.id

    # Evaluation-dependency edges; acyclicity over these (which include
    # defeater-target edges) is what makes bottom-up assessment well-defined.
    depends_on: dict[str, list[str]] = {node_id: [] for node_id in nodes}
    for node_id in sorted(nodes):
        n = nodes[node_id]
        if isinstance(n, Block):
            depends_on[n.parent].append(n.id)
            depends_on[n.id].extend(n.subclaims)
            if n.sideclaim is not None:
                depends_on[n.id].append(n.sideclaim)
        elif isinstance(n, Defeater):
            affected = _affected_id(n, nodes, subclaim_of)
            if affected is not None:
                depends_on[affected].append(n.id)
    _detect_cycle(nodes, {k: tuple(v) for k, v in depends_on.items()})

    tops = [c.id for c in nodes.values() if isinstance(c, Claim) and c.role is Role.TOP]
    top = tops[0] if len(tops) == 1 else None

    def freeze(index: dict[str, list[str]]) -> dict[str, tuple[str, ...]]:
        return {k: tuple(v) for k, v in index.items()}

    return CaseGraph(
        title=title,
        nodes=dict(sorted(nodes.items())),
        top=top,
        supports=freeze(supports),
        subclaim_of=freeze(subclaim_of),
        side_of=freeze(side_of),
        targeted_by=freeze(targeted_by),
    )


def _affected_id(
    d: Defeater, nodes: Mapping[str, Node], subclaim_of: Mapping[str, list[str]]
) -> Optional[str]:
    target = nodes.get(d.target)
    if target is None:
        return None
    if isinstance(target, (Claim, Defeater)):
        return target.id
    if isinstance(target, Block):
        return target.parent
    # evidence or subcase: the parent claim of the (first) block using it
    users = sorted(subclaim_of.get(target.id, []))
    if not users:
        return None
    block = nodes[users[0]]
    assert isinstance(block, Block)
    return block.parent


def affected_claim(g: CaseGraph, d: Union[Defeater, str]) -> str:
    """The claim a defeater calls into question.

    The target itself when it is claim-like (any claim role) or a
    defeater; otherwise the parent claim of the targeted node.
    """
    if isinstance(d, str):
        node = g.nodes.get(d)
        if not isinstance(node, Defeater):
            raise TargetNotFound(d)
        d = node
    if d.target not in g.nodes:
        raise TargetNotFound(d.target)
    affected = _affected_id(d, g.nodes, {k: list(v) for k, v in g.subclaim_of.items()})
    if affected is None:
        raise TargetNotFound(d.target)
    return affected


def _has_exact_support(g: CaseGraph, node_id: str) -> bool:
    return any(
        g.nodes[d].exactness is Exactness.EXACT  # type: ignore[union-attr]
        for d in g.targeted_by.get(node_id, ())
    )


def structural_check(g: CaseGraph) -> list[StructuralFinding]:
    """Completeness findings: empty iff the case is valid by construction.

    Checks: exactly one top claim; connectivity; the leaf rule (every
    unsupported claim is an assumption or residual doubt; evidence and
    subcase references are legitimate leaves); block arity by kind; and
    the presence of justification narratives on blocks.
    """
    findings: list[StructuralFinding] = []

    tops = [c.id for c in g.claims() if c.role is Role.TOP]
    if not tops:
        findings.append(StructuralFinding("no-top-claim", None, "case has no claim with role=top"))
    elif len(tops) > 1:
        findings.append(
            StructuralFinding(
                "multiple-top-claims", None, "case has multiple top claims: " + ", ".join(tops)
            )
        )

    # connectivity of the underlying undirected graph
    adjacency: dict[str, set[str]] = {node_id: set() for node_id in g.nodes}

    def link(a: str, b: str) -> None:
        adjacency[a].add(b)
        adjacency[b].add(a)

    for b in g.blocks():
        link(b.id, b.parent)
        for sub in b.subclaims:
            link(b.id, sub)
        if b.sideclaim is not None:
            link(b.id, b.sideclaim)
    for d in g.defeaters():
        link(d.id, d.target)
    start = sorted(g.nodes)[0]
    seen = {start}
    frontier = [start]
    while frontier:
        current = frontier.pop()
        for neighbor in adjacency[current]:
            if neighbor not in seen:
                seen.add(neighbor)
                frontier.append(neighbor)
    unreachable = sorted(set(g.nodes) - seen)
    if unreachable:
        findings.append(
            StructuralFinding(
                "disconnected",
                None,
                "case graph is not connected; detached nodes: " + ", ".join(unreachable),
            )
        )

    for c in g.claims():
        if c.role in (Role.ASSUMPTION, Role.RESIDUAL):
            continue
        if not g.supports.get(c.id) and not _has_exact_support(g, c.id):
            findings.append(
                StructuralFinding(
                    "unsupported-leaf",
                    c.id,
                    f"claim {c.id} has no supporting block and is not an assumption, "
                    "residual doubt, or subcase reference",
                    blocking=False,
                )
            )

    for b in g.blocks():
        lo, hi = _ARITY[b.kind]
        count = len(b.subclaims)
        if count < lo or (hi is not None and count > hi):
            expected = str(lo) if hi == lo else f"{lo}+"
            findings.append(
                StructuralFinding(
                    "arity-violation",
                    b.id,
                    f"{b.kind.value} block {b.id}: expected {expected} subclaim(s), got {count}",
                )
            )
        if not b.justification.strip():
            findings.append(
                StructuralFinding(
                    "missing-justification", b.id, f"block {b.id} has no justification narrative"
                )
            )

    findings.sort(key=lambda f: (f.code, f.node or ""))
    return findings


def owned_subgraph(g: CaseGraph, root_id: str) -> set[str]:
    """Node ids reachable from ``root_id`` via support/subclaim/side edges."""
    seen: set[str] = set()
    frontier = [root_id]
    while frontier:
        current = frontier.pop()
        if current in seen:
            continue
        seen.add(current)
        for block_id in g.supports.get(current, ()):
            frontier.append(block_id)
            block = g.nodes[block_id]
            assert isinstance(block, Block)
            frontier.extend(block.subclaims)
            if block.sideclaim is not None:
                frontier.append(block.sideclaim)
    return seen
