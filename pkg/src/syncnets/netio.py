"""JSON persistence and DOT export for nets."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .formula import parse_formula, show
from .net import Edge, Link, Net, NetError, QuantumNet, Sort, StructuralError, check
from .qregister import QuantumRegister


def net_to_dict(net: Net | QuantumNet, ports: list[dict] | None = None) -> dict:
    qn = net if isinstance(net, QuantumNet) else None
    n = qn.net if qn else net
    out = {
        "links": [
            {"id": l.id, "sort": l.sort.value, **({"label": l.label} if l.label is not None else {})}
            for _, l in sorted(n.links.items())
        ],
        "edges": [
            {
                "id": e.id,
                "src": "ext" if e.src is None else list(e.src),
                "dst": "pending" if e.dst is None else list(e.dst),
                "type": show(e.type),
            }
            for _, e in sorted(n.edges.items())
        ],
        "boxes": {},
        "conclusions": list(n.conclusions),
    }
    for b in n.bots():
        contents = [[] for _ in range(b.contents)]
        for lid, l in sorted(n.links.items()):
            if l.box is not None and l.box[0] == b.id:
                contents[l.box[1]].append(lid)
        out["boxes"][str(b.id)] = {"contents": contents}
    if qn is not None and (qn.wiring or len(qn.register)):
        reg = qn.register.to_json()
        out["register"] = {**reg, "wiring": dict(qn.wiring)}
    if ports is not None:
        out["ports"] = ports
    return out


def net_from_dict(d: dict) -> Net | QuantumNet:
    """Inverse of :func:`net_to_dict`.  Returns a QuantumNet when a register is present."""
    try:
        edges: dict[int, Edge] = {}
        prem: dict[int, dict[int, int]] = {}
        concl: dict[int, dict[int, int]] = {}
        for e in d["edges"]:
            src = None if e["src"] == "ext" else tuple(e["src"])
            dst = None if e["dst"] == "pending" else tuple(e["dst"])
            edges[e["id"]] = Edge(e["id"], parse_formula(e["type"]), src, dst)
            if src is not None:
                concl.setdefault(src[0], {})[src[1]] = e["id"]
            if dst is not None:
                prem.setdefault(dst[0], {})[dst[1]] = e["id"]
        container = {}
        contents = {}
        for bid, spec in d.get("boxes", {}).items():
            contents[int(bid)] = len(spec["contents"])
            for c, ids in enumerate(spec["contents"]):
                for lid in ids:
                    container[lid] = (int(bid), c)
        links = {}
        for l in d["links"]:
            lid = l["id"]
            ps, cs = prem.get(lid, {}), concl.get(lid, {})
            links[lid] = Link(
                lid, Sort(l["sort"]),
                tuple(ps[k] for k in sorted(ps)),
                tuple(cs[k] for k in sorted(cs)),
                l.get("label"), container.get(lid), contents.get(lid, 0),
            )
        net = check(Net(links, edges, tuple(d["conclusions"])))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, NetError):
            raise
        raise NetError([StructuralError("MalformedJSON", "net", str(exc))]) from exc
    reg = d.get("register")
    if reg is None:
        return net
    amps = np.array([complex(re, im) for re, im in reg["amplitudes"]])
    register = QuantumRegister(tuple(reg["qubits"]), amps)
    return QuantumNet(net, register, {k: int(v) for k, v in reg["wiring"].items()})


def dump(net: Net | QuantumNet, path: str | Path, ports: list[dict] | None = None) -> None:
    Path(path).write_text(json.dumps(net_to_dict(net, ports), indent=1) + "\n")


def load(path: str | Path) -> Net | QuantumNet:
    return net_from_dict(json.loads(Path(path).read_text()))


_SHAPES = {
    Sort.AX: ("plain", "ax"),
    Sort.CUT: ("plain", "cut"),
    Sort.TENSOR: ("circle", "⊗"),
    Sort.PAR: ("circle", "⅋"),
    Sort.ONE: ("circle", "1"),
    Sort.BOT: ("circle", "⊥"),
}


def to_dot(net: Net | QuantumNet) -> str:
    """Top-to-bottom drawing.  Each sync link becomes a row of squares, one
    per port, joined by undirected edges; boxes become clusters."""
    qn = net if isinstance(net, QuantumNet) else None
    n = qn.net if qn else net
    wired = {lid: name for name, lid in (qn.wiring.items() if qn else ())}
    lines = ["digraph net {", "  rankdir=TB;", "  node [fontsize=10];"]
    body: dict = {None: []}

    def node_of(port) -> str:
        lid, p = port
        return f"s{lid}_{p}" if n.links[lid].sort is Sort.SYNC else f"l{lid}"

    for lid, l in sorted(n.links.items()):
        where = body.setdefault(l.box, [])
        if l.sort is Sort.SYNC:
            label = l.label or ""
            ports = [f"s{lid}_{p}" for p in range(len(l.premisses))]
            for p in ports:
                where.append(f'  {p} [shape=square, label="{label}", width=0.3];')
            where.append("  { rank=same; " + " ".join(ports) + " }")
            for a, b in zip(ports, ports[1:]):
                where.append(f"  {a} -> {b} [dir=none, style=bold];")
        else:
            shape, text = _SHAPES[l.sort]
            if lid in wired:
                text += f" [{wired[lid]}]"
            where.append(f'  l{lid} [shape={shape}, label="{text}"];')
    for (bid, c), items in sorted(((k, v) for k, v in body.items() if k is not None), key=lambda kv: kv[0]):
        items.insert(0, f"  subgraph cluster_{bid}_{c} {{ label=\"box {bid}.{c}\"; style=dashed;")
        items.append("  }")
    # one flat cluster per box content keeps the output stable
    for key in [None] + sorted(k for k in body if k is not None):
        lines.extend(body[key])
    for eid, e in sorted(n.edges.items()):
        label = show(e.type)
        if e.src is None:
            lines.append(f'  in{eid} [shape=point]; in{eid} -> {node_of(e.dst)} [label="{label}"];')
            continue
        a = node_of(e.src)
        if e.dst is None:
            lines.append(f'  out{eid} [shape=point]; {a} -> out{eid} [label="{label}"];')
        else:
            b = node_of(e.dst)
            lines.append(f'  {a} -> {b} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = ["net_to_dict", "net_from_dict", "dump", "load", "to_dot"]
