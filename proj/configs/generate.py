#!/usr/bin/env python3
"""Regenerates the synthetic example configs in this directory.

    python3 configs/generate.py

Output is deterministic. Flow parameters are invented; only the topology
sizes, class count and idle-slope shares follow the published case studies.
"""
import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))


def node(i, sw):
    return {"id": i, "type": "sw" if sw else "es"}


class Builder:
    def __init__(self, rate, period_us, slopes):
        self.rate = rate
        self.period = period_us
        self.slopes = slopes
        self.nodes, self.links, self.adj = [], [], {}
        self.windows = {}
        self.flows = []

    def add_node(self, i, sw):
        self.nodes.append(node(i, sw))
        self.adj[i] = []

    def connect(self, a, b):
        for x, y in ((a, b), (b, a)):
            self.links.append({"id": f"{x}-{y}", "from": x, "to": y, "rate_bps": self.rate})
            self.adj[x].append(y)
            self.windows[f"{x}>{y}"] = []

    def path(self, src, dst):
        prev, todo = {src: None}, [src]
        while todo:
            cur = todo.pop(0)
            for nxt in self.adj[cur]:
                if nxt not in prev:
                    prev[nxt] = cur
                    todo.append(nxt)
        hops, cur = [], dst
        while prev[cur] is not None:
            hops.append(f"{prev[cur]}>{cur}")
            cur = prev[cur]
        return hops[::-1]

    def doc(self, description, be_bits, d_tech_us):
        ports = []
        for pid, ws in self.windows.items():
            a, b = pid.split(">")
            ports.append({"id": pid, "link": f"{a}-{b}", "gcl_period_us": self.period,
                          "st_windows": sorted(ws), "idle_slopes_bps": self.slopes})
        return {"description": description, "nodes": self.nodes, "links": self.links, "ports": ports,
                "flows": self.flows, "be_max_frame_bits": be_bits, "d_tech_us": d_tech_us,
                "credit_mode": "frozen"}


def write(name, doc):
    with open(os.path.join(HERE, name), "w") as out:
        json.dump(doc, out, indent=1)
        out.write("\n")


def minimal():
    b = Builder(100_000_000, 500, [40_000_000, 20_000_000])
    b.add_node("talker", False)
    b.add_node("listener", False)
    b.connect("talker", "listener")
    b.windows["talker>listener"] = [[0, 100]]
    del b.windows["listener>talker"]
    b.links = [l for l in b.links if l["from"] == "talker"]
    b.flows = [
        {"id": "audio", "class": 1, "frame_bits": 2400, "period_us": 250, "route": ["talker>listener"]},
        {"id": "video", "class": 2, "frame_bits": 12000, "period_us": 2000, "route": ["talker>listener"]},
    ]
    return b.doc("Minimal single-port example: one talker, one listener, one ST window.", 12336, 0)


def tc1():
    rng = random.Random(1)
    b = Builder(100_000_000, 1000, [40_000_000, 20_000_000])
    for i in range(6):
        b.add_node(f"es{i}", False)
    b.add_node("sw0", True)
    b.add_node("sw1", True)
    for i in range(6):
        b.connect(f"es{i}", "sw0" if i < 3 else "sw1")
    b.connect("sw0", "sw1")
    # Twelve ST flows, one 80 us slot each; a window per hop, shifted by hop parity.
    for k in range(12):
        src = rng.randrange(6)
        dst = rng.choice([d for d in range(6) if d != src])
        length = rng.randint(8, 24)
        for h, pid in enumerate(b.path(f"es{src}", f"es{dst}")):
            b.windows[pid].append([80 * k + 10 * (h % 2), length])
    for k in range(10):
        src = rng.randrange(6)
        dst = rng.choice([d for d in range(6) if d != src])
        cls = 1 if k < 5 else 2
        bits = rng.choice([1600, 2400, 3200, 4000]) if cls == 1 else rng.choice([4000, 6000, 8000])
        period = rng.choice([1000, 2000]) if cls == 1 else rng.choice([2000, 4000])
        b.flows.append({"id": f"avb{k}", "class": cls, "frame_bits": bits, "period_us": period,
                        "route": b.path(f"es{src}", f"es{dst}")})
    return b.doc("Synthetic TC1-shaped network: 6 ES, 2 SW, 12 ST flows (as GCL windows), 10 AVB flows, "
                 "idle slopes 40%/20% of 100 Mb/s. Flow parameters are invented, not the published data.",
                 12336, 2)


def cev():
    rng = random.Random(2)
    b = Builder(1_000_000_000, 500, [400_000_000, 200_000_000, 100_000_000, 50_000_000])
    switches = [f"sw{i}" for i in range(15)]
    for s in switches:
        b.add_node(s, True)
    # Switches form a complete binary tree; 31 end systems hang off them.
    for i in range(1, 15):
        b.connect(switches[(i - 1) // 2], switches[i])
    for e in range(31):
        b.add_node(f"es{e}", False)
        b.connect(f"es{e}", switches[e % 15])
    # Forty ST flows with short windows in 25 us slots.
    for k in range(40):
        src, dst = rng.sample(range(31), 2)
        length = rng.randint(2, 6)
        for h, pid in enumerate(b.path(f"es{src}", f"es{dst}")):
            slot = (k % 20) * 25 + (h % 2) * 8
            if all(abs(w[0] - slot) >= 25 or w[0] == slot for w in b.windows[pid]):
                if not any(w[0] == slot for w in b.windows[pid]):
                    b.windows[pid].append([slot, length])
    for k in range(80):
        src, dst = rng.sample(range(31), 2)
        cls = 1 + k % 4
        bits = rng.choice([800, 2400, 4000, 8000, 12000])
        period = rng.choice([500, 1000, 2000])
        b.flows.append({"id": f"avb{k}", "class": cls, "frame_bits": bits, "period_us": period,
                        "route": b.path(f"es{src}", f"es{dst}")})
    return b.doc("Synthetic CEV-shaped network: 31 ES, 15 SW (binary tree), 4 AVB classes at 40/20/10/5% "
                 "of 1 Gb/s, 40 ST flows as GCL windows, 80 AVB flows. Flow parameters are invented, "
                 "not the published data.", 12336, 1)


if __name__ == "__main__":
    write("minimal.json", minimal())
    write("tc1.json", tc1())
    write("cev.json", cev())
