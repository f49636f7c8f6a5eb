"""Shared helper: use an edge-list file from the command line, else a synthetic graph."""

import sys

from trojanprop import generate_synthetic, load_edge_list


def demo_graph(nodes: int = 1500, m: int = 12):
    if len(sys.argv) > 1:
        print(f"loading {sys.argv[1]}")
        return load_edge_list(sys.argv[1])
    print(f"synthetic graph: {nodes} nodes, {m} edges per new node (pass an edge-list path to use real data)")
    return generate_synthetic(nodes, m, 0.9, 1)
