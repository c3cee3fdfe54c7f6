"""Choosing between two network configurations by simulated outbreak risk.

Bond percolation on a 20-node contact graph: each edge transmits
independently with probability p, and the loss is the number of nodes the
outbreak reaches.  Lower transmission gives a histogram with lighter upper
tail, which the ordering prefers.  The vendored histogram pair from a
previous measurement campaign shows the same workflow on fixed data,
including the exact integer threshold x0 = 9 separating the configurations.
"""

from lossorder import Graph, OutbreakConfig, compare, simulate_outbreaks, tail_threshold
from lossorder.fixtures import load_outbreak_histograms

graph = Graph.complete(20)
histograms = {}
for label, p in (("patched", 0.12), ("unpatched", 0.15)):
    cfg = OutbreakConfig(graph, transmission=p, n_runs=1000, seed=7)
    histograms[label] = simulate_outbreaks(cfg).to_distribution()
    mean = sum(v * q for v, q in zip(histograms[label].bin_values, histograms[label].probs))
    print(f"{label}: mean outbreak size {mean:.2f}")

verdict = compare(histograms["patched"], histograms["unpatched"])
print(f"simulated pair: {verdict.relation.value}\n")

vendored = load_outbreak_histograms()
c1, c2 = vendored["config1"], vendored["config2"]
verdict = compare(c1, c2)
print(f"vendored pair: {verdict.relation.value}")
t = tail_threshold(c1, c2, verdict)
print(f"outbreaks above x0 = {t.x0:.0f} nodes are rarer under the preferred configuration")
