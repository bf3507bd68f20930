"""Smoke test for the drgg Python module.

Build and install first:  maturin develop --release -m crates/py/Cargo.toml
"""

import math
import os
import tempfile

import drgg


def main():
    g = drgg.Graph.generate(2000, 8.0, 3, seed=1)
    assert g.n == 2000 and len(g) == 2000
    assert g.dim == 3
    assert len(g.edges()) == g.edge_count
    assert sum(g.in_degrees()) == sum(g.out_degrees()) == g.edge_count
    r0 = drgg.min_radius(2000, 3)
    assert all(r0 <= r <= 0.5 for r in g.radii())

    # the expected edge count should be close to what we sampled
    expected = drgg.expected_edges(2000, 8.0, 3)
    assert abs(g.edge_count / expected - 1) < 0.1, (g.edge_count, expected)

    s = g.stats(undirected=True)
    assert s["n"] == 2000
    assert 0 < s["reciprocity"] < 1
    assert s["paths"]["mode"] == "undirected_projection"

    t = drgg.theory_report(10000, 8.0, 3)
    assert abs(t["reciprocity_limit"] - 8 / 11) < 1e-12
    assert abs(drgg.clustering_constant(8.0, 3) - t["clustering_constant"]) < 1e-15
    assert math.isclose(drgg.pair_distance_cdf(0.2, 0.1, 3), 1.0)

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "g.json")
        g.write(path)
        h = drgg.Graph.read(path)
        assert h.edges() == g.edges()
        assert h.positions() == g.positions()

        tsv = os.path.join(tmp, "g.tsv")
        g.write_edge_list(tsv)
        e = drgg.Graph.read_edge_list(tsv)
        assert e.edge_count == g.edge_count and e.dim is None

    fixed = drgg.Graph.generate(2000, 0.0, 3, seed=2, fixed_radius=True)
    assert fixed.reciprocity() == 1.0

    big = drgg.Graph.generate(50000, 8.0, 3, seed=5)
    fit = big.fit(3)
    assert abs(fit["alpha_hat"] - 8.0) < 1.0, fit

    for call, exc in [
        (lambda: drgg.Graph.generate(3, 8.0, 4), drgg.InfeasibleError),
        (lambda: drgg.Graph.generate(100, 3.0, 3), ValueError),
        (lambda: fixed.fit(3), drgg.InsufficientDataError),
        (lambda: drgg.Graph.read("/nonexistent/g.json"), OSError),
    ]:
        try:
            call()
        except exc:
            pass
        else:
            raise AssertionError(f"expected {exc.__name__}")

    print("ok", repr(g), f"alpha_hat={fit['alpha_hat']:.3f}")


if __name__ == "__main__":
    main()
