import numpy as np
import pytest

from netacorr import Network, generate_random_network
from netacorr.cli import main as cli_main


@pytest.fixture(scope="session")
def er_net():
    """The 200-node Erdos-Renyi benchmark network (mean degree 5)."""
    return generate_random_network(200, model="erdos-renyi", seed=5)


@pytest.fixture(scope="session")
def sw_net():
    """The 200-node small-world benchmark network (k=4, 5% rewiring)."""
    return generate_random_network(200, model="small-world", k=4,
                                   rewire_prob=0.05, seed=12)


@pytest.fixture
def path4():
    return Network(4, ((0, 1), (1, 2), (2, 3)))


@pytest.fixture
def run_cli(capsys):
    """Invoke the CLI in-process; returns (exit_code, stdout, stderr)."""

    def _run(*args):
        try:
            code = cli_main([str(a) for a in args])
        except SystemExit as exc:  # argparse rejects bad flags this way
            code = exc.code if isinstance(exc.code, int) else 2
        out, err = capsys.readouterr()
        return code, out, err

    return _run


def random_network(rng, n, p=0.3):
    """Small helper for property tests: one draw of an ER graph as a Network.

    Redraws until at least one edge exists so weight matrices are never
    all-zero.
    """
    while True:
        edges = []
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    edges.append((i, j))
        if edges:
            return Network(n, tuple(edges))
