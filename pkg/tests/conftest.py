import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rand_matrix(rng, rows, cols, p):
    return rng.integers(0, p, (rows, cols)).astype(np.int64)


def rand_poly(rng, n, p):
    return rng.integers(0, p, n).astype(np.int64)


def schoolbook(A, B, C, p, sign=1):
    """Independent triple loop on Python ints."""
    A, B, C = A.tolist(), B.tolist(), C.tolist()
    for i in range(len(A)):
        for j in range(len(B[0]) if B else 0):
            acc = 0
            for k in range(len(B)):
                acc += A[i][k] * B[k][j]
            C[i][j] = (C[i][j] + sign * acc) % p
    return np.array(C, dtype=np.int64).reshape(len(A), -1)


def convolve(a, b, c, p, sign=1):
    """Independent convolution through numpy on object dtype (exact ints)."""
    prod = np.convolve(np.array(list(a), dtype=object), np.array(list(b), dtype=object))
    out = [int(x) for x in c]
    for i, v in enumerate(prod):
        out[i] = (out[i] + sign * int(v)) % p
    return out


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
