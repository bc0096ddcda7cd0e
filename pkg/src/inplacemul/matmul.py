"""In-place accumulating matrix kernels over numpy ``int64`` views.

Operands are 2-D views into caller-owned arrays holding canonical residues.
Kernels update ``C`` through in-place ufuncs only and return ``A``/``B`` in
their original state; they never allocate blocks of field elements.
"""
import numpy as np

from .errors import OverlappingViews, ShapeMismatch

DEFAULT_THRESHOLD = 8


def as_matrix(rows, p=None):
    """Build an ``int64`` matrix (rows reduced mod ``p`` when given)."""
    M = np.array(rows, dtype=np.int64, ndmin=2)
    if p is not None:
        np.remainder(M, p, out=M)
    return M


def _check_matrix(*views):
    for X in views:
        if not isinstance(X, np.ndarray) or X.ndim != 2 or X.dtype != np.int64:
            raise ShapeMismatch("operands must be 2-D int64 arrays")


def _check_disjoint(**views):
    names = list(views)
    for i, x in enumerate(names):
        for y in names[i + 1:]:
            if np.shares_memory(views[x], views[y]):
                raise OverlappingViews(f"{x} and {y} overlap")


def _dot(x, y, p):
    """Dot product of two residue vectors, exact in int64 by chunking."""
    n = x.shape[0]
    step = max(1, (2**63 - 1) // ((p - 1) ** 2))
    if n <= step:
        return int(np.dot(x, y)) % p
    acc = 0
    for k in range(0, n, step):
        acc = (acc + int(np.dot(x[k:k + step], y[k:k + step]))) % p
    return acc


def _rows(X, *others):
    """Row-wise pairs for 2-D views, so ufuncs never need an iterator buffer."""
    if X.ndim == 2:
        return zip(X, *others)
    return ((X, *others),)


def _badd(X, Y, p, sign):
    """X += sign*Y, reduced."""
    op = np.add if sign > 0 else np.subtract
    for x, y in _rows(X, Y):
        op(x, y, out=x)
        np.remainder(x, p, out=x)


def _note(tally, node, X):
    node[0] += 1
    if tally is not None:
        tally.add += X.size


def _record(tally, depth, node):
    if tally is not None:
        tally.block_adds[depth] += node[0]
        tally.calls[depth] += node[1]
        tally.nodes.append((depth, node[0], node[1]))


def mm_acc_classic(A, B, C, p, sign=1, tally=None):
    """C += sign*A*B with one scalar accumulator per entry."""
    _check_matrix(A, B, C)
    m, l = A.shape
    l2, n = B.shape
    if l != l2 or C.shape != (m, n):
        raise ShapeMismatch(f"cannot accumulate {A.shape} x {B.shape} into {C.shape}")
    _check_disjoint(A=A, C=C)
    _check_disjoint(B=B, C=C)
    _classic(A, B, C, p, sign, tally)


def _classic(A, B, C, p, sign, tally):
    m, l = A.shape
    n = B.shape[1]
    for i in range(m):
        row = A[i]
        for j in range(n):
            C[i, j] = (int(C[i, j]) + sign * _dot(row, B[:, j], p)) % p
    if tally is not None:
        tally.mul += m * n * l
        tally.add += m * n * l


def _quadrants(X):
    h = X.shape[0] // 2
    return X[:h, :h], X[:h, h:], X[h:, :h], X[h:, h:]


def mm_acc_strassen(A, B, C, p, sign=1, threshold=DEFAULT_THRESHOLD, tally=None):
    """C += sign*A*B by the 18-addition in-place Strassen-Winograd schedule.

    Recurses while ``n`` is even and above ``threshold``; classical below.
    A and B are modified during the run and restored on return.
    """
    _check_matrix(A, B, C)
    n = A.shape[0]
    if A.shape != (n, n) or B.shape != (n, n) or C.shape != (n, n):
        raise ShapeMismatch("Strassen needs square operands of one size")
    _check_disjoint(A=A, B=B, C=C)
    _strassen(A, B, C, p, sign, max(1, threshold), tally, 0)


def _strassen(A, B, C, p, s, threshold, tally, depth):
    n = A.shape[0]
    if n % 2 or n <= threshold:
        _classic(A, B, C, p, s, tally)
        return
    a11, a12, a21, a22 = _quadrants(A)
    b11, b12, b21, b22 = _quadrants(B)
    c11, c12, c21, c22 = _quadrants(C)
    node = [0, 0]

    def add(X, Y, sign):
        _badd(X, Y, p, sign)
        _note(tally, node, X)

    def rec(X, Y, Z, sign):
        node[1] += 1
        _strassen(X, Y, Z, p, sign, threshold, tally, depth + 1)

    add(a21, a11, -1); add(b12, b22, -1); add(c21, c22, -1)
    rec(a21, b12, c22, s)
    add(a21, a22, 1); add(b12, b11, -1); add(c12, c22, -1)
    rec(a21, b12, c22, -s)
    add(c11, c22, -1)
    rec(a11, b11, c22, s)
    add(c11, c22, 1); add(b12, b21, 1); add(c21, c22, 1)
    rec(a22, b12, c21, s)
    add(b12, b22, 1); add(b12, b21, -1); add(a21, a12, -1)
    rec(a21, b22, c12, -s)
    add(a21, a12, 1); add(a21, a11, 1)
    rec(a21, b12, c22, s)
    add(c12, c22, 1); add(b12, b11, 1); add(a21, a22, -1)
    rec(a12, b21, c11, s)
    _record(tally, depth, node)


def strassen_level_counts(n, threshold, p=7):
    """Per-node ``(block_adds, product_calls)`` grouped by recursion depth.

    Runs the kernel on zero operands with instrumentation; when ``n`` does
    not split the single entry is ``[(0, 0)]``.
    """
    from .tally import Tally
    t = Tally()
    Z = np.zeros((n, n), dtype=np.int64)
    mm_acc_strassen(Z.copy(), Z.copy(), Z, p, 1, threshold, t)
    if not t.nodes:
        return [[(0, 0)]]
    depth = max(d for d, _, _ in t.nodes)
    return [t.per_node(d) for d in range(depth + 1)]


def _scale(X, k, p):
    for (x,) in _rows(X):
        np.multiply(x, k, out=x)
        np.remainder(x, p, out=x)


def _axpy(X, k, Y, p):
    """X += k*Y without a temporary: Y is scaled, added and unscaled."""
    k %= p
    if k == 0:
        return
    if k == 1 or k == p - 1:
        _badd(X, Y, p, 1 if k == 1 else -1)
        return
    _scale(Y, k, p)
    _badd(X, Y, p, 1)
    _scale(Y, pow(k, -1, p), p)


def apply_skew_unitary(u1, u2, Y, p, inverse=False):
    """(u1, u2) <- [[a, b], [-b, a]] (u1, u2) in place, or the inverse map."""
    a, b = Y[0] % p, Y[1] % p
    if a == 0:
        raise ValueError("skew-unitary pair needs a != 0")
    if b == 0:
        k = pow(a, -1, p) if inverse else a
        _scale(u1, k, p)
        _scale(u2, k, p)
        return
    ainv = pow(a, -1, p)
    y = (a + b * b * ainv) % p
    x = (-b * ainv) % p
    if not inverse:
        _scale(u1, a, p)
        _axpy(u1, b, u2, p)
        _scale(u2, y, p)
        _axpy(u2, x, u1, p)
    else:
        _axpy(u2, -x, u1, p)
        _scale(u2, pow(y, -1, p), p)
        _axpy(u1, -b, u2, p)
        _scale(u1, ainv, p)


def _times_y(X, Y, p, inverse=False):
    """X := X*Y for Y = [[a, b], [-b, a]] (x) I acting on column halves."""
    a, b = Y
    if b % p == 0:
        apply_skew_unitary(X, X[:, :0], (a, 0), p, inverse)
        return
    h = X.shape[1] // 2
    # right multiplication applies the transposed block to the column halves
    apply_skew_unitary(X[:, :h], X[:, h:], (a, -b), p, inverse)


# triangular semi-additions; Low includes the diagonal, Up is strictly upper

def _low_add(X, Y, p, sign, tally=None):
    """Low(X) += sign*Low(Y)."""
    for i in range(X.shape[0]):
        _badd(X[i, :i + 1], Y[i, :i + 1], p, sign)
    if tally is not None:
        tally.add += X.shape[0] * (X.shape[0] + 1) // 2


def _low_add_t(X, Y, p, sign, tally=None):
    """Low(X) += sign*Low(Y^T)."""
    for i in range(X.shape[0]):
        _badd(X[i, :i + 1], Y[:i + 1, i], p, sign)
    if tally is not None:
        tally.add += X.shape[0] * (X.shape[0] + 1) // 2


def _up_add_low_t(X, Y, p, sign, tally=None):
    """Up(X) += sign*Low(Y)^T."""
    for i in range(X.shape[0] - 1):
        _badd(X[i, i + 1:], Y[i + 1:, i], p, sign)
    if tally is not None:
        tally.add += X.shape[0] * (X.shape[0] - 1) // 2


def syrk_acc(A, C, Y, p, threshold=DEFAULT_THRESHOLD, tally=None):
    """Low(C) += Low(A*A^T) in place for ``A`` of shape ``m x 2n``.

    ``Y = (a, b)`` with ``a^2 + b^2 = -1`` defines the skew-unitary block.
    Only the lower triangle of C (diagonal included) is updated.
    """
    _check_matrix(A, C)
    m = A.shape[0]
    if C.shape != (m, m):
        raise ShapeMismatch(f"C must be {m}x{m} for A of shape {A.shape}")
    a, b = Y[0] % p, Y[1] % p
    if a == 0 or (a * a + b * b + 1) % p:
        raise ValueError(f"{Y} is not a skew-unitary pair mod {p}")
    _check_disjoint(A=A, C=C)
    _syrk(A, C, (a, b), p, max(1, threshold), tally, 0)


def _syrk_classic(A, C, p, tally):
    m = A.shape[0]
    for i in range(m):
        for j in range(i + 1):
            C[i, j] = (int(C[i, j]) + _dot(A[i], A[j], p)) % p
    if tally is not None:
        k = m * (m + 1) // 2 * A.shape[1]
        tally.mul += k
        tally.add += k


def _product(X, Z, C, p, threshold, tally, depth, sign=1):
    if X.shape[0] == X.shape[1]:
        _strassen(X, Z, C, p, sign, threshold, tally, depth)
    else:
        _classic(X, Z, C, p, sign, tally)


def _syrk(A, C, Y, p, threshold, tally, depth):
    m, w = A.shape
    n = w // 2
    splits = m % 2 == 0 and w % 2 == 0 and n > 0
    if splits and Y[1] != 0:
        splits = n % 2 == 0
    if not splits or m <= threshold:
        _syrk_classic(A, C, p, tally)
        return
    h = m // 2
    a11, a12, a21, a22 = A[:h, :n], A[:h, n:], A[h:, :n], A[h:, n:]
    c11, c21, c22 = C[:h, :h], C[h:, :h], C[h:, h:]
    node = [0, 0]

    def half(X, Z, sign):
        _badd(X, Z, p, sign)
        _note(tally, node, X)

    def rec(X, Z):
        node[1] += 1
        _syrk(X, Z, Y, p, threshold, tally, depth + 1)

    _low_add(c22, c11, p, -1, tally); _low_add(c21, c11, p, -1, tally)
    _up_add_low_t(c21, c11, p, -1, tally)
    rec(a11, c11)                                       # P1
    _up_add_low_t(c21, c11, p, 1, tally)
    _low_add(c21, c11, p, 1, tally); _low_add(c22, c11, p, 1, tally)
    rec(a12, c11)                                       # P2
    _times_y(a11, Y, p); _times_y(a21, Y, p)
    half(a11, a21, -1); half(a21, a22, -1)
    _low_add(c22, c21, p, -1, tally); _low_add_t(c22, c21, p, -1, tally)
    node[1] += 1
    _product(a11, a21.T, c21, p, threshold, tally, depth + 1)   # P4
    _low_add_t(c22, c21, p, 1, tally)
    # a11 now holds -S1 = (A11 - A21)Y; the symmetric product needs
    # S3 = S1 - A22, so -S3 is formed in a11 rather than a21
    half(a11, a22, 1)
    _up_add_low_t(c21, c21, p, -1, tally)
    rec(a11, c21)                                       # P5
    _up_add_low_t(c21, c21, p, 1, tally); _low_add(c22, c21, p, 1, tally)
    half(a11, a12, -1)
    node[1] += 1
    _product(a22, a11.T, c21, p, threshold, tally, depth + 1, -1)   # P3
    half(a11, a12, 1); half(a11, a22, -1); half(a21, a22, 1); half(a11, a21, 1)
    _times_y(a21, Y, p, inverse=True); _times_y(a11, Y, p, inverse=True)
    _record(tally, depth, node)


def square_acc(A, C, p, threshold=DEFAULT_THRESHOLD, sign=1, tally=None):
    """C += sign*A^2 in place; A is restored."""
    _check_matrix(A, C)
    n = A.shape[0]
    if A.shape != (n, n) or C.shape != (n, n):
        raise ShapeMismatch("square needs square operands of one size")
    _check_disjoint(A=A, C=C)
    _square(A, C, p, sign, max(1, threshold), tally, 0)


def _square(A, C, p, s, threshold, tally, depth):
    n = A.shape[0]
    if n % 2 or n <= threshold:
        _classic(A, A, C, p, s, tally)
        return
    a11, a12, a21, a22 = _quadrants(A)
    c11, c12, c21, c22 = _quadrants(C)
    node = [0, 0]

    def add(X, Z, sign):
        _badd(X, Z, p, sign)
        _note(tally, node, X)

    def sq(X, Z, sign):
        node[1] += 1
        _square(X, Z, p, sign, threshold, tally, depth + 1)

    def mul(X, Z, W, sign):
        node[1] += 1
        _strassen(X, Z, W, p, sign, threshold, tally, depth + 1)

    add(a22, a21, -1); add(c12, c22, 1)
    sq(a22, c22, s)
    add(a22, a12, 1); add(a22, a11, -1)
    mul(a22, a12, c12, -s)
    mul(a21, a22, c21, -s)
    add(c21, c22, -1); add(a22, a11, 1)
    sq(a22, c22, -s)
    add(c11, c22, 1)
    mul(a12, a21, c22, -s)
    add(a22, a21, 1); add(c12, c22, -1); add(c11, c22, -1)
    sq(a22, c22, s)
    add(a22, a12, -1); add(c21, c22, 1)
    sq(a11, c11, s)
    _record(tally, depth, node)
