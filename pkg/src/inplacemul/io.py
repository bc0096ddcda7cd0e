"""Text formats: HM matrix triples, matrices and polynomials.

HM files hold blocks introduced by ``#alpha``, ``#beta`` and ``#mu`` (or
``#mu2``); each block is ``rows cols`` followed by row-major entries.
Entries are decimal integers, possibly negative, or fractions ``n/d``;
everything is reduced modulo the working prime at load.
"""
from importlib import resources

import numpy as np

from .bilinear import HMRep, HMRep2
from .errors import ParseError

BUILTIN = ("strassen", "karatsuba", "karatsuba2", "toom3", "identity")


def _tokens(text):
    """(line, token) pairs, skipping blank lines and ``//`` comments."""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            yield lineno, line
            continue
        for tok in line.split():
            yield lineno, tok


def _matrix_from(tokens, what, line):
    if len(tokens) < 2:
        raise ParseError(f"{what}: missing '<rows> <cols>' header", line)
    try:
        rows, cols = int(tokens[0][1]), int(tokens[1][1])
    except ValueError:
        raise ParseError(f"{what}: bad header", tokens[0][0]) from None
    body = tokens[2:]
    if len(body) != rows * cols:
        raise ParseError(f"{what}: expected {rows * cols} entries, found {len(body)}",
                         body[-1][0] if body else tokens[1][0])
    for ln, tok in body:
        if not _is_number(tok):
            raise ParseError(f"{what}: bad entry {tok!r}", ln)
    return [[body[i * cols + j][1] for j in range(cols)] for i in range(rows)]


def _is_number(tok):
    num, _, den = tok.partition("/")
    try:
        int(num)
        return not den or int(den) != 0
    except ValueError:
        return False


def parse_hm(text, p):
    """Return an :class:`HMRep` (``#mu`` block) or :class:`HMRep2` (``#mu2``)."""
    blocks, current, header_line = {}, None, {}
    for ln, tok in _tokens(text):
        if tok.startswith("#"):
            current = tok[1:].strip().lower()
            if current not in ("alpha", "beta", "mu", "mu2"):
                raise ParseError(f"unknown block {tok!r}", ln)
            if current in blocks:
                raise ParseError(f"duplicate block {tok!r}", ln)
            blocks[current] = []
            header_line[current] = ln
        elif current is None:
            raise ParseError("data before the first block header", ln)
        else:
            blocks[current].append((ln, tok))
    for name in ("alpha", "beta"):
        if name not in blocks:
            raise ParseError(f"missing #{name} block")
    if ("mu" in blocks) == ("mu2" in blocks):
        raise ParseError("exactly one of #mu and #mu2 is required")
    mats = {k: _matrix_from(v, k, header_line[k]) for k, v in blocks.items()}
    try:
        if "mu2" in mats:
            return HMRep2.from_rows(p, mats["alpha"], mats["beta"], mats["mu2"])
        return HMRep.from_rows(p, mats["alpha"], mats["beta"], mats["mu"])
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _format_block(name, mat):
    cols = len(mat[0]) if mat else 0
    lines = [f"#{name}", f"{len(mat)} {cols}"]
    lines += [" ".join(str(x) for x in row) for row in mat]
    return "\n".join(lines)


def format_hm(rep):
    mu_name, mu = ("mu2", rep.mu2) if isinstance(rep, HMRep2) else ("mu", rep.mu)
    return "\n".join([_format_block("alpha", rep.alpha), _format_block("beta", rep.beta),
                      _format_block(mu_name, mu)]) + "\n"


def builtin_hm_text(name):
    if name not in BUILTIN:
        raise KeyError(name)
    return resources.files("inplacemul").joinpath("data").joinpath(f"{name}.hm").read_text()


def load_hm(path_or_name, p):
    """Parse an HM file, or one of :data:`BUILTIN` when no such file exists."""
    try:
        with open(path_or_name) as fh:
            text = fh.read()
    except FileNotFoundError:
        if path_or_name in BUILTIN:
            text = builtin_hm_text(path_or_name)
        else:
            raise
    return parse_hm(text, p)


def _ints(text, what):
    vals = []
    for ln, tok in _tokens(text):
        try:
            vals.append(int(tok))
        except ValueError:
            raise ParseError(f"{what}: bad entry {tok!r}", ln) from None
    return vals


def parse_matrix(text, p):
    vals = _ints(text, "matrix")
    if len(vals) < 2 or len(vals) != 2 + vals[0] * vals[1]:
        raise ParseError("matrix: expected '<rows> <cols>' then rows*cols entries")
    rows, cols = vals[0], vals[1]
    M = np.array(vals[2:], dtype=np.int64).reshape(rows, cols) if rows * cols else \
        np.zeros((rows, cols), dtype=np.int64)
    np.remainder(M, p, out=M)
    return M


def format_matrix(M):
    lines = [f"{M.shape[0]} {M.shape[1]}"]
    lines += [" ".join(str(int(x)) for x in row) for row in M]
    return "\n".join(lines) + "\n"


def parse_poly(text, p):
    vals = _ints(text, "polynomial")
    if not vals or len(vals) != 1 + vals[0]:
        raise ParseError("polynomial: expected '<len>' then len coefficients")
    return [v % p for v in vals[1:]]


def format_poly(coeffs):
    return f"{len(coeffs)}\n" + " ".join(str(int(x)) for x in coeffs) + "\n"


def sniff_kind(text):
    """``"matrix"`` for a ``rows cols`` header line, ``"poly"`` otherwise."""
    for raw in text.splitlines():
        line = raw.split("//", 1)[0].strip()
        if line:
            vals = _ints(text, "data")
            if len(line.split()) == 2 and len(vals) == 2 + vals[0] * vals[1]:
                return "matrix"
            return "poly"
    return "poly"
