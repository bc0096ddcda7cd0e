"""Operation counters threaded through the kernels.

Every kernel takes an optional ``tally``; when ``None`` nothing is recorded.
Scalar counts follow the MUL / ADD / SCA convention, and per recursion depth
the kernels record block additions and product calls so schedules can be
checked exactly.
"""
from collections import Counter, defaultdict
from typing import NamedTuple


class OpCounts(NamedTuple):
    mul: int
    add: int
    sca: int

    def __add__(self, other):
        return OpCounts(self.mul + other.mul, self.add + other.add, self.sca + other.sca)


class Tally:
    def __init__(self):
        self.mul = 0
        self.add = 0
        self.sca = 0
        self.block_adds = defaultdict(int)
        self.calls = defaultdict(int)
        self.transforms = []
        self.iterations = 0
        # (depth, block_adds, calls) for every recursive node, in visit order
        self.nodes = []

    def counts(self):
        return OpCounts(self.mul, self.add, self.sca)

    def field_ops(self):
        return self.mul + self.add + self.sca

    def transform_sizes(self):
        return Counter(self.transforms)

    def level(self, depth):
        return self.block_adds[depth], self.calls[depth]

    def per_node(self, depth):
        return [(adds, calls) for d, adds, calls in self.nodes if d == depth]
