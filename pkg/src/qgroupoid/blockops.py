"""Block-diagonal operators on sector-decomposed spaces.

A module splits into sectors invariant under every operator of interest
(both algebra actions and everything commuting with them). Operators are
stored per sector, with sectors of equal size grouped so that products,
adjoints and norms are batched numpy calls. Leading batch axes hold
families of operators.
"""

import numpy as np


class Layout:
    """Sector sizes of a space, in basis order, plus their grouping by size."""

    def __init__(self, sizes, labels=None):
        self.sizes = tuple(int(m) for m in sizes)
        if any(m <= 0 for m in self.sizes):
            raise ValueError("empty sectors are not allowed")
        self.labels = tuple(labels) if labels is not None else tuple(range(len(self.sizes)))
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)]).astype(int)
        self.dim = int(self.offsets[-1])
        by_size = {}
        for s, m in enumerate(self.sizes):
            by_size.setdefault(m, []).append(s)
        self.groups = [(m, np.array(ss, dtype=int)) for m, ss in sorted(by_size.items())]
        self.where = {}
        for g, (m, ss) in enumerate(self.groups):
            for p, s in enumerate(ss):
                self.where[s] = (g, p)
        # global basis positions of each group, shape (n_g, m)
        self.positions = [self.offsets[ss][:, None] + np.arange(m)[None, :] for m, ss in self.groups]

    @property
    def n_sectors(self):
        return len(self.sizes)

    def slice(self, s):
        return slice(self.offsets[s], self.offsets[s + 1])

    def __eq__(self, other):
        return isinstance(other, Layout) and self.sizes == other.sizes

    def __repr__(self):
        return f"Layout({len(self.sizes)} sectors, dim {self.dim})"


class BlockOp:
    """Family of block-diagonal operators; ``blocks[g]`` has shape ``batch + (n_g, m, m)``."""

    __array_priority__ = 100

    def __init__(self, layout, blocks):
        self.layout = layout
        self.blocks = [np.asarray(b) for b in blocks]

    @property
    def batch(self):
        return self.blocks[0].shape[:-3] if self.blocks else ()

    @classmethod
    def zeros(cls, layout, batch=()):
        return cls(layout, [np.zeros(tuple(batch) + (len(ss), m, m), dtype=complex) for m, ss in layout.groups])

    @classmethod
    def identity(cls, layout):
        return cls(layout, [np.broadcast_to(np.eye(m, dtype=complex), (len(ss), m, m)).copy()
                            for m, ss in layout.groups])

    @classmethod
    def from_sectors(cls, layout, mats, batch=()):
        op = cls.zeros(layout, batch)
        for s, M in enumerate(mats):
            op.set_sector(s, M)
        return op

    @classmethod
    def from_dense(cls, layout, M):
        """Diagonal blocks of ``M`` (shape ``batch + (dim, dim)``); off-block parts dropped."""
        M = np.asarray(M)
        blocks = []
        for pos in layout.positions:
            blocks.append(M[..., pos[:, :, None], pos[:, None, :]])
        return cls(layout, blocks)

    def off_block_norm(self, M):
        """Frobenius norm of the part of a dense matrix outside the sector blocks."""
        M = np.asarray(M)
        return float(np.sqrt(max(0.0, np.linalg.norm(M) ** 2
                                 - sum(np.linalg.norm(b) ** 2 for b in BlockOp.from_dense(self.layout, M).blocks))))

    def set_sector(self, s, M):
        g, p = self.layout.where[s]
        self.blocks[g][..., p, :, :] = M

    def sector(self, s):
        g, p = self.layout.where[s]
        return self.blocks[g][..., p, :, :]

    def dense(self):
        L = self.layout
        out = np.zeros(self.batch + (L.dim, L.dim), dtype=complex)
        for pos, b in zip(L.positions, self.blocks):
            out[..., pos[:, :, None], pos[:, None, :]] = b
        return out

    def copy(self):
        return BlockOp(self.layout, [b.copy() for b in self.blocks])

    # -- arithmetic ------------------------------------------------------------

    def __matmul__(self, other):
        return BlockOp(self.layout, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def __add__(self, other):
        return BlockOp(self.layout, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        return BlockOp(self.layout, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return BlockOp(self.layout, [-b for b in self.blocks])

    def scale(self, c):
        """Multiply by scalars ``c`` broadcast over the batch axes."""
        c = np.asarray(c)
        return BlockOp(self.layout, [b * c[..., None, None, None] for b in self.blocks])

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    @property
    def H(self):
        return BlockOp(self.layout, [np.swapaxes(b, -1, -2).conj() for b in self.blocks])

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return BlockOp(self.layout, [b[idx] for b in self.blocks])

    def contract(self, c):
        """Linear combination over the leading batch axis: ``sum_k c[..., k] op[k]``."""
        c = np.asarray(c)
        return BlockOp(self.layout, [np.tensordot(c, b, axes=([-1], [0])) for b in self.blocks])

    def sum(self, axis=0):
        return BlockOp(self.layout, [b.sum(axis=axis) for b in self.blocks])

    def reshape(self, batch):
        return BlockOp(self.layout, [b.reshape(tuple(batch) + b.shape[-3:]) for b in self.blocks])

    @staticmethod
    def stack(ops, axis=0):
        layout = ops[0].layout
        return BlockOp(layout, [np.stack([o.blocks[g] for o in ops], axis=axis) for g in range(len(layout.groups))])

    def broadcast_to(self, batch):
        return BlockOp(self.layout, [np.broadcast_to(b, tuple(batch) + b.shape[-3:]) for b in self.blocks])

    # -- norms and vectors -----------------------------------------------------

    def norm(self):
        """Largest spectral norm over sectors (coordinate inner product), per batch entry."""
        out = np.zeros(self.batch)
        for (m, _), b in zip(self.layout.groups, self.blocks):
            if b.shape[-3] == 0:
                continue
            if m == 1:
                nb = np.abs(b[..., 0, 0])
            else:
                nb = np.linalg.norm(b, 2, axis=(-2, -1))
            out = np.maximum(out, nb.max(axis=-1))
        return out

    def apply(self, v):
        """``op v`` for a single operator and vectors of shape ``(..., dim)``."""
        v = np.asarray(v)
        out = np.zeros(np.broadcast_shapes(v.shape[:-1], self.batch) + (self.layout.dim,), dtype=complex)
        for pos, b in zip(self.layout.positions, self.blocks):
            out[..., pos] = np.einsum("...nij,...nj->...ni", b, v[..., pos])
        return out

    def support(self):
        """Per-group boolean support, OR-ed over the batch axes."""
        return [np.any(b != 0, axis=tuple(range(b.ndim - 3))) for b in self.blocks]
