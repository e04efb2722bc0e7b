from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CycleBasis:
    """Ordered list of cycle vectors (ascending edge-id tuples)."""

    cycles: list
    total_weight: int
    kind: str = "MCB"
    meta: dict = field(default_factory=dict)

    @property
    def nu(self) -> int:
        return len(self.cycles)

    def __len__(self):
        return len(self.cycles)

    def __iter__(self):
        return iter(self.cycles)

    def dumps(self) -> str:
        """Debug text dump: header line, then one cycle per line."""
        lines = [f"nu {self.nu} weight {self.total_weight}"]
        lines.extend(" ".join(str(e) for e in c) for c in self.cycles)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, kind: str = "MCB") -> "CycleBasis":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        head = rows[0]
        if len(head) != 4 or head[0] != "nu" or head[2] != "weight":
            raise ValueError(f"bad basis header: {' '.join(head)!r}")
        cycles = [tuple(int(t) for t in r) for r in rows[1:]]
        if len(cycles) != int(head[1]):
            raise ValueError("cycle count does not match header")
        return cls(cycles, int(head[3]), kind)
