from typing import Literal, Optional

import msgspec

from core.series import Mismatch

Status = Literal["pass", "fail", "ambiguous-resolved", "error"]


class VerificationReport(msgspec.Struct):
    id: str
    status: Status
    order: int
    first_mismatch: Optional[Mismatch] = None
    millis: int = 0
    suite: Optional[str] = None
    tag: Optional[str] = None
    reading: Optional[str] = None
    note: Optional[str] = None
    message: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "ambiguous-resolved")

    def to_text(self) -> str:
        mark = "✅" if self.ok else "❌"
        line = f"{mark} {self.id} {self.status} to order {self.order} ({self.millis} ms)"
        if self.reading:
            line += f" reading={self.reading}"
        if self.first_mismatch is not None:
            m = self.first_mismatch
            line += f" first mismatch at q^{m.exponent}: {m.lhs} vs {m.rhs}"
        if self.message:
            line += f" [{self.message}]"
        if self.note:
            line += f"\n   note: {self.note}"
        return line
