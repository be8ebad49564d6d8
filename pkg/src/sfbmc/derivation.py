"""Derivation trees recording which step rule produced each symbolic successor."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .expr import Expr, render

# rule name -> number of judgment premises (None: one per parallel substate)
RULES: dict[str, Optional[int]] = {
    "t-FIRE": 0, "t-NOT-ENABLED": 0, "t-NO-FIRE": 0,
    "T-∅": 0, "T-FIRE": 1, "T-NO-LAST": 1, "T-NO": 2,
    "T-FIRE-J-F": 2, "T-END": 2, "T-FIRE-J-N": 3,
    "SD-NO": 3, "SD-INT-FIRE": 3, "SD-FIRE": 2, "SD-INIT": 1, "SD-EXIT": 1,
    "AND": None, "AND-INIT": None, "AND-EXIT": None,
    "OR-EXT-FIRE": 2, "OR-EXT-FIRE-OUT": 1, "OR-NO": 1, "OR-INT-FIRE": 2,
    "OR-FIRE": 1, "OR-INIT-NO-STATE": 0, "OR-INIT-∅p": 2, "OR-INIT": 1, "OR-EXIT": 1,
}

_ARROWS = {"step": "→", "init": "⇑", "exit": "⇓"}


@dataclass(frozen=True)
class Derivation:
    rule: str
    subject: str        # what the judgment is about, e.g. "sd Run.Running"
    kind: str           # "step", "init" or "exit"
    result: str = ""    # transition value for step judgments
    premises: tuple["Derivation", ...] = ()
    conjunct: Optional[Expr] = field(default=None, compare=False)

    def conclusion(self, event: Optional[str] = None) -> str:
        ev = event if event is not None else "∅"
        out = f"{ev} ⊢ ({self.subject}, ⟨Δ, pc⟩) {_ARROWS[self.kind]} ⟨Δ', pc'⟩"
        if self.result:
            out += f", {self.result}"
        return out

    def rules(self) -> list[str]:
        out = [self.rule]
        for p in self.premises:
            out.extend(p.rules())
        return out

    def check_arity(self) -> bool:
        want = RULES.get(self.rule, -1)
        if want == -1:
            return False
        if want is not None and len(self.premises) != want:
            return False
        return all(p.check_arity() for p in self.premises)

    def to_json(self, event: Optional[str] = None) -> dict:
        node = {"rule": self.rule, "conclusion": self.conclusion(event)}
        if self.conjunct is not None:
            node["conjunct"] = render(self.conjunct)
        node["premises"] = [p.to_json(event) for p in self.premises]
        return node

    def render_text(self, event: Optional[str] = None, indent: int = 0) -> str:
        """Bottom-up layout: premises first, the conclusion last."""
        lines = [p.render_text(event, indent + 2) for p in self.premises]
        pad = " " * indent
        extra = f"   [{render(self.conjunct)}]" if self.conjunct is not None else ""
        lines.append(f"{pad}[{self.rule}] {self.conclusion(event)}{extra}")
        return "\n".join(lines)

    def dumps(self, event: Optional[str] = None) -> str:
        return json.dumps(self.to_json(event), indent=2, ensure_ascii=False)
