"""Terminal review loop for interesting leads."""

from __future__ import annotations

import sys
from collections.abc import Callable, Sequence
from typing import TextIO

from servmine.mining import Lead, NoveltyRegistry, review_apply

KEYS = {"a": "accept", "r": "reject", "k": "mark_known"}
PROMPT = "[a]ccept / [r]eject / mark [k]nown / [s]kip / [q]uit > "


def explain(lead: Lead) -> str:
    a, b = lead.service_a, lead.service_b
    rec = lead.recognition
    reasons = []
    if rec.state_dep:
        reasons.append(f"{a} and {b} are active at overlapping times in the same place")
    if rec.env_dep:
        reasons.append("one service's effects on the environment meet the other's preconditions")
    if rec.people_dep:
        reasons.append("both are used by the same person")
    if rec.ope_comp:
        reasons.append("outputs of one can feed inputs of the other")
    if not reasons:
        return "no recognized dependency"
    if rec.direction in ("forward", "backward"):
        up, down = (a, b) if rec.direction == "forward" else (b, a)
        reasons.append(f"the link runs from {up} to {down}")
    return "; ".join(reasons)


def render(lead: Lead) -> str:
    s, r = lead.scores, lead.recognition
    return "\n".join(
        [
            f"{lead.service_a}  <->  {lead.service_b}",
            f"  recognition  state={r.state_dep} env={r.env_dep} people={r.people_dep}"
            f" ope={r.ope_comp} direction={r.direction}",
            f"  scores       cd={s.cd:.3f} sim={s.sim:.3f} dc={s.dc:.4f} div={s.div:.4f}"
            f" act={s.act} nov={s.nov} interestingness={s.interestingness:.4f}",
            f"  why          {explain(lead)}",
        ]
    )


def review_session(
    leads: Sequence[Lead],
    registry: NoveltyRegistry,
    ask: Callable[[str], str] | None = None,
    out: TextIO = sys.stdout,
) -> tuple[list[Lead], NoveltyRegistry]:
    """Prompt for a verdict on each interesting lead; other leads pass through untouched."""
    ask = ask or input
    result = list(leads)
    pending = [i for i, lead in enumerate(result) if lead.status == "interesting"]
    print(f"{len(pending)} interesting lead(s) to review", file=out)
    for n, i in enumerate(pending, start=1):
        print(f"\n[{n}/{len(pending)}] {render(result[i])}", file=out)
        while True:
            try:
                answer = ask(PROMPT).strip().lower()
            except EOFError:
                answer = "q"
            if answer in ("s", "q") or answer in KEYS:
                break
            print("unrecognized answer", file=out)
        if answer == "q":
            break
        if answer == "s":
            continue
        result[i], registry = review_apply(result[i], KEYS[answer], registry)
    return result, registry
