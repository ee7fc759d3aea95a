"""Busy beaver searches: exact Σ(n) and S(n), lower bounds for Σ∞(n).

The enumeration tree is cut at a fixed depth into subtrees (tasks).  Tasks
are independent, so they can be farmed out to worker processes; each one
returns a :class:`Tally`, and tallies merge with an associative,
commutative max whose ties go to the least machine encoding.  Reports
therefore do not depend on the worker count or on completion order.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional

from . import classical_search, ittm_search
from .classical import ClassicalMachine, Halted as CHalted, is_clean_output, run_classical, score_rado
from .formats import from_compact, ittm_compact
from .ittm import LIMSUP, ITTMachine, decode_unary
from .ledger import Ledger, make_record
from .transfinite import ExecBudget, Halted, run_transfinite

RADO, CLEAN, TIME, FSTAR0 = "rado", "clean", "time", "fstar0"
EXACT, LOWER = "Exact", "LowerBound"
MAX_CLASSICAL_STATES = 4
CLASSICAL_SPLIT, ITTM_SPLIT = 2, 2


@dataclass
class Tally:
    leaves: int = 0
    halted: int = 0
    nonhalt: int = 0
    undetermined: int = 0
    truncated: int = 0
    best: dict = field(default_factory=dict)  # key -> [value, encoding]
    unresolved_machines: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)  # [encoding, first, second] of certified non-halters

    def offer(self, key: str, value: int, encoding: str) -> None:
        cur = self.best.get(key)
        if cur is None or value > cur[0] or (value == cur[0] and encoding < cur[1]):
            self.best[key] = [value, encoding]

    def merge(self, other: Tally) -> Tally:
        out = Tally(self.leaves + other.leaves, self.halted + other.halted, self.nonhalt + other.nonhalt,
                    self.undetermined + other.undetermined, self.truncated + other.truncated, dict(self.best),
                    sorted(self.unresolved_machines + other.unresolved_machines),
                    sorted(self.witnesses + other.witnesses))
        for key, (value, enc) in other.best.items():
            out.offer(key, value, enc)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> Tally:
        return cls(**d)

    @property
    def unresolved(self) -> int:
        return self.undetermined + self.truncated


# -- classical -----------------------------------------------------------------

def _classical_tally(leaves: Iterable) -> Tally:
    t = Tally()
    for leaf in leaves:
        t.leaves += 1
        enc = leaf.machine.compact()
        if leaf.status == "halt":
            t.halted += 1
            t.offer(RADO, leaf.rado, enc)
            t.offer(TIME, leaf.steps, enc)
            if leaf.clean is not None:
                t.offer(CLEAN, leaf.clean, enc)
        elif leaf.status == "nonhalt":
            t.nonhalt += 1
        else:
            t.undetermined += 1
            t.unresolved_machines.append(enc)
    return t


def _classical_task(args) -> dict:
    table, n, budget, horizon, depth = args
    return asdict(_classical_tally(classical_search.expand(table, n, budget, horizon, depth=depth)))


def _ittm_task(args) -> dict:
    table, n, budget, rule, max_entries, depth = args
    return asdict(_ittm_tally(ittm_search.expand(table, n, budget, rule, max_entries, depth=depth)))


def _ittm_tally(leaves: Iterable) -> Tally:
    t = Tally()
    for leaf in leaves:
        t.leaves += 1
        enc = ittm_compact(leaf.machine)
        if leaf.status == "halt":
            t.halted += 1
            if leaf.value is not None:
                t.offer(FSTAR0, leaf.value, enc)
        elif leaf.status == "nonhalt":
            t.nonhalt += 1
            t.witnesses.append([enc, *leaf.witness])
        elif leaf.status == "truncated":
            t.truncated += 1
        else:
            t.undetermined += 1
            t.unresolved_machines.append(enc)
    return t


def _run_tasks(search: str, head_leaves: list, tasks: list, worker: Callable, tally_of: Callable,
               workers: int, ledger: Ledger, meta: dict) -> Tally:
    """Tally the inline leaves plus every task, resuming finished tasks from the ledger."""
    done = {r["task"]: Tally.from_dict(r["result"]) for r in ledger.find("task", search)}
    total = done.get(-1)
    if total is None:
        total = tally_of(head_leaves)
        ledger.append(make_record("task", search=search, task=-1, result=asdict(total), **meta))
    todo = [i for i in range(len(tasks)) if i not in done]
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(worker, [tasks[i] for i in todo])
            for i, res in zip(todo, results):
                done[i] = Tally.from_dict(res)
                ledger.append(make_record("task", search=search, task=i, result=res, **meta))
    else:
        for i in todo:
            res = worker(tasks[i])
            done[i] = Tally.from_dict(res)
            ledger.append(make_record("task", search=search, task=i, result=res, **meta))
    for i in range(len(tasks)):
        total = total.merge(done[i])
    return total


def _split(items) -> tuple[list, list]:
    head, tasks = [], []
    for x in items:
        (tasks if isinstance(x, list) else head).append(x)
    return head, tasks


# -- reports and certificates ------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    """A replayable claim: running ``machine`` under ``budgets`` halts as recorded."""

    machine: str
    convention: str
    score: int
    stage: str  # steps for classical machines, "w*b+c" for ITTMs
    digest: str
    budgets: dict

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> Certificate:
        return cls(d["machine"], d["convention"], d["score"], d["stage"], d["digest"], d["budgets"])


@dataclass(frozen=True)
class SearchReport:
    quantity: str  # "sigma" | "stime" | "sigma_inf"
    n: int
    convention: str
    value: Optional[int]
    status: str
    champion: Optional[str]
    unresolved: int
    budgets: dict
    leaves: int = 0
    certificates: tuple = ()

    def summary(self) -> str:
        sym = {"sigma": "Σ", "stime": "S", "sigma_inf": "Σ∞"}[self.quantity]
        rel = "=" if self.status == EXACT else "≥"
        value = "none" if self.value is None else self.value
        return f"{sym}({self.n}){rel}{value} {self.status}"

    def as_dict(self) -> dict:
        d = asdict(self)
        d["certificates"] = [c.as_dict() for c in self.certificates]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> SearchReport:
        d = dict(d)
        d["certificates"] = tuple(Certificate.from_dict(c) for c in d["certificates"])
        return cls(**d)


def _classical_digest(tape) -> str:
    return hashlib.sha256(f"{tape.origin}:{''.join(map(str, tape.cells))}".encode()).hexdigest()[:32]


def classical_score(tape, steps: int, convention: str) -> Optional[int]:
    if convention == RADO:
        return score_rado(tape)
    if convention == CLEAN:
        return is_clean_output(tape)
    if convention == TIME:
        return steps
    raise ValueError(f"unknown convention {convention!r}")


def certify_classical(m: ClassicalMachine, step_budget: int, convention: str) -> Optional[Certificate]:
    out = run_classical(m, step_budget)
    if not isinstance(out, CHalted):
        return None
    score = classical_score(out.tape, out.steps, convention)
    if score is None:
        return None
    return Certificate(m.compact(), convention, score, str(out.steps), _classical_digest(out.tape),
                       {"step_budget": step_budget})


def certify_ittm(m: ITTMachine, budget: ExecBudget) -> Optional[Certificate]:
    out = run_transfinite(m, budget=budget)
    if not isinstance(out, Halted):
        return None
    value = decode_unary(out.final.output)
    if value is None:
        return None
    return Certificate(ittm_compact(m), FSTAR0, value, str(out.stage), out.digest, budget.as_dict())


def verify_certificate(c: Certificate) -> bool:
    """Re-simulate and require an identical certificate."""
    try:
        m = from_compact(c.machine)
        if isinstance(m, ClassicalMachine):
            fresh = certify_classical(m, int(c.budgets["step_budget"]), c.convention)
        else:
            if c.convention != FSTAR0:
                return False
            fresh = certify_ittm(m, ExecBudget(**c.budgets))
    except (ValueError, KeyError, TypeError, IndexError):
        return False
    return fresh == c


def _resume_report(ledger: Ledger, search: str) -> Optional[SearchReport]:
    done = ledger.find("report", search)
    return SearchReport.from_dict(done[-1]["report"]) if done else None


def _finish(ledger: Ledger, search: str, report: SearchReport) -> SearchReport:
    for c in report.certificates:
        ledger.append(make_record("certificate", search=search, n=report.n, convention=c.convention,
                                  machine=c.machine, outcome="halted", stage=c.stage, score=c.score,
                                  budgets=c.budgets, certificate=c.as_dict()))
    ledger.append(make_record("report", search=search, n=report.n, convention=report.convention,
                              machine=report.champion, outcome=report.status, score=report.value,
                              budgets=report.budgets, report=report.as_dict()))
    return report


def classical_census(n: int, step_budget: int, workers: int = 1, ledger: Optional[Ledger] = None,
                     horizon: int = classical_search.DECIDER_HORIZON,
                     max_states: int = MAX_CLASSICAL_STATES) -> Tally:
    """Run every normalized n-state machine from blank; shared by Σ and S."""
    if not 1 <= n <= max_states:
        raise ValueError(f"classical search supports 1 <= n <= {max_states}")
    ledger = ledger or Ledger()
    search = f"classical-census:n={n}:budget={step_budget}:horizon={horizon}"
    done = ledger.find("census", search)
    if done:
        return Tally.from_dict(done[-1]["result"])
    head, tasks = _split(classical_search.expand(classical_search.root(n), n, step_budget, horizon,
                                                 split_depth=CLASSICAL_SPLIT))
    meta = {"n": n, "budgets": {"step_budget": step_budget}}
    tally = _run_tasks(search, head, [(t, n, step_budget, horizon, CLASSICAL_SPLIT) for t in tasks], _classical_task,
                       _classical_tally, workers, ledger, meta)
    ledger.append(make_record("census", search=search, result=asdict(tally), **meta))
    return tally


def _classical_report(quantity: str, n: int, step_budget: int, convention: str, workers: int,
                      ledger: Optional[Ledger]) -> SearchReport:
    ledger = ledger or Ledger()
    search = f"{quantity}:n={n}:convention={convention}:budget={step_budget}"
    prior = _resume_report(ledger, search)
    if prior is not None:
        return prior
    tally = classical_census(n, step_budget, workers, ledger)
    best = tally.best.get(convention)
    certs = ()
    if best is not None:
        cert = certify_classical(from_compact(best[1]), step_budget, convention)  # type: ignore[arg-type]
        if cert is None or cert.score != best[0]:
            raise AssertionError(f"champion {best[1]} does not reproduce its score")
        certs = (cert,)
    report = SearchReport(quantity, n, convention, best[0] if best else None,
                          EXACT if tally.undetermined == 0 else LOWER, best[1] if best else None,
                          tally.undetermined, {"step_budget": step_budget}, tally.leaves, certs)
    return _finish(ledger, search, report)


def sigma_classical(n: int, step_budget: int, convention: str = RADO, workers: int = 1,
                    ledger: Optional[Ledger] = None) -> SearchReport:
    if convention not in (RADO, CLEAN):
        raise ValueError("convention must be 'rado' or 'clean'")
    return _classical_report("sigma", n, step_budget, convention, workers, ledger)


def s_time_classical(n: int, step_budget: int, workers: int = 1, ledger: Optional[Ledger] = None) -> SearchReport:
    return _classical_report("stime", n, step_budget, TIME, workers, ledger)


# -- infinite time ---------------------------------------------------------------

def _search_key(prefix: str, n: int, rule: str, b: dict) -> str:
    return (f"{prefix}:n={n}:rule={rule}:blocks={b['max_block_steps']}:limits={b['max_limit_stages']}:"
            f"detection={b['detection']}:entries={b['max_entries']}")


def ittm_census(n: int, budget: ExecBudget = ExecBudget(), rule: str = LIMSUP, workers: int = 1,
                ledger: Optional[Ledger] = None, max_entries: int = ittm_search.DEFAULT_MAX_ENTRIES,
                ceiling: int = ittm_search.MAX_ITTM_STATES) -> Tally:
    ittm_search.check_ceiling(n, ceiling)
    ledger = ledger or Ledger()
    b = {**budget.as_dict(), "max_entries": max_entries}
    search = _search_key("ittm-census", n, rule, b)
    done = ledger.find("census", search)
    if done:
        return Tally.from_dict(done[-1]["result"])
    split = min(ITTM_SPLIT, max_entries)
    head, tasks = _split(ittm_search.expand(ittm_search.root(n), n, budget, rule, max_entries, split_depth=split))
    meta = {"n": n, "budgets": b, "convention": FSTAR0}
    tally = _run_tasks(search, head, [(t, n, budget, rule, max_entries, split) for t in tasks], _ittm_task,
                       _ittm_tally, workers, ledger, meta)
    ledger.append(make_record("census", search=search, result=asdict(tally), **meta))
    return tally


def sigma_inf_lower_bound(n: int, budget: ExecBudget = ExecBudget(), rule: str = LIMSUP, workers: int = 1,
                          ledger: Optional[Ledger] = None, max_entries: int = ittm_search.DEFAULT_MAX_ENTRIES,
                          ceiling: int = ittm_search.MAX_ITTM_STATES) -> SearchReport:
    """max f*(0) over enumerated n-state ITTMs; LowerBound unless every machine was resolved.

    ``max_entries`` bounds how many non-halting table entries the tree may
    fix; deeper subtrees count as unresolved.
    """
    ledger = ledger or Ledger()
    b = {**budget.as_dict(), "max_entries": max_entries}
    search = _search_key("sigma_inf", n, rule, b)
    prior = _resume_report(ledger, search)
    if prior is not None:
        return prior
    tally = ittm_census(n, budget, rule, workers, ledger, max_entries, ceiling)
    best = tally.best.get(FSTAR0)
    certs = ()
    if best is not None:
        cert = certify_ittm(from_compact(best[1]), budget)  # type: ignore[arg-type]
        if cert is None or cert.score != best[0]:
            raise AssertionError(f"champion {best[1]} does not reproduce its value")
        certs = (cert,)
    report = SearchReport("sigma_inf", n, FSTAR0, best[0] if best else None,
                          EXACT if tally.unresolved == 0 else LOWER, best[1] if best else None,
                          tally.unresolved, {**b, "rule": rule}, tally.leaves, certs)
    return _finish(ledger, search, report)
