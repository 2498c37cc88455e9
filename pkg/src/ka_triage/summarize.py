"""Summary generation: prompt construction, a deterministic template
generator, hallucination detection against the fact table, and the
LLM-with-fallback pipeline.

The generated text never reaches the analyst unchecked: every numeric,
date, and entity claim must be grounded in the knowledge area's facts, and
a verification failure yields the exact sentinel "Summary not available".
"""

from __future__ import annotations

import os
import re
import threading
from dataclasses import dataclass
from datetime import date
from decimal import Decimal, InvalidOperation
from typing import Callable, Optional

import httpx

from .features import Fact, KnowledgeAreaView
from .intelligence import RiskReport
from .model import KnowledgeAreaId

SENTINEL_TEXT = "Summary not available"

RISK_OPEN = "[[risk]]"
RISK_CLOSE = "[[/risk]]"

LLM_URL_ENV = "KA_TRIAGE_LLM_URL"
LLM_KEY_ENV = "KA_TRIAGE_LLM_KEY"

DEFAULT_TIMEOUT_S = 10.0
DEFAULT_TOKEN_BUDGET = 2048
DEFAULT_MAX_IN_FLIGHT = 4

DECIMAL_REL_TOLERANCE = Decimal("0.005")


class GenerationUnavailable(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class Prompt:
    system_context: str
    fact_block: str
    insight_block: str
    instruction_block: str

    def render(self) -> str:
        return "\n\n".join(
            (self.system_context, self.fact_block, self.insight_block, self.instruction_block)
        )


@dataclass(frozen=True)
class SummaryDoc:
    ka: KnowledgeAreaId
    text: str
    highlights: tuple[tuple[int, int, str], ...]  # byte offsets, kind
    verified: bool
    generator: str  # "llm" | "template" | "unavailable"


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    violations: tuple[tuple[str, str, str], ...]  # claim_text, claim_value, reason


def format_fact_value(fact: Fact) -> str:
    v = fact.value
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (int, Decimal)):
        return str(v)
    if isinstance(v, date):
        return v.isoformat()
    return str(v)


def build_prompt(view: KnowledgeAreaView, report: RiskReport) -> Prompt:
    """Deterministic three-block prompt grounding the model in the area's
    facts and the risk assessment."""
    fact_lines = []
    for fact in view.facts:
        line = f"{fact.name} = {format_fact_value(fact)}"
        if fact.unit:
            line += f" {fact.unit}"
        fact_lines.append(line)

    insight_lines = [
        f"area: {view.ka.label}",
        f"flagged as suspicious: {'yes' if report.flagged else 'no'}",
        f"risk score: {report.score}",
    ]
    if report.attributed_variables:
        names = ", ".join(n for n, _ in report.attributed_variables)
        insight_lines.append(f"variables driving the risk: {names}")
    for t in report.triggered:
        insight_lines.append(f"triggered rule: {t.rule.description}")
    if report.blocklist_justified:
        insight_lines.append("this area justifies an active blocklist entry")

    return Prompt(
        system_context=(
            "You write one-paragraph briefings for financial fraud analysts "
            "reviewing an alerted transaction."
        ),
        fact_block="\n".join(fact_lines),
        insight_block="\n".join(insight_lines),
        instruction_block=(
            "Write one short paragraph using only the facts above. "
            f"Wrap any risky value in {RISK_OPEN} and {RISK_CLOSE} markers. "
            "Do not introduce numbers, dates, names, or places that are not listed."
        ),
    )


# --- LLM transport ----------------------------------------------------------


class HttpLlmClient:
    """Chat-completion style HTTP client with bounded in-flight requests."""

    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        timeout_s: float = DEFAULT_TIMEOUT_S,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
    ):
        self.base_url = base_url
        self.api_key = api_key
        self.timeout_s = timeout_s
        self._slots = threading.Semaphore(max_in_flight)

    @classmethod
    def from_env(cls) -> Optional["HttpLlmClient"]:
        url = os.environ.get(LLM_URL_ENV)
        if not url:
            return None
        return cls(url, os.environ.get(LLM_KEY_ENV, ""))

    def complete(self, prompt: Prompt) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "messages": [
                {"role": "system", "content": prompt.system_context},
                {
                    "role": "user",
                    "content": "\n\n".join(
                        (prompt.fact_block, prompt.insight_block, prompt.instruction_block)
                    ),
                },
            ]
        }
        with self._slots:
            resp = httpx.post(self.base_url, json=body, headers=headers, timeout=self.timeout_s)
        resp.raise_for_status()
        return resp.json()["choices"][0]["message"]["content"]


LlmCallable = Callable[[Prompt], str]


def generate_llm(
    prompt: Prompt,
    client: LlmCallable,
    token_budget: int = DEFAULT_TOKEN_BUDGET,
) -> str:
    """One completion with a single retry on transport failure."""
    rendered = prompt.render()
    if len(rendered) // 4 > token_budget:
        raise GenerationUnavailable("budget")
    last_error: Exception | None = None
    for _ in range(2):
        try:
            return client(prompt)
        except GenerationUnavailable:
            raise
        except Exception as e:  # transport or protocol failure
            last_error = e
    raise GenerationUnavailable(f"transport: {last_error}")


def finalize_markers(raw: str) -> tuple[str, tuple[tuple[int, int, str], ...]]:
    """Strip inline risk markers and convert them to byte offsets."""
    text_parts: list[str] = []
    highlights: list[tuple[int, int, str]] = []
    pos = 0
    byte_len = 0
    while True:
        start = raw.find(RISK_OPEN, pos)
        if start == -1:
            text_parts.append(raw[pos:])
            break
        text_parts.append(raw[pos:start])
        byte_len += len(raw[pos:start].encode("utf-8"))
        end = raw.find(RISK_CLOSE, start)
        if end == -1:  # unterminated marker: keep the text, drop the span
            text_parts.append(raw[start + len(RISK_OPEN):])
            break
        inner = raw[start + len(RISK_OPEN): end]
        text_parts.append(inner)
        inner_bytes = len(inner.encode("utf-8"))
        if inner_bytes:
            highlights.append((byte_len, byte_len + inner_bytes, "risk"))
        byte_len += inner_bytes
        pos = end + len(RISK_CLOSE)
    return "".join(text_parts), tuple(highlights)


# --- hallucination detection ------------------------------------------------

_DATE_RE = re.compile(r"\b\d{4}-\d{2}-\d{2}\b")
# trailing lookahead admits a sentence-final period but not "1.2.3" chains
_NUMBER_RE = re.compile(r"(?<![\w.\-])-?\d+(?:\.\d+)?%?(?!\w|\.\d)")
_CAP_WORD_RE = re.compile(r"\b[A-Z][a-z]+\b")
_CODE_RE = re.compile(r"\b[A-Z]{2,3}\b")
_SENTENCE_START_RE = re.compile(r"(?:^|[.!?]\s+|\n\s*)$")


def _numeric_fact_values(facts: list[Fact]) -> list[Decimal]:
    values: list[Decimal] = []
    for f in facts:
        if isinstance(f.value, bool):
            continue
        if isinstance(f.value, (int, Decimal)):
            values.append(Decimal(f.value))
        if f.comparative is not None:
            values.extend(Decimal(x) for x in f.comparative)
    return values


def _known_strings(facts: list[Fact]) -> set[str]:
    known: set[str] = set()
    for f in facts:
        if isinstance(f.value, str):
            known.add(f.value)
        if f.unit:
            known.add(f.unit)
    return known


def detect_hallucinations(raw_text: str, facts: list[Fact]) -> VerificationResult:
    """Check every numeric, date, and entity claim against the fact table.

    Integers must match a fact exactly; decimals within 0.5% relative
    tolerance; dates by calendar day; entity strings must appear among the
    string-valued facts.
    """
    violations: list[tuple[str, str, str]] = []
    numbers = _numeric_fact_values(facts)
    dates = {f.value for f in facts if isinstance(f.value, date)}
    known = _known_strings(facts)

    text = raw_text
    for m in _DATE_RE.finditer(raw_text):
        claimed = date.fromisoformat(m.group())
        if claimed not in dates:
            violations.append((m.group(), m.group(), "date not in facts"))
    text = _DATE_RE.sub(" ", text)

    for m in _NUMBER_RE.finditer(text):
        token = m.group()
        is_percent = token.endswith("%")
        cleaned = token.rstrip("%").replace(",", "")
        try:
            value = Decimal(cleaned)
        except InvalidOperation:
            continue
        if is_percent:
            value = value / 100
        if "." in cleaned or is_percent:
            matched = any(
                (f == 0 and value == 0) or (f != 0 and abs(value - f) <= DECIMAL_REL_TOLERANCE * abs(f))
                for f in numbers
            )
            reason = "decimal outside tolerance of every fact"
        else:
            matched = any(value == f for f in numbers)
            reason = "integer matches no fact"
        if not matched:
            violations.append((token, str(value), reason))

    # entity check: capitalized runs (skipping lone sentence-start words) and
    # short all-caps codes must be grounded in a string fact or unit
    consumed: set[int] = set()
    cap_matches = list(_CAP_WORD_RE.finditer(text))
    i = 0
    while i < len(cap_matches):
        run = [cap_matches[i]]
        j = i + 1
        while j < len(cap_matches) and text[run[-1].end(): cap_matches[j].start()].strip() == "" and cap_matches[j].start() - run[-1].end() <= 1:
            run.append(cap_matches[j])
            j += 1
        phrase = text[run[0].start(): run[-1].end()]
        at_sentence_start = bool(_SENTENCE_START_RE.search(text[: run[0].start()]))
        if not (len(run) == 1 and at_sentence_start):
            grounded = any(phrase in k or k in phrase for k in known)
            if not grounded:
                violations.append((phrase, phrase, "entity not in facts"))
        consumed.update(range(run[0].start(), run[-1].end()))
        i = j

    for m in _CODE_RE.finditer(text):
        if m.start() in consumed:
            continue
        if m.group() not in known:
            violations.append((m.group(), m.group(), "code not in facts"))

    return VerificationResult(ok=not violations, violations=tuple(violations))


# --- template generator -----------------------------------------------------


class _Builder:
    def __init__(self):
        self.parts: list[str] = []
        self.byte_len = 0
        self.spans: list[tuple[int, int, str]] = []

    def add(self, text: str) -> None:
        self.parts.append(text)
        self.byte_len += len(text.encode("utf-8"))

    def add_value(self, text: str, risky: bool) -> None:
        if risky and text:
            start = self.byte_len
            self.add(text)
            self.spans.append((start, self.byte_len, "risk"))
        else:
            self.add(text)

    def doc(self, ka: KnowledgeAreaId, generator: str = "template") -> SummaryDoc:
        return SummaryDoc(
            ka=ka,
            text="".join(self.parts),
            highlights=tuple(self.spans),
            verified=True,
            generator=generator,
        )


def _facts_by_key(view: KnowledgeAreaView) -> dict[str, Fact]:
    return {f.fact_id.split(".", 1)[1]: f for f in view.facts}


def generate_template(view: KnowledgeAreaView, report: RiskReport) -> SummaryDoc:
    """Deterministic per-area sentences filled from the fact table.

    Values of attributed variables carry risk spans when the area is
    flagged; verified by construction.
    """
    facts = _facts_by_key(view)
    risky_vars = {n for n, _ in report.attributed_variables} if report.flagged else set()

    def val(key: str) -> str:
        return format_fact_value(facts[key])

    def risky(*names: str) -> bool:
        return any(n in risky_vars for n in names)

    b = _Builder()
    ka_id = view.ka.id

    if ka_id == "alerted_person":
        b.add_value(val("person_name"), False)
        b.add(" is ")
        b.add_value(val("age"), risky("age"))
        b.add(" years old, lives in ")
        b.add_value(val("person_country"), False)
        b.add(", and opened the account on ")
        b.add_value(val("account_opened"), False)
        b.add(" (")
        b.add_value(val("account_age_days"), risky("account_age_days"))
        b.add(" days ago). The person has ")
        b.add_value(val("past_alert_count"), risky("past_alert_count"))
        b.add(" past alerts and ")
        b.add_value(val("past_confirmed_fraud_count"), risky("past_confirmed_fraud_count"))
        b.add(" previously confirmed fraudulent transactions.")
    elif ka_id == "location":
        b.add("The current transaction took place in ")
        b.add_value(val("current_city"), False)
        b.add(", ")
        b.add_value(val("current_country"), risky("is_new_country"))
        b.add(".")
        if facts["is_new_country"].value:
            b.add(" This is the first transaction in this country for this person.")
        if facts["is_new_city"].value:
            b.add(" The city has not been seen before.")
        if "insufficient_history" in facts:
            b.add(" There is insufficient recent history for this area.")
        else:
            b.add(" Recent activity spans ")
            b.add_value(val("distinct_countries_90d"), risky("distinct_countries_90d"))
            b.add(" distinct countries.")
    elif ka_id == "flow_balance":
        b.add("Over the recent window the account received ")
        b.add_value(val("total_in_90d"), risky("total_in_90d"))
        b.add(" ")
        b.add(val("currency"))
        b.add(" and sent ")
        b.add_value(val("total_out_90d"), risky("total_out_90d"))
        b.add(" ")
        b.add(val("currency"))
        b.add(", a net flow of ")
        b.add_value(val("net_flow_90d"), risky("net_flow_90d"))
        b.add(" ")
        b.add(val("currency"))
        b.add(" across ")
        b.add_value(val("distinct_counterparties_90d"), risky("distinct_counterparties_90d"))
        b.add(" counterparties.")
        if "insufficient_history" in facts:
            b.add(" No outgoing transactions appear in the recent window.")
        else:
            b.add(" The incoming to outgoing ratio is ")
            b.add_value(val("in_out_ratio_90d"), risky("in_out_ratio_90d"))
            b.add(".")
    elif ka_id == "card":
        if "entry_mode" in facts:
            b.add("The transaction used card entry mode ")
            b.add_value(val("entry_mode"), risky("entry_mode_rarity"))
            b.add(", and this card was used ")
            b.add_value(val("card_txn_count"), risky("card_txn_count"))
            b.add(" times before by this person.")
            if facts["is_new_card"].value:
                b.add_value(" The card has not been seen in this person's history.", risky("is_new_card"))
        else:
            b.add("No card is involved in this transaction.")
        if "insufficient_history" in facts:
            b.add(" There is insufficient card history for this area.")
    elif ka_id == "counterpart":
        b.add("The counterpart is ")
        b.add_value(val("counterpart_name"), risky("is_new_counterpart"))
        b.add(" from ")
        b.add_value(val("counterpart_country"), risky("counterpart_country_matches_person"))
        b.add(", seen ")
        b.add_value(val("counterpart_txn_count"), risky("counterpart_txn_count"))
        b.add(" times in this person's history.")
        if facts["is_new_counterpart"].value:
            b.add(" This is a first-time counterpart.")
    elif ka_id == "activity":
        b.add("The current amount is ")
        b.add_value(val("current_amount"), risky("amount_zscore"))
        b.add(" ")
        b.add(facts["current_amount"].unit or "")
        b.add(" on ")
        b.add_value(val("current_date"), False)
        b.add(".")
        if "insufficient_history" in facts:
            b.add(" There is insufficient recent history for this area.")
        else:
            b.add(" Recent history holds ")
            b.add_value(val("txn_count_90d"), risky("txn_count_90d"))
            b.add(" transactions with a mean of ")
            b.add_value(val("mean_amount_90d"), risky("mean_amount_90d"))
            b.add(" and a maximum of ")
            b.add_value(val("max_amount_90d"), risky("max_amount_90d"))
            b.add(". The amount sits ")
            b.add_value(val("amount_zscore"), risky("amount_zscore"))
            b.add(" standard deviations from the recent mean, ")
            b.add_value(val("hours_since_last_txn"), risky("hours_since_last_txn"))
            b.add(" hours after the previous transaction.")
    else:
        b.add("This area has ")
        b.add_value(val("row_count"), False)
        b.add(" rows available for review.")

    if report.blocklist_justified:
        b.add(" An active blocklist entry names this area as a justification.")

    return b.doc(view.ka)


def _sentinel(ka: KnowledgeAreaId) -> SummaryDoc:
    return SummaryDoc(ka=ka, text=SENTINEL_TEXT, highlights=(), verified=False, generator="unavailable")


def summarize(
    view: KnowledgeAreaView,
    report: RiskReport,
    mode: str = "template_only",
    client: Optional[LlmCallable] = None,
    token_budget: int = DEFAULT_TOKEN_BUDGET,
) -> SummaryDoc:
    """Produce a verified summary.

    llm_with_fallback: transport failure falls back to the template
    generator; a verification failure yields the sentinel document.
    """
    if mode not in ("llm_with_fallback", "template_only"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "template_only" or client is None:
        return generate_template(view, report)

    prompt = build_prompt(view, report)
    try:
        raw = generate_llm(prompt, client, token_budget=token_budget)
    except GenerationUnavailable:
        return generate_template(view, report)

    text, highlights = finalize_markers(raw)
    verdict = detect_hallucinations(text, list(view.facts))
    if not verdict.ok:
        return _sentinel(view.ka)
    return SummaryDoc(ka=view.ka, text=text, highlights=highlights, verified=True, generator="llm")
